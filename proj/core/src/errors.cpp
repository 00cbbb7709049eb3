#include "aquanet/errors.hpp"

#include <utility>

namespace aquanet {

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::Hydraulics: return "hydraulics";
    case ErrorCategory::Grid: return "grid";
    case ErrorCategory::Cfl: return "cfl";
    case ErrorCategory::MassBalance: return "mass-balance";
    case ErrorCategory::Solver: return "solver";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Usage: return "usage";
  }
  return "unknown";
}

Error::Error(ErrorCategory category, const std::string& message, std::string element)
    : std::runtime_error(message), category_(category), element_(std::move(element)) {}

}  // namespace aquanet
