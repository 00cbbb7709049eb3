#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aquanet {

enum class ErrorCategory {
  Parse,
  Validation,
  Hydraulics,
  Grid,
  Cfl,
  MassBalance,
  Solver,
  Io,
  Usage,
};

std::string_view to_string(ErrorCategory category) noexcept;

// Every failure surfaced by the library carries a category and, where one
// exists, the id of the offending element.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message, std::string element = {});

  ErrorCategory category() const noexcept { return category_; }
  const std::string& element() const noexcept { return element_; }

 private:
  ErrorCategory category_;
  std::string element_;
};

}  // namespace aquanet
