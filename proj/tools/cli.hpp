#pragma once

#include <iosfwd>

namespace aquanet::cli {

// Subcommands: simulate, compare, grid-info, validate. Returns the process
// exit status; errors are reported on `err` with their category.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Exit status for each error category; 0 is success.
int exit_code_for(int category_index) noexcept;

}  // namespace aquanet::cli
