#pragma once

// Shared helpers for the sectioned plain-text input formats.

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace aquanet::detail {

struct Record {
  std::size_t line = 0;
  std::string section;
  std::vector<std::string> fields;
};

// Splits `text` into records grouped under bracketed section headers.
// '#' starts a comment; blank lines are skipped. Throws Error(Parse) for a
// record outside any section or an unknown header.
std::vector<Record> read_sections(std::string_view text,
                                  std::initializer_list<std::string_view> known_sections,
                                  std::string_view file_kind);

std::vector<std::string> split_whitespace(std::string_view line);
std::vector<std::string> split_csv(std::string_view line);
std::string_view trim(std::string_view s);

double parse_double(std::string_view token, std::size_t line, std::string_view what);
long long parse_integer(std::string_view token, std::size_t line, std::string_view what);

// Shortest text that round-trips to the same double (17 significant digits).
std::string format_double(double value);

[[noreturn]] void throw_parse(std::size_t line, const std::string& message,
                              std::string element = {});

}  // namespace aquanet::detail
