#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sidkit {

// Raised when input data (corpus files, lexicons, prediction TSVs, model
// files) cannot be parsed. Contract violations in library calls use
// std::invalid_argument instead; the CLI maps ParseError to exit code 1 and
// contract errors to exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line == 0 ? message
                                     : message + " (line " +
                                           std::to_string(line) + ")"),
        line_(line) {}

  // 1-based line number in the offending input, 0 when unknown.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sidkit
