#pragma once

#include <stdexcept>
#include <string>

namespace ocpcert {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed document; line/column are 1-based, 0 when unknown.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ")"
                                    : what),
        line(line),
        column(column) {}
  int line;
  int column;
};

/// Well-formed input that violates a structural requirement.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Blow-up or a denominator that fell below its margin.
struct NumericalError : std::runtime_error {
  NumericalError(const std::string& what, int node = -1)
      : std::runtime_error(node >= 0 ? what + " at node " + std::to_string(node) : what),
        node(node) {}
  int node;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ocpcert
