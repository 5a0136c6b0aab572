#pragma once

#include <memory>
#include <string>

#include "holod/errors.hpp"

namespace holod {

/// Minimal arithmetic expressions over the coordinates x1, x2 with
/// +, -, *, /, ^ (right-associative), sin, cos, parentheses, and decimal
/// literals; parsed by recursive descent. Used for user-supplied
/// right-hand sides.
class Expression {
 public:
  /// Throws ConfigError with a position on malformed input.
  static Expression parse(const std::string& source);

  double operator()(double x1, double x2) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string source);

  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace holod
