#include "holod/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

namespace holod {

struct Expression::Node {
  enum class Kind { Constant, Var1, Var2, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos };
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const Node> left;
  std::shared_ptr<const Node> right;

  double eval(double x1, double x2) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::Var1: return x1;
      case Kind::Var2: return x2;
      case Kind::Neg: return -left->eval(x1, x2);
      case Kind::Add: return left->eval(x1, x2) + right->eval(x1, x2);
      case Kind::Sub: return left->eval(x1, x2) - right->eval(x1, x2);
      case Kind::Mul: return left->eval(x1, x2) * right->eval(x1, x2);
      case Kind::Div: return left->eval(x1, x2) / right->eval(x1, x2);
      case Kind::Pow: return std::pow(left->eval(x1, x2), right->eval(x1, x2));
      case Kind::Sin: return std::sin(left->eval(x1, x2));
      case Kind::Cos: return std::cos(left->eval(x1, x2));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node::Kind kind, NodePtr left = nullptr,
                  NodePtr right = nullptr, double value = 0.0) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->value = value;
  node->left = std::move(left);
  node->right = std::move(right);
  return node;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr run() {
    NodePtr root = parse_expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression error at position " + std::to_string(pos_) +
                      ": " + what + " in '" + src_ + "'");
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr node = parse_term();
    for (;;) {
      if (consume('+')) {
        node = make_node(Node::Kind::Add, node, parse_term());
      } else if (consume('-')) {
        node = make_node(Node::Kind::Sub, node, parse_term());
      } else {
        return node;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr node = parse_factor();
    for (;;) {
      if (consume('*')) {
        node = make_node(Node::Kind::Mul, node, parse_factor());
      } else if (consume('/')) {
        node = make_node(Node::Kind::Div, node, parse_factor());
      } else {
        return node;
      }
    }
  }

  NodePtr parse_factor() {
    if (consume('-')) {
      return make_node(Node::Kind::Neg, parse_factor());
    }
    NodePtr base = parse_primary();
    if (consume('^')) {
      // right-associative: a^b^c = a^(b^c)
      return make_node(Node::Kind::Pow, base, parse_factor());
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_identifier();
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<size_t>(end - begin);
    return make_node(Node::Kind::Constant, nullptr, nullptr, value);
  }

  NodePtr parse_identifier() {
    const size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])))) {
      ++pos_;
    }
    const std::string name = src_.substr(start, pos_ - start);
    if (name == "x1") return make_node(Node::Kind::Var1);
    if (name == "x2") return make_node(Node::Kind::Var2);
    if (name == "sin" || name == "cos") {
      if (!consume('(')) fail("expected '(' after " + name);
      NodePtr arg = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return make_node(name == "sin" ? Node::Kind::Sin : Node::Kind::Cos, arg);
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  const std::string& src_;
  size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& source) {
  Parser parser(source);
  return Expression(parser.run(), source);
}

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

double Expression::operator()(double x1, double x2) const {
  return root_->eval(x1, x2);
}

}  // namespace holod
