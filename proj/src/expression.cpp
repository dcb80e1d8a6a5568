#include "godel/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "godel/errors.hpp"

namespace godel {

struct Expression::Node {
  using Jet = Expression::Jet;

  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Fn { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Ln, Sqrt, Abs };

  Op op = Op::Const;
  Fn fn = Fn::Sin;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double r) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return r;
      case Op::Neg: return -lhs->eval(r);
      case Op::Add: return lhs->eval(r) + rhs->eval(r);
      case Op::Sub: return lhs->eval(r) - rhs->eval(r);
      case Op::Mul: return lhs->eval(r) * rhs->eval(r);
      case Op::Div: return lhs->eval(r) / rhs->eval(r);
      case Op::Pow: {
        const double exponent = rhs->eval(r);
        // small integer powers stay exact for negative bases
        if (exponent == 2.0) {
          const double b = lhs->eval(r);
          return b * b;
        }
        return std::pow(lhs->eval(r), exponent);
      }
      case Op::Call: {
        const double a = lhs->eval(r);
        switch (fn) {
          case Fn::Sin: return std::sin(a);
          case Fn::Cos: return std::cos(a);
          case Fn::Tan: return std::tan(a);
          case Fn::Sinh: return std::sinh(a);
          case Fn::Cosh: return std::cosh(a);
          case Fn::Tanh: return std::tanh(a);
          case Fn::Exp: return std::exp(a);
          case Fn::Ln: return std::log(a);
          case Fn::Sqrt: return std::sqrt(a);
          case Fn::Abs: return std::abs(a);
        }
      }
    }
    return 0.0;
  }

  Jet jet(double r) const {
    switch (op) {
      case Op::Const: return {value, 0.0, 0.0};
      case Op::Var: return {r, 1.0, 0.0};
      case Op::Neg: {
        const Jet a = lhs->jet(r);
        return {-a.value, -a.d1, -a.d2};
      }
      case Op::Add:
      case Op::Sub: {
        const Jet a = lhs->jet(r), b = rhs->jet(r);
        const double s = op == Op::Add ? 1.0 : -1.0;
        return {a.value + s * b.value, a.d1 + s * b.d1, a.d2 + s * b.d2};
      }
      case Op::Mul: {
        const Jet a = lhs->jet(r), b = rhs->jet(r);
        return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
                a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
      }
      case Op::Div: {
        const Jet a = lhs->jet(r), b = rhs->jet(r);
        const double q = a.value / b.value;
        const double q1 = (a.d1 - q * b.d1) / b.value;
        return {q, q1, (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.value};
      }
      case Op::Pow: {
        const Jet a = lhs->jet(r);
        if (rhs->op == Op::Const) {
          const double c = rhs->value;
          const double f = eval(r);
          const double f1 = c == 0.0 ? 0.0 : c * std::pow(a.value, c - 1.0);
          const double f2 = c == 0.0 || c == 1.0 ? 0.0 : c * (c - 1.0) * std::pow(a.value, c - 2.0);
          return chain(f, f1, f2, a);
        }
        // a^b = exp(b ln a)
        const Jet b = rhs->jet(r);
        const double la = std::log(a.value);
        const Jet l = chain(la, 1.0 / a.value, -1.0 / (a.value * a.value), a);
        const Jet e{b.value * l.value, b.d1 * l.value + b.value * l.d1,
                    b.d2 * l.value + 2.0 * b.d1 * l.d1 + b.value * l.d2};
        const double f = std::exp(e.value);
        return chain(f, f, f, e);
      }
      case Op::Call: {
        const Jet a = lhs->jet(r);
        const double x = a.value;
        switch (fn) {
          case Fn::Sin: return chain(std::sin(x), std::cos(x), -std::sin(x), a);
          case Fn::Cos: return chain(std::cos(x), -std::sin(x), -std::cos(x), a);
          case Fn::Tan: {
            const double t = std::tan(x);
            return chain(t, 1.0 + t * t, 2.0 * t * (1.0 + t * t), a);
          }
          case Fn::Sinh: return chain(std::sinh(x), std::cosh(x), std::sinh(x), a);
          case Fn::Cosh: return chain(std::cosh(x), std::sinh(x), std::cosh(x), a);
          case Fn::Tanh: {
            const double t = std::tanh(x);
            return chain(t, 1.0 - t * t, -2.0 * t * (1.0 - t * t), a);
          }
          case Fn::Exp: {
            const double e = std::exp(x);
            return chain(e, e, e, a);
          }
          case Fn::Ln: return chain(std::log(x), 1.0 / x, -1.0 / (x * x), a);
          case Fn::Sqrt: {
            const double s = std::sqrt(x);
            return chain(s, 0.5 / s, -0.25 / (s * x), a);
          }
          case Fn::Abs: return chain(std::abs(x), x < 0.0 ? -1.0 : 1.0, 0.0, a);
        }
      }
    }
    return {};
  }

  // f(a) given f, f', f'' at a.value
  static Jet chain(double f, double f1, double f2, const Jet& a) {
    return {f, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->op = Node::Op::Const;
  n->value = v;
  return n;
}

NodePtr make_binary(Node::Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression \"" << text_ << "\": " << what << " at column " << pos_ + 1;
    throw ParseError(os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr acc = parse_product();
    for (;;) {
      if (accept('+'))
        acc = make_binary(Node::Op::Add, acc, parse_product());
      else if (accept('-'))
        acc = make_binary(Node::Op::Sub, acc, parse_product());
      else
        return acc;
    }
  }

  NodePtr parse_product() {
    NodePtr acc = parse_unary();
    for (;;) {
      if (accept('*'))
        acc = make_binary(Node::Op::Mul, acc, parse_unary());
      else if (accept('/'))
        acc = make_binary(Node::Op::Div, acc, parse_unary());
      else
        return acc;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->op = Node::Op::Neg;
      n->lhs = parse_unary();
      return n;
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_binary(Node::Op::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const std::string tail(begin, text_.size() - pos_);
    const double v = std::strtod(tail.c_str(), &end);
    const auto consumed = static_cast<size_t>(end - tail.c_str());
    if (consumed == 0) fail("malformed number");
    pos_ += consumed;
    return make_const(v);
  }

  NodePtr parse_identifier() {
    const size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "r") {
      auto n = std::make_shared<Node>();
      n->op = Node::Op::Var;
      return n;
    }
    if (name == "pi") return make_const(std::numbers::pi);
    if (name == "e") return make_const(std::numbers::e);

    static const std::vector<std::pair<std::string, Node::Fn>> functions = {
        {"sin", Node::Fn::Sin},   {"cos", Node::Fn::Cos},   {"tan", Node::Fn::Tan},
        {"sinh", Node::Fn::Sinh}, {"cosh", Node::Fn::Cosh}, {"tanh", Node::Fn::Tanh},
        {"exp", Node::Fn::Exp},   {"ln", Node::Fn::Ln},     {"log", Node::Fn::Ln},
        {"sqrt", Node::Fn::Sqrt}, {"abs", Node::Fn::Abs}};
    for (const auto& [fname, fn] : functions) {
      if (fname != name) continue;
      if (!accept('(')) fail("expected '(' after " + name);
      auto n = std::make_shared<Node>();
      n->op = Node::Op::Call;
      n->fn = fn;
      n->lhs = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : Expression(make_const(0.0), "0") {}

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

Expression Expression::parse(std::string_view text) {
  return Expression(Parser(text).parse(), std::string(text));
}

Expression Expression::constant(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return Expression(make_const(value), os.str());
}

double Expression::operator()(double r) const { return root_->eval(r); }
Expression::Jet Expression::jet(double r) const { return root_->jet(r); }

}  // namespace godel
