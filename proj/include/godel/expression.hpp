#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace godel {

/// Immutable expression tree over the single variable `r`.
///
/// Grammar: sums, products, quotients, `^` (right associative), unary sign,
/// numeric literals, the constants `pi` and `e`, and the functions
/// sin cos tan sinh cosh tanh exp ln log sqrt abs.
class Expression {
 public:
  struct Node;

  Expression();  // the constant 0
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  /// Value with exact first and second derivatives (forward-mode jets).
  struct Jet {
    double value = 0.0, d1 = 0.0, d2 = 0.0;
  };

  double operator()(double r) const;
  Jet jet(double r) const;
  const std::string& source() const { return source_; }

 private:
  Expression(std::shared_ptr<const Node> root, std::string source);

  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace godel
