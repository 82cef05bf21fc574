#pragma once

#include <memory>
#include <string>

namespace ds2 {

// value and first partial derivatives in x and y
struct Dual {
  double v = 0.0, dx = 0.0, dy = 0.0;
};

// Small arithmetic expression language for custom amplitudes:
//   numbers, x, y, r (=sqrt(x^2+y^2)), r2 (=x^2+y^2), pi,
//   + - * / ^, unary minus, exp sqrt log sin cos tanh abs.
class Expr {
 public:
  static Expr parse(const std::string& text);
  double eval(double x, double y) const;
  Dual eval_dual(double x, double y) const;
  // true when the expression depends on (x, y) only through r or r2
  bool radial() const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace ds2
