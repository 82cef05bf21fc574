#include "ds2/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "ds2/types.hpp"

namespace ds2 {

struct Expr::Node {
  enum Kind { num, var_x, var_y, var_r, var_r2, add, sub, mul, div, pow, neg, call } kind;
  double value = 0.0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodeP parse() {
    NodeP n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw InputError("expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodeP make(Expr::Node::Kind k, std::vector<NodeP> args, double v = 0.0, std::string fn = {}) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->args = std::move(args);
    n->value = v;
    n->fn = std::move(fn);
    return n;
  }

  NodeP sum() {
    NodeP lhs = product();
    for (;;) {
      if (eat('+'))
        lhs = make(Expr::Node::add, {lhs, product()});
      else if (eat('-'))
        lhs = make(Expr::Node::sub, {lhs, product()});
      else
        return lhs;
    }
  }
  NodeP product() {
    NodeP lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = make(Expr::Node::mul, {lhs, unary()});
      else if (eat('/'))
        lhs = make(Expr::Node::div, {lhs, unary()});
      else
        return lhs;
    }
  }
  NodeP unary() {
    if (eat('-')) return make(Expr::Node::neg, {unary()});
    if (eat('+')) return unary();
    return power();
  }
  NodeP power() {
    NodeP base = atom();
    if (eat('^')) return make(Expr::Node::pow, {base, unary()});  // right assoc
    return base;
  }
  NodeP atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodeP n = sum();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += size_t(end - begin);
      return make(Expr::Node::num, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t b = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id = s_.substr(b, pos_ - b);
      if (id == "x") return make(Expr::Node::var_x, {});
      if (id == "y") return make(Expr::Node::var_y, {});
      if (id == "r") return make(Expr::Node::var_r, {});
      if (id == "r2") return make(Expr::Node::var_r2, {});
      if (id == "pi") return make(Expr::Node::num, {}, kPi);
      static const char* fns[] = {"exp", "sqrt", "log", "sin", "cos", "tanh", "abs"};
      for (const char* f : fns)
        if (id == f) {
          if (!eat('(')) fail("expected '(' after " + id);
          NodeP arg = sum();
          if (!eat(')')) fail("missing ')'");
          return make(Expr::Node::call, {arg}, 0.0, id);
        }
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }
};

Dual eval_node(const Expr::Node& n, double x, double y) {
  using K = Expr::Node;
  switch (n.kind) {
    case K::num: return {n.value, 0.0, 0.0};
    case K::var_x: return {x, 1.0, 0.0};
    case K::var_y: return {y, 0.0, 1.0};
    case K::var_r: {
      double r = std::hypot(x, y);
      if (r == 0.0) return {0.0, 0.0, 0.0};
      return {r, x / r, y / r};
    }
    case K::var_r2: return {x * x + y * y, 2.0 * x, 2.0 * y};
    case K::neg: {
      Dual a = eval_node(*n.args[0], x, y);
      return {-a.v, -a.dx, -a.dy};
    }
    case K::call: {
      Dual a = eval_node(*n.args[0], x, y);
      double f, df;
      if (n.fn == "exp") {
        f = std::exp(a.v);
        df = f;
      } else if (n.fn == "sqrt") {
        f = std::sqrt(a.v);
        df = f == 0.0 ? 0.0 : 0.5 / f;
      } else if (n.fn == "log") {
        f = std::log(a.v);
        df = 1.0 / a.v;
      } else if (n.fn == "sin") {
        f = std::sin(a.v);
        df = std::cos(a.v);
      } else if (n.fn == "cos") {
        f = std::cos(a.v);
        df = -std::sin(a.v);
      } else if (n.fn == "tanh") {
        f = std::tanh(a.v);
        df = 1.0 - f * f;
      } else {
        f = std::abs(a.v);
        df = a.v < 0.0 ? -1.0 : 1.0;
      }
      return {f, df * a.dx, df * a.dy};
    }
    default: break;
  }
  Dual a = eval_node(*n.args[0], x, y);
  Dual b = eval_node(*n.args[1], x, y);
  switch (n.kind) {
    case K::add: return {a.v + b.v, a.dx + b.dx, a.dy + b.dy};
    case K::sub: return {a.v - b.v, a.dx - b.dx, a.dy - b.dy};
    case K::mul: return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
    case K::div: {
      double q = a.v / b.v;
      return {q, (a.dx - q * b.dx) / b.v, (a.dy - q * b.dy) / b.v};
    }
    case K::pow: {
      double p = std::pow(a.v, b.v);
      double da = b.v == 0.0 ? 0.0 : b.v * std::pow(a.v, b.v - 1.0);
      double db = (b.dx == 0.0 && b.dy == 0.0) || a.v <= 0.0 ? 0.0 : p * std::log(a.v);
      return {p, da * a.dx + db * b.dx, da * a.dy + db * b.dy};
    }
    default: break;
  }
  return {};
}

bool uses_xy(const Expr::Node& n) {
  if (n.kind == Expr::Node::var_x || n.kind == Expr::Node::var_y) return true;
  for (const auto& a : n.args)
    if (uses_xy(*a)) return true;
  return false;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double Expr::eval(double x, double y) const { return eval_node(*root_, x, y).v; }

Dual Expr::eval_dual(double x, double y) const { return eval_node(*root_, x, y); }

bool Expr::radial() const { return !uses_xy(*root_); }

}  // namespace ds2
