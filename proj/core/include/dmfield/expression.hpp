#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dmf {

// Small arithmetic expression language used by the JSON descriptors.
//   + - * / ^, unary minus, sqrt exp log sin cos atan2 abs, constants pi and e.
// Variables are named by the caller (x1, x2, t, x, u, ...).
class Expr {
 public:
  Expr();
  static Expr parse(const std::string& text, const std::vector<std::string>& vars);
  static Expr constant(double v);

  double operator()(const double* vals) const;
  double eval(std::initializer_list<double> vals) const { return (*this)(vals.begin()); }

  Expr derivative(int var) const;

  bool is_constant() const;
  double constant_value() const;
  const std::string& text() const { return text_; }
  int arity() const { return nvars_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  int nvars_ = 0;
  std::string text_;
};

}  // namespace dmf
