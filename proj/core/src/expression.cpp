#include "dmfield/expression.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "dmfield/types.hpp"

namespace dmf {

using NodeP = std::shared_ptr<const Expr::Node>;

struct Expr::Node {
  enum Op { num, var, add, sub, mul, div, pow, neg, sqrt_, exp_, log_, sin_, cos_, atan2_, abs_, sign_ } op;
  double value = 0.0;
  int index = 0;
  NodeP a, b;
};

namespace {

using Node = Expr::Node;

NodeP num(double v) {
  auto n = std::make_shared<Node>();
  n->op = Node::num;
  n->value = v;
  return n;
}

bool is_num(const NodeP& n, double v) { return n->op == Node::num && n->value == v; }

NodeP unary(Node::Op op, NodeP a) {
  if (a->op == Node::num) {
    double x = a->value;
    switch (op) {
      case Node::neg: return num(-x);
      case Node::sqrt_: return num(std::sqrt(x));
      case Node::exp_: return num(std::exp(x));
      case Node::log_: return num(std::log(x));
      case Node::sin_: return num(std::sin(x));
      case Node::cos_: return num(std::cos(x));
      case Node::abs_: return num(std::abs(x));
      case Node::sign_: return num(x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0));
      default: break;
    }
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodeP binary(Node::Op op, NodeP a, NodeP b) {
  if (a->op == Node::num && b->op == Node::num) {
    double x = a->value, y = b->value;
    switch (op) {
      case Node::add: return num(x + y);
      case Node::sub: return num(x - y);
      case Node::mul: return num(x * y);
      case Node::div: return num(x / y);
      case Node::pow: return num(std::pow(x, y));
      case Node::atan2_: return num(std::atan2(x, y));
      default: break;
    }
  }
  switch (op) {
    case Node::add:
      if (is_num(a, 0)) return b;
      if (is_num(b, 0)) return a;
      break;
    case Node::sub:
      if (is_num(b, 0)) return a;
      if (is_num(a, 0)) return unary(Node::neg, b);
      break;
    case Node::mul:
      if (is_num(a, 0) || is_num(b, 0)) return num(0.0);
      if (is_num(a, 1)) return b;
      if (is_num(b, 1)) return a;
      break;
    case Node::div:
      if (is_num(a, 0)) return num(0.0);
      if (is_num(b, 1)) return a;
      break;
    case Node::pow:
      if (is_num(b, 0)) return num(1.0);
      if (is_num(b, 1)) return a;
      break;
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double eval(const Node& n, const double* v) {
  switch (n.op) {
    case Node::num: return n.value;
    case Node::var: return v[n.index];
    case Node::add: return eval(*n.a, v) + eval(*n.b, v);
    case Node::sub: return eval(*n.a, v) - eval(*n.b, v);
    case Node::mul: return eval(*n.a, v) * eval(*n.b, v);
    case Node::div: return eval(*n.a, v) / eval(*n.b, v);
    case Node::pow: {
      double base = eval(*n.a, v);
      if (n.b->op == Node::num) {
        double e = n.b->value;
        if (e == 2.0) return base * base;
        if (e == 3.0) return base * base * base;
      }
      return std::pow(base, eval(*n.b, v));
    }
    case Node::neg: return -eval(*n.a, v);
    case Node::sqrt_: return std::sqrt(eval(*n.a, v));
    case Node::exp_: return std::exp(eval(*n.a, v));
    case Node::log_: return std::log(eval(*n.a, v));
    case Node::sin_: return std::sin(eval(*n.a, v));
    case Node::cos_: return std::cos(eval(*n.a, v));
    case Node::atan2_: return std::atan2(eval(*n.a, v), eval(*n.b, v));
    case Node::abs_: return std::abs(eval(*n.a, v));
    case Node::sign_: {
      double x = eval(*n.a, v);
      return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    }
  }
  return 0.0;
}

NodeP diff(const NodeP& n, int k) {
  auto d = [k](const NodeP& m) { return diff(m, k); };
  switch (n->op) {
    case Node::num: return num(0.0);
    case Node::var: return num(n->index == k ? 1.0 : 0.0);
    case Node::add: return binary(Node::add, d(n->a), d(n->b));
    case Node::sub: return binary(Node::sub, d(n->a), d(n->b));
    case Node::mul:
      return binary(Node::add, binary(Node::mul, d(n->a), n->b), binary(Node::mul, n->a, d(n->b)));
    case Node::div:
      return binary(Node::div,
                    binary(Node::sub, binary(Node::mul, d(n->a), n->b), binary(Node::mul, n->a, d(n->b))),
                    binary(Node::mul, n->b, n->b));
    case Node::pow: {
      if (n->b->op == Node::num) {
        double e = n->b->value;
        return binary(Node::mul, binary(Node::mul, num(e), binary(Node::pow, n->a, num(e - 1.0))), d(n->a));
      }
      // u^v (v' log u + v u'/u)
      NodeP t1 = binary(Node::mul, d(n->b), unary(Node::log_, n->a));
      NodeP t2 = binary(Node::div, binary(Node::mul, n->b, d(n->a)), n->a);
      return binary(Node::mul, n, binary(Node::add, t1, t2));
    }
    case Node::neg: return unary(Node::neg, d(n->a));
    case Node::sqrt_: return binary(Node::div, d(n->a), binary(Node::mul, num(2.0), n));
    case Node::exp_: return binary(Node::mul, n, d(n->a));
    case Node::log_: return binary(Node::div, d(n->a), n->a);
    case Node::sin_: return binary(Node::mul, unary(Node::cos_, n->a), d(n->a));
    case Node::cos_: return unary(Node::neg, binary(Node::mul, unary(Node::sin_, n->a), d(n->a)));
    case Node::atan2_: {
      NodeP y = n->a, x = n->b;
      NodeP numr = binary(Node::sub, binary(Node::mul, x, d(y)), binary(Node::mul, y, d(x)));
      NodeP den = binary(Node::add, binary(Node::mul, x, x), binary(Node::mul, y, y));
      return binary(Node::div, numr, den);
    }
    case Node::abs_: return binary(Node::mul, unary(Node::sign_, n->a), d(n->a));
    case Node::sign_: return num(0.0);
  }
  return num(0.0);
}

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  NodeP parse() {
    NodeP n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    std::ostringstream os;
    os << "expression '" << s_ << "': " << what << " at column " << pos_ + 1;
    throw ConfigError(os.str());
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  NodeP expr() {
    NodeP n = term();
    for (;;) {
      if (accept('+')) n = binary(Node::add, n, term());
      else if (accept('-')) n = binary(Node::sub, n, term());
      else return n;
    }
  }
  NodeP term() {
    NodeP n = unary_expr();
    for (;;) {
      if (accept('*')) n = binary(Node::mul, n, unary_expr());
      else if (accept('/')) n = binary(Node::div, n, unary_expr());
      else return n;
    }
  }
  NodeP unary_expr() {
    if (accept('-')) return unary(Node::neg, unary_expr());
    if (accept('+')) return unary_expr();
    return power();
  }
  NodeP power() {
    NodeP base = primary();
    if (accept('^')) return binary(Node::pow, base, unary_expr());
    return base;
  }
  NodeP primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodeP n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (...) {
        fail("bad number");
      }
      pos_ += used;
      return num(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == id) {
          auto n = std::make_shared<Node>();
          n->op = Node::var;
          n->index = static_cast<int>(i);
          return n;
        }
      if (id == "pi") return num(kPi);
      if (id == "e") return num(std::exp(1.0));
      static const std::pair<const char*, Node::Op> funcs[] = {
          {"sqrt", Node::sqrt_}, {"exp", Node::exp_}, {"log", Node::log_}, {"sin", Node::sin_},
          {"cos", Node::cos_},   {"abs", Node::abs_}, {"atan2", Node::atan2_}};
      for (auto& [name, op] : funcs) {
        if (id != name) continue;
        if (!accept('(')) fail("expected '(' after " + id);
        NodeP a = expr();
        if (op == Node::atan2_) {
          if (!accept(',')) fail("atan2 takes two arguments");
          NodeP b = expr();
          if (!accept(')')) fail("expected ')'");
          return binary(op, a, b);
        }
        if (!accept(')')) fail("expected ')'");
        return unary(op, a);
      }
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : root_(num(0.0)), text_("0") {}

Expr Expr::parse(const std::string& text, const std::vector<std::string>& vars) {
  Expr e;
  e.root_ = Parser(text, vars).parse();
  e.nvars_ = static_cast<int>(vars.size());
  e.text_ = text;
  return e;
}

Expr Expr::constant(double v) {
  Expr e;
  e.root_ = num(v);
  std::ostringstream os;
  os.precision(17);
  os << v;
  e.text_ = os.str();
  return e;
}

double Expr::operator()(const double* vals) const { return dmf::eval(*root_, vals); }

Expr Expr::derivative(int var) const {
  Expr e;
  e.root_ = diff(root_, var);
  e.nvars_ = nvars_;
  e.text_ = "d(" + text_ + ")";
  return e;
}

bool Expr::is_constant() const { return root_->op == Node::num; }
double Expr::constant_value() const { return root_->value; }

}  // namespace dmf
