#include "dmfield/ladder.hpp"

#include <cmath>
#include <sstream>

namespace dmf {

namespace {

template <class T, class Combine>
std::vector<std::vector<T>> build_tableau(const std::vector<double>& h, std::vector<T> first, const LadderOptions& opt,
                                          Combine combine) {
  std::size_t n = first.size();
  std::vector<std::vector<T>> tab(n);
  for (std::size_t k = 0; k < n; ++k) {
    tab[k].push_back(first[k]);
    std::size_t cols = std::min<std::size_t>(k, static_cast<std::size_t>(opt.max_columns));
    for (std::size_t j = 1; j <= cols; ++j) {
      double p = opt.order + (j - 1) * opt.order_step;
      double rho = h[k - 1] / h[k];
      double denom = std::pow(rho, p) - 1.0;
      tab[k].push_back(combine(tab[k][j - 1], tab[k - 1][j - 1], denom));
    }
  }
  return tab;
}

}  // namespace

std::vector<double> ladder_steps(const LadderOptions& opt) {
  std::vector<double> h;
  double x = opt.h0;
  for (int k = 0; k < opt.rungs; ++k, x *= opt.ratio) h.push_back(x);
  return h;
}

LadderResult richardson(const std::vector<double>& h, const std::vector<double>& v, const LadderOptions& opt) {
  LadderResult r;
  r.h = h;
  r.raw = v;
  if (v.empty()) {
    r.diagnostic = "empty ladder";
    return r;
  }
  for (double x : v)
    if (!std::isfinite(x)) {
      r.diagnostic = "non-finite rung value";
      r.extrapolated = x;
      return r;
    }
  r.tableau = build_tableau<double>(h, v, opt, [](double a, double b, double denom) { return a + (a - b) / denom; });
  std::size_t K = v.size() - 1;
  if (K == 0) {
    r.extrapolated = v[0];
    r.diagnostic = "single rung";
    return r;
  }
  std::size_t m = std::min<std::size_t>(K - 1, static_cast<std::size_t>(opt.max_columns));
  r.extrapolated = r.tableau[K][m];
  r.residual = std::abs(r.tableau[K][m] - r.tableau[K - 1][m]);
  r.converged = r.residual < 10.0 * opt.tol;
  if (!r.converged) {
    std::ostringstream os;
    os << "ladder not Cauchy: last extrapolants differ by " << r.residual << " (target " << 10.0 * opt.tol << ")";
    r.diagnostic = os.str();
  }
  return r;
}

LadderResult run_ladder(const std::function<double(double)>& f, const LadderOptions& opt) {
  std::vector<double> h = ladder_steps(opt), v;
  for (double x : h) v.push_back(f(x));
  return richardson(h, v, opt);
}

std::vector<double> richardson_weights(const std::vector<double>& h, const LadderOptions& opt) {
  std::size_t n = h.size();
  if (n == 0) return {};
  std::vector<std::vector<double>> unit(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) unit[k][k] = 1.0;
  auto tab = build_tableau<std::vector<double>>(h, unit, opt, [](const auto& a, const auto& b, double denom) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + (a[i] - b[i]) / denom;
    return c;
  });
  std::size_t K = n - 1;
  if (K == 0) return tab[0][0];
  std::size_t m = std::min<std::size_t>(K - 1, static_cast<std::size_t>(opt.max_columns));
  return tab[K][m];
}

}  // namespace dmf
