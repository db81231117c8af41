#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dmf {

struct LadderOptions {
  double h0 = 0.125;
  double ratio = 0.5;  // h_{k+1} = ratio * h_k
  int rungs = 8;
  double order = 1.0;  // leading error order in h
  double order_step = 1.0;
  int max_columns = 4;
  double tol = 1e-6;  // converged when the last two extrapolants differ by < 10 * tol
};

struct LadderResult {
  std::vector<double> h;
  std::vector<double> raw;
  std::vector<std::vector<double>> tableau;  // tableau[k][j]
  double extrapolated = 0.0;
  double residual = 0.0;  // |last two extrapolants|
  bool converged = false;
  std::string diagnostic;
};

// Richardson extrapolation of samples (h_k, v_k) assuming
// v(h) = v0 + c1 h^p + c2 h^(p+step) + ...
LadderResult richardson(const std::vector<double>& h, const std::vector<double>& v, const LadderOptions& opt);

// Evaluates `f` on h_k = h0 * ratio^k and extrapolates.
LadderResult run_ladder(const std::function<double(double)>& f, const LadderOptions& opt);

std::vector<double> ladder_steps(const LadderOptions& opt);

// Linear weights c_k with extrapolated = sum c_k v_k (same tableau as richardson).
std::vector<double> richardson_weights(const std::vector<double>& h, const LadderOptions& opt);

}  // namespace dmf
