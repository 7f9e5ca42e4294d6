#pragma once

// Test-only reference computations, deliberately independent of the library
// code paths they check.

#include <cmath>
#include <functional>
#include <vector>

namespace tikreg::oracle {

/// Maximizes sum_j gains[j] v_j over v >= 0 with sum_{i>=k} v_i <= caps[k]
/// by exhaustive search over suffix-sum levels. At an optimal vertex every
/// suffix sum equals 0 or some capacity caps[m] with m >= k, so searching all
/// nonincreasing assignments from that finite set is exact.
inline double nested_lp_by_enumeration(const std::vector<double>& gains, const std::vector<double>& caps) {
  const std::size_t m = gains.size();
  std::vector<double> s(m + 1, 0.0);  // s[m] = 0
  double best = -INFINITY;
  std::function<void(std::size_t)> rec = [&](std::size_t k1) {  // k1 = k + 1, fills s[k1 - 1]
    if (k1 == 0) {
      double obj = 0.0;
      for (std::size_t j = 0; j < m; ++j) obj += gains[j] * (s[j] - s[j + 1]);
      best = std::max(best, obj);
      return;
    }
    const std::size_t k = k1 - 1;
    std::vector<double> levels{0.0};
    for (std::size_t q = k; q < m; ++q) levels.push_back(caps[q]);
    for (double lvl : levels) {
      if (lvl < s[k + 1] || lvl > caps[k]) continue;
      s[k] = lvl;
      rec(k);
    }
  };
  rec(m);
  return best;
}

/// Same program by a plain grid over the suffix sums (two free coordinates).
inline double nested_lp_dense_grid_2(const std::vector<double>& gains, const std::vector<double>& caps, int steps) {
  double best = -INFINITY;
  for (int a = 0; a <= steps; ++a) {
    const double s2 = caps[1] * a / steps;
    for (int b = 0; b <= steps; ++b) {
      const double s1 = s2 + (caps[0] - s2) * b / steps;
      best = std::max(best, gains[0] * (s1 - s2) + gains[1] * s2);
    }
  }
  return best;
}

/// Direct evaluation of the mean squared error of x_hat_j = lambda_j y_j.
inline double linear_mse(const std::vector<double>& a, const std::vector<double>& sigma, double eps,
                         const std::vector<double>& lambda, const std::vector<double>& x) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double bias = lambda[j] * a[j] * x[j] - x[j];
    total += bias * bias + lambda[j] * lambda[j] * eps * eps * sigma[j] * sigma[j];
  }
  return total;
}

}  // namespace tikreg::oracle
