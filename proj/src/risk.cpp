#include "tikreg/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tikreg/errors.hpp"
#include "tikreg/numeric.hpp"

namespace tikreg {

namespace {

void require_size(const SequenceProblem& problem, std::size_t n, const char* what) {
  if (n != problem.size())
    throw DimensionError(std::string(what) + " length " + std::to_string(n) +
                         " does not match problem N = " + std::to_string(problem.size()));
}

// Prefix range-add / prefix range-min over slacks, lazily propagated.
class SlackTree {
 public:
  explicit SlackTree(const std::vector<double>& init) : n_(init.size()), min_(4 * n_), lazy_(4 * n_, 0.0) {
    build(1, 0, n_ - 1, init);
  }

  // min over [0, hi]
  double prefix_min(std::size_t hi) { return query(1, 0, n_ - 1, hi); }
  // add delta on [0, hi]
  void prefix_add(std::size_t hi, double delta) { update(1, 0, n_ - 1, hi, delta); }

 private:
  void build(std::size_t node, std::size_t lo, std::size_t hi, const std::vector<double>& init) {
    if (lo == hi) {
      min_[node] = init[lo];
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    build(2 * node, lo, mid, init);
    build(2 * node + 1, mid + 1, hi, init);
    min_[node] = std::min(min_[2 * node], min_[2 * node + 1]);
  }

  void push(std::size_t node) {
    if (lazy_[node] != 0.0) {
      for (std::size_t c : {2 * node, 2 * node + 1}) {
        min_[c] += lazy_[node];
        lazy_[c] += lazy_[node];
      }
      lazy_[node] = 0.0;
    }
  }

  double query(std::size_t node, std::size_t lo, std::size_t hi, std::size_t q) {
    if (hi <= q) return min_[node];
    push(node);
    const std::size_t mid = lo + (hi - lo) / 2;
    double best = query(2 * node, lo, mid, q);
    if (q > mid) best = std::min(best, query(2 * node + 1, mid + 1, hi, q));
    return best;
  }

  void update(std::size_t node, std::size_t lo, std::size_t hi, std::size_t q, double delta) {
    if (hi <= q) {
      min_[node] += delta;
      lazy_[node] += delta;
      return;
    }
    push(node);
    const std::size_t mid = lo + (hi - lo) / 2;
    update(2 * node, lo, mid, q, delta);
    if (q > mid) update(2 * node + 1, mid + 1, hi, q, delta);
    min_[node] = std::min(min_[2 * node], min_[2 * node + 1]);
  }

  std::size_t n_;
  std::vector<double> min_;
  std::vector<double> lazy_;
};

}  // namespace

RiskDecomposition filter_risk_at_signal(const SequenceProblem& problem, const FilterWeights& weights,
                                        const Signal& signal) {
  require_size(problem, weights.size(), "weights");
  require_size(problem, signal.size(), "signal");
  const double eps2 = problem.epsilon() * problem.epsilon();
  RiskDecomposition out;
  out.per_index.resize(problem.size());
  CompensatedSum var_sum, bias_sum;
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double lambda = weights.lambdas[j - 1];
    const double s = problem.sigma(j);
    const double shrink = 1.0 - problem.a(j) * lambda;
    const double x = signal.coeffs[j - 1];
    IndexRisk term{eps2 * lambda * lambda * s * s, shrink * shrink * x * x};
    out.per_index[j - 1] = term;
    var_sum.add(term.variance);
    bias_sum.add(term.bias);
  }
  out.variance = var_sum.value();
  out.bias = bias_sum.value();
  out.total = out.variance + out.bias;
  return out;
}

std::vector<double> nested_suffix_lp(const std::vector<double>& gains, const std::vector<double>& capacities) {
  const std::size_t m = gains.size();
  if (capacities.size() != m) throw DimensionError("gains and capacities differ in length");
  std::vector<double> v(m, 0.0);
  if (m == 0) return v;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(capacities[k] >= 0.0)) throw PreconditionError("capacities must be >= 0");
    if (k > 0 && capacities[k] > capacities[k - 1])
      throw PreconditionError("capacities must be nonincreasing");
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return gains[i] > gains[j]; });

  SlackTree slack(capacities);
  for (std::size_t idx : order) {
    if (!(gains[idx] > 0.0)) break;
    const double room = std::max(0.0, slack.prefix_min(idx));
    if (room <= 0.0) continue;
    v[idx] = room;
    slack.prefix_add(idx, -room);
  }
  return v;
}

SupRiskResult sup_risk_over_ball(const SequenceProblem& problem, const FilterWeights& weights) {
  require_size(problem, weights.size(), "weights");
  const std::size_t n = problem.size();
  const auto& ball = problem.ball();
  const double eps2 = problem.epsilon() * problem.epsilon();

  // Index n (0-based) is the tail bucket: gain 1 since the filter returns 0 there.
  std::vector<double> gains(n + 1), caps(n + 1);
  CompensatedSum var_sum;
  for (std::size_t j = 1; j <= n; ++j) {
    const double lambda = weights.lambdas[j - 1];
    const double shrink = 1.0 - problem.a(j) * lambda;
    const double s = problem.sigma(j);
    gains[j - 1] = shrink * shrink;
    var_sum.add(eps2 * lambda * lambda * s * s);
  }
  gains[n] = 1.0;
  for (std::size_t k = 1; k <= n + 1; ++k) caps[k - 1] = ball.P0 * std::pow(static_cast<double>(k), -2.0 * ball.r);

  const auto v = nested_suffix_lp(gains, caps);

  SupRiskResult out;
  out.variance = var_sum.value();
  out.maximizer_v.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  out.maximizer_u.resize(n);
  out.suffix_binding.resize(n);
  CompensatedSum bias_sum;
  for (std::size_t j = 1; j <= n; ++j) bias_sum.add(gains[j - 1] * v[j - 1]);
  out.bias = bias_sum.value();
  out.tail_bias = v[n];

  const double tight_tol = 1e-12;
  CompensatedSum suffix;
  suffix.add(v[n]);
  out.tail_binding = v[n] >= caps[n] * (1.0 - tight_tol);
  for (std::size_t k = n; k >= 1; --k) {
    suffix.add(v[k - 1]);
    const double u = std::pow(static_cast<double>(k), 2.0 * ball.r) * suffix.value();
    out.maximizer_u[k - 1] = u;
    out.suffix_binding[k - 1] = u >= ball.P0 * (1.0 - tight_tol);
  }
  out.value = out.variance + out.bias + out.tail_bias;
  return out;
}

MinimaxLinearRisk minimax_linear_risk(const SequenceProblem& problem) {
  const double eps2 = problem.epsilon() * problem.epsilon();
  const auto& ball = problem.ball();
  CompensatedSum sum;
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double theta2 = boundary_coefficient_sq(ball, j);
    const double a = problem.a(j);
    const double s2 = problem.sigma(j) * problem.sigma(j);
    const double denom = theta2 * a * a + eps2 * s2;
    // eps = 0 makes the filter exact and the term vanish
    sum.add(denom > 0.0 ? eps2 * theta2 * s2 / denom : 0.0);
  }
  MinimaxLinearRisk out;
  out.in_band = sum.value();
  out.truncation_tail = ball.P0 * std::pow(static_cast<double>(problem.size() + 1), -2.0 * ball.r);
  out.total = out.in_band + out.truncation_tail;
  return out;
}

double minimax_linear_risk_backward_reading(const SequenceProblem& problem) {
  const double eps2 = problem.epsilon() * problem.epsilon();
  const auto& ball = problem.ball();
  CompensatedSum sum;
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double a = problem.a(j);
    const double s2 = problem.sigma(j) * problem.sigma(j);
    if (j == 1) {
      sum.add(eps2 * s2 / (a * a));
      continue;
    }
    const double x = static_cast<double>(j);
    const double theta2 = ball.P0 * (std::pow(x, -2.0 * ball.r) - std::pow(x - 1.0, -2.0 * ball.r));
    sum.add(eps2 * theta2 * s2 / (theta2 * a * a + eps2 * s2));
  }
  return sum.value();
}

SeriesValue asymptotic_minimax_risk(const SequenceProblem& problem) {
  const auto& ball = problem.ball();
  const double eps2 = problem.epsilon() * problem.epsilon();
  const double scale = eps2 / (2.0 * ball.r * ball.P0);
  CompensatedSum sum;
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double a = problem.a(j);
    const double s2 = problem.sigma(j) * problem.sigma(j);
    const double denom = a * a + scale * s2 * std::pow(static_cast<double>(j), 2.0 * ball.r + 1.0);
    sum.add(eps2 * s2 / denom);
  }
  SeriesValue out;
  out.value = sum.value();
  out.terms = problem.size();
  out.tail_bound = ball.P0 * std::pow(static_cast<double>(problem.size()), -2.0 * ball.r);
  return out;
}

SeriesValue adaptive_asymptotic_minimax_risk(const OperatorSpectrum& spectrum, const NoiseProfile& noise,
                                             const BesovBall& ball, double rel_tol, std::size_t max_terms) {
  const std::size_t n = default_truncation(spectrum, noise, ball, rel_tol, max_terms);
  return asymptotic_minimax_risk(SequenceProblem(spectrum, noise, ball, n));
}

}  // namespace tikreg
