#pragma once

// Mean-squared-error of linear filters. A filter on a problem of size N is
// understood to estimate x_j by 0 for every j > N, and worst cases are taken
// over the full (untruncated) ball; the coefficients beyond N then enter
// only through their total energy, at most P0 (N+1)^{-2r}.

#include <cstddef>
#include <vector>

#include "tikreg/filters.hpp"
#include "tikreg/sequence_model.hpp"

namespace tikreg {

struct IndexRisk {
  double variance = 0.0;
  double bias = 0.0;
};

struct RiskDecomposition {
  double variance = 0.0;  // eps^2 sum lambda_j^2 sigma_j^2
  double bias = 0.0;      // sum (1 - a_j lambda_j)^2 x_j^2
  double total = 0.0;
  std::vector<IndexRisk> per_index;
};

RiskDecomposition filter_risk_at_signal(const SequenceProblem& problem, const FilterWeights& weights,
                                        const Signal& signal);

struct SupRiskResult {
  double value = 0.0;
  double variance = 0.0;
  /// Worst-case bias from coordinates 1..N.
  double bias = 0.0;
  /// Worst-case energy placed beyond N (the filter returns 0 there).
  double tail_bias = 0.0;
  /// Maximizing suffix budgets u_k = k^{2r} (sum_{j=k}^N v_j + tail), k = 1..N.
  std::vector<double> maximizer_u;
  /// Maximizing squared coefficients v_j = x_j^2, j = 1..N.
  std::vector<double> maximizer_v;
  /// Suffix constraint k is tight (u_k = P0).
  std::vector<bool> suffix_binding;
  /// Whether the tail constraint is tight.
  bool tail_binding = false;
};

/// Worst-case risk of a linear filter over the ball. The bias part is the
/// linear program max sum b_j v_j over v >= 0 with nested suffix constraints,
/// solved exactly by greedy allocation in decreasing b_j (the feasible set is
/// a polymatroid). O(N log N).
SupRiskResult sup_risk_over_ball(const SequenceProblem& problem, const FilterWeights& weights);

/// Greedy LP core, exposed for oracles: maximize sum gains_j v_j subject to
/// v >= 0 and sum_{j>=k} v_j <= capacity_k for every k. Capacities must be
/// nonincreasing. Returns the maximizing v.
std::vector<double> nested_suffix_lp(const std::vector<double>& gains,
                                     const std::vector<double>& capacities);

struct MinimaxLinearRisk {
  /// eps^2 sum_{j<=N} theta_j^2 sigma_j^2 / (theta_j^2 a_j^2 + eps^2 sigma_j^2)
  double in_band = 0.0;
  /// Energy of the worst-case signal beyond N, P0 (N+1)^{-2r}.
  double truncation_tail = 0.0;
  double total = 0.0;
};

MinimaxLinearRisk minimax_linear_risk(const SequenceProblem& problem);

/// The same sum with theta_j^2 = P0 (j^{-2r} - (j-1)^{-2r}), the alternative
/// index reading. The j = 1 term is its limit eps^2 sigma_1^2 / a_1^2.
/// Provided for auditing only; the terms are not risks.
double minimax_linear_risk_backward_reading(const SequenceProblem& problem);

struct SeriesValue {
  double value = 0.0;
  /// Upper bound on the neglected terms j > terms.
  double tail_bound = 0.0;
  std::size_t terms = 0;
};

/// eps^2 sum_{j<=N} sigma_j^2 / (a_j^2 + (2 r P0)^{-1} eps^2 sigma_j^2 j^{2r+1}).
SeriesValue asymptotic_minimax_risk(const SequenceProblem& problem);

/// Same series with N grown until P0 N^{-2r} <= rel_tol * partial sum.
SeriesValue adaptive_asymptotic_minimax_risk(const OperatorSpectrum& spectrum, const NoiseProfile& noise,
                                             const BesovBall& ball, double rel_tol = 1e-8,
                                             std::size_t max_terms = 100'000'000);

}  // namespace tikreg
