#pragma once

// Lower-bound construction for the asymptotic minimax risk: a Gaussian prior
// concentrated on the band [delta k_eps, k_eps / delta] around the Tikhonov
// transition index, its Bayes risk, and the probability that prior draws
// leave the ball (bounded through the Hsu-Kakade-Zhang quadratic-form tail
// inequality).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tikreg/filters.hpp"
#include "tikreg/monte_carlo.hpp"
#include "tikreg/sequence_model.hpp"

namespace tikreg {

/// Smallest j with a_j^2 <= (2 r P0)^{-1} eps^2 sigma_j^2 j^{2r+1}, searched
/// up to 10 N. Throws NoTransitionError when there is no crossing.
std::size_t transition_index(const SequenceProblem& problem);

enum class VarianceConvention {
  /// Var[eta_j] = 2r (P0 - delta1) j^{-2r-1}: the prior whose Bayes risk
  /// reproduces the Tikhonov risk series with P0 replaced by P0 - delta1.
  matched,
  /// Var[eta_j] = (P0 - delta1) (2r)^{-1} j^{-2r-1}, the schedule as literally written.
  printed,
};

std::string to_string(VarianceConvention convention);

struct WorstCasePrior {
  double delta = 0.0;
  double delta1 = 0.0;
  double r = 1.0;
  double P0 = 1.0;
  VarianceConvention convention = VarianceConvention::matched;
  std::size_t k_eps = 0;
  std::size_t l1 = 0;
  std::size_t l2 = 0;
  /// Var[eta_j] for j = 1..l2 (zero below l1).
  std::vector<double> variances;

  double variance(std::size_t j) const { return (j >= 1 && j <= variances.size()) ? variances[j - 1] : 0.0; }
};

WorstCasePrior build_prior(const SequenceProblem& problem, double delta, double delta1,
                           VarianceConvention convention = VarianceConvention::matched);

/// Draw `replication` of eta ~ prior, as a signal of length l2.
Signal sample_prior(const WorstCasePrior& prior, std::uint64_t seed, std::uint64_t replication = 0);

struct ProbabilityEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

/// Monte Carlo frequency of besov_seminorm(eta, r) > P0.
ProbabilityEstimate exclusion_probability(const WorstCasePrior& prior, const BesovBall& ball,
                                          std::size_t n_samples, std::uint64_t seed, unsigned threads = 1);

struct TailBoundInput {
  std::vector<double> sigma_diag;
  double t = 1.0;
};

/// tr(S) + 2 sqrt(tr(S^2) t) + 2 ||S|| t for S = diag(sigma_diag); a Gaussian
/// quadratic form exceeds it with probability at most exp(-t).
double hkz_threshold(const TailBoundInput& input);

struct IndexTailBound {
  std::size_t i = 0;
  double trace = 0.0;
  double threshold = 0.0;
  bool vacuous = false;
  /// exp(-t) when threshold <= P0, otherwise the trivial bound 1.
  double bound = 1.0;
  /// exp(-t*) at the t* solving threshold(t*) = P0 (1 when tr >= P0).
  double optimal_bound = 1.0;
};

struct ExclusionBound {
  double t = 0.0;
  std::vector<IndexTailBound> rows;
  /// sum_i bound_i; includes 1 for every vacuous index.
  double sum_bound = 0.0;
  double sum_optimal_bound = 0.0;
  std::size_t vacuous_count = 0;
  /// delta^{-1} k_eps exp(-sqrt(k_eps)).
  double closed_form = 0.0;

  bool vacuous() const noexcept { return vacuous_count > 0; }
};

ExclusionBound hkz_exclusion_bound(const WorstCasePrior& prior, const BesovBall& ball);

double union_bound_closed_form(double delta, std::size_t k_eps);

/// Bayes risk of one Gaussian coordinate: var eps^2 s^2 / (a^2 var + eps^2 s^2).
double gaussian_bayes_risk_term(double variance, double a, double sigma, double epsilon);

struct BayesRisk {
  double exact = 0.0;
  /// eps^2 sum_{l1..l2} sigma_j^2 / (a_j^2 + (2 r (P0 - delta1))^{-1} eps^2 sigma_j^2 j^{2r+1})
  double asymptotic = 0.0;
};

BayesRisk bayes_risk(const WorstCasePrior& prior, const SequenceProblem& problem);

/// E_prior of the risk of a linear filter: variance + sum_j (1 - a_j lambda_j)^2 Var[eta_j].
/// The filter must cover the prior band (N >= l2).
double prior_expected_risk(const WorstCasePrior& prior, const SequenceProblem& problem,
                           const FilterWeights& weights);

/// Monte Carlo estimate of E_prior[ bias(w, eta) ; eta outside the ball ],
/// the correction separating the prior-averaged risk from the worst case.
McSummary outside_ball_bias(const WorstCasePrior& prior, const SequenceProblem& problem,
                            const FilterWeights& weights, std::size_t n_samples, std::uint64_t seed,
                            unsigned threads = 1);

}  // namespace tikreg
