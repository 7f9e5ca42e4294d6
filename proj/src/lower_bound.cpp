#include "tikreg/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tikreg/errors.hpp"
#include "tikreg/numeric.hpp"
#include "tikreg/rng.hpp"

namespace tikreg {

std::string to_string(VarianceConvention convention) {
  return convention == VarianceConvention::matched ? "matched" : "printed";
}

std::size_t transition_index(const SequenceProblem& problem) {
  const auto& ball = problem.ball();
  const double eps = problem.epsilon();
  if (!(eps > 0.0)) throw NoTransitionError("no transition index at epsilon = 0");
  std::size_t limit = 10 * problem.size();
  if (const auto len = defined_length(problem.spectrum())) limit = std::min(limit, *len);
  if (const auto len = problem.noise().defined_length()) limit = std::min(limit, *len);
  const double log_scale = 2.0 * std::log(eps) - std::log(2.0 * ball.r * ball.P0);
  for (std::size_t j = 1; j <= limit; ++j) {
    const double lhs = 2.0 * log_abs_eigenvalue(problem.spectrum(), j);
    const double rhs =
        log_scale + 2.0 * std::log(problem.sigma(j)) + (2.0 * ball.r + 1.0) * std::log(static_cast<double>(j));
    if (lhs <= rhs) return j;
  }
  throw NoTransitionError("no transition index within j <= " + std::to_string(limit));
}

WorstCasePrior build_prior(const SequenceProblem& problem, double delta, double delta1,
                           VarianceConvention convention) {
  const auto& ball = problem.ball();
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in (0, 1)");
  if (!(delta1 > 0.0 && delta1 < ball.P0)) throw PreconditionError("delta1 must lie in (0, P0)");

  WorstCasePrior prior;
  prior.delta = delta;
  prior.delta1 = delta1;
  prior.r = ball.r;
  prior.P0 = ball.P0;
  prior.convention = convention;
  prior.k_eps = transition_index(problem);
  const double k = static_cast<double>(prior.k_eps);
  prior.l1 = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(delta * k)));
  prior.l2 = static_cast<std::size_t>(std::floor(k / delta));

  const double two_r = 2.0 * ball.r;
  const double scale = convention == VarianceConvention::matched ? two_r * (ball.P0 - delta1)
                                                                 : (ball.P0 - delta1) / two_r;
  prior.variances.assign(prior.l2, 0.0);
  for (std::size_t j = prior.l1; j <= prior.l2; ++j)
    prior.variances[j - 1] = scale * std::pow(static_cast<double>(j), -two_r - 1.0);
  return prior;
}

Signal sample_prior(const WorstCasePrior& prior, std::uint64_t seed, std::uint64_t replication) {
  const NormalField field(seed, StreamDomain::prior_sample);
  Signal eta{std::vector<double>(prior.l2)};
  field.fill(replication, eta.coeffs);
  for (std::size_t j = 1; j <= prior.l2; ++j) {
    const double v = prior.variances[j - 1];
    eta.coeffs[j - 1] = v > 0.0 ? std::sqrt(v) * eta.coeffs[j - 1] : 0.0;
  }
  return eta;
}

ProbabilityEstimate exclusion_probability(const WorstCasePrior& prior, const BesovBall& ball,
                                          std::size_t n_samples, std::uint64_t seed, unsigned threads) {
  if (n_samples < 1) throw PreconditionError("exclusion_probability needs n_samples >= 1");
  std::vector<unsigned char> outside(n_samples, 0);
  parallel_for(n_samples, threads, [&](std::size_t s) {
    outside[s] = besov_seminorm(sample_prior(prior, seed, s), ball.r) > ball.P0 ? 1 : 0;
  });
  ProbabilityEstimate out;
  out.samples = n_samples;
  for (unsigned char o : outside) out.hits += o;
  const double n = static_cast<double>(n_samples);
  out.estimate = static_cast<double>(out.hits) / n;
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
  return out;
}

double hkz_threshold(const TailBoundInput& input) {
  if (!(input.t > 0.0)) throw PreconditionError("tail parameter t must be > 0");
  CompensatedSum tr, tr2;
  double norm = 0.0;
  for (double s : input.sigma_diag) {
    if (s < 0.0) throw PreconditionError("sigma_diag entries must be >= 0");
    tr.add(s);
    tr2.add(s * s);
    norm = std::max(norm, s);
  }
  return tr.value() + 2.0 * std::sqrt(tr2.value() * input.t) + 2.0 * norm * input.t;
}

ExclusionBound hkz_exclusion_bound(const WorstCasePrior& prior, const BesovBall& ball) {
  ExclusionBound out;
  out.t = std::sqrt(static_cast<double>(prior.k_eps));
  out.closed_form = union_bound_closed_form(prior.delta, prior.k_eps);
  const std::size_t l1 = prior.l1, l2 = prior.l2;
  if (l2 < l1) return out;

  // suffix sums of Var_j and Var_j^2, suffix max of Var_j
  const std::size_t m = l2 - l1 + 1;
  std::vector<double> s1(m + 1, 0.0), s2(m + 1, 0.0), smax(m + 1, 0.0);
  for (std::size_t off = m; off-- > 0;) {
    const double v = prior.variances[l1 + off - 1];
    s1[off] = s1[off + 1] + v;
    s2[off] = s2[off + 1] + v * v;
    smax[off] = std::max(smax[off + 1], v);
  }

  CompensatedSum sum, sum_opt;
  out.rows.reserve(m);
  for (std::size_t off = 0; off < m; ++off) {
    IndexTailBound row;
    row.i = l1 + off;
    const double scale = std::pow(static_cast<double>(row.i), 2.0 * prior.r);
    const double tr = scale * s1[off];
    const double tr2 = scale * scale * s2[off];
    const double norm = scale * smax[off];
    row.trace = tr;
    row.threshold = tr + 2.0 * std::sqrt(tr2 * out.t) + 2.0 * norm * out.t;
    row.vacuous = row.threshold > ball.P0;
    row.bound = row.vacuous ? 1.0 : std::exp(-out.t);
    if (tr >= ball.P0) {
      row.optimal_bound = 1.0;
    } else if (norm == 0.0) {
      row.optimal_bound = 0.0;
    } else {
      // 2 norm s^2 + 2 sqrt(tr2) s + (tr - P0) = 0 with s = sqrt(t)
      const double b = std::sqrt(tr2);
      const double s = (-b + std::sqrt(b * b + 2.0 * norm * (ball.P0 - tr))) / (2.0 * norm);
      row.optimal_bound = std::min(1.0, std::exp(-s * s));
    }
    if (row.vacuous) ++out.vacuous_count;
    sum.add(row.bound);
    sum_opt.add(row.optimal_bound);
    out.rows.push_back(row);
  }
  out.sum_bound = sum.value();
  out.sum_optimal_bound = sum_opt.value();
  return out;
}

double union_bound_closed_form(double delta, std::size_t k_eps) {
  const double k = static_cast<double>(k_eps);
  return k / delta * std::exp(-std::sqrt(k));
}

double gaussian_bayes_risk_term(double variance, double a, double sigma, double epsilon) {
  const double noise = epsilon * epsilon * sigma * sigma;
  if (variance == 0.0) return 0.0;
  return variance * noise / (a * a * variance + noise);
}

BayesRisk bayes_risk(const WorstCasePrior& prior, const SequenceProblem& problem) {
  const double eps = problem.epsilon();
  const double eps2 = eps * eps;
  const double scale = eps2 / (2.0 * prior.r * (prior.P0 - prior.delta1));
  CompensatedSum exact, asym;
  for (std::size_t j = prior.l1; j <= prior.l2; ++j) {
    const double a = problem.a(j);
    const double s = problem.sigma(j);
    exact.add(gaussian_bayes_risk_term(prior.variance(j), a, s, eps));
    asym.add(eps2 * s * s / (a * a + scale * s * s * std::pow(static_cast<double>(j), 2.0 * prior.r + 1.0)));
  }
  return {exact.value(), asym.value()};
}

double prior_expected_risk(const WorstCasePrior& prior, const SequenceProblem& problem,
                           const FilterWeights& weights) {
  if (weights.size() != problem.size()) throw DimensionError("weights length does not match problem N");
  if (problem.size() < prior.l2) throw DimensionError("filter does not cover the prior band");
  const double eps2 = problem.epsilon() * problem.epsilon();
  CompensatedSum sum;
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double lambda = weights.lambdas[j - 1];
    const double s = problem.sigma(j);
    const double shrink = 1.0 - problem.a(j) * lambda;
    sum.add(eps2 * lambda * lambda * s * s + shrink * shrink * prior.variance(j));
  }
  return sum.value();
}

McSummary outside_ball_bias(const WorstCasePrior& prior, const SequenceProblem& problem,
                            const FilterWeights& weights, std::size_t n_samples, std::uint64_t seed,
                            unsigned threads) {
  if (weights.size() != problem.size()) throw DimensionError("weights length does not match problem N");
  if (problem.size() < prior.l2) throw DimensionError("filter does not cover the prior band");
  if (n_samples < 2) throw PreconditionError("outside_ball_bias needs n_samples >= 2");
  std::vector<double> gains(prior.l2);
  for (std::size_t j = 1; j <= prior.l2; ++j) {
    const double shrink = 1.0 - problem.a(j) * weights.lambdas[j - 1];
    gains[j - 1] = shrink * shrink;
  }
  std::vector<double> values(n_samples, 0.0);
  parallel_for(n_samples, threads, [&](std::size_t s) {
    const auto eta = sample_prior(prior, seed, s);
    if (besov_seminorm(eta, prior.r) <= prior.P0) return;
    CompensatedSum bias;
    for (std::size_t j = 0; j < eta.size(); ++j) bias.add(gains[j] * eta.coeffs[j] * eta.coeffs[j]);
    values[s] = bias.value();
  });
  return summarize(values);
}

}  // namespace tikreg
