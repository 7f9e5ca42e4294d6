#include "tikreg/filters.hpp"

#include <cmath>
#include <string>

#include "tikreg/errors.hpp"

namespace tikreg {

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::minimax_linear: return "minimax-linear";
    case FilterKind::tikhonov_asymptotic: return "tikhonov-asymptotic";
    case FilterKind::exact_inverse: return "exact-inverse";
    case FilterKind::custom: return "custom";
  }
  return "custom";
}

namespace {

// Shared shape of both filters: lambda_j = a_j / (a_j^2 + penalty_j).
// Explicit zeros are rejected at problem construction, so a zero here is an
// analytic eigenvalue that underflowed.
template <typename Penalty>
FilterWeights shrinkage_weights(const SequenceProblem& problem, FilterKind kind, Penalty penalty) {
  FilterWeights w{std::vector<double>(problem.size()), kind, {}};
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double a = problem.a(j);
    if (a == 0.0) {
      w.lambdas[j - 1] = 0.0;
      w.underflow_indices.push_back(j);
      continue;
    }
    w.lambdas[j - 1] = penalty(j, a);
  }
  return w;
}

}  // namespace

FilterWeights minimax_linear_weights(const SequenceProblem& problem) {
  const double eps2 = problem.epsilon() * problem.epsilon();
  return shrinkage_weights(problem, FilterKind::minimax_linear, [&](std::size_t j, double a) {
    const double theta2 = boundary_coefficient_sq(problem.ball(), j);
    const double s = problem.sigma(j);
    return a * theta2 / (a * a * theta2 + eps2 * s * s);
  });
}

FilterWeights tikhonov_weights(const SequenceProblem& problem) {
  const auto& ball = problem.ball();
  const double scale = problem.epsilon() * problem.epsilon() / (2.0 * ball.r * ball.P0);
  return shrinkage_weights(problem, FilterKind::tikhonov_asymptotic, [&](std::size_t j, double a) {
    const double s = problem.sigma(j);
    return a / (a * a + scale * s * s * std::pow(static_cast<double>(j), 2.0 * ball.r + 1.0));
  });
}

FilterWeights exact_inverse_weights(const SequenceProblem& problem) {
  FilterWeights w{std::vector<double>(problem.size()), FilterKind::exact_inverse, {}};
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double a = problem.a(j);
    if (a == 0.0) throw SingularOperatorError("a_" + std::to_string(j) + " is zero; no exact inverse");
    w.lambdas[j - 1] = 1.0 / a;
  }
  return w;
}

Signal apply_filter(const FilterWeights& weights, const Observation& y) {
  if (weights.size() != y.size())
    throw DimensionError("weights length " + std::to_string(weights.size()) +
                         " does not match observation length " + std::to_string(y.size()));
  Signal out{std::vector<double>(y.size())};
  for (std::size_t i = 0; i < y.size(); ++i) out.coeffs[i] = weights.lambdas[i] * y.values[i];
  return out;
}

PenaltyView tikhonov_penalty_view(const SequenceProblem& problem) {
  const auto& ball = problem.ball();
  PenaltyView view{problem.epsilon() * problem.epsilon(), std::vector<double>(problem.size())};
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double s = problem.sigma(j);
    view.mu[j - 1] = s * s * std::pow(static_cast<double>(j), 2.0 * ball.r + 1.0) / (2.0 * ball.r * ball.P0);
  }
  return view;
}

}  // namespace tikreg
