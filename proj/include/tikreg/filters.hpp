#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tikreg/sequence_model.hpp"

namespace tikreg {

enum class FilterKind { minimax_linear, tikhonov_asymptotic, exact_inverse, custom };

std::string to_string(FilterKind kind);

/// Linear estimator x_hat_j = lambda_j y_j.
struct FilterWeights {
  std::vector<double> lambdas;
  FilterKind kind = FilterKind::custom;
  /// Indices j whose eigenvalue underflowed to 0 and were assigned lambda_j = 0.
  std::vector<std::size_t> underflow_indices;

  std::size_t size() const noexcept { return lambdas.size(); }
};

/// Weights minimizing the worst-case risk over linear filters:
/// lambda_j = a_j theta_j^2 / (a_j^2 theta_j^2 + eps^2 sigma_j^2).
FilterWeights minimax_linear_weights(const SequenceProblem& problem);

/// Tikhonov weights lambda_j = a_j / (a_j^2 + (2 r P0)^{-1} eps^2 sigma_j^2 j^{2r+1}).
FilterWeights tikhonov_weights(const SequenceProblem& problem);

/// lambda_j = 1 / a_j. Throws SingularOperatorError if any a_j is 0.
FilterWeights exact_inverse_weights(const SequenceProblem& problem);

Signal apply_filter(const FilterWeights& weights, const Observation& y);

/// Tikhonov filter written as lambda_j = a_j / (a_j^2 + alpha mu_j).
struct PenaltyView {
  double alpha = 0.0;
  std::vector<double> mu;
};

PenaltyView tikhonov_penalty_view(const SequenceProblem& problem);

}  // namespace tikreg
