#pragma once

// Finite-range checks of the structural hypotheses behind the minimaxity
// results:
//   A   sigma_j^2 a_{j-1}^2 ((j-1)^{-2r} - j^{-2r}) / (sigma_{j-1}^2 a_j^2 (j^{-2r} - (j+1)^{-2r})) > 1
//   B1  |a_j / a_{j+1}| >= 1 for j > j0
//   B2  c < sigma_j^2 < C
//   B3  sigma_j^2 a_{j-1}^2 j^{2r+1} / (sigma_{j-1}^2 a_j^2 (j-1)^{2r+1}) > 1 for j > j0
// Ratios are evaluated in log space so that underflowing eigenvalues of the
// exponential family stay comparable.

#include <cstddef>
#include <optional>
#include <string>

#include "tikreg/sequence_model.hpp"

namespace tikreg {

enum class AssumptionName { A, B1, B2, B3 };

std::string to_string(AssumptionName name);

enum class AnalyticVerdict {
  holds_for_all_j,
  fails,
  not_certified,  // no closed form applies (explicit data, or outside the covered parameter region)
};

std::string to_string(AnalyticVerdict verdict);

struct AssumptionReport {
  AssumptionName name = AssumptionName::A;
  bool holds = false;
  std::optional<std::size_t> first_violation;
  /// Minimal slack over the checked range: min(ratio) - 1 for A, B1, B3;
  /// min over j of the distance of sigma_j^2 to the nearer bound for B2.
  double margin = 0.0;
  /// Largest index actually checked (explicit data may cut j_max short).
  std::size_t checked_to = 0;
  AnalyticVerdict analytic = AnalyticVerdict::not_certified;
};

AssumptionReport check_condition_A(const SequenceProblem& problem, std::size_t j_max);
AssumptionReport check_B1(const SequenceProblem& problem, std::size_t j0, std::size_t j_max);
AssumptionReport check_B2(const SequenceProblem& problem, double c, double C_bound, std::size_t j_max);
AssumptionReport check_B3(const SequenceProblem& problem, std::size_t j0, std::size_t j_max);

}  // namespace tikreg
