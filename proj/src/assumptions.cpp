#include "tikreg/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "tikreg/errors.hpp"
#include "tikreg/numeric.hpp"

namespace tikreg {

std::string to_string(AssumptionName name) {
  switch (name) {
    case AssumptionName::A: return "A";
    case AssumptionName::B1: return "B1";
    case AssumptionName::B2: return "B2";
    case AssumptionName::B3: return "B3";
  }
  return "?";
}

std::string to_string(AnalyticVerdict verdict) {
  switch (verdict) {
    case AnalyticVerdict::holds_for_all_j: return "holds for all j";
    case AnalyticVerdict::fails: return "fails";
    case AnalyticVerdict::not_certified: return "not certified";
  }
  return "?";
}

namespace {

std::size_t clamp_range(const SequenceProblem& problem, std::size_t j_max) {
  std::size_t limit = j_max;
  if (const auto len = defined_length(problem.spectrum())) limit = std::min(limit, *len);
  if (const auto len = problem.noise().defined_length()) limit = std::min(limit, *len);
  return limit;
}

bool constant_sigma(const SequenceProblem& problem) {
  return std::holds_alternative<double>(problem.noise().sigma);
}

double log_sigma(const SequenceProblem& problem, std::size_t j) { return std::log(problem.sigma(j)); }

// Scans log-ratios on [lo, hi]; holds iff every ratio is strictly above 1
// (or >= 1 when `strict` is false).
template <typename LogRatio>
AssumptionReport scan(AssumptionName name, std::size_t lo, std::size_t hi, bool strict, LogRatio log_ratio) {
  AssumptionReport rep;
  rep.name = name;
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = lo; j <= hi; ++j) {
    const double slack = std::expm1(log_ratio(j));
    rep.margin = std::min(rep.margin, slack);
    const bool ok = strict ? slack > 0.0 : slack >= 0.0;
    if (!ok && !rep.first_violation) rep.first_violation = j;
  }
  rep.checked_to = hi;
  rep.holds = !rep.first_violation;
  return rep;
}

}  // namespace

AssumptionReport check_condition_A(const SequenceProblem& problem, std::size_t j_max) {
  if (j_max < 2) throw PreconditionError("check_condition_A needs j_max >= 2");
  const auto& spectrum = problem.spectrum();
  const double p = 2.0 * problem.ball().r;
  const std::size_t hi = clamp_range(problem, j_max);
  auto rep = scan(AssumptionName::A, 2, hi, true, [&](std::size_t j) {
    const double x = static_cast<double>(j);
    return 2.0 * (log_sigma(problem, j) - log_sigma(problem, j - 1)) +
           2.0 * (log_abs_eigenvalue(spectrum, j - 1) - log_abs_eigenvalue(spectrum, j)) +
           log_forward_power_gap(x - 1.0, p) - log_forward_power_gap(x, p);
  });
  // Gap ratio > 1 by strict convexity of j^{-2r}; the eigenvalue factor is >= 1
  // whenever |a_j| is nonincreasing.
  if (constant_sigma(problem)) {
    if (std::holds_alternative<PolyDecay>(spectrum)) {
      rep.analytic = AnalyticVerdict::holds_for_all_j;
    } else if (const auto* e = std::get_if<ExpDecay>(&spectrum); e && e->alpha >= 0.0) {
      rep.analytic = AnalyticVerdict::holds_for_all_j;
    }
  }
  return rep;
}

AssumptionReport check_B1(const SequenceProblem& problem, std::size_t j0, std::size_t j_max) {
  if (j_max <= j0) throw PreconditionError("check_B1 needs j_max > j0");
  const auto& spectrum = problem.spectrum();
  // pairs (j, j+1) with j0 < j <= j_max; j + 1 must be defined
  std::size_t hi = j_max;
  if (const auto len = defined_length(spectrum)) hi = std::min(hi, *len - 1);
  auto rep = scan(AssumptionName::B1, std::max<std::size_t>(j0 + 1, 1), hi, false, [&](std::size_t j) {
    return log_abs_eigenvalue(spectrum, j) - log_abs_eigenvalue(spectrum, j + 1);
  });
  if (std::holds_alternative<PolyDecay>(spectrum)) {
    rep.analytic = AnalyticVerdict::holds_for_all_j;
  } else if (const auto* e = std::get_if<ExpDecay>(&spectrum); e && e->alpha >= 0.0) {
    rep.analytic = AnalyticVerdict::holds_for_all_j;
  }
  return rep;
}

AssumptionReport check_B2(const SequenceProblem& problem, double c, double C_bound, std::size_t j_max) {
  if (!(0.0 < c && c < C_bound)) throw PreconditionError("check_B2 needs 0 < c < C_bound");
  AssumptionReport rep;
  rep.name = AssumptionName::B2;
  rep.margin = std::numeric_limits<double>::infinity();
  const std::size_t hi = clamp_range(problem, j_max);
  for (std::size_t j = 1; j <= hi; ++j) {
    const double s2 = problem.sigma(j) * problem.sigma(j);
    const double slack = std::min(s2 - c, C_bound - s2);
    rep.margin = std::min(rep.margin, slack);
    if (!(slack > 0.0) && !rep.first_violation) rep.first_violation = j;
  }
  rep.checked_to = hi;
  rep.holds = !rep.first_violation;
  if (const auto* s = std::get_if<double>(&problem.noise().sigma)) {
    const double s2 = (*s) * (*s);
    rep.analytic = (c < s2 && s2 < C_bound) ? AnalyticVerdict::holds_for_all_j : AnalyticVerdict::fails;
  }
  return rep;
}

AssumptionReport check_B3(const SequenceProblem& problem, std::size_t j0, std::size_t j_max) {
  if (j_max <= std::max<std::size_t>(j0, 1)) throw PreconditionError("check_B3 needs j_max > max(j0, 1)");
  const auto& spectrum = problem.spectrum();
  const double p = 2.0 * problem.ball().r + 1.0;
  const std::size_t hi = clamp_range(problem, j_max);
  auto rep = scan(AssumptionName::B3, std::max<std::size_t>(j0 + 1, 2), hi, true, [&](std::size_t j) {
    const double x = static_cast<double>(j);
    return 2.0 * (log_sigma(problem, j) - log_sigma(problem, j - 1)) +
           2.0 * (log_abs_eigenvalue(spectrum, j - 1) - log_abs_eigenvalue(spectrum, j)) +
           p * (std::log(x) - std::log(x - 1.0));
  });
  // PolyDecay: (j/(j-1))^{2 gamma + 2r + 1}; ExpDecay adds exp(2B (j^g - (j-1)^g)) > 1.
  if (constant_sigma(problem)) {
    const double r = problem.ball().r;
    if (const auto* pd = std::get_if<PolyDecay>(&spectrum)) {
      rep.analytic = (2.0 * pd->gamma + 2.0 * r + 1.0 > 0.0) ? AnalyticVerdict::holds_for_all_j
                                                             : AnalyticVerdict::fails;
    } else if (const auto* e = std::get_if<ExpDecay>(&spectrum); e && 2.0 * e->alpha + 2.0 * r + 1.0 >= 0.0) {
      rep.analytic = AnalyticVerdict::holds_for_all_j;
    }
  }
  return rep;
}

}  // namespace tikreg
