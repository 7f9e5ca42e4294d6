#include "tikreg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <variant>

#include "tikreg/errors.hpp"
#include "tikreg/monte_carlo.hpp"
#include "tikreg/risk.hpp"

namespace tikreg {

std::string to_string(ConstantSource source) {
  return source == ConstantSource::printed_formula ? "printed-formula" : "limit-integral";
}

bool RatePrediction::well_formed() const {
  return std::isfinite(rate_exponent) && std::isfinite(constant) && constant > 0.0;
}

double power_ratio_integral(double gamma, double m) {
  const double p = 2.0 * gamma + 1.0;
  if (!(p < m)) throw PreconditionError("integral diverges unless 2 gamma + 1 < m");
  return std::numbers::pi / (m * std::sin(std::numbers::pi * p / m));
}

PolyRatePredictions poly_rate_prediction(double gamma, double r, double P0, double C) {
  if (!(gamma >= 0.0 && r > 0.0 && P0 > 0.0 && C > 0.0))
    throw PreconditionError("poly_rate_prediction needs gamma >= 0, r > 0, P0 > 0, C > 0");
  const double m = 2.0 * r + 2.0 * gamma + 1.0;
  const double p = 2.0 * gamma + 1.0;
  const double exponent = 4.0 * r / m;

  PolyRatePredictions out;
  out.limit_integral = {exponent,
                        std::pow(C, -2.0) * std::pow(2.0 * r * P0 * C * C, p / m) * power_ratio_integral(gamma, m),
                        ConstantSource::limit_integral};
  // As printed: sine argument pi (2gamma+1)/(2r), C exponent -2r/m.
  out.printed_formula = {exponent,
                       std::numbers::pi / (2.0 * r * std::sin(std::numbers::pi * p / (2.0 * r))) *
                           std::pow(2.0 * r * P0, p / m) * std::pow(C, -2.0 * r / m),
                       ConstantSource::printed_formula};
  return out;
}

RatePrediction exp_rate_prediction(double alpha, double B, double gamma_exp, double r, double P0) {
  if (!(B > 0.0 && gamma_exp > 0.0 && r > 0.0 && P0 > 0.0))
    throw PreconditionError("exp_rate_prediction needs B > 0, gamma > 0, r > 0, P0 > 0");
  (void)alpha;  // the leading term does not depend on alpha (or C)
  const double q = 2.0 * r / gamma_exp;
  return {-q, P0 * std::pow(B, q), ConstantSource::limit_integral};
}

namespace {

double slope(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

ConvergenceStudy convergence_study(const OperatorSpectrum& spectrum, const NoiseProfile& noise,
                                   const BesovBall& ball, std::span<const double> epsilon_grid,
                                   const ConvergenceOptions& options) {
  if (epsilon_grid.size() < 4) throw PreconditionError("convergence grid needs at least 4 points");
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    if (!(epsilon_grid[i] > 0.0)) throw PreconditionError("convergence grid entries must be > 0");
    if (i > 0 && !(epsilon_grid[i] < epsilon_grid[i - 1]))
      throw PreconditionError("convergence grid must be strictly decreasing");
  }

  ConvergenceStudy study;
  const bool poly = std::holds_alternative<PolyDecay>(spectrum);
  if (const auto* p = std::get_if<PolyDecay>(&spectrum)) {
    const auto pred = poly_rate_prediction(p->gamma, ball.r, ball.P0, p->C);
    study.prediction = pred.limit_integral;
    study.printed_prediction = pred.printed_formula;
  } else if (const auto* e = std::get_if<ExpDecay>(&spectrum)) {
    study.prediction = exp_rate_prediction(e->alpha, e->B, e->gamma_exp, ball.r, ball.P0);
  } else {
    throw PreconditionError("convergence_study needs an analytic spectrum family");
  }

  study.rows.resize(epsilon_grid.size());
  std::vector<std::exception_ptr> errors(epsilon_grid.size());
  parallel_for(epsilon_grid.size(), options.threads, [&](std::size_t i) {
    try {
      NoiseProfile nz = noise;
      nz.epsilon = epsilon_grid[i];
      const auto series = adaptive_asymptotic_minimax_risk(spectrum, nz, ball, options.rel_tol, options.max_terms);
      auto& row = study.rows[i];
      row.epsilon = nz.epsilon;
      row.n_used = series.terms;
      row.risk = series.value;
      row.tail_bound = series.tail_bound;
      row.rate_factor = poly ? std::pow(nz.epsilon, study.prediction.rate_exponent)
                             : std::pow(std::abs(std::log(nz.epsilon)), study.prediction.rate_exponent);
      row.ratio = row.risk / row.rate_factor;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  const std::size_t n = study.rows.size();
  double lo = study.rows[n - 3].ratio, hi = lo;
  std::vector<double> xs, ys;
  for (std::size_t i = n - 3; i < n; ++i) {
    lo = std::min(lo, study.rows[i].ratio);
    hi = std::max(hi, study.rows[i].ratio);
    const double eps = study.rows[i].epsilon;
    xs.push_back(poly ? std::log(eps) : std::log(std::abs(std::log(eps))));
    ys.push_back(std::log(study.rows[i].risk));
  }
  study.stabilization = (hi - lo) / std::abs(study.rows[n - 1].ratio);
  study.fitted_slope = slope(xs, ys);
  return study;
}

}  // namespace tikreg
