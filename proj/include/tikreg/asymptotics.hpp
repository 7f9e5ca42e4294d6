#pragma once

// Leading-order predictions for the Tikhonov risk series R_eps and numerical
// convergence studies that test them.
//
// Polynomial decay a_j = C j^{-gamma}: substituting j = s x with
// s^m = 2 r P0 C^2 / eps^2, m = 2r + 2gamma + 1, turns the series into a
// Riemann sum of x^{2gamma} / (1 + x^m), so
//   R_eps ~ eps^{4r/m} C^{-2} (2 r P0 C^2)^{(2gamma+1)/m} pi / (m sin(pi (2gamma+1)/m)).
// Exponential decay a_j = C j^{-alpha} exp(-B j^g): R_eps ~ P0 B^{2r/g} |log eps|^{-2r/g}.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tikreg/sequence_model.hpp"

namespace tikreg {

enum class ConstantSource { printed_formula, limit_integral };

std::string to_string(ConstantSource source);

struct RatePrediction {
  /// Power of eps (polynomial family) or of |log eps| (exponential family).
  double rate_exponent = 0.0;
  double constant = 0.0;
  ConstantSource source = ConstantSource::limit_integral;

  /// Finite and positive constant; the printed polynomial coefficient fails
  /// this for some parameters.
  bool well_formed() const;
};

struct PolyRatePredictions {
  RatePrediction limit_integral;
  RatePrediction printed_formula;
};

PolyRatePredictions poly_rate_prediction(double gamma, double r, double P0, double C);

/// integral_0^inf x^{2gamma} / (1 + x^m) dx = pi / (m sin(pi (2gamma+1) / m)).
double power_ratio_integral(double gamma, double m);

RatePrediction exp_rate_prediction(double alpha, double B, double gamma_exp, double r, double P0);

struct ConvergenceRow {
  double epsilon = 0.0;
  std::size_t n_used = 0;
  double risk = 0.0;
  double tail_bound = 0.0;
  double rate_factor = 0.0;
  double ratio = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  /// (max - min) / |last| of the ratio over the last three grid points.
  double stabilization = 0.0;
  /// Least-squares slope over the last three points of log R against log eps
  /// (polynomial) or log |log eps| (exponential).
  double fitted_slope = 0.0;
  RatePrediction prediction;
  /// Only set for the polynomial family.
  std::optional<RatePrediction> printed_prediction;
};

struct ConvergenceOptions {
  double rel_tol = 1e-8;
  std::size_t max_terms = 100'000'000;
  unsigned threads = 1;
};

/// Evaluates the risk series with adaptive truncation at every eps of the
/// strictly decreasing grid (at least 4 points). Only analytic families.
ConvergenceStudy convergence_study(const OperatorSpectrum& spectrum, const NoiseProfile& noise,
                                   const BesovBall& ball, std::span<const double> epsilon_grid,
                                   const ConvergenceOptions& options = {});

}  // namespace tikreg
