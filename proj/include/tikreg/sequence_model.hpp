#pragma once

// Diagonalized observation model y_j = a_j x_j + eps * sigma_j * xi_j,
// the Besov-type ball sup_k k^{2r} sum_{j>=k} x_j^2 <= P0, and the signals
// living on it. Indices j are 1-based throughout the public API.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tikreg {

/// a_j = C j^{-gamma}
struct PolyDecay {
  double C = 1.0;
  double gamma = 0.0;
};

/// a_j = C j^{-alpha} exp(-B j^{gamma_exp})
struct ExpDecay {
  double C = 1.0;
  double alpha = 0.0;
  double B = 1.0;
  double gamma_exp = 1.0;
};

/// a_j = values[j-1]
struct ExplicitSpectrum {
  std::vector<double> values;
};

using OperatorSpectrum = std::variant<PolyDecay, ExpDecay, ExplicitSpectrum>;

/// Throws PreconditionError when family parameters are out of range or an
/// explicit value is zero or non-finite.
void validate(const OperatorSpectrum& spectrum);

double eigenvalue(const OperatorSpectrum& spectrum, std::size_t j);

/// log|a_j|, finite even where a_j itself underflows.
double log_abs_eigenvalue(const OperatorSpectrum& spectrum, std::size_t j);

/// Number of defined eigenvalues; nullopt for the analytic families.
std::optional<std::size_t> defined_length(const OperatorSpectrum& spectrum);

std::string family_name(const OperatorSpectrum& spectrum);

struct NoiseProfile {
  /// Constant sigma or an explicit sequence sigma_1..sigma_n.
  std::variant<double, std::vector<double>> sigma = 1.0;
  double epsilon = 1.0;

  double sigma_at(std::size_t j) const;
  std::optional<std::size_t> defined_length() const;
};

struct BesovBall {
  double r = 1.0;
  double P0 = 1.0;
};

/// P0 (j^{-2r} - (j+1)^{-2r}); the squared coefficient of the worst-case signal.
double boundary_coefficient_sq(const BesovBall& ball, std::size_t j);

class SequenceProblem {
 public:
  SequenceProblem(OperatorSpectrum spectrum, NoiseProfile noise, BesovBall ball, std::size_t N);

  const OperatorSpectrum& spectrum() const noexcept { return spectrum_; }
  const NoiseProfile& noise() const noexcept { return noise_; }
  const BesovBall& ball() const noexcept { return ball_; }
  std::size_t size() const noexcept { return n_; }
  double epsilon() const noexcept { return noise_.epsilon; }

  double a(std::size_t j) const { return eigenvalue(spectrum_, j); }
  double sigma(std::size_t j) const { return noise_.sigma_at(j); }

  /// Same problem with a different truncation or noise level.
  SequenceProblem with_size(std::size_t N) const;
  SequenceProblem with_epsilon(double epsilon) const;

  /// a_1..a_N and sigma_1..sigma_N.
  std::vector<double> eigenvalues() const;
  std::vector<double> sigmas() const;

 private:
  OperatorSpectrum spectrum_;
  NoiseProfile noise_;
  BesovBall ball_;
  std::size_t n_;
};

struct Signal {
  std::vector<double> coeffs;

  std::size_t size() const noexcept { return coeffs.size(); }
};

struct Observation {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

/// y_j = a_j x_j + eps sigma_j xi_j, with xi drawn from replication stream
/// `replication` of `seed`.
Observation simulate_observation(const SequenceProblem& problem, const Signal& signal,
                                 std::uint64_t seed, std::uint64_t replication = 0);

/// max_{1<=k<=N} k^{2r} sum_{j>=k} x_j^2
double besov_seminorm(std::span<const double> x, double r);
inline double besov_seminorm(const Signal& x, double r) { return besov_seminorm(x.coeffs, r); }

inline bool in_ball(const Signal& x, const BesovBall& ball) {
  return besov_seminorm(x, ball.r) <= ball.P0;
}

Signal boundary_signal(const BesovBall& ball, std::size_t N);

/// u_k = k^{2r} sum_{j>=k} x_j^2, k = 1..N.
std::vector<double> suffix_budgets(std::span<const double> x, double r);
inline std::vector<double> suffix_budgets(const Signal& x, double r) {
  return suffix_budgets(x.coeffs, r);
}

/// x_k^2 = k^{-2r} u_k - (k+1)^{-2r} u_{k+1} with u_{N+1} = 0.
std::vector<double> squares_from_budgets(std::span<const double> u, double r);

/// Smallest N whose neglected variance tail of the Tikhonov risk series,
/// bounded by P0 N^{-2r}, is below rel_tol times the partial sum.
std::size_t default_truncation(const OperatorSpectrum& spectrum, const NoiseProfile& noise,
                               const BesovBall& ball, double rel_tol = 1e-6,
                               std::size_t max_terms = 100'000'000);

}  // namespace tikreg
