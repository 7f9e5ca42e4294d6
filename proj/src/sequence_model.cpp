#include "tikreg/sequence_model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "tikreg/errors.hpp"
#include "tikreg/numeric.hpp"
#include "tikreg/rng.hpp"

namespace tikreg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_index(std::size_t j) {
  if (j == 0) throw OutOfRangeError("index must be >= 1");
}

}  // namespace

void validate(const OperatorSpectrum& spectrum) {
  std::visit(overloaded{
                 [](const PolyDecay& p) {
                   if (!(p.C > 0.0) || !std::isfinite(p.C))
                     throw PreconditionError("spectrum.C must be positive");
                   if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma))
                     throw PreconditionError("spectrum.gamma must be >= 0");
                 },
                 [](const ExpDecay& e) {
                   if (!(e.C > 0.0) || !std::isfinite(e.C))
                     throw PreconditionError("spectrum.C must be positive");
                   if (!std::isfinite(e.alpha))
                     throw PreconditionError("spectrum.alpha must be finite");
                   if (!(e.B > 0.0) || !std::isfinite(e.B))
                     throw PreconditionError("spectrum.B must be positive");
                   if (!(e.gamma_exp > 0.0) || !std::isfinite(e.gamma_exp))
                     throw PreconditionError("spectrum.gamma must be positive for the exp family");
                 },
                 [](const ExplicitSpectrum& s) {
                   if (s.values.empty()) throw PreconditionError("explicit spectrum is empty");
                   for (double v : s.values) {
                     if (!std::isfinite(v)) throw PreconditionError("explicit eigenvalue not finite");
                     if (v == 0.0) throw SingularOperatorError("explicit eigenvalue is zero");
                   }
                 },
             },
             spectrum);
}

double eigenvalue(const OperatorSpectrum& spectrum, std::size_t j) {
  require_index(j);
  const double x = static_cast<double>(j);
  return std::visit(overloaded{
                        [x](const PolyDecay& p) { return p.C * std::pow(x, -p.gamma); },
                        [x](const ExpDecay& e) {
                          return e.C * std::exp(-e.alpha * std::log(x) - e.B * std::pow(x, e.gamma_exp));
                        },
                        [j](const ExplicitSpectrum& s) {
                          if (j > s.values.size())
                            throw OutOfRangeError("eigenvalue index " + std::to_string(j) +
                                                  " beyond explicit length " +
                                                  std::to_string(s.values.size()));
                          return s.values[j - 1];
                        },
                    },
                    spectrum);
}

double log_abs_eigenvalue(const OperatorSpectrum& spectrum, std::size_t j) {
  require_index(j);
  const double x = static_cast<double>(j);
  return std::visit(overloaded{
                        [x](const PolyDecay& p) { return std::log(p.C) - p.gamma * std::log(x); },
                        [x](const ExpDecay& e) {
                          return std::log(e.C) - e.alpha * std::log(x) - e.B * std::pow(x, e.gamma_exp);
                        },
                        [&spectrum, j](const ExplicitSpectrum&) {
                          return std::log(std::abs(eigenvalue(spectrum, j)));
                        },
                    },
                    spectrum);
}

std::optional<std::size_t> defined_length(const OperatorSpectrum& spectrum) {
  if (const auto* s = std::get_if<ExplicitSpectrum>(&spectrum)) return s->values.size();
  return std::nullopt;
}

std::string family_name(const OperatorSpectrum& spectrum) {
  return std::visit(overloaded{
                        [](const PolyDecay&) { return std::string("poly"); },
                        [](const ExpDecay&) { return std::string("exp"); },
                        [](const ExplicitSpectrum&) { return std::string("explicit"); },
                    },
                    spectrum);
}

double NoiseProfile::sigma_at(std::size_t j) const {
  require_index(j);
  if (const auto* c = std::get_if<double>(&sigma)) return *c;
  const auto& seq = std::get<std::vector<double>>(sigma);
  if (j > seq.size())
    throw OutOfRangeError("sigma index " + std::to_string(j) + " beyond explicit length " +
                          std::to_string(seq.size()));
  return seq[j - 1];
}

std::optional<std::size_t> NoiseProfile::defined_length() const {
  if (const auto* seq = std::get_if<std::vector<double>>(&sigma)) return seq->size();
  return std::nullopt;
}

double boundary_coefficient_sq(const BesovBall& ball, std::size_t j) {
  require_index(j);
  return ball.P0 * forward_power_gap(static_cast<double>(j), 2.0 * ball.r);
}

SequenceProblem::SequenceProblem(OperatorSpectrum spectrum, NoiseProfile noise, BesovBall ball,
                                 std::size_t N)
    : spectrum_(std::move(spectrum)), noise_(std::move(noise)), ball_(ball), n_(N) {
  validate(spectrum_);
  if (N < 1) throw PreconditionError("N must be >= 1");
  if (!(ball_.r > 0.0) || !std::isfinite(ball_.r)) throw PreconditionError("ball.r must be > 0");
  if (!(ball_.P0 > 0.0) || !std::isfinite(ball_.P0)) throw PreconditionError("ball.P0 must be > 0");
  if (!(noise_.epsilon >= 0.0) || !std::isfinite(noise_.epsilon))
    throw PreconditionError("noise.epsilon must be finite and >= 0");
  if (const auto* c = std::get_if<double>(&noise_.sigma)) {
    if (!(*c > 0.0) || !std::isfinite(*c)) throw PreconditionError("noise.sigma must be > 0");
  } else {
    const auto& seq = std::get<std::vector<double>>(noise_.sigma);
    for (double s : seq)
      if (!(s > 0.0) || !std::isfinite(s)) throw PreconditionError("noise.sigma entries must be > 0");
    if (seq.size() < N) throw DimensionError("noise.sigma sequence shorter than N");
  }
  if (const auto len = defined_length(spectrum_); len && *len < N)
    throw DimensionError("explicit spectrum shorter than N");
}

SequenceProblem SequenceProblem::with_size(std::size_t N) const {
  return SequenceProblem(spectrum_, noise_, ball_, N);
}

SequenceProblem SequenceProblem::with_epsilon(double epsilon) const {
  NoiseProfile noise = noise_;
  noise.epsilon = epsilon;
  return SequenceProblem(spectrum_, std::move(noise), ball_, n_);
}

std::vector<double> SequenceProblem::eigenvalues() const {
  std::vector<double> out(n_);
  for (std::size_t j = 1; j <= n_; ++j) out[j - 1] = a(j);
  return out;
}

std::vector<double> SequenceProblem::sigmas() const {
  std::vector<double> out(n_);
  for (std::size_t j = 1; j <= n_; ++j) out[j - 1] = sigma(j);
  return out;
}

Observation simulate_observation(const SequenceProblem& problem, const Signal& signal,
                                 std::uint64_t seed, std::uint64_t replication) {
  const std::size_t n = problem.size();
  if (signal.size() != n)
    throw DimensionError("signal length " + std::to_string(signal.size()) +
                         " does not match problem N = " + std::to_string(n));
  const NormalField field(seed, StreamDomain::observation_noise);
  Observation y{std::vector<double>(n)};
  field.fill(replication, y.values);
  const double eps = problem.epsilon();
  for (std::size_t j = 1; j <= n; ++j) {
    y.values[j - 1] = problem.a(j) * signal.coeffs[j - 1] + eps * problem.sigma(j) * y.values[j - 1];
  }
  return y;
}

double besov_seminorm(std::span<const double> x, double r) {
  double best = 0.0;
  CompensatedSum suffix;
  for (std::size_t k = x.size(); k >= 1; --k) {
    suffix.add(x[k - 1] * x[k - 1]);
    const double u = std::pow(static_cast<double>(k), 2.0 * r) * suffix.value();
    if (u > best) best = u;
  }
  return best;
}

Signal boundary_signal(const BesovBall& ball, std::size_t N) {
  if (N < 1) throw PreconditionError("N must be >= 1");
  Signal theta{std::vector<double>(N)};
  for (std::size_t j = 1; j <= N; ++j) theta.coeffs[j - 1] = std::sqrt(boundary_coefficient_sq(ball, j));
  return theta;
}

std::vector<double> suffix_budgets(std::span<const double> x, double r) {
  std::vector<double> u(x.size());
  CompensatedSum suffix;
  for (std::size_t k = x.size(); k >= 1; --k) {
    suffix.add(x[k - 1] * x[k - 1]);
    u[k - 1] = std::pow(static_cast<double>(k), 2.0 * r) * suffix.value();
  }
  return u;
}

std::vector<double> squares_from_budgets(std::span<const double> u, double r) {
  const std::size_t n = u.size();
  std::vector<double> v(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double next = (k < n) ? std::pow(static_cast<double>(k + 1), -2.0 * r) * u[k] : 0.0;
    v[k - 1] = std::pow(static_cast<double>(k), -2.0 * r) * u[k - 1] - next;
  }
  return v;
}

std::size_t default_truncation(const OperatorSpectrum& spectrum, const NoiseProfile& noise,
                               const BesovBall& ball, double rel_tol, std::size_t max_terms) {
  validate(spectrum);
  if (!(rel_tol > 0.0)) throw PreconditionError("rel_tol must be > 0");
  if (!(noise.epsilon > 0.0)) throw PreconditionError("default truncation needs epsilon > 0");
  const double eps2 = noise.epsilon * noise.epsilon;
  const double two_r = 2.0 * ball.r;
  const double penalty_scale = eps2 / (two_r * ball.P0);
  const auto limit_a = defined_length(spectrum);
  const auto limit_s = noise.defined_length();

  CompensatedSum partial;
  for (std::size_t j = 1; j <= max_terms; ++j) {
    if ((limit_a && j > *limit_a) || (limit_s && j > *limit_s)) return j - 1;
    const double x = static_cast<double>(j);
    const double a = eigenvalue(spectrum, j);
    const double s2 = noise.sigma_at(j) * noise.sigma_at(j);
    partial.add(eps2 * s2 / (a * a + penalty_scale * s2 * std::pow(x, two_r + 1.0)));
    const double tail = ball.P0 * std::pow(x, -two_r);
    if (tail <= rel_tol * partial.value()) return j;
  }
  throw ResourceError("truncation exceeds max_terms = " + std::to_string(max_terms),
                      ball.P0 * std::pow(static_cast<double>(max_terms), -two_r));
}

}  // namespace tikreg
