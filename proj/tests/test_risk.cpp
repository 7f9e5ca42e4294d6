#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tikreg/errors.hpp"
#include "tikreg/monte_carlo.hpp"
#include "tikreg/risk.hpp"
#include "tikreg/rng.hpp"

using namespace tikreg;
using doctest::Approx;

namespace {

SequenceProblem poly_problem(double eps, std::size_t n) {
  return SequenceProblem(PolyDecay{1.0, 1.0}, NoiseProfile{1.0, eps}, BesovBall{1.0, 1.0}, n);
}

FilterWeights random_weights(const SequenceProblem& p, std::uint64_t seed, double spread = 1.0) {
  const NormalField f(seed, StreamDomain::weight_perturbation);
  FilterWeights w{std::vector<double>(p.size()), FilterKind::custom, {}};
  for (std::size_t j = 1; j <= p.size(); ++j) w.lambdas[j - 1] = (1.0 + spread * f.normal(0, j)) / p.a(j) * f.uniform(1, j);
  return w;
}

std::vector<double> gains_with_tail(const SequenceProblem& p, const FilterWeights& w) {
  std::vector<double> g;
  for (std::size_t j = 1; j <= p.size(); ++j) g.push_back(std::pow(1.0 - p.a(j) * w.lambdas[j - 1], 2.0));
  g.push_back(1.0);
  return g;
}

std::vector<double> capacities(const SequenceProblem& p) {
  std::vector<double> c;
  for (std::size_t k = 1; k <= p.size() + 1; ++k) c.push_back(p.ball().P0 * std::pow(double(k), -2.0 * p.ball().r));
  return c;
}

}  // namespace

TEST_CASE("filter_risk_at_signal") {
  SUBCASE("exact inverse has no bias") {
    const auto p = SequenceProblem(PolyDecay{1.0, 0.0}, NoiseProfile{1.0, 0.1}, BesovBall{}, 2);
    const auto d = filter_risk_at_signal(p, exact_inverse_weights(p), Signal{{0.3, -0.2}});
    CHECK(d.bias == 0.0);
    CHECK(d.variance == Approx(0.02).epsilon(1e-14));
    CHECK(d.total == Approx(0.02).epsilon(1e-14));
  }
  SUBCASE("zero filter returns the signal energy") {
    const auto p = poly_problem(0.3, 3);
    const auto d = filter_risk_at_signal(p, FilterWeights{{0.0, 0.0, 0.0}}, Signal{{1.0, 2.0, -2.0}});
    CHECK(d.total == Approx(9.0).epsilon(1e-15));
  }
  SUBCASE("decomposition matches a direct evaluation") {
    const auto p = SequenceProblem(ExplicitSpectrum{{1.5, -0.4, 0.2, 0.05}}, NoiseProfile{std::vector<double>{1, 2, 0.5, 1}, 0.2},
                                   BesovBall{}, 4);
    const auto w = random_weights(p, 9);
    const Signal x{{0.4, -0.3, 0.1, 0.05}};
    const auto d = filter_risk_at_signal(p, w, x);
    CHECK(d.total == Approx(oracle::linear_mse(p.eigenvalues(), p.sigmas(), 0.2, w.lambdas, x.coeffs)).epsilon(1e-13));
    CHECK(std::abs(d.total - (d.variance + d.bias)) <= 1e-12 * d.total);
    for (const auto& t : d.per_index) {
      CHECK(t.variance >= 0.0);
      CHECK(t.bias >= 0.0);
    }
  }
  SUBCASE("dimension errors") {
    const auto p = poly_problem(0.1, 3);
    CHECK_THROWS_AS(filter_risk_at_signal(p, FilterWeights{{1.0}}, Signal{{1, 2, 3}}), DimensionError);
    CHECK_THROWS_AS(filter_risk_at_signal(p, FilterWeights{{1, 1, 1}}, Signal{{1.0}}), DimensionError);
  }
}

TEST_CASE("monte carlo agrees with the analytic risk") {
  const auto p = poly_problem(0.1, 50);
  const auto theta = boundary_signal(p.ball(), p.size());
  const auto w = minimax_linear_weights(p);
  const auto exact = filter_risk_at_signal(p, w, theta).total;
  const auto mc = monte_carlo_risk(p, w, theta, 10000, 77);
  CHECK(std::abs(mc.mean - exact) < 3.0 * mc.std_error);
}

TEST_CASE("monte carlo without noise is deterministic") {
  const auto p = poly_problem(0.0, 20);
  const auto theta = boundary_signal(p.ball(), p.size());
  FilterWeights w = tikhonov_weights(p.with_epsilon(0.5));
  const auto mc = monte_carlo_risk(p, w, theta, 100, 1);
  CHECK(mc.std_error == 0.0);
  CHECK(mc.mean == Approx(filter_risk_at_signal(p, w, theta).bias).epsilon(1e-14));
}

TEST_CASE("monte carlo standard error scales like 1/sqrt(n)") {
  const auto p = poly_problem(0.2, 30);
  const auto theta = boundary_signal(p.ball(), p.size());
  const auto w = tikhonov_weights(p);
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto small = monte_carlo_risk(p, w, theta, 2000, 100 + seed);
    const auto large = monte_carlo_risk(p, w, theta, 4000, 200 + seed);
    ratio_sum += large.std_error / small.std_error;
  }
  CHECK(std::abs(ratio_sum / 5.0 - 1.0 / std::sqrt(2.0)) < 0.2 / std::sqrt(2.0));
}

TEST_CASE("monte carlo is independent of the thread count") {
  const auto p = poly_problem(0.1, 40);
  const auto theta = boundary_signal(p.ball(), p.size());
  const auto w = minimax_linear_weights(p);
  const auto one = monte_carlo_risk(p, w, theta, 999, 3, 1);
  const auto four = monte_carlo_risk(p, w, theta, 999, 3, 4);
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
}

TEST_CASE("nested suffix LP") {
  SUBCASE("matches the enumeration oracle on random instances") {
    const NormalField f(11, StreamDomain::weight_perturbation);
    for (std::uint64_t t = 0; t < 200; ++t) {
      const std::size_t m = 1 + t % 7;
      std::vector<double> gains(m), caps(m);
      double c = 1.0 + f.uniform(t, 100);
      for (std::size_t k = 0; k < m; ++k) {
        gains[k] = (t % 3 == 0) ? std::floor(3.0 * f.uniform(t, k)) : 2.0 * f.uniform(t, k);  // ties included
        caps[k] = c;
        c *= f.uniform(t, 50 + k);
      }
      const auto v = nested_suffix_lp(gains, caps);
      double obj = 0.0, suffix = 0.0;
      for (std::size_t k = m; k-- > 0;) {
        obj += gains[k] * v[k];
        suffix += v[k];
        CHECK(v[k] >= 0.0);
        CHECK(suffix <= caps[k] * (1.0 + 1e-12));
      }
      CHECK(obj == Approx(oracle::nested_lp_by_enumeration(gains, caps)).epsilon(1e-12));
    }
  }
  SUBCASE("matches a dense grid for two coordinates") {
    const std::vector<double> gains{0.3, 0.9}, caps{1.0, 0.25};
    const auto v = nested_suffix_lp(gains, caps);
    const double obj = gains[0] * v[0] + gains[1] * v[1];
    CHECK(obj == Approx(oracle::nested_lp_dense_grid_2(gains, caps, 400)).epsilon(1e-9));
  }
  SUBCASE("rejects increasing capacities") {
    CHECK_THROWS_AS(nested_suffix_lp({1.0, 1.0}, {1.0, 2.0}), PreconditionError);
  }
}

TEST_CASE("sup_risk_over_ball") {
  SUBCASE("zero filter concentrates the budget on j = 1") {
    const auto p = poly_problem(0.5, 6);
    const auto s = sup_risk_over_ball(p, FilterWeights{std::vector<double>(6, 0.0)});
    CHECK(s.value == Approx(1.0).epsilon(1e-15));
    CHECK(s.maximizer_v[0] == Approx(1.0).epsilon(1e-15));
    CHECK(s.suffix_binding[0]);
  }
  SUBCASE("minimax weights are maximized at the boundary signal") {
    const auto p = poly_problem(0.1, 100);
    const auto w = minimax_linear_weights(p);
    const auto s = sup_risk_over_ball(p, w);
    for (double u : s.maximizer_u) CHECK(u == Approx(1.0).epsilon(1e-10));
    CHECK(s.tail_binding);
    const auto theta = boundary_signal(p.ball(), p.size());
    CHECK(s.value == Approx(filter_risk_at_signal(p, w, theta).total + s.tail_bias).epsilon(1e-12));
    CHECK(s.tail_bias == Approx(std::pow(101.0, -2.0)).epsilon(1e-12));
    CHECK(s.value == Approx(minimax_linear_risk(p).total).epsilon(1e-12));
  }
  SUBCASE("maximizer is feasible") {
    const auto p = poly_problem(0.05, 30);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = sup_risk_over_ball(p, random_weights(p, seed));
      for (std::size_t j = 1; j <= p.size(); ++j) {
        CHECK(s.maximizer_u[j - 1] <= 1.0 + 1e-12);
        CHECK(s.maximizer_u[j - 1] >= 0.0);
        if (j < p.size())
          CHECK(std::pow(j, -2.0) * s.maximizer_u[j - 1] >= std::pow(j + 1.0, -2.0) * s.maximizer_u[j] * (1 - 1e-12));
      }
    }
  }
  SUBCASE("equals the exhaustive oracle for small N") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto p = SequenceProblem(PolyDecay{1.0, 0.5 * double(seed % 3)}, NoiseProfile{1.0, 0.1 + 0.01 * double(seed)},
                                     BesovBall{0.5 + 0.25 * double(seed % 4), 1.0 + double(seed % 2)}, 1 + seed % 6);
      const auto w = random_weights(p, seed);
      const auto s = sup_risk_over_ball(p, w);
      const double bias = oracle::nested_lp_by_enumeration(gains_with_tail(p, w), capacities(p));
      CHECK(std::abs(s.value - (s.variance + bias)) < 1e-6);
    }
  }
  SUBCASE("dominates the risk at every signal in the ball") {
    const auto p = poly_problem(0.1, 12);
    const NormalField f(21, StreamDomain::weight_perturbation);
    std::size_t accepted = 0;
    for (std::uint64_t t = 0; accepted < 300 && t < 100000; ++t) {
      Signal x{std::vector<double>(12)};
      for (std::size_t j = 0; j < 12; ++j) x.coeffs[j] = f.normal(t + 1000, j) * std::pow(j + 1.0, -1.5);
      if (!in_ball(x, p.ball())) continue;  // rejection sampling
      ++accepted;
      const auto w = random_weights(p, t % 17);
      CHECK(filter_risk_at_signal(p, w, x).total <= sup_risk_over_ball(p, w).value * (1 + 1e-12));
    }
    CHECK(accepted == 300);
  }
}

TEST_CASE("minimax linear risk") {
  SUBCASE("first term") {
    const auto p = SequenceProblem(PolyDecay{1.0, 0.0}, NoiseProfile{1.0, 1.0}, BesovBall{1.0, 1.0}, 1);
    const auto r = minimax_linear_risk(p);
    CHECK(r.in_band == Approx(3.0 / 7.0).epsilon(1e-15));
    CHECK(r.truncation_tail == Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("is minimal among perturbed weights") {
    const auto p = poly_problem(0.1, 60);
    const auto best = sup_risk_over_ball(p, minimax_linear_weights(p)).value;
    const NormalField f(8, StreamDomain::weight_perturbation);
    for (std::uint64_t t = 0; t < 100; ++t) {
      auto w = minimax_linear_weights(p);
      for (std::size_t j = 0; j < w.size(); ++j) w.lambdas[j] *= 1.0 + 0.05 * f.normal(t, j);
      CHECK(sup_risk_over_ball(p, w).value >= best);
    }
  }
  SUBCASE("vanishes monotonically as eps -> 0") {
    double prev = INFINITY;
    for (double eps : {1.0, 0.1, 1e-2, 1e-4, 1e-8}) {
      const double v = minimax_linear_risk(poly_problem(eps, 100)).in_band;
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1e-10);
  }
  SUBCASE("backward reading is exposed") {
    const auto p = poly_problem(0.1, 10);
    CHECK(std::isfinite(minimax_linear_risk_backward_reading(p)));
    CHECK(minimax_linear_risk_backward_reading(p) != minimax_linear_risk(p).in_band);
  }
}

TEST_CASE("asymptotic minimax risk") {
  SUBCASE("three-term example") {
    const auto p = SequenceProblem(PolyDecay{1.0, 0.0}, NoiseProfile{1.0, 1.0}, BesovBall{1.0, 1.0}, 3);
    CHECK(asymptotic_minimax_risk(p).value == Approx(2.0 / 3.0 + 0.2 + 2.0 / 29.0).epsilon(1e-15));
    CHECK(asymptotic_minimax_risk(p).value == Approx(0.935632).epsilon(1e-6));
  }
  SUBCASE("approaches the minimax linear risk") {
    // direct sums over a shared N: 1.0131 at 1e-4, 1.0052 at 1e-5, 1.0021 at 1e-6
    const auto direct_ratio = [](double eps, std::size_t n) {
      double series = 0.0, in_band = 0.0;
      for (std::size_t j = n; j >= 1; --j) {
        const double x = double(j), a2 = 1.0 / (x * x), th = 1.0 / (x * x) - 1.0 / ((x + 1) * (x + 1));
        series += eps * eps / (a2 + eps * eps * x * x * x / 2.0);
        in_band += eps * eps * th / (th * a2 + eps * eps);
      }
      return series / in_band;
    };
    double prev_gap = INFINITY;
    for (double eps : {1e-4, 1e-5, 1e-6}) {
      const auto series = adaptive_asymptotic_minimax_risk(PolyDecay{1.0, 1.0}, NoiseProfile{1.0, eps}, BesovBall{1.0, 1.0});
      CHECK(series.tail_bound <= 1e-8 * series.value);
      const auto p = poly_problem(eps, series.terms);
      const double ratio = series.value / minimax_linear_risk(p).total;
      CHECK(ratio == Approx(direct_ratio(eps, series.terms)).epsilon(1e-7));
      CHECK(ratio - 1.0 < prev_gap);
      CHECK(ratio > 1.0);
      prev_gap = ratio - 1.0;
    }
    CHECK(prev_gap < 0.01);
  }
  SUBCASE("bounded as eps grows") {
    const auto series = adaptive_asymptotic_minimax_risk(PolyDecay{1.0, 1.0}, NoiseProfile{1.0, 1e6}, BesovBall{1.0, 1.0}, 1e-6);
    // -> sum 2 r P0 j^{-2r-1} = 2 zeta(3)
    CHECK(series.value == Approx(2.0 * 1.2020569031595942).epsilon(1e-5));
  }
}
