#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tikreg/errors.hpp"
#include "tikreg/lower_bound.hpp"
#include "tikreg/risk.hpp"
#include "tikreg/rng.hpp"

using namespace tikreg;
using doctest::Approx;

namespace {

SequenceProblem poly(double eps, std::size_t n, double P0 = 1.0) {
  return SequenceProblem(PolyDecay{1.0, 1.0}, NoiseProfile{1.0, eps}, BesovBall{1.0, P0}, n);
}

}  // namespace

TEST_CASE("transition index") {
  CHECK(transition_index(poly(0.1, 10)) == 3);
  SUBCASE("nonincreasing in eps") {
    std::size_t prev = 0;
    for (double eps : {1.0, 0.3, 0.1, 0.03, 1e-2, 1e-3, 1e-4, 1e-5}) {
      const auto k = transition_index(poly(eps, 1000));
      CHECK(k >= prev);
      prev = k;
    }
  }
  SUBCASE("polynomial scaling constant") {
    const double eps = 1e-6;
    const double k = static_cast<double>(transition_index(poly(eps, 100)));
    CHECK(std::abs(k * std::pow(eps, 0.4) / std::pow(2.0, 0.2) - 1.0) < 0.02);
  }
  SUBCASE("no crossing") {
    CHECK_THROWS_AS(transition_index(poly(1e-6, 10)), NoTransitionError);
    CHECK_THROWS_AS(transition_index(poly(0.0, 10)), NoTransitionError);
    const auto flat = SequenceProblem(ExplicitSpectrum{{1.0, 1.0, 1.0}}, NoiseProfile{1.0, 1e-3}, BesovBall{}, 3);
    CHECK_THROWS_AS(transition_index(flat), NoTransitionError);
  }
  SUBCASE("exponential family in log space") {
    const auto p = SequenceProblem(ExpDecay{1.0, 0.0, 1.0, 1.0}, NoiseProfile{1.0, 1e-200}, BesovBall{}, 100);
    const auto k = transition_index(p);
    CHECK(k > 100);
    CHECK(k < 500);
  }
}

TEST_CASE("build_prior") {
  const auto p = poly(0.1, 10);
  SUBCASE("band") {
    const auto prior = build_prior(p, 0.5, 0.1);
    CHECK(prior.k_eps == 3);
    CHECK(prior.l1 == 1);
    CHECK(prior.l2 == 6);
    CHECK(prior.variances.size() == 6);
  }
  SUBCASE("variance conventions") {
    CHECK(build_prior(p, 0.5, 0.1, VarianceConvention::printed).variance(2) == Approx(0.05625).epsilon(1e-14));
    CHECK(build_prior(p, 0.5, 0.1, VarianceConvention::matched).variance(2) == Approx(0.225).epsilon(1e-14));
  }
  SUBCASE("zero outside the band") {
    const auto prior = build_prior(poly(1e-3, 100), 0.5, 0.1);
    REQUIRE(prior.l1 > 1);
    CHECK(prior.variance(prior.l1 - 1) == 0.0);
    CHECK(prior.variance(prior.l1) > 0.0);
    CHECK(prior.variance(prior.l2) > 0.0);
    CHECK(prior.variance(prior.l2 + 1) == 0.0);
    CHECK(prior.variance(0) == 0.0);
  }
  CHECK_THROWS_AS(build_prior(p, 1.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(build_prior(p, 0.5, 1.0), PreconditionError);
  CHECK_THROWS_AS(build_prior(p, 0.5, 0.0), PreconditionError);
}

TEST_CASE("sample_prior") {
  const auto prior = build_prior(poly(1e-3, 100), 0.5, 0.1);
  SUBCASE("zero coordinates and determinism") {
    const auto a = sample_prior(prior, 5, 0);
    const auto b = sample_prior(prior, 5, 0);
    CHECK(a.coeffs == b.coeffs);
    CHECK(a.coeffs != sample_prior(prior, 5, 1).coeffs);
    CHECK(a.coeffs != sample_prior(prior, 6, 0).coeffs);
    for (std::size_t j = 1; j < prior.l1; ++j) CHECK(a.coeffs[j - 1] == 0.0);
  }
  SUBCASE("second moments") {
    const std::size_t n = 100000;
    std::vector<double> sum_sq(prior.l2, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const auto eta = sample_prior(prior, 9, s);
      for (std::size_t j = 0; j < prior.l2; ++j) sum_sq[j] += eta.coeffs[j] * eta.coeffs[j];
    }
    for (std::size_t j = prior.l1; j <= prior.l2; ++j) {
      const double v = prior.variance(j);
      CHECK(std::abs(sum_sq[j - 1] / n - v) < 3.0 * v * std::sqrt(2.0 / n));
    }
  }
}

TEST_CASE("exclusion probability") {
  SUBCASE("vanishing prior stays in the ball") {
    const auto prior = build_prior(poly(0.01, 100), 0.5, 1.0 - 1e-12);
    CHECK(exclusion_probability(prior, BesovBall{1.0, 1.0}, 1000, 1).hits == 0);
  }
  SUBCASE("below the union bound") {
    for (auto conv : {VarianceConvention::matched, VarianceConvention::printed}) {
      const auto prior = build_prior(poly(0.01, 100), 0.5, 0.5, conv);
      const auto est = exclusion_probability(prior, BesovBall{1.0, 1.0}, 10000, 2);
      const auto bound = hkz_exclusion_bound(prior, BesovBall{1.0, 1.0});
      CHECK(est.estimate <= std::min(1.0, bound.sum_bound));
      CHECK(est.estimate <= std::min(1.0, bound.sum_optimal_bound) + 3.0 * est.std_error);
    }
  }
  SUBCASE("decreases as eps shrinks") {
    std::vector<ProbabilityEstimate> est;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const auto prior = build_prior(poly(eps, 20000), 0.5, 0.5);
      est.push_back(exclusion_probability(prior, BesovBall{1.0, 1.0}, 4000, 3));
    }
    for (std::size_t i = 1; i < est.size(); ++i)
      CHECK(est[i].estimate <= est[i - 1].estimate + 3.0 * std::hypot(est[i].std_error, est[i - 1].std_error));
    CHECK(est.back().estimate < est.front().estimate);
  }
  SUBCASE("independent of the thread count") {
    const auto prior = build_prior(poly(0.01, 100), 0.5, 0.2);
    CHECK(exclusion_probability(prior, BesovBall{1.0, 1.0}, 3000, 4, 1).hits ==
          exclusion_probability(prior, BesovBall{1.0, 1.0}, 3000, 4, 3).hits);
  }
}

TEST_CASE("quadratic form tail threshold") {
  CHECK(hkz_threshold({{1.0}, 1.0}) == Approx(5.0).epsilon(1e-15));
  CHECK(hkz_threshold({{0.5, 0.25, 0.25}, 1e-14}) == Approx(1.0).epsilon(1e-6));
  CHECK(hkz_threshold({{2.0, 1.0}, 4.0}) == Approx(3.0 + 2.0 * std::sqrt(20.0) + 16.0).epsilon(1e-15));
  CHECK_THROWS_AS(hkz_threshold({{1.0}, 0.0}), PreconditionError);
  CHECK_THROWS_AS(hkz_threshold({{-1.0}, 1.0}), PreconditionError);

  SUBCASE("empirical exceedance stays below exp(-t)") {
    const NormalField field(123, StreamDomain::tail_bound_check);
    const std::size_t draws = 200000;
    for (std::size_t size : {1u, 7u, 30u}) {
      std::vector<double> diag(size);
      for (std::size_t i = 0; i < size; ++i) diag[i] = 1.0 / (1.0 + i);
      for (double t : {0.5, 1.0, 2.0, 4.0}) {
        const double thr = hkz_threshold({diag, t});
        std::size_t hits = 0;
        for (std::size_t d = 0; d < draws; ++d) {
          double q = 0.0;
          for (std::size_t i = 0; i < size; ++i) {
            const double z = field.normal(d, i);
            q += diag[i] * z * z;
          }
          hits += q > thr;
        }
        const double p = std::exp(-t);
        CHECK(double(hits) / draws <= p + 3.0 * std::sqrt(p * (1 - p) / draws));
      }
    }
  }
}

TEST_CASE("exclusion bound") {
  CHECK(union_bound_closed_form(0.5, 100) == Approx(200.0 * std::exp(-10.0)).epsilon(1e-15));
  CHECK(union_bound_closed_form(0.5, 100) == Approx(9.08e-3).epsilon(1e-3));

  SUBCASE("rows cover the band") {
    const auto prior = build_prior(poly(1e-4, 1000), 0.5, 0.5, VarianceConvention::printed);
    const auto b = hkz_exclusion_bound(prior, BesovBall{1.0, 1.0});
    REQUIRE(b.rows.size() == prior.l2 - prior.l1 + 1);
    CHECK(b.rows.front().i == prior.l1);
    CHECK(b.rows.back().i == prior.l2);
    CHECK(b.t == Approx(std::sqrt(double(prior.k_eps))));
    for (const auto& row : b.rows) {
      CHECK(row.trace <= 0.5);  // (P0 - delta1) i^{2r}/(2r) sum_{j>=i} j^{-2r-1} <= P0 - delta1
      CHECK(row.threshold >= row.trace);
      CHECK(row.optimal_bound <= row.bound);
      CHECK(row.vacuous == (row.threshold > 1.0));
    }
  }
  SUBCASE("vacuous rows are flagged and counted as 1") {
    const auto prior = build_prior(poly(0.01, 100), 0.5, 0.01, VarianceConvention::matched);
    const auto b = hkz_exclusion_bound(prior, BesovBall{1.0, 1.0});
    CHECK(b.vacuous());
    double expect = 0.0;
    for (const auto& row : b.rows) expect += row.vacuous ? 1.0 : std::exp(-b.t);
    CHECK(b.sum_bound == Approx(expect));
  }
  SUBCASE("non-vacuous for large k") {
    const auto prior = build_prior(poly(1e-8, 10000), 0.5, 0.5, VarianceConvention::printed);
    const auto b = hkz_exclusion_bound(prior, BesovBall{1.0, 1.0});
    CHECK_FALSE(b.vacuous());
    CHECK(b.sum_bound <= b.closed_form * (1 + 1e-12));
  }
}

TEST_CASE("Bayes risk") {
  CHECK(gaussian_bayes_risk_term(1.0, 1.0, 1.0, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_bayes_risk_term(0.0, 1.0, 1.0, 1.0) == 0.0);
  SUBCASE("exact equals asymptotic under the matched schedule") {
    for (double eps : {0.1, 1e-3, 1e-5}) {
      const auto p = poly(eps, 20000);
      const auto prior = build_prior(p, 0.2, 0.05, VarianceConvention::matched);
      const auto b = bayes_risk(prior, p);
      CHECK(std::abs(b.exact - b.asymptotic) <= 1e-12 * b.asymptotic);
    }
  }
  SUBCASE("printed schedule gives a smaller exact risk") {
    const auto p = poly(1e-3, 1000);
    const auto prior = build_prior(p, 0.2, 0.05, VarianceConvention::printed);
    const auto b = bayes_risk(prior, p);
    CHECK(b.exact < b.asymptotic);
  }
  SUBCASE("sandwich against linear filters") {
    const auto base = poly(1e-3, 10);
    const auto prior = build_prior(base, 0.25, 0.05);
    const auto p = base.with_size(prior.l2 + 50);
    const double bayes = bayes_risk(prior, p).exact;
    const NormalField f(17, StreamDomain::weight_perturbation);
    for (std::uint64_t t = 0; t < 5; ++t) {
      auto w = t == 0 ? minimax_linear_weights(p) : tikhonov_weights(p);
      for (std::size_t j = 0; t > 1 && j < w.size(); ++j) w.lambdas[j] *= 1.0 + 0.2 * f.normal(t, j);
      CHECK(bayes <= prior_expected_risk(prior, p, w) * (1 + 1e-12));
      const auto corr = outside_ball_bias(prior, p, w, 4000, 11 + t);
      CHECK(bayes <= sup_risk_over_ball(p, w).value + corr.mean + 3.0 * corr.std_error);
    }
  }
  SUBCASE("filter must cover the band") {
    const auto p = poly(1e-3, 10);
    const auto prior = build_prior(p, 0.25, 0.05);
    CHECK_THROWS_AS(prior_expected_risk(prior, p, tikhonov_weights(p)), DimensionError);
  }
}
