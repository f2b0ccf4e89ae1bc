#include <chrono>
#include <cmath>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "ubm/oracles.hpp"
#include "ubm/samplers.hpp"
#include "ubm/stats.hpp"

using namespace ubm;

TEST_CASE("kolmogorov_cdf against exact references") {
  // Exact values (rational / 40-digit evaluation of the Durbin matrix).
  struct Ref { long n; double d; double p; };
  for (const Ref& r : {Ref{10, 0.274, 0.6284796154565043}, Ref{100, 0.1, 0.74730724299361},
                       Ref{200, 0.6 / std::sqrt(200.0), 0.15099237515489589},
                       Ref{1000, 0.04, 0.92066044502459878}}) {
    CAPTURE(r.n);
    CHECK(kolmogorov_cdf(r.n, r.d) == doctest::Approx(r.p).epsilon(1e-9));
  }
  // Large-n references from an independent approximate implementation.
  for (const Ref& r : {Ref{5000, 0.02, 0.9638605860467436}, Ref{20000, 0.01, 0.9636139609475127},
                       Ref{100000, 0.0052, 0.9910700106749253}}) {
    CAPTURE(r.n);
    CHECK(kolmogorov_cdf(r.n, r.d) == doctest::Approx(r.p).epsilon(1e-5));
  }
  CHECK(kolmogorov_cdf(50, 0.0) == 0.0);
  CHECK(kolmogorov_cdf(50, 1.0) == 1.0);
  CHECK_THROWS_AS(kolmogorov_cdf(0, 0.5), Error);
}

TEST_CASE("asymptotic fallback tracks the exact distribution") {
  for (long n : {200L, 1000L, 5000L}) {
    for (double lambda : {0.6, 0.9, 1.2, 1.5, 1.8}) {
      const double d = lambda / std::sqrt(double(n));
      const double exact = kolmogorov_cdf_exact(n, d);
      const double approx = kolmogorov_cdf_asymptotic(n, d);
      CHECK(std::abs(approx - exact) < 1e-2);
      // In the tail, where the fallback is used, p-values agree to 2%.
      if (lambda >= 1.2 && n >= 1000) CHECK(std::abs((approx - exact) / (1.0 - exact)) < 0.02);
    }
  }
}

TEST_CASE("ks_test null and power") {
  RngStream rng(50, 0);
  std::vector<double> normal, expo;
  boost::random::exponential_distribution<double> ex(1.0);
  for (int i = 0; i < 20000; ++i) {
    normal.push_back(rng.normal());
    expo.push_back(ex(rng) - 1.0);
  }
  CHECK(ks_test(normal, [](double x) { return normal_cdf(x); }).p_value > 0.01);
  CHECK(ks_test(expo, [](double x) { return normal_cdf(x); }).p_value < 0.01);
  CHECK_THROWS_AS(ks_test({}, [](double x) { return x; }), Error);
}

TEST_CASE("batch means") {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = double(i % 7);
  const Estimate e = batch_mean(x, 20);
  double direct = 0.0;
  for (double v : x) direct += v;
  CHECK(e.value == doctest::Approx(direct / 1000.0));
  CHECK(e.se > 0.0);
  CHECK_THROWS_AS(batch_mean(std::vector<double>{1.0}, 20), Error);
  CHECK_THROWS_AS(batch_mean(std::vector<double>{1.0, 2.0}, 1), Error);
  CHECK(batch_mean(std::vector<double>{1.0, 3.0}, 20).se == doctest::Approx(1.0));

  // SE shrinks like 1/sqrt(N) on Gaussian input, within a factor 1.5.
  RngStream rng(51, 0);
  std::vector<double> se;
  for (int n : {1000, 10000, 100000}) {
    std::vector<double> z(static_cast<std::size_t>(n));
    for (auto& v : z) v = rng.normal();
    se.push_back(batch_mean(z, 20).se * std::sqrt(double(n)));
  }
  for (double s : se) {
    CHECK(s / se.front() < 1.5);
    CHECK(se.front() / s < 1.5);
  }
}

TEST_CASE("estimate_pseudo_covariance examples") {
  std::vector<ComplexVector> zeros(100, ComplexVector::Zero(2));
  const MatrixEstimate z = estimate_pseudo_covariance(zeros);
  CHECK(z.value.norm() == 0.0);
  CHECK(z.degenerate);

  RngStream rng(52, 0);
  std::vector<ComplexVector> circ, real;
  for (int i = 0; i < 100000; ++i) {
    circ.push_back(standard_complex_gaussian(1, rng));
    ComplexVector r(1);
    r(0) = rng.normal();
    real.push_back(r);
  }
  const MatrixEstimate c = estimate_pseudo_covariance(circ);
  CHECK(std::abs(c.value(0, 0)) <= 4.0 * std::abs(c.se(0, 0)));
  const MatrixEstimate r = estimate_pseudo_covariance(real);
  CHECK(std::abs(r.value(0, 0) - 1.0) <= 4.0 * std::abs(r.se(0, 0)));
  CHECK_THROWS_AS(estimate_pseudo_covariance({ComplexVector::Zero(1)}), Error);

  const MatrixEstimate h = estimate_hermitian_covariance(circ);
  CHECK(h.value(0, 0).imag() == 0.0);
  CHECK(h.value(0, 0).real() >= 0.0);
}

TEST_CASE("gaussianity_test") {
  RngStream rng(53, 0);
  std::vector<Complex> gauss, expo, haar;
  boost::random::exponential_distribution<double> ex(1.0);
  for (int i = 0; i < 100000; ++i) {
    gauss.push_back(standard_complex_gaussian(1, rng)(0));
    expo.push_back(Complex(ex(rng) - 1.0, ex(rng) - 1.0));
  }
  const GaussianityReport g = gaussianity_test(gauss);
  CHECK(g.passed());
  CHECK(g.kurtosis_ratio.value == doctest::Approx(2.0).epsilon(0.05));
  CHECK_FALSE(gaussianity_test(expo).passed());
  CHECK(gaussianity_test(expo).ks_real.p_value < 0.01);
  CHECK_THROWS_AS(gaussianity_test(std::vector<Complex>(10)), Error);
}

TEST_CASE("increment_independence_check") {
  const TimeGrid grid({0.0, 1.0, 2.0, 3.0}, 0.01);
  RngStream rng(54, 0);
  std::vector<LinearStatisticPath> bm, ramp;
  for (int i = 0; i < 20000; ++i) {
    LinearStatisticPath p{grid, {}}, q{grid, {}};
    ComplexVector x = ComplexVector::Zero(1);
    const ComplexVector z = standard_complex_gaussian(1, rng);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (j > 0) x += standard_complex_gaussian(1, rng);
      p.values.push_back(x);
      q.values.push_back(grid.times()[j] * z);
    }
    bm.push_back(std::move(p));
    ramp.push_back(std::move(q));
  }
  CHECK(increment_independence_check(bm, 0.0, 1.0, 3.0).passed());
  CHECK_FALSE(increment_independence_check(ramp, 0.0, 1.0, 3.0).passed());
  CHECK_THROWS_AS(increment_independence_check(bm, 0.0, 1.5, 3.0), Error);
  CHECK_THROWS_AS(increment_independence_check(bm, 1.0, 1.0, 3.0), Error);
}

TEST_CASE("poisson_fit") {
  RngStream rng(55, 0);
  boost::random::poisson_distribution<long> pois(1.0);
  std::vector<long> draws(100000);
  for (auto& c : draws) c = pois(rng);
  CHECK(poisson_fit(draws).tv_distance <= 0.01);
  CHECK(poisson_fit(std::vector<long>(10000, 0)).tv_distance == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(poisson_fit(std::vector<long>(100, 0)), Error);

  std::vector<long> fixed(100000);
  for (auto& c : fixed) {
    const auto sigma = uniform_permutation(500, rng);
    long f = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i) f += sigma[i] == Index(i);
    c = f;
  }
  CHECK(poisson_fit(fixed).tv_distance <= 0.02);
}

TEST_CASE("verdicts") {
  CHECK(verdict_of(1.0, 0.1, 1.3, 4.0, 0.0, Comparison::kWithin) == Verdict::kPass);
  CHECK(verdict_of(1.0, 0.01, 1.3, 4.0, 0.0, Comparison::kWithin) == Verdict::kFail);
  CHECK(verdict_of(1.0, 0.01, 1.05, 4.0, 0.1, Comparison::kWithin) == Verdict::kPass);
  CHECK(verdict_of(99.0, 0.0, 100.0, 4.0, 0.0, Comparison::kAtMost) == Verdict::kPass);
  CHECK(verdict_of(0.005, 0.0, 0.01, 4.0, 0.0, Comparison::kAtLeast) == Verdict::kFail);
  const MomentReport r = make_report("x", 1.0, 2.0, Complex(0.3, 0.4), 1.0, 4.0);
  CHECK(r.sigma_distance == doctest::Approx(2.0));
  CHECK(r.passed());
  CHECK(std::isinf(make_report("y", 0.0, 1.0, 0.0, 0.0, 4.0).sigma_distance));
  CHECK(make_report("z", 0.0, 1.0, 0.0, 1.0, 4.0).sigma_distance == 0.0);
}

namespace {

Scenario small_scenario() {
  Scenario s;
  s.n = 64;
  s.alpha_n = 1.0;
  s.outer_times = {0.0, 1.0};
  s.replications = 10000;
  s.observables.kind = ObservableKind::kCustom;
  ComplexMatrix a = ComplexMatrix::Zero(64, 64);
  a(0, 0) = 8.0;  // sqrt(n) E_11
  s.observables.custom = {a};
  s.step_cap = 0.05;
  s.seed = 7;
  return s;
}

}  // namespace

TEST_CASE("run_ensemble: Hermitian covariance of sqrt(n) E_11 is t") {
  const Scenario s = small_scenario();
  const EnsembleStats st = run_ensemble(s);
  REQUIRE(st.slices.size() == 2);
  CHECK(st.slices[0].hermitian.value.norm() == 0.0);
  const Complex v = st.slices[1].hermitian.value(0, 0);
  CHECK(std::abs(v - 1.0) <= 4.0 * std::abs(st.slices[1].hermitian.se(0, 0)));
  const CovariancePair exact = finite_covariance(s.observables.custom, 1.0, 1.0);
  const Complex ps = st.slices[1].pseudo.value(0, 0);
  CHECK(std::abs(ps - exact.pseudo(0, 0)) <= 4.0 * std::abs(st.slices[1].pseudo.se(0, 0)));
}

TEST_CASE("run_ensemble: determinism, thread independence and tiny ensembles") {
  Scenario s = small_scenario();
  s.replications = 64;
  s.observables.kind = ObservableKind::kElementaryCorner;
  s.observables.corner = 2;
  const EnsembleStats a = run_ensemble(s, 1);
  const EnsembleStats b = run_ensemble(s, 1);
  const EnsembleStats c = run_ensemble(s, 3);
  for (std::size_t j = 0; j < a.slices.size(); ++j) {
    CHECK(a.slices[j].hermitian.value == b.slices[j].hermitian.value);
    CHECK(a.slices[j].pseudo.se == c.slices[j].pseudo.se);
    CHECK(a.slices[j].hermitian.value == c.slices[j].hermitian.value);
  }
  s.replications = 2;
  const EnsembleStats two = run_ensemble(s, 1);
  CHECK(two.slices[1].hermitian.se.allFinite());
  s.replications = 0;
  CHECK_THROWS_AS(run_ensemble(s, 1), Error);
}
