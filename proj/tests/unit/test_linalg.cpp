#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "ubm/linalg.hpp"

using namespace ubm;
using ubm::test::elementary;
using ubm::test::random_hermitian;
using ubm::test::random_matrix;

TEST_CASE("trace_product examples") {
  const ComplexMatrix i3 = ComplexMatrix::Identity(3, 3);
  CHECK(std::abs(trace_product(i3, i3) - Complex(3.0)) == 0.0);
  CHECK(std::abs(trace_product(elementary(3, 0, 1), elementary(3, 1, 0)) - 1.0) == 0.0);

  RngStream rng(1, 0);
  const ComplexMatrix a = random_matrix(6, rng);
  const Complex t = trace_product(a, a.adjoint());
  double direct = 0.0;
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) direct += std::norm(a(i, j));
  CHECK(t.imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.real() == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("trace_product symmetry and errors") {
  RngStream rng(2, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const ComplexMatrix a = random_matrix(7, rng);
    const ComplexMatrix b = random_matrix(7, rng);
    CHECK(std::abs(trace_product(a, b) - trace_product(b, a)) <= 1e-12 * (1 + std::abs(trace_product(a, b))));
  }
  CHECK_THROWS_AS(trace_product(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3)), Error);
  try {
    trace_product(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("HermitianMatrix and UnitaryMatrix invariants") {
  ComplexMatrix m(2, 2);
  m << 1.0, Complex(0, 1), Complex(0, 1), 2.0;
  CHECK_THROWS_AS(HermitianMatrix{m}, Error);
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(HermitianMatrix{bad}, Error);
  CHECK_THROWS_AS(UnitaryMatrix{ComplexMatrix::Constant(2, 2, 1.0)}, Error);
  CHECK_THROWS_AS(UnitaryMatrix{ComplexMatrix(2, 3)}, Error);
  CHECK(UnitaryMatrix::identity(5).defect() == 0.0);
}

TEST_CASE("unitary_exp_i examples") {
  CHECK((unitary_exp_i(HermitianMatrix::zero(4)).matrix() - ComplexMatrix::Identity(4, 4)).norm() < 1e-14);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = std::numbers::pi;
  const ComplexMatrix e = unitary_exp_i(HermitianMatrix(d)).matrix();
  CHECK(std::abs(e(0, 0) + 1.0) < 1e-14);
  CHECK(std::abs(e(1, 1) - 1.0) < 1e-14);
  CHECK(std::abs(e(0, 1)) < 1e-14);

  RngStream rng(3, 0);
  const HermitianMatrix h(random_hermitian(4, rng) * 0.3);
  ComplexMatrix series = ComplexMatrix::Identity(4, 4);
  ComplexMatrix term = ComplexMatrix::Identity(4, 4);
  for (int k = 1; k <= 30; ++k) {
    term = term * h.matrix() * Complex(0.0, 1.0 / k);
    series += term;
  }
  CHECK((unitary_exp_i(h).matrix() - series).norm() < 1e-10);
}

TEST_CASE("exp(iH) exp(-iH) = I") {
  RngStream rng(4, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const HermitianMatrix h(random_hermitian(1 + rep % 9, rng) * 3.0);
    const UnitaryMatrix prod = unitary_exp_i(h) * unitary_exp_i(-h);
    CHECK((prod.matrix() - ComplexMatrix::Identity(h.dim(), h.dim())).norm() <= 1e-10);
  }
}

TEST_CASE("apply_exp_i agrees with unitary_exp_i on both paths") {
  RngStream rng(5, 0);
  for (Index n : {4, 16, 40}) {
    for (double scale : {0.05, 0.5, 3.0}) {
      const HermitianMatrix h(random_hermitian(n, rng) * (scale / n));
      const ComplexMatrix u = unitary_exp_i(h).matrix();
      for (Index p : {Index{1}, n / 4, n}) {
        if (p < 1) continue;
        ComplexMatrix state = random_matrix(n, rng, p);
        const ComplexMatrix expected = u * state;
        apply_exp_i(h, state);
        CHECK((state - expected).norm() <= 1e-12 * (1 + expected.norm()));
      }
    }
  }
  ComplexMatrix wrong(3, 1);
  CHECK_THROWS_AS(apply_exp_i(HermitianMatrix::zero(4), wrong), Error);
}

TEST_CASE("trace inequalities: examples") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK(check_trace_inequalities(i2, i2, i2, i2).all());
  const ComplexMatrix e11 = elementary(3, 0, 0);
  const TraceInequalities r = check_trace_inequalities(e11, e11, e11, e11);
  CHECK(r.square_trace);
  CHECK(r.product_trace);
  CHECK(trace_product(e11, e11).real() == 1.0);

  ComplexMatrix not_herm = elementary(2, 0, 1);
  CHECK_THROWS_AS(check_trace_inequalities(i2, i2, not_herm, i2), Error);
  CHECK_THROWS_AS(check_trace_inequalities(i2, i2, i2, -i2), Error);
}

TEST_CASE("trace inequalities: randomized sweep") {
  RngStream rng(6, 0);
  int passed = 0;
  const int cases = 10000;
  for (int rep = 0; rep < cases; ++rep) {
    const Index n = 1 + static_cast<Index>(rng.below(6));
    const ComplexMatrix x = random_matrix(n, rng);
    const ComplexMatrix y = random_matrix(n, rng);
    const ComplexMatrix mg = random_matrix(n, rng);
    const ComplexMatrix mh = random_matrix(n, rng);
    if (check_trace_inequalities(x, y, mg * mg.adjoint(), mh * mh.adjoint()).all()) ++passed;
  }
  CHECK(passed == cases);
}
