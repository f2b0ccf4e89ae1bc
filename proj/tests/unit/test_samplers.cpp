#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ubm/samplers.hpp"

using namespace ubm;
using test::Mean;

TEST_CASE("hermitian_increment normalization") {
  RngStream rng(10, 0);
  Mean scalar;
  for (int i = 0; i < 100000; ++i) {
    const Complex z = hermitian_increment(1, 1.0, rng).matrix()(0, 0);
    REQUIRE(z.imag() == 0.0);
    scalar.add(z.real() * z.real());
  }
  CHECK(scalar.within(1.0));

  // E[(dH)^2] = dt I and E[n Tr(dH^2)] = n^2 dt at n = 4, dt = 0.5.
  const Index n = 4;
  const double dt = 0.5;
  std::vector<Mean> sq(n * n);
  Mean trace_form;
  for (int i = 0; i < 100000; ++i) {
    const ComplexMatrix h = hermitian_increment(n, dt, rng).matrix();
    REQUIRE((h - h.adjoint()).norm() == 0.0);
    const ComplexMatrix h2 = h * h;
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) sq[a * n + b].add(h2(a, b).real());
    trace_form.add(n * h2.trace().real());
  }
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) CHECK(sq[a * n + b].within(a == b ? dt : 0.0));
  CHECK(trace_form.within(n * n * dt));
}

TEST_CASE("hermitian_increment entry variances and errors") {
  RngStream rng(11, 0);
  const Index n = 3;
  const double dt = 0.3;
  Mean diag, off_re, off_im, off_pseudo;
  for (int i = 0; i < 50000; ++i) {
    const ComplexMatrix h = hermitian_increment(n, dt, rng).matrix();
    diag.add(std::norm(h(1, 1)));
    off_re.add(h(0, 2).real() * h(0, 2).real());
    off_im.add(h(0, 2).imag() * h(0, 2).imag());
    off_pseudo.add((h(0, 2) * h(0, 2)).real());
  }
  CHECK(diag.within(dt / n));
  CHECK(off_re.within(dt / (2 * n)));
  CHECK(off_im.within(dt / (2 * n)));
  CHECK(off_pseudo.within(0.0));
  CHECK_THROWS_AS(hermitian_increment(3, 0.0, rng), Error);
  CHECK_THROWS_AS(hermitian_increment(3, -1.0, rng), Error);
}

TEST_CASE("standard_complex_gaussian moments") {
  RngStream rng(12, 0);
  const ComplexVector z = standard_complex_gaussian(100000, rng);
  Mean abs2, pseudo_re, pseudo_im, re2;
  for (Index i = 0; i < z.size(); ++i) {
    abs2.add(std::norm(z(i)));
    pseudo_re.add((z(i) * z(i)).real());
    pseudo_im.add((z(i) * z(i)).imag());
    re2.add(z(i).real() * z(i).real());
  }
  CHECK(abs2.within(1.0));
  CHECK(pseudo_re.within(0.0));
  CHECK(pseudo_im.within(0.0));
  CHECK(re2.within(0.5));
}

TEST_CASE("haar_unitary basic moments") {
  RngStream rng(13, 0);
  Mean phase_mean_re, modulus;
  for (int i = 0; i < 20000; ++i) {
    const Complex u = haar_unitary(1, rng).matrix()(0, 0);
    modulus.add(std::abs(u));
    phase_mean_re.add(u.real());
  }
  CHECK(modulus.mean() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(phase_mean_re.within(0.0));

  // E|Tr(AU)|^2 = Tr(AA*)/n for A = I_8; E u11 = 0; E|u11|^2 = 1/n.
  const Index n = 8;
  Mean tr2, u11_re, u11_abs2, cross;
  for (int i = 0; i < 100000; ++i) {
    const UnitaryMatrix u = haar_unitary(n, rng);
    REQUIRE(u.defect() <= 1e-10);
    const ComplexMatrix& m = u.matrix();
    tr2.add(std::norm(m.trace()));
    u11_re.add(m(0, 0).real());
    u11_abs2.add(std::norm(m(0, 0)));
    cross.add((m(0, 0) * std::conj(m(1, 1))).real());
  }
  CHECK(tr2.within(1.0));
  CHECK(u11_re.within(0.0));
  CHECK(u11_abs2.within(1.0 / n));
  CHECK(cross.within(0.0));
}

TEST_CASE("haar_unitary left invariance") {
  // Tr(A W U) for a fixed unitary W should have the law of Tr(A U): compare
  // E|Tr(A W U)|^2 and E|Tr(A U)|^4 against each other at 4 SE.
  const Index n = 5;
  RngStream setup(14, 99);
  const ComplexMatrix a = test::random_matrix(n, setup);
  const ComplexMatrix w = haar_unitary(n, setup).matrix();
  RngStream r1(14, 0), r2(14, 1);
  Mean plain2, rot2, plain4, rot4;
  for (int i = 0; i < 40000; ++i) {
    const Complex x = (a * haar_unitary(n, r1).matrix()).trace();
    const Complex y = (a * w * haar_unitary(n, r2).matrix()).trace();
    plain2.add(std::norm(x));
    rot2.add(std::norm(y));
    plain4.add(std::norm(x) * std::norm(x));
    rot4.add(std::norm(y) * std::norm(y));
  }
  const double target2 = a.squaredNorm() / n;
  CHECK(plain2.within(target2));
  CHECK(rot2.within(target2));
  CHECK(std::abs(plain4.mean() - rot4.mean()) <= 4 * std::hypot(plain4.se(), rot4.se()));
}

TEST_CASE("haar_columns equal the leading columns of haar_unitary") {
  for (Index p : {1, 2, 5}) {
    RngStream a(15, 3), b(15, 3);
    const ComplexMatrix full = haar_unitary(20, a).matrix();
    const ComplexMatrix cols = haar_columns(20, p, b);
    CHECK((full.leftCols(p) - cols).norm() < 1e-12);
  }
  RngStream rng(15, 0);
  CHECK_THROWS_AS(haar_columns(4, 5, rng), Error);
  CHECK_THROWS_AS(haar_columns(4, 0, rng), Error);
}

TEST_CASE("permutation_matrix") {
  RngStream rng(16, 0);
  CHECK(permutation_matrix(1, rng).matrix()(0, 0) == Complex(1.0));

  const Index n = 5;
  std::vector<Mean> hits(n * n);
  for (int i = 0; i < 100000; ++i) {
    const ComplexMatrix p = permutation_matrix(n, rng).matrix();
    REQUIRE(unitarity_defect(p) == 0.0);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) hits[r * n + c].add(p(r, c).real());
  }
  for (const Mean& m : hits) CHECK(m.within(1.0 / n));
}

TEST_CASE("samplers are reproducible") {
  RngStream a(17, 5), b(17, 5);
  CHECK(hermitian_increment(6, 0.1, a).matrix() == hermitian_increment(6, 0.1, b).matrix());
  CHECK(haar_unitary(6, a).matrix() == haar_unitary(6, b).matrix());
  CHECK(uniform_permutation(30, a) == uniform_permutation(30, b));
}
