#pragma once

#include <cmath>
#include <vector>

#include "ubm/linalg.hpp"
#include "ubm/rng.hpp"

namespace ubm::test {

inline ComplexMatrix random_matrix(Index n, RngStream& rng, Index m = -1) {
  ComplexMatrix a(n, m < 0 ? n : m);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  return a;
}

inline ComplexMatrix random_hermitian(Index n, RngStream& rng) {
  const ComplexMatrix a = random_matrix(n, rng);
  return (a + a.adjoint()) * 0.5;
}

inline ComplexMatrix elementary(Index n, Index i, Index j, double scale = 1.0) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = scale;
  return e;
}

// Running mean with i.i.d. standard error.
struct Mean {
  double sum = 0.0, sum_sq = 0.0;
  long count = 0;
  void add(double x) { sum += x; sum_sq += x * x; ++count; }
  double mean() const { return sum / count; }
  double se() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / count - m * m) / (count - 1));
  }
  bool within(double target, double sigmas = 4.0) const {
    return std::abs(mean() - target) <= sigmas * se() + 1e-15;
  }
};

}  // namespace ubm::test
