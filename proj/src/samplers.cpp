#include "ubm/samplers.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/QR>

namespace ubm {

namespace {

void require_positive_dim(Index n, const char* what) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": dimension must be positive, got " +
                    std::to_string(n));
  }
}

// Column-major fill: column j of the Ginibre matrix comes from the stream
// before column j+1.
ComplexMatrix ginibre_columns(Index n, Index p, RngStream& rng) {
  const double s = std::sqrt(0.5);
  ComplexMatrix g(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(s * re, s * im);
    }
  }
  return g;
}

// Q * diag(R_jj / |R_jj|) for the leading p columns.
ComplexMatrix haar_from_ginibre(const ComplexMatrix& g) {
  const Index n = g.rows();
  const Index p = g.cols();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, p);
  const ComplexMatrix& r = qr.matrixQR();
  for (Index j = 0; j < p; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    // A zero pivot has probability zero; keep Q's column as is.
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

}  // namespace

HermitianMatrix hermitian_increment(Index n, double dt, RngStream& rng) {
  require_positive_dim(n, "hermitian_increment");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidArgument,
                "hermitian_increment: dt must be positive and finite, got " +
                    std::to_string(dt));
  }
  const double sd_diag = std::sqrt(dt / static_cast<double>(n));
  const double sd_off = std::sqrt(dt / (2.0 * static_cast<double>(n)));
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = Complex(sd_diag * rng.normal(), 0.0);
    for (Index j = i + 1; j < n; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      m(i, j) = Complex(sd_off * re, sd_off * im);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return HermitianMatrix(m);
}

ComplexVector standard_complex_gaussian(Index k, RngStream& rng) {
  require_positive_dim(k, "standard_complex_gaussian");
  const double s = std::sqrt(0.5);
  ComplexVector z(k);
  for (Index i = 0; i < k; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    z(i) = Complex(s * re, s * im);
  }
  return z;
}

UnitaryMatrix haar_unitary(Index n, RngStream& rng) {
  require_positive_dim(n, "haar_unitary");
  return UnitaryMatrix(haar_from_ginibre(ginibre_columns(n, n, rng)));
}

ComplexMatrix haar_columns(Index n, Index p, RngStream& rng) {
  require_positive_dim(n, "haar_columns");
  if (p < 1 || p > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "haar_columns: need 1 <= p <= n, got p = " + std::to_string(p));
  }
  ComplexMatrix q = haar_from_ginibre(ginibre_columns(n, p, rng));
  const double defect = unitarity_defect(q);
  if (!(defect <= kDefaultTolerances.unitarity)) {
    throw Error(ErrorCode::kNotUnitary,
                "haar_columns: columns not orthonormal, defect " +
                    std::to_string(defect));
  }
  return q;
}

std::vector<Index> uniform_permutation(Index n, RngStream& rng) {
  require_positive_dim(n, "uniform_permutation");
  std::vector<Index> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(sigma[static_cast<std::size_t>(i)],
              sigma[static_cast<std::size_t>(j)]);
  }
  return sigma;
}

ComplexMatrix permutation_to_matrix(const std::vector<Index>& sigma) {
  const auto n = static_cast<Index>(sigma.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    m(sigma[static_cast<std::size_t>(j)], j) = 1.0;
  }
  return m;
}

UnitaryMatrix permutation_matrix(Index n, RngStream& rng) {
  return UnitaryMatrix(permutation_to_matrix(uniform_permutation(n, rng)));
}

}  // namespace ubm
