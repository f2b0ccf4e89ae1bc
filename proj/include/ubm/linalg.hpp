#pragma once

#include <complex>

#include <Eigen/Dense>

#include "ubm/error.hpp"

namespace ubm {

using Complex = std::complex<double>;
using Index = Eigen::Index;

// Dense row-major complex storage used for every matrix in the library.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Tolerances {
  double hermitian = 1e-12;  // max |M - M*| entrywise
  double unitarity = 1e-10;  // ||M*M - I||_F
};

inline constexpr Tolerances kDefaultTolerances{};

// Throws kInvalidArgument unless `m` is square, non-empty and finite.
void require_square_finite(const ComplexMatrix& m, const char* what);
void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* what);

// ||M*M - I||_F, for square or tall (isometry) matrices.
double unitarity_defect(const ComplexMatrix& m);

class HermitianMatrix {
 public:
  // Validates M = M* within `tol` and stores the exactly symmetrised matrix.
  explicit HermitianMatrix(const ComplexMatrix& m,
                           double tol = kDefaultTolerances.hermitian);

  static HermitianMatrix zero(Index n);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  HermitianMatrix operator-() const;

 private:
  struct Trusted {};
  HermitianMatrix(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(ComplexMatrix m,
                         double tol = kDefaultTolerances.unitarity);

  static UnitaryMatrix identity(Index n);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  double defect() const { return unitarity_defect(m_); }

  UnitaryMatrix operator*(const UnitaryMatrix& rhs) const;
  UnitaryMatrix adjoint() const;

 private:
  ComplexMatrix m_;
};

// Tr(AB) = sum_{ij} A_ij B_ji.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

// exp(iH) = Q diag(e^{i lambda}) Q* from the Hermitian eigendecomposition.
UnitaryMatrix unitary_exp_i(const HermitianMatrix& h);

// Eigendecomposition of a Hermitian matrix; throws kEigenFailure when the
// solver does not converge.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};
HermitianEigen hermitian_eigen(const HermitianMatrix& h);

// In-place state <- exp(iH) * state. `state` may be square or an n x p block
// of columns. Small-norm generators applied to narrow blocks use a truncated
// Taylor series in matrix-vector products; everything else goes through the
// eigendecomposition.
void apply_exp_i(const HermitianMatrix& h, ComplexMatrix& state);

struct TraceInequalities {
  bool cauchy_schwarz = false;  // |Tr(XY)| <= sqrt(Tr XX*) sqrt(Tr YY*)
  bool square_trace = false;    // Tr(G^2) <= (Tr G)^2
  bool product_trace = false;   // |Tr(GH)| <= Tr(G) Tr(H)

  bool all() const { return cauchy_schwarz && square_trace && product_trace; }
};

// G and H must be Hermitian nonnegative (within tolerance); relative slack 1e-9.
TraceInequalities check_trace_inequalities(const ComplexMatrix& x,
                                           const ComplexMatrix& y,
                                           const ComplexMatrix& g,
                                           const ComplexMatrix& h);

}  // namespace ubm
