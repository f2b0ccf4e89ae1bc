#include "ubm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ubm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotHermitian: return "not_hermitian";
    case ErrorCode::kNotUnitary: return "not_unitary";
    case ErrorCode::kEigenFailure: return "eigen_failure";
    case ErrorCode::kInvalidGrid: return "invalid_grid";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": expected a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": matrix has non-finite entries");
  }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": dimension mismatch " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

double unitarity_defect(const ComplexMatrix& m) {
  ComplexMatrix gram = m.adjoint() * m;
  gram.diagonal().array() -= Complex(1.0, 0.0);
  return gram.norm();
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
  require_square_finite(m, "HermitianMatrix");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    throw Error(ErrorCode::kNotHermitian,
                "HermitianMatrix: |M - M*| = " + std::to_string(asym) +
                    " exceeds tolerance");
  }
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::zero(Index n) {
  return HermitianMatrix(ComplexMatrix::Zero(n, n), Trusted{});
}

HermitianMatrix HermitianMatrix::operator-() const {
  return HermitianMatrix(ComplexMatrix(-m_), Trusted{});
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
  require_square_finite(m_, "UnitaryMatrix");
  const double defect = unitarity_defect(m_);
  if (!(defect <= tol)) {
    throw Error(ErrorCode::kNotUnitary,
                "UnitaryMatrix: ||M*M - I||_F = " + std::to_string(defect) +
                    " exceeds tolerance");
  }
}

UnitaryMatrix UnitaryMatrix::identity(Index n) {
  return UnitaryMatrix(ComplexMatrix::Identity(n, n));
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& rhs) const {
  require_same_dim(m_, rhs.m_, "UnitaryMatrix::operator*");
  return UnitaryMatrix(m_ * rhs.m_);
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
  return UnitaryMatrix(m_.adjoint());
}

// ---------------------------------------------------------------------------

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "trace_product: incompatible shapes");
  }
  // Row-major a against row-major b^T: both walk contiguous memory.
  return a.cwiseProduct(b.transpose()).sum();
}

HermitianEigen hermitian_eigen(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure,
                "hermitian_eigen: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

ComplexVector phases(const RealVector& values) {
  ComplexVector out(values.size());
  for (Index i = 0; i < values.size(); ++i) {
    out(i) = Complex(std::cos(values(i)), std::sin(values(i)));
  }
  return out;
}

// Generators with ||H||_F above this go through the eigendecomposition.
constexpr double kTaylorNormLimit = 4.0;
constexpr int kTaylorMaxTerms = 64;

bool taylor_step(const ComplexMatrix& h, ComplexMatrix& state) {
  const double hnorm = h.norm();
  if (hnorm > kTaylorNormLimit) return false;
  ComplexMatrix term = state;
  ComplexMatrix sum = state;
  const double scale = std::max(1.0, state.norm());
  for (int k = 1; k <= kTaylorMaxTerms; ++k) {
    term = (h * term) * Complex(0.0, 1.0 / k);
    sum += term;
    const double tn = term.norm();
    if (k > 2.0 * hnorm && tn <= 1e-17 * scale) {
      state = std::move(sum);
      return true;
    }
  }
  return false;
}

}  // namespace

UnitaryMatrix unitary_exp_i(const HermitianMatrix& h) {
  const HermitianEigen eig = hermitian_eigen(h);
  const ComplexVector ph = phases(eig.values);
  ComplexMatrix out = eig.vectors * ph.asDiagonal() * eig.vectors.adjoint();
  return UnitaryMatrix(std::move(out));
}

void apply_exp_i(const HermitianMatrix& h, ComplexMatrix& state) {
  const Index n = h.dim();
  if (state.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "apply_exp_i: state has " + std::to_string(state.rows()) +
                    " rows, generator is " + std::to_string(n) + "x" +
                    std::to_string(n));
  }
  if (4 * state.cols() <= n && taylor_step(h.matrix(), state)) return;
  const HermitianEigen eig = hermitian_eigen(h);
  const ComplexVector ph = phases(eig.values);
  ComplexMatrix rotated = eig.vectors.adjoint() * state;
  rotated = ph.asDiagonal() * rotated;
  state.noalias() = eig.vectors * rotated;
}

// ---------------------------------------------------------------------------

namespace {

bool leq_rel(double lhs, double rhs) {
  constexpr double kRel = 1e-9;
  return lhs <= rhs + kRel * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

void require_hermitian_nonneg(const ComplexMatrix& m, const char* what) {
  require_square_finite(m, what);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::kNotHermitian,
                std::string(what) + ": matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      (m + m.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure,
                std::string(what) + ": eigensolver did not converge");
  }
  if (solver.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, m.norm())) {
    throw Error(ErrorCode::kNotHermitian,
                std::string(what) + ": matrix is not nonnegative");
  }
}

}  // namespace

TraceInequalities check_trace_inequalities(const ComplexMatrix& x,
                                           const ComplexMatrix& y,
                                           const ComplexMatrix& g,
                                           const ComplexMatrix& h) {
  require_square_finite(x, "check_trace_inequalities(X)");
  require_same_dim(x, y, "check_trace_inequalities(Y)");
  require_same_dim(x, g, "check_trace_inequalities(G)");
  require_same_dim(x, h, "check_trace_inequalities(H)");
  require_hermitian_nonneg(g, "check_trace_inequalities(G)");
  require_hermitian_nonneg(h, "check_trace_inequalities(H)");

  TraceInequalities out;
  const double xx = x.squaredNorm();  // Tr(XX*)
  const double yy = y.squaredNorm();
  out.cauchy_schwarz =
      leq_rel(std::abs(trace_product(x, y)), std::sqrt(xx) * std::sqrt(yy));

  const double tr_g = g.trace().real();
  const double tr_h = h.trace().real();
  out.square_trace = leq_rel(trace_product(g, g).real(), tr_g * tr_g);
  out.product_trace = leq_rel(std::abs(trace_product(g, h)), tr_g * tr_h);
  return out;
}

}  // namespace ubm
