#include "ubm/oracles.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ubm {

namespace {

void require_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": time must be finite and >= 0, got " +
                    std::to_string(t));
  }
}

void require_matrix(const ComplexMatrix& a, Index n, const char* what) {
  require_square_finite(a, what);
  if (a.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": matrix is " + std::to_string(a.rows()) +
                    "x" + std::to_string(a.rows()) + " but n = " +
                    std::to_string(n));
  }
}

double tr_aa_star(const ComplexMatrix& a) { return a.squaredNorm(); }

}  // namespace

ExtendedAlpha ExtendedAlpha::finite(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::kInvalidArgument,
                "ExtendedAlpha::finite: need 0 < alpha < inf, got " +
                    std::to_string(x), "alpha");
  }
  return ExtendedAlpha(Kind::kFinite, x);
}

std::string ExtendedAlpha::to_string() const {
  switch (kind_) {
    case Kind::kZero: return "0";
    case Kind::kFinite: return std::to_string(value_);
    case Kind::kInfinity: return "inf";
  }
  return "?";
}

// ---------------------------------------------------------------------------

LimitData::LimitData(ComplexVector a, ComplexMatrix p, ComplexMatrix q,
                     ExtendedAlpha alpha)
    : a_(std::move(a)), p_(std::move(p)), q_(std::move(q)), alpha_(alpha) {
  const Index k = a_.size();
  if (k < 1 || p_.rows() != k || p_.cols() != k || q_.rows() != k ||
      q_.cols() != k) {
    throw Error(ErrorCode::kDimensionMismatch,
                "LimitData: a, p, q must be k, k x k, k x k");
  }
  const double scale = std::max(1.0, q_.cwiseAbs().maxCoeff());
  if ((q_ - q_.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::kNotHermitian, "LimitData: q is not Hermitian", "q");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      (q_ + q_.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw Error(ErrorCode::kInvalidArgument,
                "LimitData: q is not nonnegative", "q");
  }
  const double pscale = std::max(1.0, p_.cwiseAbs().maxCoeff());
  if ((p_ - p_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * pscale) {
    throw Error(ErrorCode::kInvalidArgument, "LimitData: p is not symmetric",
                "p");
  }
}

LimitData LimitData::from_observables(
    const std::vector<ComplexMatrix>& matrices, ExtendedAlpha alpha) {
  if (matrices.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "LimitData::from_observables: no matrices");
  }
  const auto k = static_cast<Index>(matrices.size());
  const Index n = matrices.front().rows();
  ComplexVector a(k);
  ComplexMatrix p(k, k), q(k, k);
  for (Index l = 0; l < k; ++l) {
    const ComplexMatrix& al = matrices[static_cast<std::size_t>(l)];
    require_matrix(al, n, "LimitData::from_observables");
    a(l) = al.trace() / static_cast<double>(n);
    for (Index m = 0; m < k; ++m) {
      const ComplexMatrix& am = matrices[static_cast<std::size_t>(m)];
      require_matrix(am, n, "LimitData::from_observables");
      p(l, m) = trace_product(al, am) / static_cast<double>(n);
      q(l, m) = trace_product(al, am.adjoint()) / static_cast<double>(n);
    }
  }
  return LimitData(std::move(a), std::move(p), std::move(q), alpha);
}

// ---------------------------------------------------------------------------

Complex mixed_moment(const ComplexMatrix& a, Index n, double t) {
  require_matrix(a, n, "mixed_moment");
  require_time(t, "mixed_moment");
  const double x = t / static_cast<double>(n);
  const Complex tr = a.trace();
  return trace_product(a, a) * std::cosh(x) - tr * tr * std::sinh(x);
}

SecondMomentInternals second_moment_internals(const ComplexMatrix& a_in,
                                              Index n) {
  require_matrix(a_in, n, "second_moment");
  if (n < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "second_moment: formula undefined below n=3", "n");
  }
  const double s = tr_aa_star(a_in);
  if (!(s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "second_moment: A must be nonzero");
  }
  const double nd = static_cast<double>(n);
  const ComplexMatrix a = a_in * std::sqrt(nd / s);
  const ComplexMatrix as = a.adjoint();
  const ComplexMatrix aas = a * as;
  const Complex tr_a = a.trace();
  const Complex tr_a2 = trace_product(a, a);
  const double r_aasaas = trace_product(aas, aas).real() / nd;
  const double r_aaasas = trace_product(a * a, as * as).real() / nd;
  const Complex tr_asaas = trace_product(as, aas);  // Tr(A*AA*)
  const double abs_tr_a2 = std::norm(tr_a);        // |Tr A|^2
  const double d1 = nd * nd - 1.0;
  const double d4 = nd * nd - 4.0;

  SecondMomentInternals in;
  in.n = n;
  in.scale = (s / nd) * (s / nd);
  in.kappa = r_aasaas - 1.0;
  in.theta = 2.0 - r_aasaas - r_aaasas - abs_tr_a2 + (tr_a * tr_asaas).real();
  in.mu = (tr_a * tr_a * trace_product(as, as)).real() -
          2.0 * nd * in.kappa / d1 - 4.0 * nd * in.theta / d4;
  in.nu = -0.5 * std::norm(tr_a2) - 0.5 * abs_tr_a2 * abs_tr_a2 +
          2.0 * (tr_a * tr_asaas).real() - 2.0 * nd * nd * in.kappa / d1 -
          2.0 * nd * nd * in.theta / d4;
  in.tr_a2_abs2 = std::norm(tr_a2);
  in.r4 = r_aaasas;
  return in;
}

double SecondMomentInternals::w(double t) const {
  const double nd = static_cast<double>(n);
  const double e1 = std::expm1(t);
  const double e2 = std::expm1(2.0 * t);
  return -2.0 * kappa / (nd * nd - 1.0) * e2 - 8.0 * theta / (nd * nd - 4.0) * e1 +
         2.0 * e2 + 4.0 * (r4 - 1.0) * e1;
}

double SecondMomentInternals::f(double t) const {
  const double x = 2.0 * t / static_cast<double>(n);
  // cosh(x) - 1 = 2 sinh^2(x/2) keeps small-t accuracy.
  const double cosh_m1 = 2.0 * std::sinh(0.5 * x) * std::sinh(0.5 * x);
  return tr_a2_abs2 - mu * std::sinh(x) - nu * cosh_m1 + w(t);
}

double SecondMomentInternals::g(double t) const {
  const double nd = static_cast<double>(n);
  const double x = 2.0 * t / nd;
  return mu * std::cosh(x) + nu * std::sinh(x) +
         2.0 * nd * kappa / (nd * nd - 1.0) * std::exp(2.0 * t) +
         4.0 * nd * theta / (nd * nd - 4.0) * std::exp(t);
}

double SecondMomentInternals::et_coefficient() const {
  const double nd = static_cast<double>(n);
  return scale * (4.0 * (r4 - 1.0) - 8.0 * theta / (nd * nd - 4.0));
}

double SecondMomentInternals::e2t_coefficient() const {
  const double nd = static_cast<double>(n);
  return scale * (2.0 - 2.0 * kappa / (nd * nd - 1.0));
}

double second_moment(const ComplexMatrix& a, Index n, double t) {
  require_time(t, "second_moment");
  const SecondMomentInternals in = second_moment_internals(a, n);
  return in.scale * in.f(t);
}

Complex u_cd(const ComplexMatrix& c, const ComplexMatrix& d, Index n,
             double t) {
  require_matrix(c, n, "u_cd");
  require_matrix(d, n, "u_cd");
  require_time(t, "u_cd");
  return std::expm1(t) / static_cast<double>(n) * c.trace() * d.trace() +
         trace_product(c, d);
}

Complex v_cd(const ComplexMatrix& c, const ComplexMatrix& d, Index n,
             double t) {
  require_matrix(c, n, "v_cd");
  require_matrix(d, n, "v_cd");
  require_time(t, "v_cd");
  return std::expm1(t) / static_cast<double>(n) * trace_product(c, d) +
         c.trace() * d.trace();
}

// ---------------------------------------------------------------------------

double f_alpha(const ExtendedAlpha& alpha, double t) {
  require_time(t, "f_alpha");
  switch (alpha.kind()) {
    case ExtendedAlpha::Kind::kZero: return t;
    case ExtendedAlpha::Kind::kFinite:
      return std::log1p(alpha.value() * t) / alpha.value();
    case ExtendedAlpha::Kind::kInfinity: return 0.0;
  }
  return 0.0;
}

CovariancePair limit_covariance(const LimitData& data, double t, double s) {
  require_time(t, "limit_covariance");
  require_time(s, "limit_covariance");
  const double m = std::min(t, s);
  CovariancePair out{data.q() * m, ComplexMatrix::Zero(data.k(), data.k())};
  const ExtendedAlpha& alpha = data.alpha();
  switch (alpha.kind()) {
    case ExtendedAlpha::Kind::kZero:
      out.pseudo = -data.p() * m;
      break;
    case ExtendedAlpha::Kind::kFinite: {
      const double x = alpha.value();
      const double lg = std::log1p(x * m);
      out.pseudo = -data.p() * (lg / x) +
                   (data.a() * data.a().transpose()) * (lg * lg / (2.0 * x));
      break;
    }
    case ExtendedAlpha::Kind::kInfinity:
      break;
  }
  return out;
}

CovariancePair finite_covariance(const std::vector<ComplexMatrix>& matrices,
                                 double alpha_n, double t) {
  require_time(t, "finite_covariance");
  if (!(alpha_n > 0.0) || !std::isfinite(alpha_n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "finite_covariance: alpha_n must be positive", "alpha_n");
  }
  if (matrices.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "finite_covariance: no matrices");
  }
  const auto k = static_cast<Index>(matrices.size());
  const Index n = matrices.front().rows();
  const double nd = static_cast<double>(n);
  const double s = std::log1p(alpha_n * t);
  // E[V (x) V] = cosh(s/n) I - sinh(s/n) SWAP and E[V (x) conj V] from v_cd.
  const double ch_m1 = 2.0 * std::sinh(0.5 * s / nd) * std::sinh(0.5 * s / nd);
  const double sh = std::sinh(s / nd);
  const double growth = std::expm1(s) / nd;
  CovariancePair out{ComplexMatrix(k, k), ComplexMatrix(k, k)};
  for (Index l = 0; l < k; ++l) {
    const ComplexMatrix& al = matrices[static_cast<std::size_t>(l)];
    require_matrix(al, n, "finite_covariance");
    for (Index m = 0; m < k; ++m) {
      const ComplexMatrix& am = matrices[static_cast<std::size_t>(m)];
      require_matrix(am, n, "finite_covariance");
      out.hermitian(l, m) = growth * trace_product(al, am.adjoint()) / alpha_n;
      out.pseudo(l, m) =
          (ch_m1 * al.trace() * am.trace() - sh * trace_product(al, am)) /
          alpha_n;
    }
  }
  return out;
}

std::pair<Complex, Complex> corner_limit_covariance(const ExtendedAlpha& alpha,
                                                    double t, Index a, Index b,
                                                    Index c, Index d) {
  if (a < 0 || b < 0 || c < 0 || d < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "corner_limit_covariance: negative index");
  }
  const double herm = (a == c && b == d) ? t : 0.0;
  const double pseudo = (a == d && b == c) ? -f_alpha(alpha, t) : 0.0;
  return {Complex(herm), Complex(pseudo)};
}

// ---------------------------------------------------------------------------

double haar_moment_second(const ComplexMatrix& a, Index n) {
  require_matrix(a, n, "haar_moment_second");
  return tr_aa_star(a) / static_cast<double>(n);
}

double haar_moment_fourth_bound(const ComplexMatrix& a, Index n) {
  require_matrix(a, n, "haar_moment_fourth_bound");
  if (n < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "haar_moment_fourth_bound: need n >= 3", "n");
  }
  const double s = tr_aa_star(a);
  return 100.0 * s * s / (static_cast<double>(n) * static_cast<double>(n));
}

double haar_moment_fourth(const ComplexMatrix& a, Index n) {
  require_matrix(a, n, "haar_moment_fourth");
  if (tr_aa_star(a) == 0.0) return 0.0;
  return second_moment_internals(a, n).e2t_coefficient();
}

Index nonzero_count(const ComplexMatrix& x) {
  Index c = 0;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) c += x(i, j) != Complex(0.0);
  return c;
}

PermutationBounds permutation_trace_bounds(const ComplexMatrix& a,
                                           const ComplexMatrix& b, Index n) {
  require_matrix(a, n, "permutation_trace_bounds");
  require_matrix(b, n, "permutation_trace_bounds");
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "permutation_trace_bounds: need n >= 2", "n");
  }
  const double nd = static_cast<double>(n);
  const double ca = static_cast<double>(nonzero_count(a));
  const double cb = static_cast<double>(nonzero_count(b));
  const double na = std::sqrt(tr_aa_star(a));
  const double nb = std::sqrt(tr_aa_star(b));
  PermutationBounds out;
  out.first = std::sqrt(ca) * na / nd;
  out.second = (nd - 1.0 + std::sqrt(ca * cb)) / (nd * (nd - 1.0)) * na * nb;
  return out;
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& q) {
  require_square_finite(q, "hermitian_sqrt");
  const HermitianMatrix h(q, 1e-10 * std::max(1.0, q.cwiseAbs().maxCoeff()));
  const HermitianEigen eig = hermitian_eigen(h);
  RealVector root(eig.values.size());
  for (Index i = 0; i < root.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < -1e-12) {
      throw Error(ErrorCode::kInvalidArgument,
                  "hermitian_sqrt: matrix has eigenvalue " +
                      std::to_string(lambda) + " < 0", "q");
    }
    root(i) = std::sqrt(std::max(0.0, lambda));
  }
  return eig.vectors * root.cast<Complex>().asDiagonal() *
         eig.vectors.adjoint();
}

PermutationLimitLaw permutation_limit_law(const ComplexMatrix& q, double t) {
  require_time(t, "permutation_limit_law");
  PermutationLimitLaw out;
  out.sqrt_q = hermitian_sqrt(q);
  // Rows of Z P with P Hermitian: E[(ZP)_l conj((ZP)_l')] = (P^* P)_{l'l} t
  // = conj(q)_{ll'} t. The martingale bracket of the traces gives q_{ll'} t,
  // which is what the trace processes converge to; that is reported here.
  const Index k = q.rows();
  out.covariance.hermitian = ((q + q.adjoint()) * 0.5) * t;
  out.covariance.pseudo = ComplexMatrix::Zero(k, k);
  return out;
}

double poisson_pmf(int j) {
  if (j < 0) {
    throw Error(ErrorCode::kInvalidArgument, "poisson_pmf: j must be >= 0");
  }
  return std::exp(-1.0 - std::lgamma(static_cast<double>(j) + 1.0));
}

}  // namespace ubm
