#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ubm/linalg.hpp"

namespace ubm {

// Nonnegative extended real used for the scale limit alpha.
class ExtendedAlpha {
 public:
  enum class Kind { kZero, kFinite, kInfinity };

  static ExtendedAlpha zero() { return ExtendedAlpha(Kind::kZero, 0.0); }
  static ExtendedAlpha finite(double x);  // x > 0
  static ExtendedAlpha infinity() { return ExtendedAlpha(Kind::kInfinity, 0.0); }

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }
  std::string to_string() const;

 private:
  ExtendedAlpha(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

struct CovariancePair {
  ComplexMatrix hermitian;  // E[X_l conj(Y_l')]
  ComplexMatrix pseudo;     // E[X_l Y_l']
};

// a_l, p_{ll'}, q_{ll'} and alpha of the limit process.
class LimitData {
 public:
  LimitData(ComplexVector a, ComplexMatrix p, ComplexMatrix q,
            ExtendedAlpha alpha);

  // Finite-n traces: a_l = Tr(A_l)/n, p = Tr(A_l A_l')/n, q = Tr(A_l A_l'*)/n.
  static LimitData from_observables(const std::vector<ComplexMatrix>& matrices,
                                    ExtendedAlpha alpha);

  const ComplexVector& a() const noexcept { return a_; }
  const ComplexMatrix& p() const noexcept { return p_; }
  const ComplexMatrix& q() const noexcept { return q_; }
  const ExtendedAlpha& alpha() const noexcept { return alpha_; }
  Index k() const noexcept { return a_.size(); }

 private:
  ComplexVector a_;
  ComplexMatrix p_;
  ComplexMatrix q_;
  ExtendedAlpha alpha_;
};

// E[Tr(A V_t A V_t)] = Tr(A^2) cosh(t/n) - (Tr A)^2 sinh(t/n).
Complex mixed_moment(const ComplexMatrix& a, Index n, double t);

// Internals of E|Tr(A V_t A V_t)|^2 after rescaling A to Tr(AA*) = n.
// All quantities refer to the rescaled matrix; `scale` = (Tr(AA*)/n)^2
// converts f, g back to the original A.
struct SecondMomentInternals {
  Index n = 0;
  double scale = 0.0;
  double kappa = 0.0;      // Tr(AA*AA*)/n - 1
  double theta = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double tr_a2_abs2 = 0.0;  // |Tr A^2|^2
  double r4 = 0.0;          // Tr(AAA*A*)/n

  double w(double t) const;
  double f(double t) const;  // E|Tr(AVAV)|^2, rescaled
  double g(double t) const;  // Re E[Tr(AVAV) conj(Tr(AV))^2], rescaled

  // Coefficients of (e^t - 1) and (e^{2t} - 1) in f, for the original A.
  double et_coefficient() const;
  double e2t_coefficient() const;
};

SecondMomentInternals second_moment_internals(const ComplexMatrix& a, Index n);

// E|Tr(A V_t A V_t)|^2; n >= 3, A != 0.
double second_moment(const ComplexMatrix& a, Index n, double t);

// u = E Tr(V_t C V_t* D), v = E[Tr(V_t C) Tr(V_t* D)].
Complex u_cd(const ComplexMatrix& c, const ComplexMatrix& d, Index n, double t);
Complex v_cd(const ComplexMatrix& c, const ComplexMatrix& d, Index n, double t);

// Covariances of the limit process at times (t, s); evaluated at min(t, s)
// by independence of increments.
CovariancePair limit_covariance(const LimitData& data, double t, double s);

// Exact finite-n covariances of X_t = alpha_n^{-1/2} Tr[A_l (V_{log(alpha_n t+1)} - I)]
// for an identity start.
CovariancePair finite_covariance(const std::vector<ComplexMatrix>& matrices,
                                 double alpha_n, double t);

// t if alpha = 0, log(alpha t + 1)/alpha if finite, 0 if alpha = infinity.
double f_alpha(const ExtendedAlpha& alpha, double t);

// (E[M_ab conj(M_cd)], E[M_ab M_cd]) for the corner limit process
// M_t = H_{t - f(t)} + S_{t + f(t)}; indices are 0-based.
std::pair<Complex, Complex> corner_limit_covariance(const ExtendedAlpha& alpha,
                                                    double t, Index a, Index b,
                                                    Index c, Index d);

// E|Tr(AU)|^2 = Tr(AA*)/n for Haar U.
double haar_moment_second(const ComplexMatrix& a, Index n);
// 100 (Tr AA*)^2 / n^2; n >= 3.
double haar_moment_fourth_bound(const ComplexMatrix& a, Index n);
// Exact E|Tr(AUAU)|^2 = (S/n)^2 (2 - 2 kappa/(n^2 - 1)), the t -> infinity
// limit of e^{-2t} second_moment; n >= 3.
double haar_moment_fourth(const ComplexMatrix& a, Index n);

struct PermutationBounds {
  double first = 0.0;   // ceiling on E|Tr(AS)|
  double second = 0.0;  // ceiling on E|Tr(ASBS)|
};
// C_X counts exactly-nonzero entries.
PermutationBounds permutation_trace_bounds(const ComplexMatrix& a,
                                           const ComplexMatrix& b, Index n);
Index nonzero_count(const ComplexMatrix& x);

// Hermitian P >= 0 with P^2 = q; eigenvalues in [-1e-12, 0) are clamped.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& q);

// Time-t law of (Z_1, ..., Z_k) P - C: circular Gaussian with
// E[X_l conj(X_l')] = q_{ll'} t and zero pseudo-covariance.
struct PermutationLimitLaw {
  ComplexMatrix sqrt_q;
  CovariancePair covariance;
};
PermutationLimitLaw permutation_limit_law(const ComplexMatrix& q, double t);

// e^{-1}/j!.
double poisson_pmf(int j);

}  // namespace ubm
