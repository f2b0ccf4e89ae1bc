#pragma once

// Reference values for the moment oracles that do not go through the closed
// forms: numerical integration of the (f, g, h) system and, for tiny n, the
// exact generator of E[V (x) V (x) conj V (x) conj V].

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "ubm/linalg.hpp"

namespace ubm::test {

// E|Tr(A V_t A V_t)|^2 by integrating
//   n f' = -2g + 4 e^t u_{A*A, AA*},  n g' = -f - h + 4 e^t Re v_{A, A*AA*},
//   n h' = -2g + 4 n e^t v_{A, A*}
// for A rescaled to Tr(AA*) = n, then scaling back.
inline double second_moment_ode(const ComplexMatrix& a_in, double t,
                                double tol = 1e-13) {
  const Index n = a_in.rows();
  const double nd = static_cast<double>(n);
  const double s = a_in.squaredNorm();
  const ComplexMatrix a = a_in * std::sqrt(nd / s);
  const ComplexMatrix as = a.adjoint();
  const Complex tr_a = a.trace();
  const Complex tr_a2 = (a * a).trace();
  const ComplexMatrix c_f = as * a, d_f = a * as;
  const ComplexMatrix d_g = as * a * as;
  // u_{C,D}(t) = (e^t - 1)/n Tr C Tr D + Tr(CD); v_{C,D}(t) = (e^t - 1)/n Tr(CD) + Tr C Tr D.
  auto u = [&](const ComplexMatrix& c, const ComplexMatrix& d, double x) {
    return std::expm1(x) / nd * c.trace() * d.trace() + (c * d).trace();
  };
  auto v = [&](const ComplexMatrix& c, const ComplexMatrix& d, double x) {
    return std::expm1(x) / nd * (c * d).trace() + c.trace() * d.trace();
  };
  using State = std::array<double, 3>;
  auto rhs = [&](const State& y, State& dy, double x) {
    const double e = std::exp(x);
    dy[0] = (-2.0 * y[1] + 4.0 * e * u(c_f, d_f, x).real()) / nd;
    dy[1] = (-y[0] - y[2] + 4.0 * e * v(a, d_g, x).real()) / nd;
    dy[2] = (-2.0 * y[1] + 4.0 * nd * e * v(a, as, x).real()) / nd;
  };
  State y{std::norm(tr_a2), (tr_a * tr_a * std::conj(tr_a2)).real(),
          std::norm(tr_a) * std::norm(tr_a)};
  if (t > 0.0) {
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(
        ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>()),
        rhs, y, 0.0, t, 1e-3);
  }
  return y[0] * (s / nd) * (s / nd);
}

// E[V_ab V_cd conj(V_ef) conj(V_gh)] as an n^4 x n^4 matrix, rows (a,c,e,g),
// columns (b,d,f,h), from the Ito generator of the four-fold tensor.
inline Eigen::MatrixXcd fourfold_moment(Index n, double t) {
  const Index n4 = n * n * n * n;
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(n4, n4);
  auto flat = [n](const std::array<Index, 4>& i) {
    return ((i[0] * n + i[1]) * n + i[2]) * n + i[3];
  };
  // Pair (i, j) carries -SWAP when both factors are V or both conj(V), and
  // the contraction K (a = c, b = d) when exactly one is conjugated.
  const std::array<std::array<int, 3>, 6> pairs{{
      {0, 1, -1}, {2, 3, -1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}}};
  std::array<Index, 4> r{}, c{};
  for (Index row = 0; row < n4; ++row) {
    for (Index k = 0, x = row; k < 4; ++k, x /= n) r[3 - k] = x % n;
    for (const auto& pr : pairs) {
      const int i = pr[0], j = pr[1];
      for (Index p = 0; p < n; ++p) {
        for (Index q = 0; q < n; ++q) {
          c = r;
          c[i] = p;
          c[j] = q;
          bool hit;
          if (pr[2] < 0) {
            hit = r[i] == q && p == r[j];  // swap
          } else {
            hit = r[i] == r[j] && p == q;  // contraction
          }
          if (hit) gen(row, flat(c)) += static_cast<double>(pr[2]) / n;
        }
      }
    }
  }
  return (gen * t).exp();
}

inline double second_moment_tensor(const ComplexMatrix& a, double t) {
  const Index n = a.rows();
  const Eigen::MatrixXcd m = fourfold_moment(n, t);
  auto at = [&](Index i0, Index i1, Index i2, Index i3, Index j0, Index j1,
                Index j2, Index j3) {
    return m(((i0 * n + i1) * n + i2) * n + i3, ((j0 * n + j1) * n + j2) * n + j3);
  };
  // |Tr(AVAV)|^2 = sum A_ab A_cd conj(A_ef A_gh) V_bc V_da conj(V_fg V_he).
  Complex sum = 0.0;
  for (Index a_ = 0; a_ < n; ++a_)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (Index d = 0; d < n; ++d) {
          const Complex left = a(a_, b) * a(c, d);
          if (left == Complex(0.0)) continue;
          for (Index e = 0; e < n; ++e)
            for (Index f = 0; f < n; ++f)
              for (Index g = 0; g < n; ++g)
                for (Index h = 0; h < n; ++h)
                  sum += left * std::conj(a(e, f) * a(g, h)) *
                         at(b, d, f, h, c, a_, g, e);
        }
  return sum.real();
}

}  // namespace ubm::test
