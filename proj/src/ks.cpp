#include "ubm/ks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ubm/error.hpp"

namespace ubm {

namespace {

constexpr double kBig = 1e140;
constexpr int kBigExp = 140;

// Matrix power with a running base-10 exponent so entries stay representable.
void matrix_power(const Eigen::MatrixXd& a, int ea, Eigen::MatrixXd& v, int& ev,
                  long n) {
  const Eigen::Index m = a.rows();
  const Eigen::Index mid = m / 2;
  if (n == 1) {
    v = a;
    ev = ea;
    return;
  }
  matrix_power(a, ea, v, ev, n / 2);
  Eigen::MatrixXd b = v * v;
  int eb = 2 * ev;
  if (n % 2 == 1) {
    v.noalias() = a * b;
    ev = ea + eb;
  } else {
    v = std::move(b);
    ev = eb;
  }
  if (v(mid, mid) > kBig) {
    v *= 1.0 / kBig;
    ev += kBigExp;
  }
}

}  // namespace

double kolmogorov_cdf_exact(long n, double d) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kolmogorov_cdf: n must be >= 1");
  }
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n);
  const long k = static_cast<long>(nd * d) + 1;
  const long m = 2 * k - 1;
  const double h = static_cast<double>(k) - nd * d;

  Eigen::MatrixXd hm(m, m);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j) hm(i, j) = (i - j + 1 < 0) ? 0.0 : 1.0;
  for (long i = 0; i < m; ++i) {
    hm(i, 0) -= std::pow(h, static_cast<double>(i + 1));
    hm(m - 1, i) -= std::pow(h, static_cast<double>(m - i));
  }
  if (2.0 * h - 1.0 > 0.0) {
    hm(m - 1, 0) += std::pow(2.0 * h - 1.0, static_cast<double>(m));
  }
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j)
      if (i - j + 1 > 0)
        for (long g = 1; g <= i - j + 1; ++g) hm(i, j) /= static_cast<double>(g);

  Eigen::MatrixXd q;
  int eq = 0;
  matrix_power(hm, 0, q, eq, n);
  double s = q(k - 1, k - 1);
  for (long i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / nd;
    if (s < 1.0 / kBig) {
      s *= kBig;
      eq -= kBigExp;
    }
  }
  return std::clamp(s * std::pow(10.0, eq), 0.0, 1.0);
}

double kolmogorov_cdf_asymptotic(long n, double d) {
  if (d <= 0.0) return 0.0;
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  // 1 - 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
  double tail = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    tail += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(1.0 - 2.0 * tail, 0.0, 1.0);
}

double kolmogorov_cdf(long n, double d) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kolmogorov_cdf: n must be >= 1");
  }
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n);
  // Marsaglia's right-tail shortcut, accurate to ~7 digits there.
  const double s = d * d * nd;
  if (s > 7.24 || (s > 3.76 && n > 99)) {
    return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(nd) + 1.409 / nd) * s);
  }
  const long order = 2 * (static_cast<long>(nd * d) + 1) - 1;
  if (order <= kKsExactMaxOrder) return kolmogorov_cdf_exact(n, d);
  return kolmogorov_cdf_asymptotic(n, d);
}

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInsufficientData, "ks_test: no samples");
  }
  std::sort(samples.begin(), samples.end());
  const double nd = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / nd - f,
                  f - static_cast<double>(i) / nd});
  }
  KsResult r;
  r.statistic = d;
  r.p_value = 1.0 - kolmogorov_cdf(static_cast<long>(samples.size()), d);
  return r;
}

double normal_cdf(double x, double sd) {
  return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)));
}

}  // namespace ubm
