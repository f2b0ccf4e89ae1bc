#pragma once

#include <functional>
#include <vector>

namespace ubm {

// P(D_n < d) for the one-sample Kolmogorov statistic (Marsaglia, Tsang and
// Wang 2003). Exact while the Durbin matrix has at most kKsExactMaxOrder rows;
// beyond that the Stephens-corrected asymptotic distribution is used.
double kolmogorov_cdf(long n, double d);
double kolmogorov_cdf_exact(long n, double d);
double kolmogorov_cdf_asymptotic(long n, double d);
inline constexpr long kKsExactMaxOrder = 1201;

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  double p_value = 1.0;
};

// Two-sided test of `samples` against a continuous CDF.
KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf);

double normal_cdf(double x, double sd = 1.0);

}  // namespace ubm
