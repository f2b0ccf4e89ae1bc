#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ubm/ks.hpp"
#include "ubm/linalg.hpp"
#include "ubm/scenario.hpp"

namespace ubm {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Complex estimate; se carries the real-part and imaginary-part SEs.
struct ComplexEstimate {
  Complex value{};
  Complex se{};
  double se_norm() const { return std::hypot(se.real(), se.imag()); }
};

// Sample mean with batch-means standard error over min(batches, N)
// contiguous batches. Throws kInsufficientData below two batches.
Estimate batch_mean(const std::vector<double>& x, int batches = 20);
ComplexEstimate batch_mean(const std::vector<Complex>& x, int batches = 20);
// Ratio of means sum(x)/sum(y), SE from the spread of per-batch ratios.
Estimate batch_ratio(const std::vector<double>& x, const std::vector<double>& y,
                     int batches = 20);

struct MatrixEstimate {
  ComplexMatrix value;
  ComplexMatrix se;  // entrywise (se_re, se_im) packed as complex
  bool degenerate = false;  // some SE is exactly zero
};

// E[x x^T] (pseudo) and E[x x^*] (Hermitian) about zero, with batch SEs.
MatrixEstimate estimate_pseudo_covariance(const std::vector<ComplexVector>& x,
                                          int batches = 20);
MatrixEstimate estimate_hermitian_covariance(
    const std::vector<ComplexVector>& x, int batches = 20);

// Per outer time: mean and raw second moments of the statistic vector.
struct TimeSlice {
  double time = 0.0;        // outer time t
  double inner_time = 0.0;  // simulated time s
  MatrixEstimate mean;      // k x 1
  MatrixEstimate hermitian;
  MatrixEstimate pseudo;
};

struct EnsembleStats {
  long replications = 0;
  std::vector<TimeSlice> slices;
  // samples[j][r]: statistic vector of replication r at outer time j, after
  // the scenario's centering.
  std::vector<std::vector<ComplexVector>> samples;
};

// Worker count from UBM_THREADS (default: hardware concurrency).
int worker_count();

// Runs f(0..count-1) on `threads` workers (0: worker_count()); the first
// exception thrown by any call is rethrown after all workers join.
void parallel_for(long count, int threads, const std::function<void(long)>& f);

// Simulates the scenario's replications (replication r uses stream id r) and
// aggregates in replication order; results do not depend on thread count.
EnsembleStats run_ensemble(const Scenario& scenario, int threads = 0);

// Per-replication statistic paths without aggregation.
std::vector<LinearStatisticPath> simulate_statistics(const Scenario& scenario,
                                                     int threads = 0);
EnsembleStats summarize(const Scenario& scenario,
                        const std::vector<LinearStatisticPath>& paths);

enum class Comparison { kWithin, kAtMost, kAtLeast };
enum class Verdict { kPass, kFail };

struct MomentReport {
  std::string statistic;
  double time = 0.0;
  Complex empirical{};
  Complex se{};
  Complex oracle{};
  double sigma_distance = 0.0;  // |emp - oracle| / |se|; inf when se = 0
  Comparison comparison = Comparison::kWithin;
  double sigma = 4.0;
  double rel_tol = 0.0;
  Verdict verdict = Verdict::kFail;

  bool passed() const { return verdict == Verdict::kPass; }
};

// Within: |emp - oracle| <= max(sigma |se|, rel_tol |oracle|).
// AtMost: Re emp <= Re oracle + sigma |se|. AtLeast: Re emp >= Re oracle - sigma |se|.
MomentReport make_report(std::string statistic, double time, Complex empirical,
                         Complex se, Complex oracle, double sigma,
                         double rel_tol = 0.0,
                         Comparison comparison = Comparison::kWithin);
Verdict verdict_of(Complex empirical, Complex se, Complex oracle, double sigma,
                   double rel_tol, Comparison comparison);
std::string to_string(Verdict v);
std::string to_string(Comparison c);

struct GaussianityReport {
  KsResult ks_real;
  KsResult ks_imag;
  Estimate kurtosis_ratio;  // E|Z|^4 / (E|Z|^2)^2, 2 for circular Gaussians
  double variance_real = 0.0;
  double variance_imag = 0.0;
  bool passed(double p_threshold = 0.01, double sigma = 4.0) const;
};

// KS of each centered marginal against N(0, sample variance) plus the complex
// kurtosis ratio. Needs at least 1000 samples.
GaussianityReport gaussianity_test(const std::vector<Complex>& z,
                                   int batches = 20);

struct IndependenceReport {
  ComplexEstimate hermitian;  // E[(X2 - X1) conj(X3 - X2)] / scale
  ComplexEstimate pseudo;     // E[(X2 - X1)(X3 - X2)] / scale
  double sigma = 4.0;
  bool passed() const;
};

// Correlation of consecutive increments for coordinate `l`; times are outer
// grid values that must be present in every path.
IndependenceReport increment_independence_check(
    const std::vector<LinearStatisticPath>& paths, double t1, double t2,
    double t3, Index l = 0, int batches = 20, double sigma = 4.0);

struct PoissonFitReport {
  double tv_distance = 0.0;
  std::vector<double> empirical;  // pmf at 0..20, then the tail mass
  long samples = 0;
};

// TV distance between the empirical pmf and Poisson(1), both truncated to
// {0, ..., 20} plus a single tail bin. Needs at least 10^4 samples.
PoissonFitReport poisson_fit(const std::vector<long>& counts);

}  // namespace ubm
