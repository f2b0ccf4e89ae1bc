#include "ubm/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "ubm/oracles.hpp"

namespace ubm {

namespace {

int effective_batches(std::size_t count, int batches) {
  const auto b = static_cast<long>(std::min<std::size_t>(
      count, static_cast<std::size_t>(std::max(batches, 0))));
  if (b < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "batch means: need at least two batches, have " +
                    std::to_string(b) + " (samples: " + std::to_string(count) + ")");
  }
  return static_cast<int>(b);
}

// [begin, end) of batch b out of nb over count items.
std::pair<std::size_t, std::size_t> batch_range(std::size_t count, int nb, int b) {
  return {count * static_cast<std::size_t>(b) / static_cast<std::size_t>(nb),
          count * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(nb)};
}

double spread_se(const std::vector<double>& batch_values) {
  const double nb = static_cast<double>(batch_values.size());
  double mean = 0.0;
  for (double v : batch_values) mean += v;
  mean /= nb;
  double ss = 0.0;
  for (double v : batch_values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (nb * (nb - 1.0)));
}

// Batch-means estimate of E[f(x_r)] for matrix-valued f.
template <typename F>
MatrixEstimate matrix_batch_mean(std::size_t count, int batches, Index rows,
                                 Index cols, F f) {
  const int nb = effective_batches(count, batches);
  ComplexMatrix total = ComplexMatrix::Zero(rows, cols);
  std::vector<ComplexMatrix> means;
  means.reserve(static_cast<std::size_t>(nb));
  ComplexMatrix acc(rows, cols);
  for (int b = 0; b < nb; ++b) {
    const auto [lo, hi] = batch_range(count, nb, b);
    acc.setZero();
    for (std::size_t r = lo; r < hi; ++r) f(r, acc);
    total += acc;
    means.push_back(acc / static_cast<double>(hi - lo));
  }
  MatrixEstimate out;
  out.value = total / static_cast<double>(count);
  out.se.resize(rows, cols);
  std::vector<double> re(static_cast<std::size_t>(nb)), im(static_cast<std::size_t>(nb));
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      for (int b = 0; b < nb; ++b) {
        re[static_cast<std::size_t>(b)] = means[static_cast<std::size_t>(b)](i, j).real();
        im[static_cast<std::size_t>(b)] = means[static_cast<std::size_t>(b)](i, j).imag();
      }
      out.se(i, j) = Complex(spread_se(re), spread_se(im));
      if (out.se(i, j) == Complex(0.0)) out.degenerate = true;
    }
  }
  return out;
}

}  // namespace

Estimate batch_mean(const std::vector<double>& x, int batches) {
  const int nb = effective_batches(x.size(), batches);
  std::vector<double> means;
  double total = 0.0;
  for (int b = 0; b < nb; ++b) {
    const auto [lo, hi] = batch_range(x.size(), nb, b);
    double s = 0.0;
    for (std::size_t r = lo; r < hi; ++r) s += x[r];
    total += s;
    means.push_back(s / static_cast<double>(hi - lo));
  }
  return {total / static_cast<double>(x.size()), spread_se(means)};
}

ComplexEstimate batch_mean(const std::vector<Complex>& x, int batches) {
  const MatrixEstimate m = matrix_batch_mean(
      x.size(), batches, 1, 1,
      [&](std::size_t r, ComplexMatrix& acc) { acc(0, 0) += x[r]; });
  return {m.value(0, 0), m.se(0, 0)};
}

Estimate batch_ratio(const std::vector<double>& x, const std::vector<double>& y,
                     int batches) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "batch_ratio: length mismatch");
  }
  const int nb = effective_batches(x.size(), batches);
  std::vector<double> ratios;
  double sx = 0.0, sy = 0.0;
  for (int b = 0; b < nb; ++b) {
    const auto [lo, hi] = batch_range(x.size(), nb, b);
    double bx = 0.0, by = 0.0;
    for (std::size_t r = lo; r < hi; ++r) {
      bx += x[r];
      by += y[r];
    }
    sx += bx;
    sy += by;
    ratios.push_back(bx / by);
  }
  return {sx / sy, spread_se(ratios)};
}

MatrixEstimate estimate_pseudo_covariance(const std::vector<ComplexVector>& x,
                                          int batches) {
  if (x.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "estimate_pseudo_covariance: need at least 2 samples");
  }
  const Index k = x.front().size();
  return matrix_batch_mean(x.size(), batches, k, k,
                           [&](std::size_t r, ComplexMatrix& acc) {
                             acc.noalias() += x[r] * x[r].transpose();
                           });
}

MatrixEstimate estimate_hermitian_covariance(
    const std::vector<ComplexVector>& x, int batches) {
  if (x.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "estimate_hermitian_covariance: need at least 2 samples");
  }
  const Index k = x.front().size();
  MatrixEstimate m = matrix_batch_mean(x.size(), batches, k, k,
                                       [&](std::size_t r, ComplexMatrix& acc) {
                                         acc.noalias() += x[r] * x[r].adjoint();
                                       });
  // Exactly Hermitian, real diagonal.
  m.value = (m.value + m.value.adjoint()).eval() * 0.5;
  return m;
}

// ---------------------------------------------------------------------------

int worker_count() {
  if (const char* env = std::getenv("UBM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(long count, int threads, const std::function<void(long)>& f) {
  if (threads <= 0) threads = worker_count();
  threads = static_cast<int>(std::min<long>(threads, std::max(1L, count)));
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (long i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<LinearStatisticPath> simulate_statistics(const Scenario& s,
                                                     int threads) {
  s.validate();
  const TimeGrid grid = rescaled_grid(s.alpha_n, s.outer_times, s.step_cap);
  const ObservableFamily obs(build_observables(s), s.alpha_n);
  const Index width = std::max<Index>(1, obs.row_support());
  const bool columns = 4 * width <= s.n;
  InitialLaw law = InitialLaw::identity();
  if (s.initial_law == InitialLaw::Kind::kHaar) law = InitialLaw::haar();
  if (s.initial_law == InitialLaw::Kind::kPermutation) law = InitialLaw::permutation();
  const bool centered = s.centering == Centering::kIdentity;

  std::vector<LinearStatisticPath> out(static_cast<std::size_t>(s.replications),
                                       LinearStatisticPath{grid, {}});
  parallel_for(s.replications, threads, [&](long r) {
    RngStream rng(s.seed, static_cast<std::uint64_t>(r));
    LinearStatisticPath path =
        columns ? linear_statistic(simulate_columns(s.n, width, law, grid, rng, s.tolerances), obs, centered)
                : linear_statistic(simulate_path(s.n, law, grid, rng, s.tolerances), obs, centered);
    if (s.centering == Centering::kInitial) {
      const ComplexVector x0 = path.values.front();
      for (auto& v : path.values) v -= x0;
    }
    out[static_cast<std::size_t>(r)] = std::move(path);
  });
  return out;
}

EnsembleStats summarize(const Scenario& s,
                        const std::vector<LinearStatisticPath>& paths) {
  if (paths.empty()) {
    throw Error(ErrorCode::kInsufficientData, "summarize: zero replications");
  }
  const TimeGrid& grid = paths.front().grid;
  EnsembleStats out;
  out.replications = static_cast<long>(paths.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::vector<ComplexVector> xs;
    xs.reserve(paths.size());
    for (const auto& p : paths) xs.push_back(p.values.at(j));
    TimeSlice slice;
    slice.time = grid.outer_times()[j];
    slice.inner_time = grid.times()[j];
    const Index k = xs.front().size();
    slice.mean = matrix_batch_mean(xs.size(), s.batches, k, 1,
                                   [&](std::size_t r, ComplexMatrix& acc) { acc += xs[r]; });
    slice.hermitian = estimate_hermitian_covariance(xs, s.batches);
    slice.pseudo = estimate_pseudo_covariance(xs, s.batches);
    out.slices.push_back(std::move(slice));
    out.samples.push_back(std::move(xs));
  }
  return out;
}

EnsembleStats run_ensemble(const Scenario& s, int threads) {
  if (s.replications < 1) {
    throw Error(ErrorCode::kInsufficientData, "run_ensemble: zero replications");
  }
  return summarize(s, simulate_statistics(s, threads));
}

// ---------------------------------------------------------------------------

Verdict verdict_of(Complex empirical, Complex se, Complex oracle, double sigma,
                   double rel_tol, Comparison comparison) {
  const double se_norm = std::hypot(se.real(), se.imag());
  if (!std::isfinite(empirical.real()) || !std::isfinite(empirical.imag())) {
    return Verdict::kFail;
  }
  switch (comparison) {
    case Comparison::kWithin: {
      const double tol = std::max(sigma * se_norm, rel_tol * std::abs(oracle));
      return std::abs(empirical - oracle) <= tol ? Verdict::kPass : Verdict::kFail;
    }
    case Comparison::kAtMost:
      return empirical.real() <= oracle.real() + sigma * se_norm ? Verdict::kPass
                                                                 : Verdict::kFail;
    case Comparison::kAtLeast:
      return empirical.real() >= oracle.real() - sigma * se_norm ? Verdict::kPass
                                                                 : Verdict::kFail;
  }
  return Verdict::kFail;
}

MomentReport make_report(std::string statistic, double time, Complex empirical,
                         Complex se, Complex oracle, double sigma,
                         double rel_tol, Comparison comparison) {
  MomentReport r;
  r.statistic = std::move(statistic);
  r.time = time;
  r.empirical = empirical;
  r.se = se;
  r.oracle = oracle;
  r.sigma = sigma;
  r.rel_tol = rel_tol;
  r.comparison = comparison;
  const double se_norm = std::hypot(se.real(), se.imag());
  const double diff = std::abs(empirical - oracle);
  r.sigma_distance = se_norm > 0.0 ? diff / se_norm
                     : diff == 0.0 ? 0.0
                                   : std::numeric_limits<double>::infinity();
  r.verdict = verdict_of(empirical, se, oracle, sigma, rel_tol, comparison);
  return r;
}

std::string to_string(Verdict v) { return v == Verdict::kPass ? "pass" : "fail"; }

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::kWithin: return "within";
    case Comparison::kAtMost: return "at_most";
    case Comparison::kAtLeast: return "at_least";
  }
  return "?";
}

// ---------------------------------------------------------------------------

bool GaussianityReport::passed(double p_threshold, double sigma) const {
  return ks_real.p_value > p_threshold && ks_imag.p_value > p_threshold &&
         std::abs(kurtosis_ratio.value - 2.0) <= sigma * kurtosis_ratio.se;
}

GaussianityReport gaussianity_test(const std::vector<Complex>& z, int batches) {
  if (z.size() < 1000) {
    throw Error(ErrorCode::kInsufficientData,
                "gaussianity_test: need at least 1000 samples, have " +
                    std::to_string(z.size()));
  }
  std::vector<double> re, im;
  re.reserve(z.size());
  im.reserve(z.size());
  double vr = 0.0, vi = 0.0;
  for (const Complex& x : z) {
    re.push_back(x.real());
    im.push_back(x.imag());
    vr += x.real() * x.real();
    vi += x.imag() * x.imag();
  }
  const double nd = static_cast<double>(z.size());
  GaussianityReport out;
  out.variance_real = vr / nd;
  out.variance_imag = vi / nd;
  if (!(out.variance_real > 0.0) || !(out.variance_imag > 0.0)) {
    throw Error(ErrorCode::kInsufficientData,
                "gaussianity_test: a marginal has zero variance");
  }
  const double sr = std::sqrt(out.variance_real);
  const double si = std::sqrt(out.variance_imag);
  out.ks_real = ks_test(std::move(re), [sr](double x) { return normal_cdf(x, sr); });
  out.ks_imag = ks_test(std::move(im), [si](double x) { return normal_cdf(x, si); });

  const int nb = effective_batches(z.size(), batches);
  std::vector<double> ratios;
  double m2 = 0.0, m4 = 0.0;
  for (int b = 0; b < nb; ++b) {
    const auto [lo, hi] = batch_range(z.size(), nb, b);
    double b2 = 0.0, b4 = 0.0;
    for (std::size_t r = lo; r < hi; ++r) {
      const double a = std::norm(z[r]);
      b2 += a;
      b4 += a * a;
    }
    m2 += b2;
    m4 += b4;
    const double cnt = static_cast<double>(hi - lo);
    ratios.push_back((b4 / cnt) / ((b2 / cnt) * (b2 / cnt)));
  }
  out.kurtosis_ratio = {(m4 / nd) / ((m2 / nd) * (m2 / nd)), spread_se(ratios)};
  return out;
}

bool IndependenceReport::passed() const {
  auto ok = [this](const ComplexEstimate& e) {
    return std::abs(e.value) <= sigma * e.se_norm();
  };
  return ok(hermitian) && ok(pseudo);
}

IndependenceReport increment_independence_check(
    const std::vector<LinearStatisticPath>& paths, double t1, double t2,
    double t3, Index l, int batches, double sigma) {
  if (paths.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "increment_independence_check: need at least 2 paths");
  }
  if (!(t1 < t2 && t2 < t3)) {
    throw Error(ErrorCode::kInvalidArgument,
                "increment_independence_check: need t1 < t2 < t3");
  }
  const auto& outer = paths.front().grid.outer_times();
  auto index_of = [&](double t) {
    for (std::size_t j = 0; j < outer.size(); ++j) {
      if (std::abs(outer[j] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return j;
    }
    throw Error(ErrorCode::kInvalidGrid,
                "increment_independence_check: time " + std::to_string(t) +
                    " is not on the grid");
  };
  const std::size_t j1 = index_of(t1), j2 = index_of(t2), j3 = index_of(t3);
  std::vector<Complex> herm, pseudo;
  double a1 = 0.0, a2 = 0.0;
  for (const auto& p : paths) {
    if (l < 0 || l >= p.values.at(j1).size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "increment_independence_check: coordinate out of range");
    }
    const Complex d1 = p.values.at(j2)(l) - p.values.at(j1)(l);
    const Complex d2 = p.values.at(j3)(l) - p.values.at(j2)(l);
    herm.push_back(d1 * std::conj(d2));
    pseudo.push_back(d1 * d2);
    a1 += std::norm(d1);
    a2 += std::norm(d2);
  }
  const double nd = static_cast<double>(paths.size());
  const double scale = std::sqrt((a1 / nd) * (a2 / nd));
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kInsufficientData,
                "increment_independence_check: increments vanish");
  }
  IndependenceReport out;
  out.sigma = sigma;
  out.hermitian = batch_mean(herm, batches);
  out.pseudo = batch_mean(pseudo, batches);
  for (ComplexEstimate* e : {&out.hermitian, &out.pseudo}) {
    e->value /= scale;
    e->se /= scale;
  }
  return out;
}

PoissonFitReport poisson_fit(const std::vector<long>& counts) {
  if (counts.size() < 10000) {
    throw Error(ErrorCode::kInsufficientData,
                "poisson_fit: need at least 10^4 samples, have " +
                    std::to_string(counts.size()));
  }
  constexpr int kMax = 20;
  PoissonFitReport out;
  out.samples = static_cast<long>(counts.size());
  out.empirical.assign(kMax + 2, 0.0);
  for (long c : counts) {
    if (c < 0) {
      throw Error(ErrorCode::kInvalidArgument, "poisson_fit: negative count");
    }
    ++out.empirical[static_cast<std::size_t>(std::min<long>(c, kMax + 1))];
  }
  double tv = 0.0, mass = 0.0;
  for (int j = 0; j <= kMax + 1; ++j) {
    out.empirical[static_cast<std::size_t>(j)] /= static_cast<double>(counts.size());
    double pmf;
    if (j <= kMax) {
      pmf = poisson_pmf(j);
      mass += pmf;
    } else {
      pmf = std::max(0.0, 1.0 - mass);
    }
    tv += std::abs(out.empirical[static_cast<std::size_t>(j)] - pmf);
  }
  out.tv_distance = 0.5 * tv;
  return out;
}

}  // namespace ubm
