#include "ubm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "ubm/oracles.hpp"
#include "ubm/samplers.hpp"
#include "ubm/version.hpp"

namespace ubm {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::kConfig, key + ": " + msg, key);
}

struct PresetName {
  Preset preset;
  const char* name;
};

constexpr PresetName kPresetNames[] = {
    {Preset::kTheoremMain, "theorem-main"},
    {Preset::kCornerRegimes, "corner-regimes"},
    {Preset::kPermutationCorner, "permutation-corner"},
    {Preset::kPoissonTrace, "poisson-trace"},
    {Preset::kHaarGaussian, "haar-gaussian"},
    {Preset::kHaarEntries, "haar-entries"},
    {Preset::kMomentOracles, "moment-oracles"},
};

// Fixed-point counts for the Poisson check use at least this many draws.
constexpr long kPoissonDraws = 100000;
constexpr double kPoissonTvCeiling = 0.02;
constexpr double kKsThreshold = 0.01;
constexpr long kMinGaussianSamples = 1000;
constexpr double kDeterministicRelTol = 1e-8;

std::string idx(Index l) { return "[" + std::to_string(l) + "]"; }
std::string idx(Index l, Index m) { return idx(l) + idx(m); }

// Collects reports and raw estimates for one run.
class Recorder {
 public:
  explicit Recorder(const Scenario& s) : s_(s) {}

  void raw(double t, std::string name, Complex value, Complex se) {
    estimates.push_back({t, std::move(name), value, se});
  }
  void check(std::string name, double t, Complex emp, Complex se, Complex oracle,
             double rel_tol = 0.0, Comparison c = Comparison::kWithin) {
    // Floor for values with no real sampling spread (e.g. every path still at
    // the start), where the SE is zero or pure rounding noise.
    if (c == Comparison::kWithin) rel_tol = std::max(rel_tol, kDeterministicRelTol);
    reports.push_back(make_report(std::move(name), t, emp, se, oracle, s_.sigma,
                                  rel_tol, c));
  }
  void check(std::string name, double t, const ComplexEstimate& e,
             Complex oracle, double rel_tol = 0.0) {
    check(std::move(name), t, e.value, e.se, oracle, rel_tol);
  }
  void check(std::string name, double t, const Estimate& e, double oracle,
             double rel_tol = 0.0, Comparison c = Comparison::kWithin) {
    check(std::move(name), t, Complex(e.value), Complex(e.se), Complex(oracle),
          rel_tol, c);
  }
  // Exact value with no sampling error, e.g. a p-value or a distance.
  void bound(std::string name, double t, double value, double limit,
             Comparison c) {
    check(std::move(name), t, Complex(value), Complex(0.0), Complex(limit), 0.0, c);
  }

  void slices(const EnsembleStats& es) {
    for (const auto& sl : es.slices) {
      const Index k = sl.mean.value.rows();
      for (Index l = 0; l < k; ++l) raw(sl.time, "mean" + idx(l), sl.mean.value(l, 0), sl.mean.se(l, 0));
      for (Index l = 0; l < k; ++l)
        for (Index m = 0; m < k; ++m)
          raw(sl.time, "herm_cov" + idx(l, m), sl.hermitian.value(l, m), sl.hermitian.se(l, m));
      for (Index l = 0; l < k; ++l)
        for (Index m = 0; m < k; ++m)
          raw(sl.time, "pseudo_cov" + idx(l, m), sl.pseudo.value(l, m), sl.pseudo.se(l, m));
    }
  }

  // Entrywise covariance checks against a pair of k x k targets.
  void covariances(const TimeSlice& sl, const CovariancePair& target, double rel_tol) {
    const Index k = sl.hermitian.value.rows();
    for (Index l = 0; l < k; ++l)
      for (Index m = 0; m < k; ++m)
        check("herm_cov" + idx(l, m), sl.time, sl.hermitian.value(l, m),
              sl.hermitian.se(l, m), target.hermitian(l, m), rel_tol);
    for (Index l = 0; l < k; ++l)
      for (Index m = 0; m < k; ++m)
        check("pseudo_cov" + idx(l, m), sl.time, sl.pseudo.value(l, m),
              sl.pseudo.se(l, m), target.pseudo(l, m), rel_tol);
  }

  void gaussianity(const std::string& suffix, double t, const std::vector<Complex>& z) {
    const GaussianityReport g = gaussianity_test(z, s_.batches);
    bound("ks_p_re" + suffix, t, g.ks_real.p_value, kKsThreshold, Comparison::kAtLeast);
    bound("ks_p_im" + suffix, t, g.ks_imag.p_value, kKsThreshold, Comparison::kAtLeast);
    check("kurtosis" + suffix, t, g.kurtosis_ratio, 2.0);
  }

  std::vector<MomentReport> reports;
  std::vector<RawEstimate> estimates;

 private:
  const Scenario& s_;
};

std::vector<Complex> coordinate(const EnsembleStats& es, std::size_t j, Index l) {
  std::vector<Complex> z;
  z.reserve(es.samples[j].size());
  for (const auto& x : es.samples[j]) z.push_back(x(l));
  return z;
}

void require_gaussian_samples(const Scenario& s) {
  if (s.replications < kMinGaussianSamples) {
    config_error("replications", "this preset runs gaussianity tests and needs >= " +
                                     std::to_string(kMinGaussianSamples));
  }
}

void require_corner(const Scenario& s) {
  if (s.observables.kind != ObservableKind::kElementaryCorner) {
    config_error("observables", "this preset needs corner:p observables");
  }
}

// ---------------------------------------------------------------------------

void theorem_main(const Scenario& s, int threads, Recorder& rec) {
  const auto paths = simulate_statistics(s, threads);
  const EnsembleStats es = summarize(s, paths);
  rec.slices(es);
  const LimitData data = LimitData::from_observables(build_observables(s),
                                                     ExtendedAlpha::finite(s.alpha_n));
  for (const auto& sl : es.slices) {
    rec.covariances(sl, limit_covariance(data, sl.time, sl.time), s.rel_tol);
  }
  const auto& t = s.outer_times;
  for (std::size_t j = 2; j < t.size(); ++j) {
    for (Index l = 0; l < data.k(); ++l) {
      const IndependenceReport ind = increment_independence_check(
          paths, t[j - 2], t[j - 1], t[j], l, s.batches, s.sigma);
      rec.check("indep_herm" + idx(l), t[j], ind.hermitian, 0.0);
      rec.check("indep_pseudo" + idx(l), t[j], ind.pseudo, 0.0);
    }
  }
}

void corner_regimes(const Scenario& s, int threads, Recorder& rec) {
  require_corner(s);
  const EnsembleStats es = run_ensemble(s, threads);
  rec.slices(es);
  const Index p = s.observables.corner;
  const ExtendedAlpha alpha = ExtendedAlpha::finite(s.alpha_n);
  for (std::size_t j = 0; j < es.slices.size(); ++j) {
    const double t = es.slices[j].time;
    // Statistic (a, b) sits at position a p + b and equals the corner entry M_ab.
    std::vector<double> herm, skew;
    for (const auto& x : es.samples[j]) {
      double h = 0.0, k = 0.0;
      for (Index a = 0; a < p; ++a) {
        for (Index b = 0; b < p; ++b) {
          const Complex mab = x(a * p + b);
          const Complex mba_bar = std::conj(x(b * p + a));
          h += std::norm(mab + mba_bar) / 4.0;
          k += std::norm(mab - mba_bar) / 4.0;
        }
      }
      herm.push_back(h);
      skew.push_back(k);
    }
    double herm_oracle = 0.0, skew_oracle = 0.0;
    for (Index a = 0; a < p; ++a) {
      for (Index b = 0; b < p; ++b) {
        const Complex var_ab = corner_limit_covariance(alpha, t, a, b, a, b).first;
        const Complex var_ba = corner_limit_covariance(alpha, t, b, a, b, a).first;
        const Complex cross = corner_limit_covariance(alpha, t, a, b, b, a).second;
        herm_oracle += (var_ab.real() + var_ba.real() + 2.0 * cross.real()) / 4.0;
        skew_oracle += (var_ab.real() + var_ba.real() - 2.0 * cross.real()) / 4.0;
      }
    }
    rec.check("herm_part_norm2", t, batch_mean(herm, s.batches), herm_oracle, s.rel_tol);
    rec.check("skew_part_norm2", t, batch_mean(skew, s.batches), skew_oracle, s.rel_tol);
    if (t > 0.0) {
      rec.check("herm_skew_ratio", t, batch_ratio(herm, skew, s.batches),
                herm_oracle / skew_oracle, s.rel_tol);
    }
  }
}

void permutation_corner(const Scenario& s, int threads, Recorder& rec) {
  const EnsembleStats es = run_ensemble(s, threads);
  rec.slices(es);
  const LimitData data = LimitData::from_observables(build_observables(s),
                                                     ExtendedAlpha::finite(s.alpha_n));
  for (const auto& sl : es.slices) {
    rec.covariances(sl, permutation_limit_law(data.q(), sl.time).covariance, s.rel_tol);
  }
}

void poisson_trace(const Scenario& s, int threads, Recorder& rec) {
  require_gaussian_samples(s);
  if (s.initial_law != InitialLaw::Kind::kPermutation) {
    config_error("initial_law", "poisson-trace needs a permutation start");
  }
  const EnsembleStats es = run_ensemble(s, threads);
  rec.slices(es);
  const LimitData data = LimitData::from_observables(build_observables(s),
                                                     ExtendedAlpha::finite(s.alpha_n));
  for (std::size_t j = 0; j < es.slices.size(); ++j) {
    const auto& sl = es.slices[j];
    rec.covariances(sl, permutation_limit_law(data.q(), sl.time).covariance, s.rel_tol);
    if (sl.time > 0.0) {
      for (Index l = 0; l < data.k(); ++l) {
        rec.gaussianity(idx(l), sl.time, coordinate(es, j, l));
      }
    }
  }
  // Initial permutations are redrawn from the streams the engine used, then
  // padded with further replication streams.
  const long draws = std::max(s.replications, kPoissonDraws);
  std::vector<long> counts(static_cast<std::size_t>(draws));
  parallel_for(draws, threads, [&](long r) {
    RngStream rng(s.seed, static_cast<std::uint64_t>(r), 1);
    const auto sigma = uniform_permutation(s.n, rng);
    long fixed = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (sigma[i] == static_cast<Index>(i)) ++fixed;
    }
    counts[static_cast<std::size_t>(r)] = fixed;
  });
  const PoissonFitReport fit = poisson_fit(counts);
  for (std::size_t j = 0; j < fit.empirical.size(); ++j) {
    const bool tail = j + 1 == fit.empirical.size();
    rec.raw(0.0, tail ? "fixed_point_pmf[tail]" : "fixed_point_pmf" + idx(static_cast<Index>(j)),
            fit.empirical[j], 0.0);
  }
  rec.bound("fixed_point_tv", 0.0, fit.tv_distance, kPoissonTvCeiling, Comparison::kAtMost);
}

// Haar start: exact second moments plus per-coordinate gaussianity.
void haar_family(const Scenario& s, int threads, Recorder& rec) {
  require_gaussian_samples(s);
  if (s.initial_law != InitialLaw::Kind::kHaar) {
    config_error("initial_law", "this preset needs a Haar start");
  }
  const EnsembleStats es = run_ensemble(s, threads);
  rec.slices(es);
  const LimitData data = LimitData::from_observables(build_observables(s),
                                                     ExtendedAlpha::finite(s.alpha_n));
  const Index k = data.k();
  for (std::size_t j = 0; j < es.slices.size(); ++j) {
    const auto& sl = es.slices[j];
    if (s.centering == Centering::kNone) {
      // Haar is stationary, so only the e^{s/2} / sqrt(alpha_n) factor moves.
      const double scale = std::exp(sl.inner_time) / s.alpha_n;
      const CovariancePair target{scale * data.q(), ComplexMatrix::Zero(k, k)};
      for (Index l = 0; l < k; ++l) {
        rec.check("mean" + idx(l), sl.time, sl.mean.value(l, 0), sl.mean.se(l, 0), 0.0);
      }
      rec.covariances(sl, target, 0.0);
    }
    for (Index l = 0; l < k; ++l) rec.gaussianity(idx(l), sl.time, coordinate(es, j, l));
  }
}

// Exact finite-n moment formulas on raw (unrescaled) times.
void moment_oracles(const Scenario& s, int threads, Recorder& rec) {
  if (s.n < 3) config_error("n", "moment-oracles needs n >= 3");
  const Index n = s.n;
  const ComplexMatrix a = build_observables(s).front();
  RngStream aux(s.seed, kObservableStream, 1);
  const double rn = std::sqrt(static_cast<double>(n));
  ComplexMatrix c(n, n), d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) c(i, j) = standard_complex_gaussian(1, aux)(0) / rn;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = standard_complex_gaussian(1, aux)(0) / rn;

  const TimeGrid grid(s.outer_times, s.step_cap);
  const std::size_t nt = grid.size();
  const auto reps = static_cast<std::size_t>(s.replications);
  std::vector<std::vector<Complex>> mixed(nt, std::vector<Complex>(reps)),
      u(nt, std::vector<Complex>(reps)), v(nt, std::vector<Complex>(reps));
  std::vector<std::vector<double>> second(nt, std::vector<double>(reps));
  std::vector<double> haar2(reps), haar4(reps);

  parallel_for(s.replications, threads, [&](long r) {
    const auto ri = static_cast<std::size_t>(r);
    RngStream rng(s.seed, static_cast<std::uint64_t>(r));
    const UnitaryPath path = simulate_path(n, InitialLaw::identity(), grid, rng, s.tolerances);
    for (std::size_t j = 0; j < nt; ++j) {
      const ComplexMatrix vt = std::exp(grid.times()[j] / 2.0) * path.states[j].matrix();
      const ComplexMatrix av = a * vt;
      const Complex m = (av * av).trace();
      mixed[j][ri] = m;
      second[j][ri] = std::norm(m);
      u[j][ri] = (vt * c * vt.adjoint() * d).trace();
      v[j][ri] = (vt * c).trace() * (vt.adjoint() * d).trace();
    }
    RngStream hr(s.seed, static_cast<std::uint64_t>(r), 2);
    const ComplexMatrix hu = haar_unitary(n, hr).matrix();
    const ComplexMatrix ahu = a * hu;
    haar2[ri] = std::norm(ahu.trace());
    haar4[ri] = std::norm((ahu * ahu).trace());
  });

  for (std::size_t j = 0; j < nt; ++j) {
    const double t = grid.times()[j];
    rec.check("mixed_moment", t, batch_mean(mixed[j], s.batches), mixed_moment(a, n, t));
    rec.check("second_moment", t, batch_mean(second[j], s.batches), second_moment(a, n, t));
    rec.check("u_cd", t, batch_mean(u[j], s.batches), u_cd(c, d, n, t));
    rec.check("v_cd", t, batch_mean(v[j], s.batches), v_cd(c, d, n, t));
  }
  rec.check("haar_second", 0.0, batch_mean(haar2, s.batches), haar_moment_second(a, n));
  const Estimate h4 = batch_mean(haar4, s.batches);
  rec.check("haar_fourth", 0.0, h4, haar_moment_fourth(a, n));
  rec.check("haar_fourth_bound", 0.0, h4, haar_moment_fourth_bound(a, n), 0.0,
            Comparison::kAtMost);
}

// ---------------------------------------------------------------------------
// JSON helpers. Non-finite doubles are written as null.

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double num_of(const Json& j, double when_null) {
  return j.is_null() ? when_null : j.get<double>();
}

Json cplx(Complex z) { return Json::array({num(z.real()), num(z.imag())}); }

Complex cplx_of(const Json& j) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {num_of(j.at(0), nan), num_of(j.at(1), nan)};
}

Json matrix_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(cplx(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_of(const Json& j) {
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = cplx_of(j.at(r).at(c));
  return m;
}

Json scenario_json(const Scenario& s) {
  Json obs;
  switch (s.observables.kind) {
    case ObservableKind::kIdentity: obs["kind"] = "identity"; break;
    case ObservableKind::kElementaryCorner:
      obs["kind"] = "corner";
      obs["p"] = s.observables.corner;
      break;
    case ObservableKind::kSparseReal:
      obs["kind"] = "sparse";
      obs["density"] = s.observables.density;
      break;
    case ObservableKind::kCustom: {
      obs["kind"] = "custom";
      obs["file"] = s.observables.file;
      Json ms = Json::array();
      for (const auto& m : s.observables.custom) ms.push_back(matrix_json(m));
      obs["matrices"] = std::move(ms);
      break;
    }
  }
  Json j;
  j["n"] = s.n;
  j["initial_law"] = to_string(s.initial_law);
  j["alpha_n"] = s.alpha_n;
  j["outer_times"] = s.outer_times;
  j["step_cap"] = s.step_cap;
  j["replications"] = s.replications;
  j["observables"] = std::move(obs);
  j["centering"] = to_string(s.centering);
  j["seed"] = s.seed;
  j["batches"] = s.batches;
  j["sigma"] = s.sigma;
  j["rel_tol"] = s.rel_tol;
  j["tol_hermitian"] = s.tolerances.hermitian;
  j["tol_unitarity"] = s.tolerances.unitarity;
  return j;
}

Scenario scenario_of(const Json& j) {
  Scenario s;
  s.n = j.at("n").get<Index>();
  s.alpha_n = j.at("alpha_n").get<double>();
  s.outer_times = j.at("outer_times").get<std::vector<double>>();
  s.step_cap = j.at("step_cap").get<double>();
  s.replications = j.at("replications").get<long>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.batches = j.at("batches").get<int>();
  s.sigma = j.at("sigma").get<double>();
  s.rel_tol = j.at("rel_tol").get<double>();
  s.tolerances.hermitian = j.at("tol_hermitian").get<double>();
  s.tolerances.unitarity = j.at("tol_unitarity").get<double>();
  const Json& obs = j.at("observables");
  const std::string kind = obs.at("kind").get<std::string>();
  if (kind == "identity") {
    s.observables.kind = ObservableKind::kIdentity;
  } else if (kind == "corner") {
    s.observables.kind = ObservableKind::kElementaryCorner;
    s.observables.corner = obs.at("p").get<Index>();
  } else if (kind == "sparse") {
    s.observables.kind = ObservableKind::kSparseReal;
    s.observables.density = obs.at("density").get<double>();
  } else if (kind == "custom") {
    s.observables.kind = ObservableKind::kCustom;
    s.observables.file = obs.at("file").get<std::string>();
    for (const auto& m : obs.at("matrices")) s.observables.custom.push_back(matrix_of(m));
  } else {
    config_error("observables", "unknown kind '" + kind + "'");
  }
  apply_overrides(s, {{"initial_law", j.at("initial_law").get<std::string>()},
                      {"centering", j.at("centering").get<std::string>()}});
  return s;
}

Comparison comparison_of(const std::string& x) {
  for (Comparison c : {Comparison::kWithin, Comparison::kAtMost, Comparison::kAtLeast}) {
    if (to_string(c) == x) return c;
  }
  throw Error(ErrorCode::kConfig, "unknown comparison '" + x + "'", "comparison");
}

Verdict verdict_from(const std::string& x) {
  for (Verdict v : {Verdict::kPass, Verdict::kFail}) {
    if (to_string(v) == x) return v;
  }
  throw Error(ErrorCode::kConfig, "unknown verdict '" + x + "'", "verdict");
}

// Exact equality that also treats two NaNs as equal.
bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }
bool same(Complex a, Complex b) { return same(a.real(), b.real()) && same(a.imag(), b.imag()); }

bool same_scenario(const Scenario& a, const Scenario& b) {
  if (to_config(a) != to_config(b)) return false;
  const auto& ca = a.observables.custom;
  const auto& cb = b.observables.custom;
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i].rows() != cb[i].rows() || ca[i].cols() != cb[i].cols() || ca[i] != cb[i]) {
      return false;
    }
  }
  return true;
}

std::string csv_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Preset p) {
  for (const auto& e : kPresetNames) {
    if (e.preset == p) return e.name;
  }
  return "?";
}

Preset parse_preset(const std::string& name) {
  for (const auto& e : kPresetNames) {
    if (name == e.name) return e.preset;
  }
  config_error("preset", "unknown preset '" + name + "'");
}

const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> v = [] {
    std::vector<Preset> out;
    for (const auto& e : kPresetNames) out.push_back(e.preset);
    return out;
  }();
  return v;
}

Scenario preset_scenario(Preset p) {
  Scenario s;
  s.n = 128;
  s.alpha_n = 1.0;
  s.outer_times = {0.0, 0.5, 1.0, 2.0};
  s.step_cap = 0.05;
  s.replications = 10000;
  switch (p) {
    case Preset::kTheoremMain:
      s.observables.kind = ObservableKind::kElementaryCorner;
      s.observables.corner = 1;
      break;
    case Preset::kCornerRegimes:
      s.observables.kind = ObservableKind::kElementaryCorner;
      s.observables.corner = 2;
      break;
    case Preset::kPermutationCorner:
      s.initial_law = InitialLaw::Kind::kPermutation;
      s.observables.kind = ObservableKind::kElementaryCorner;
      s.observables.corner = 2;
      s.centering = Centering::kInitial;
      break;
    case Preset::kPoissonTrace:
      s.initial_law = InitialLaw::Kind::kPermutation;
      s.observables.kind = ObservableKind::kIdentity;
      s.centering = Centering::kInitial;
      s.outer_times = {0.0, 1.0};
      s.replications = 2000;
      break;
    case Preset::kHaarGaussian:
      s.initial_law = InitialLaw::Kind::kHaar;
      s.observables.kind = ObservableKind::kIdentity;
      s.centering = Centering::kNone;
      s.outer_times = {0.0};
      break;
    case Preset::kHaarEntries:
      s.n = 256;
      s.initial_law = InitialLaw::Kind::kHaar;
      s.observables.kind = ObservableKind::kElementaryCorner;
      s.observables.corner = 2;
      s.centering = Centering::kNone;
      s.outer_times = {0.0};
      break;
    case Preset::kMomentOracles:
      s.n = 16;
      s.step_cap = 0.01;
      s.observables.kind = ObservableKind::kElementaryCorner;
      s.observables.corner = 1;
      break;
  }
  return s;
}

bool RunRecord::all_passed() const {
  for (const auto& r : reports) {
    if (!r.passed()) return false;
  }
  return true;
}

bool same_results(const RunRecord& a, const RunRecord& b) {
  if (a.preset != b.preset || a.version != b.version) return false;
  if (!same_scenario(a.scenario, b.scenario)) return false;
  if (a.reports.size() != b.reports.size() || a.estimates.size() != b.estimates.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    const auto& x = a.reports[i];
    const auto& y = b.reports[i];
    if (x.statistic != y.statistic || !same(x.time, y.time) ||
        !same(x.empirical, y.empirical) || !same(x.se, y.se) ||
        !same(x.oracle, y.oracle) || !same(x.sigma_distance, y.sigma_distance) ||
        x.comparison != y.comparison || !same(x.sigma, y.sigma) ||
        !same(x.rel_tol, y.rel_tol) || x.verdict != y.verdict) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    const auto& x = a.estimates[i];
    const auto& y = b.estimates[i];
    if (x.statistic != y.statistic || !same(x.time, y.time) ||
        !same(x.value, y.value) || !same(x.se, y.se)) {
      return false;
    }
  }
  return true;
}

bool operator==(const RunRecord& a, const RunRecord& b) {
  return same_results(a, b) && same(a.wall_seconds, b.wall_seconds);
}

RunRecord run_preset(Preset p, const Scenario& scenario, int threads) {
  scenario.validate();
  const auto start = std::chrono::steady_clock::now();
  Recorder rec(scenario);
  switch (p) {
    case Preset::kTheoremMain: theorem_main(scenario, threads, rec); break;
    case Preset::kCornerRegimes: corner_regimes(scenario, threads, rec); break;
    case Preset::kPermutationCorner: permutation_corner(scenario, threads, rec); break;
    case Preset::kPoissonTrace: poisson_trace(scenario, threads, rec); break;
    case Preset::kHaarGaussian:
    case Preset::kHaarEntries: haar_family(scenario, threads, rec); break;
    case Preset::kMomentOracles: moment_oracles(scenario, threads, rec); break;
  }
  RunRecord out;
  out.preset = to_string(p);
  out.version = std::string(kVersion) + "+" + kGitRevision;
  out.scenario = scenario;
  out.reports = std::move(rec.reports);
  out.estimates = std::move(rec.estimates);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunRecord run_preset(Preset p, const std::map<std::string, std::string>& overrides,
                     int threads) {
  Scenario s = preset_scenario(p);
  apply_overrides(s, overrides);
  return run_preset(p, s, threads);
}

RunRecord run_preset(const std::string& name,
                     const std::map<std::string, std::string>& overrides, int threads) {
  return run_preset(parse_preset(name), overrides, threads);
}

void apply_environment(Scenario& s) {
  if (const char* env = std::getenv("UBM_TOL_SIGMA")) {
    apply_overrides(s, {{"sigma", env}});
  }
}

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  config_error("format", "expected csv or json, got '" + name + "'");
}

std::string to_csv(const RunRecord& r) {
  std::ostringstream os;
  os << "time,statistic,empirical_re,empirical_im,se,oracle_re,oracle_im,"
        "sigma_distance,verdict\n";
  for (const auto& m : r.reports) {
    os << csv_double(m.time) << ',' << m.statistic << ','
       << csv_double(m.empirical.real()) << ',' << csv_double(m.empirical.imag()) << ','
       << csv_double(std::hypot(m.se.real(), m.se.imag())) << ','
       << csv_double(m.oracle.real()) << ',' << csv_double(m.oracle.imag()) << ','
       << csv_double(m.sigma_distance) << ',' << to_string(m.verdict) << '\n';
  }
  return os.str();
}

std::string to_json(const RunRecord& r) {
  Json j;
  j["preset"] = r.preset;
  j["version"] = r.version;
  j["wall_seconds"] = num(r.wall_seconds);
  j["scenario"] = scenario_json(r.scenario);
  Json reports = Json::array();
  for (const auto& m : r.reports) {
    Json e;
    e["statistic"] = m.statistic;
    e["time"] = m.time;
    e["empirical"] = cplx(m.empirical);
    e["se"] = cplx(m.se);
    e["oracle"] = cplx(m.oracle);
    e["sigma_distance"] = num(m.sigma_distance);
    e["comparison"] = to_string(m.comparison);
    e["sigma"] = m.sigma;
    e["rel_tol"] = m.rel_tol;
    e["verdict"] = to_string(m.verdict);
    reports.push_back(std::move(e));
  }
  j["reports"] = std::move(reports);
  Json est = Json::array();
  for (const auto& e : r.estimates) {
    Json x;
    x["time"] = e.time;
    x["statistic"] = e.statistic;
    x["value"] = cplx(e.value);
    x["se"] = cplx(e.se);
    est.push_back(std::move(x));
  }
  j["estimates"] = std::move(est);
  return j.dump(1) + "\n";
}

RunRecord run_record_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed run record: ") + e.what());
  }
  try {
    RunRecord r;
    r.preset = j.at("preset").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.wall_seconds = num_of(j.at("wall_seconds"), std::numeric_limits<double>::quiet_NaN());
    r.scenario = scenario_of(j.at("scenario"));
    for (const auto& e : j.at("reports")) {
      MomentReport m;
      m.statistic = e.at("statistic").get<std::string>();
      m.time = e.at("time").get<double>();
      m.empirical = cplx_of(e.at("empirical"));
      m.se = cplx_of(e.at("se"));
      m.oracle = cplx_of(e.at("oracle"));
      m.sigma_distance = num_of(e.at("sigma_distance"), INFINITY);
      m.comparison = comparison_of(e.at("comparison").get<std::string>());
      m.sigma = e.at("sigma").get<double>();
      m.rel_tol = e.at("rel_tol").get<double>();
      m.verdict = verdict_from(e.at("verdict").get<std::string>());
      r.reports.push_back(std::move(m));
    }
    for (const auto& e : j.at("estimates")) {
      r.estimates.push_back({e.at("time").get<double>(), e.at("statistic").get<std::string>(),
                             cplx_of(e.at("value")), cplx_of(e.at("se"))});
    }
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed run record: ") + e.what());
  }
}

std::string emit_report(const RunRecord& r, ReportFormat format, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir.empty() ? "." : dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message(), dir);
  const std::string ext = format == ReportFormat::kCsv ? ".csv" : ".json";
  const std::string path = (fs::path(dir.empty() ? "." : dir) / (r.preset + ext)).string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing", path);
  out << (format == ReportFormat::kCsv ? to_csv(r) : to_json(r));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path, path);
  return path;
}

}  // namespace ubm
