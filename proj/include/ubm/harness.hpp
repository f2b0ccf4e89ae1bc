#pragma once

#include <map>
#include <string>
#include <vector>

#include "ubm/scenario.hpp"
#include "ubm/stats.hpp"

namespace ubm {

enum class Preset {
  kTheoremMain,
  kCornerRegimes,
  kPermutationCorner,
  kPoissonTrace,
  kHaarGaussian,
  kHaarEntries,
  kMomentOracles,
};

std::string to_string(Preset p);
// Throws kConfig (key "preset") for unknown names.
Preset parse_preset(const std::string& name);
const std::vector<Preset>& all_presets();

// Default scenario of each preset before overrides.
Scenario preset_scenario(Preset p);

// One aggregated quantity at one outer time, as produced by the ensemble.
struct RawEstimate {
  double time = 0.0;
  std::string statistic;
  Complex value{};
  Complex se{};
};

struct RunRecord {
  std::string preset;
  std::string version;
  Scenario scenario;
  std::vector<MomentReport> reports;
  std::vector<RawEstimate> estimates;
  double wall_seconds = 0.0;

  bool all_passed() const;
};

// Equality of everything except wall-clock time.
bool same_results(const RunRecord& a, const RunRecord& b);
bool operator==(const RunRecord& a, const RunRecord& b);

RunRecord run_preset(Preset p, const Scenario& scenario, int threads = 0);
RunRecord run_preset(Preset p, const std::map<std::string, std::string>& overrides,
                     int threads = 0);
RunRecord run_preset(const std::string& name,
                     const std::map<std::string, std::string>& overrides,
                     int threads = 0);

// Applies UBM_TOL_SIGMA when set; throws kConfig on a malformed value.
void apply_environment(Scenario& s);

enum class ReportFormat { kCsv, kJson };
ReportFormat parse_format(const std::string& name);

std::string to_csv(const RunRecord& r);
std::string to_json(const RunRecord& r);
RunRecord run_record_from_json(const std::string& text);

// Writes <dir>/<preset>.csv or .json and returns the path. Throws kIo with
// the path on failure.
std::string emit_report(const RunRecord& r, ReportFormat format,
                        const std::string& dir);

}  // namespace ubm
