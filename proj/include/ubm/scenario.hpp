#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ubm/engine.hpp"

namespace ubm {

enum class ObservableKind { kElementaryCorner, kIdentity, kSparseReal, kCustom };

struct ObservablePreset {
  ObservableKind kind = ObservableKind::kIdentity;
  Index corner = 1;        // ElementaryCorner(p)
  double density = 1.0;    // SparseReal(density)
  std::string file;        // Custom(file); empty when supplied in memory
  std::vector<ComplexMatrix> custom;

  std::string to_string() const;
};

// How the statistic is centered before covariances are taken.
enum class Centering { kNone, kIdentity, kInitial };

struct Scenario {
  Index n = 0;
  InitialLaw::Kind initial_law = InitialLaw::Kind::kIdentity;
  double alpha_n = 0.0;
  std::vector<double> outer_times;
  double step_cap = 0.01;
  long replications = 10000;
  ObservablePreset observables;
  Centering centering = Centering::kIdentity;
  std::uint64_t seed = 0;
  int batches = 20;
  double sigma = 4.0;          // Monte Carlo pass threshold in SEs
  double rel_tol = 0.1;        // extra relative slack for limit-law checks
  Tolerances tolerances;

  // Re-checks every engine and oracle precondition; throws kConfig naming
  // the offending key.
  void validate() const;
};

// key = value lines, '#' comments, blank lines ignored. Required keys: n,
// alpha_n, outer_times. Unknown keys are rejected.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
// Same syntax and key set as parse_scenario, but nothing is required and
// values are not yet interpreted.
std::map<std::string, std::string> parse_overrides(const std::string& text);
// Whole file as a string; kIo naming the path on failure.
std::string read_text_file(const std::string& path);
// Applies key = value overrides on top of an existing scenario.
void apply_overrides(Scenario& s, const std::map<std::string, std::string>& kv);

std::string to_config(const Scenario& s);
std::string to_string(InitialLaw::Kind k);
std::string to_string(Centering c);

// Observable matrices for the scenario. ElementaryCorner(p) yields
// A_(a,b) = sqrt(n) E_ba in row-major (a, b) order, so that Tr(A_(a,b) V) =
// sqrt(n) V_ab. SparseReal draws from a stream reserved for observables.
std::vector<ComplexMatrix> build_observables(const Scenario& s);

// Matrix file: first line "n k", then k blocks of n rows of n "re im" pairs.
std::vector<ComplexMatrix> read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path,
                       const std::vector<ComplexMatrix>& matrices);

inline constexpr std::uint64_t kObservableStream = 0xFFFF'FFFF'FFFF'FF00ull;

}  // namespace ubm
