// Command-line front end: run presets, validate configs, print closed forms.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ubm/harness.hpp"
#include "ubm/oracles.hpp"
#include "ubm/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunArgs {
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> replications;
  std::string out;
  std::string format = "csv";
};

void print_summary(const ubm::RunRecord& r) {
  std::printf("%s  %s  n=%lld  N=%ld  seed=%llu  %.1fs\n", r.preset.c_str(),
              r.version.c_str(), static_cast<long long>(r.scenario.n),
              r.scenario.replications,
              static_cast<unsigned long long>(r.scenario.seed), r.wall_seconds);
  for (const auto& m : r.reports) {
    std::printf("%-4s t=%-6g %-22s emp=(% .6g, % .6g) oracle=(% .6g, % .6g) dist=%.3g\n",
                ubm::to_string(m.verdict).c_str(), m.time, m.statistic.c_str(),
                m.empirical.real(), m.empirical.imag(), m.oracle.real(),
                m.oracle.imag(), m.sigma_distance);
  }
  std::size_t failed = 0;
  for (const auto& m : r.reports) failed += !m.passed();
  std::printf("%zu/%zu checks passed\n", r.reports.size() - failed, r.reports.size());
}

int run(const RunArgs& a) {
  ubm::Preset preset{};
  ubm::Scenario s;
  ubm::ReportFormat format{};
  try {
    preset = ubm::parse_preset(a.preset);
    format = ubm::parse_format(a.format);
    s = ubm::preset_scenario(preset);
    std::map<std::string, std::string> kv;
    if (!a.config.empty()) kv = ubm::parse_overrides(ubm::read_text_file(a.config));
    if (a.seed) kv["seed"] = std::to_string(*a.seed);
    if (a.replications) kv["replications"] = *a.replications;
    ubm::apply_overrides(s, kv);
    ubm::apply_environment(s);
  } catch (const ubm::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const ubm::RunRecord record = ubm::run_preset(preset, s);
  print_summary(record);
  if (!a.out.empty()) {
    std::printf("wrote %s\n", ubm::emit_report(record, format, a.out).c_str());
  }
  return record.all_passed() ? kExitPass : kExitFail;
}

int validate(const std::string& path) {
  try {
    std::cout << ubm::to_config(ubm::load_scenario(path));
  } catch (const ubm::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitPass;
}

int oracles(const std::string& path, long n, double t) {
  std::vector<ubm::ComplexMatrix> ms;
  try {
    ms = ubm::read_matrix_file(path);
    for (const auto& m : ms) {
      if (m.rows() != n) {
        throw ubm::Error(ubm::ErrorCode::kConfig, "matrix file is " +
                             std::to_string(m.rows()) + " x " + std::to_string(m.cols()) +
                             " but --n is " + std::to_string(n), "n");
      }
    }
  } catch (const ubm::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  auto show = [](const char* name, ubm::Complex z) {
    std::printf("  %-28s %.17g %+.17gi\n", name, z.real(), z.imag());
  };
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& a = ms[i];
    const ubm::ComplexMatrix as = a.adjoint();
    std::printf("matrix %zu  (n = %ld, t = %g)\n", i, n, t);
    show("E Tr(A V A V)", ubm::mixed_moment(a, n, t));
    if (n >= 3) show("E |Tr(A V A V)|^2", ubm::second_moment(a, n, t));
    show("E Tr(V A V* A*)", ubm::u_cd(a, as, n, t));
    show("E Tr(V A) Tr(V* A*)", ubm::v_cd(a, as, n, t));
    show("Haar E |Tr(A U)|^2", ubm::haar_moment_second(a, n));
    if (n >= 3) {
      show("Haar E |Tr(A U A U)|^2", ubm::haar_moment_fourth(a, n));
      show("Haar bound 100 S^2/n^2", ubm::haar_moment_fourth_bound(a, n));
    }
    if (n >= 2) {
      const auto b = ubm::permutation_trace_bounds(a, a, n);
      show("perm bound E|Tr(AS)|", b.first);
      show("perm bound E|Tr(ASAS)|", b.second);
    }
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unitary Brownian motion simulation and verification"};
  app.set_version_flag("--version", std::string(ubm::kVersion) + "+" + ubm::kGitRevision);
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a preset and compare against its oracles");
  std::string preset_help = "Preset name:";
  for (auto p : ubm::all_presets()) preset_help += " " + ubm::to_string(p);
  run_cmd->add_option("preset", run_args.preset, preset_help)->required();
  run_cmd->add_option("--config", run_args.config, "Config file overriding preset defaults");
  run_cmd->add_option("--seed", run_args.seed, "Master seed");
  run_cmd->add_option("--replications", run_args.replications, "Replication count");
  run_cmd->add_option("--out", run_args.out, "Directory for the report file");
  run_cmd->add_option("--format", run_args.format, "csv or json");

  std::string config_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario config");
  validate_cmd->add_option("config", config_path, "Config file")->required();

  std::string matrix_path;
  long n = 0;
  double t = 0.0;
  auto* oracle_cmd = app.add_subcommand("oracles", "Print closed-form moments for matrices in a file");
  oracle_cmd->add_option("matrix_file", matrix_path, "Matrix file")->required();
  oracle_cmd->add_option("--n", n, "Dimension")->required()->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--t", t, "Time")->required()->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*validate_cmd) return validate(config_path);
    if (*oracle_cmd) return oracles(matrix_path, n, t);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
