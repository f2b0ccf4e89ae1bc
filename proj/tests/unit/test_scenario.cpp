#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ubm/scenario.hpp"

using namespace ubm;

namespace {

const char* kMinimal = "n = 16\nalpha_n = 1\nouter_times = 0, 0.5, 1\n";

ErrorCode code_of(const std::string& text, std::string* key = nullptr) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    if (key) *key = e.key();
    return e.code();
  }
  FAIL("expected a configuration error");
  return ErrorCode::kIo;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("minimal document gets documented defaults") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.n == 16);
  CHECK(s.step_cap == 0.01);
  CHECK(s.replications == 10000);
  CHECK(s.initial_law == InitialLaw::Kind::kIdentity);
  CHECK(s.observables.kind == ObservableKind::kIdentity);
  CHECK(s.centering == Centering::kIdentity);
  CHECK(s.batches == 20);
  CHECK(s.sigma == 4.0);
  CHECK(s.outer_times == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("strict parsing names the offending key") {
  std::string key;
  CHECK(code_of("n = 16\nalpha_n = 0\nouter_times = 0, 1\n", &key) == ErrorCode::kConfig);
  CHECK(key == "alpha_n");
  CHECK(code_of("n = 16\nalpha_n = 1\nouter_times = 0, 1\nobservables = corner:17\n", &key) ==
        ErrorCode::kConfig);
  CHECK(key == "observables");
  CHECK(code_of(std::string(kMinimal) + "colour = blue\n", &key) == ErrorCode::kConfig);
  CHECK(key == "colour");
  CHECK(code_of(std::string(kMinimal) + "n = 8\n", &key) == ErrorCode::kConfig);
  CHECK(key == "n");
  CHECK(code_of("n = 16\nouter_times = 0, 1\n", &key) == ErrorCode::kConfig);
  CHECK(key == "alpha_n");
  CHECK(code_of("n = 16\nalpha_n = 1\nouter_times = 0.5, 1\n", &key) == ErrorCode::kConfig);
  CHECK(key == "outer_times");
  CHECK(code_of("n = 16\nalpha_n = 1\nouter_times = 0, 1, 1\n", &key) == ErrorCode::kConfig);
  CHECK(code_of(std::string(kMinimal) + "observables = sparse:0\n", &key) == ErrorCode::kConfig);
  CHECK(code_of(std::string(kMinimal) + "observables = sparse:1.5\n") == ErrorCode::kConfig);
  CHECK(code_of(std::string(kMinimal) + "replications = 1\n") == ErrorCode::kConfig);
  CHECK(code_of(std::string(kMinimal) + "replications = 2.5\n") == ErrorCode::kConfig);
  CHECK(code_of(std::string(kMinimal) + "initial_law = fixed\n") == ErrorCode::kConfig);
  CHECK(code_of(std::string(kMinimal) + "step_cap = -1\n") == ErrorCode::kConfig);
  CHECK(code_of("n = 16\nalpha_n = 1\nouter_times = 0, 1\nthis line has no equals\n") ==
        ErrorCode::kConfig);
}

TEST_CASE("comments, exponent integers and the config echo") {
  const Scenario s = parse_scenario(
      "# header\nn = 32  # trailing\nalpha_n = 0.03125\nouter_times = 0,1, 2\n"
      "replications = 1e5\ninitial_law = permutation\nobservables = corner:3\n"
      "centering = initial\nseed = 18446744073709551615\nrel_tol = 0.1\n");
  CHECK(s.replications == 100000);
  CHECK(s.seed == 18446744073709551615ull);
  CHECK(s.observables.corner == 3);
  const Scenario back = parse_scenario(to_config(s));
  CHECK(to_config(back) == to_config(s));
  CHECK(back.alpha_n == s.alpha_n);
  CHECK(back.rel_tol == s.rel_tol);
}

TEST_CASE("overrides are partial and strict") {
  const auto kv = parse_overrides("seed = 7\nreplications = 50\n");
  CHECK(kv.size() == 2);
  Scenario s = parse_scenario(kMinimal);
  apply_overrides(s, kv);
  CHECK(s.seed == 7);
  CHECK(s.replications == 50);
  CHECK_THROWS_AS(parse_overrides("seed = 1\nseed = 2\n"), Error);
  CHECK_THROWS_AS(apply_overrides(s, {{"nope", "1"}}), Error);
  CHECK_THROWS_AS(apply_overrides(s, {{"observables", "corner:17"}}), Error);
}

TEST_CASE("corner observables address single entries") {
  Scenario s = parse_scenario(std::string(kMinimal) + "observables = corner:2\n");
  const auto obs = build_observables(s);
  REQUIRE(obs.size() == 4);
  RngStream rng(3, 0);
  const ComplexMatrix v = test::random_matrix(16, rng);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b)
      CHECK(std::abs(trace_product(obs[a * 2 + b], v) - 4.0 * v(a, b)) < 1e-12);
}

TEST_CASE("sparse observables: deterministic, real, normalised on average") {
  Scenario s = parse_scenario("n = 200\nalpha_n = 1\nouter_times = 0, 1\nobservables = sparse:0.05\n");
  const auto a = build_observables(s);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == build_observables(s)[0]);
  CHECK(a[0].imag().cwiseAbs().maxCoeff() == 0.0);
  const double q = (a[0] * a[0].adjoint()).trace().real() / 200.0;
  CHECK(std::abs(q - 1.0) < 0.1);
  const double fill = static_cast<double>((a[0].array() != Complex(0.0)).count()) / (200.0 * 200.0);
  CHECK(std::abs(fill - 0.05) < 0.005);
  s.seed = 1;
  CHECK(build_observables(s)[0] != a[0]);
}

TEST_CASE("matrix files round-trip and feed custom observables") {
  RngStream rng(5, 0);
  const std::vector<ComplexMatrix> ms{test::random_matrix(4, rng), test::random_matrix(4, rng)};
  const std::string path = temp_path("ubm_test_matrices.txt");
  write_matrix_file(path, ms);
  const auto back = read_matrix_file(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == ms[0]);
  CHECK(back[1] == ms[1]);

  const Scenario s = parse_scenario("n = 4\nalpha_n = 1\nouter_times = 0, 1\nobservables = custom:" + path + "\n");
  CHECK(s.observables.kind == ObservableKind::kCustom);
  CHECK(build_observables(s)[1] == ms[1]);
  CHECK_THROWS_AS(parse_scenario("n = 5\nalpha_n = 1\nouter_times = 0, 1\nobservables = custom:" + path + "\n"),
                  Error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_matrix_file(path), Error);

  const std::string broken = temp_path("ubm_test_broken.txt");
  std::ofstream(broken) << "2 1\n1 0 0 0\n0 0\n";
  CHECK_THROWS_AS(read_matrix_file(broken), Error);
  std::remove(broken.c_str());
}
