#include "ubm/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "ubm/rng.hpp"

namespace ubm {

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::kConfig, key + ": " + msg, key);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    if (v == "inf" || v == "+inf") return INFINITY;
    config_error(key, "expected a number, got '" + v + "'");
  }
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    // Accept integral values written in exponent form, e.g. 1e5.
    const double d = parse_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 9e18) {
      config_error(key, "expected an integer, got '" + v + "'");
    }
    return static_cast<long long>(d);
  }
  return x;
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    config_error(key, "expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> parse_times(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) config_error(key, "empty entry in list");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) config_error(key, "empty list");
  return out;
}

InitialLaw::Kind parse_law(const std::string& key, const std::string& v) {
  if (v == "identity") return InitialLaw::Kind::kIdentity;
  if (v == "haar") return InitialLaw::Kind::kHaar;
  if (v == "permutation") return InitialLaw::Kind::kPermutation;
  config_error(key, "expected identity|haar|permutation, got '" + v + "'");
}

Centering parse_centering(const std::string& key, const std::string& v) {
  if (v == "none") return Centering::kNone;
  if (v == "identity") return Centering::kIdentity;
  if (v == "initial") return Centering::kInitial;
  config_error(key, "expected none|identity|initial, got '" + v + "'");
}

ObservablePreset parse_observables(const std::string& key,
                                   const std::string& v) {
  ObservablePreset p;
  const auto colon = v.find(':');
  const std::string head = v.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : trim(v.substr(colon + 1));
  if (head == "identity" && arg.empty()) {
    p.kind = ObservableKind::kIdentity;
  } else if (head == "corner") {
    p.kind = ObservableKind::kElementaryCorner;
    p.corner = static_cast<Index>(parse_int(key, arg));
  } else if (head == "sparse") {
    p.kind = ObservableKind::kSparseReal;
    p.density = parse_double(key, arg);
  } else if (head == "custom" && !arg.empty()) {
    p.kind = ObservableKind::kCustom;
    p.file = arg;
    try {
      p.custom = read_matrix_file(arg);
    } catch (const Error& e) {
      config_error(key, e.what());
    }
  } else {
    config_error(key, "expected identity|corner:p|sparse:density|custom:file, got '" + v + "'");
  }
  return p;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "n", "initial_law", "alpha_n", "outer_times", "step_cap",
      "replications", "observables", "centering", "seed", "batches",
      "sigma", "rel_tol", "tol_hermitian", "tol_unitarity"};
  return keys;
}

void set_key(Scenario& s, const std::string& key, const std::string& v) {
  if (key == "n") s.n = static_cast<Index>(parse_int(key, v));
  else if (key == "initial_law") s.initial_law = parse_law(key, v);
  else if (key == "alpha_n") s.alpha_n = parse_double(key, v);
  else if (key == "outer_times") s.outer_times = parse_times(key, v);
  else if (key == "step_cap") s.step_cap = parse_double(key, v);
  else if (key == "replications") s.replications = static_cast<long>(parse_int(key, v));
  else if (key == "observables") s.observables = parse_observables(key, v);
  else if (key == "centering") s.centering = parse_centering(key, v);
  else if (key == "seed") s.seed = parse_seed(key, v);
  else if (key == "batches") s.batches = static_cast<int>(parse_int(key, v));
  else if (key == "sigma") s.sigma = parse_double(key, v);
  else if (key == "rel_tol") s.rel_tol = parse_double(key, v);
  else if (key == "tol_hermitian") s.tolerances.hermitian = parse_double(key, v);
  else if (key == "tol_unitarity") s.tolerances.unitarity = parse_double(key, v);
  else config_error(key, "unknown key");
}

// Shortest text that reads back to the same double.
std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string ObservablePreset::to_string() const {
  switch (kind) {
    case ObservableKind::kIdentity: return "identity";
    case ObservableKind::kElementaryCorner: return "corner:" + std::to_string(corner);
    case ObservableKind::kSparseReal: return "sparse:" + format_double(density);
    case ObservableKind::kCustom: return "custom:" + (file.empty() ? "<memory>" : file);
  }
  return "?";
}

std::string to_string(InitialLaw::Kind k) {
  switch (k) {
    case InitialLaw::Kind::kIdentity: return "identity";
    case InitialLaw::Kind::kHaar: return "haar";
    case InitialLaw::Kind::kPermutation: return "permutation";
    case InitialLaw::Kind::kFixed: return "fixed";
  }
  return "?";
}

std::string to_string(Centering c) {
  switch (c) {
    case Centering::kNone: return "none";
    case Centering::kIdentity: return "identity";
    case Centering::kInitial: return "initial";
  }
  return "?";
}

void Scenario::validate() const {
  if (n < 1) config_error("n", "must be >= 1");
  if (initial_law == InitialLaw::Kind::kFixed) {
    config_error("initial_law", "fixed initial matrices are not configurable");
  }
  if (!(alpha_n > 0.0) || !std::isfinite(alpha_n)) {
    config_error("alpha_n", "must be positive and finite (alpha -> 0 is studied via alpha_n = 1/n)");
  }
  if (outer_times.empty() || outer_times.front() != 0.0) {
    config_error("outer_times", "must start at 0");
  }
  for (std::size_t j = 1; j < outer_times.size(); ++j) {
    if (!std::isfinite(outer_times[j]) || !(outer_times[j] > outer_times[j - 1])) {
      config_error("outer_times", "must be finite and strictly increasing");
    }
  }
  if (!(step_cap > 0.0) || !std::isfinite(step_cap)) config_error("step_cap", "must be positive");
  if (replications < 2) config_error("replications", "must be >= 2");
  if (batches < 2) config_error("batches", "must be >= 2");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) config_error("sigma", "must be positive");
  if (!(rel_tol >= 0.0) || !std::isfinite(rel_tol)) config_error("rel_tol", "must be >= 0");
  if (!(tolerances.hermitian > 0.0)) config_error("tol_hermitian", "must be positive");
  if (!(tolerances.unitarity > 0.0)) config_error("tol_unitarity", "must be positive");
  switch (observables.kind) {
    case ObservableKind::kElementaryCorner:
      if (observables.corner < 1 || observables.corner > n) {
        config_error("observables", "corner size p must satisfy 1 <= p <= n");
      }
      break;
    case ObservableKind::kSparseReal:
      if (!(observables.density > 0.0) || !(observables.density <= 1.0)) {
        config_error("observables", "density must lie in (0, 1]");
      }
      break;
    case ObservableKind::kCustom:
      if (observables.custom.empty()) config_error("observables", "no custom matrices");
      for (const auto& a : observables.custom) {
        if (a.rows() != n || a.cols() != n) {
          config_error("observables", "custom matrices must be n x n");
        }
        if (!a.allFinite()) config_error("observables", "custom matrix has non-finite entries");
      }
      break;
    case ObservableKind::kIdentity:
      break;
  }
}

std::map<std::string, std::string> parse_overrides(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig,
                  "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) config_error(key, "unknown key");
    if (value.empty()) config_error(key, "missing value");
    if (!out.emplace(key, value).second) config_error(key, "duplicate key");
  }
  return out;
}

Scenario parse_scenario(const std::string& text) {
  const auto kv = parse_overrides(text);
  for (const char* req : {"n", "alpha_n", "outer_times"}) {
    if (!kv.count(req)) config_error(req, "missing required key");
  }
  Scenario s;
  apply_overrides(s, kv);
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path, path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

void apply_overrides(Scenario& s, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (!known_keys().count(key)) config_error(key, "unknown key");
    set_key(s, key, trim(value));
  }
  s.validate();
}

std::string to_config(const Scenario& s) {
  std::ostringstream os;
  os << "n = " << s.n << "\n"
     << "initial_law = " << to_string(s.initial_law) << "\n"
     << "alpha_n = " << format_double(s.alpha_n) << "\n"
     << "outer_times = ";
  for (std::size_t j = 0; j < s.outer_times.size(); ++j) {
    os << (j ? ", " : "") << format_double(s.outer_times[j]);
  }
  os << "\n"
     << "step_cap = " << format_double(s.step_cap) << "\n"
     << "replications = " << s.replications << "\n"
     << "observables = " << s.observables.to_string() << "\n"
     << "centering = " << to_string(s.centering) << "\n"
     << "seed = " << s.seed << "\n"
     << "batches = " << s.batches << "\n"
     << "sigma = " << format_double(s.sigma) << "\n"
     << "rel_tol = " << format_double(s.rel_tol) << "\n"
     << "tol_hermitian = " << format_double(s.tolerances.hermitian) << "\n"
     << "tol_unitarity = " << format_double(s.tolerances.unitarity) << "\n";
  return os.str();
}

std::vector<ComplexMatrix> build_observables(const Scenario& s) {
  const Index n = s.n;
  const double rn = std::sqrt(static_cast<double>(n));
  switch (s.observables.kind) {
    case ObservableKind::kIdentity:
      return {ComplexMatrix::Identity(n, n)};
    case ObservableKind::kElementaryCorner: {
      const Index p = s.observables.corner;
      std::vector<ComplexMatrix> out;
      for (Index a = 0; a < p; ++a) {
        for (Index b = 0; b < p; ++b) {
          ComplexMatrix e = ComplexMatrix::Zero(n, n);
          e(b, a) = rn;
          out.push_back(std::move(e));
        }
      }
      return out;
    }
    case ObservableKind::kSparseReal: {
      // Nonzero with probability `density`, then N(0, 1/(n density)), so that
      // Tr(AA*)/n has mean one.
      const double density = s.observables.density;
      const double sd = 1.0 / std::sqrt(static_cast<double>(n) * density);
      RngStream rng(s.seed, kObservableStream);
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (rng.uniform() < density) a(i, j) = sd * rng.normal();
      return {a};
    }
    case ObservableKind::kCustom:
      return s.observables.custom;
  }
  return {};
}

std::vector<ComplexMatrix> read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open matrix file " + path);
  long long n = 0, k = 0;
  if (!(in >> n >> k) || n < 1 || k < 1) {
    throw Error(ErrorCode::kIo, path + ": header must be 'n k' with n, k >= 1");
  }
  std::vector<ComplexMatrix> out;
  for (long long l = 0; l < k; ++l) {
    ComplexMatrix a(n, n);
    for (long long i = 0; i < n; ++i) {
      for (long long j = 0; j < n; ++j) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) {
          throw Error(ErrorCode::kIo, path + ": truncated at matrix " +
                                          std::to_string(l) + " entry (" +
                                          std::to_string(i) + "," +
                                          std::to_string(j) + ")");
        }
        a(i, j) = Complex(re, im);
      }
    }
    out.push_back(std::move(a));
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::kIo, path + ": trailing data");
  return out;
}

void write_matrix_file(const std::string& path,
                       const std::vector<ComplexMatrix>& matrices) {
  std::ofstream out(path);
  if (!out || matrices.empty()) {
    throw Error(ErrorCode::kIo, "cannot write matrix file " + path);
  }
  const Index n = matrices.front().rows();
  out << n << " " << matrices.size() << "\n" << std::setprecision(17);
  for (const auto& a : matrices) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        out << (j ? "  " : "") << a(i, j).real() << " " << a(i, j).imag();
      }
      out << "\n";
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace ubm
