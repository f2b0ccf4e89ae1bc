#include "ubm/engine.hpp"

#include <cmath>
#include <string>

#include "ubm/samplers.hpp"

namespace ubm {

InitialLaw InitialLaw::fixed(UnitaryMatrix u) {
  InitialLaw law(Kind::kFixed);
  law.fixed_.emplace(std::move(u));
  return law;
}

const UnitaryMatrix& InitialLaw::fixed_matrix() const {
  if (!fixed_) {
    throw Error(ErrorCode::kInvalidArgument,
                "InitialLaw: " + name() + " has no fixed matrix");
  }
  return *fixed_;
}

std::string InitialLaw::name() const {
  switch (kind_) {
    case Kind::kIdentity: return "identity";
    case Kind::kHaar: return "haar";
    case Kind::kPermutation: return "permutation";
    case Kind::kFixed: return "fixed";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

void validate_times(const std::vector<double>& t, const char* what) {
  if (t.empty()) {
    throw Error(ErrorCode::kInvalidGrid, std::string(what) + ": empty grid");
  }
  if (t.front() != 0.0) {
    throw Error(ErrorCode::kInvalidGrid,
                std::string(what) + ": grid must start at 0");
  }
  for (std::size_t j = 1; j < t.size(); ++j) {
    if (!std::isfinite(t[j]) || !(t[j] > t[j - 1])) {
      throw Error(ErrorCode::kInvalidGrid,
                  std::string(what) + ": times must be finite and strictly "
                                      "increasing (index " +
                      std::to_string(j) + ")");
    }
  }
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> times, double step_cap)
    : TimeGrid(times, times, step_cap) {}

TimeGrid::TimeGrid(std::vector<double> times, std::vector<double> outer_times,
                   double step_cap)
    : times_(std::move(times)), outer_(std::move(outer_times)),
      step_cap_(step_cap) {
  validate_times(times_, "TimeGrid");
  validate_times(outer_, "TimeGrid(outer)");
  if (outer_.size() != times_.size()) {
    throw Error(ErrorCode::kInvalidGrid,
                "TimeGrid: outer and inner grids differ in length");
  }
  if (!(step_cap_ > 0.0) || !std::isfinite(step_cap_)) {
    throw Error(ErrorCode::kInvalidGrid,
                "TimeGrid: step_cap must be positive, got " +
                    std::to_string(step_cap_), "step_cap");
  }
}

long TimeGrid::inner_steps(std::size_t j) const {
  const double ds = times_.at(j) - times_.at(j - 1);
  // Shave a few ulps so that e.g. 0.5 / 0.01 does not round up to 51 steps.
  const double ratio = ds / step_cap_ * (1.0 - 1e-12);
  return std::max(1L, static_cast<long>(std::ceil(ratio)));
}

TimeGrid rescaled_grid(double alpha_n, const std::vector<double>& outer_times,
                       double step_cap) {
  if (!(alpha_n > 0.0) || !std::isfinite(alpha_n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "rescaled_grid: alpha_n must be positive and finite, got " +
                    std::to_string(alpha_n), "alpha_n");
  }
  validate_times(outer_times, "rescaled_grid");
  std::vector<double> inner;
  inner.reserve(outer_times.size());
  for (double t : outer_times) inner.push_back(std::log1p(alpha_n * t));
  return TimeGrid(std::move(inner), outer_times, step_cap);
}

// ---------------------------------------------------------------------------

namespace {

ComplexMatrix initial_columns(Index n, Index p, const InitialLaw& init,
                              RngStream& rng) {
  switch (init.kind()) {
    case InitialLaw::Kind::kIdentity:
      return ComplexMatrix::Identity(n, p);
    case InitialLaw::Kind::kHaar:
      return p == n ? ComplexMatrix(haar_unitary(n, rng).matrix())
                    : haar_columns(n, p, rng);
    case InitialLaw::Kind::kPermutation:
      return permutation_to_matrix(uniform_permutation(n, rng)).leftCols(p);
    case InitialLaw::Kind::kFixed: {
      const ComplexMatrix& u = init.fixed_matrix().matrix();
      if (u.rows() != n) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "simulate: fixed initial matrix is " +
                        std::to_string(u.rows()) + "x" +
                        std::to_string(u.rows()) + ", expected n = " +
                        std::to_string(n));
      }
      return u.leftCols(p);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "simulate: unknown initial law");
}

// Evolves `state` (n x p) along the grid; `record(j, state)` sees grid states.
template <typename Record>
void evolve(Index n, const TimeGrid& grid, ComplexMatrix& state, RngStream& rng,
            Record record) {
  record(0, state);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const long steps = grid.inner_steps(j);
    const double dt = (grid.times()[j] - grid.times()[j - 1]) / steps;
    for (long k = 0; k < steps; ++k) {
      apply_exp_i(hermitian_increment(n, dt, rng), state);
    }
    record(j, state);
  }
}

RngStream initial_stream(const RngStream& rng) {
  return RngStream(rng.seed(), rng.stream_id(), rng.substream() + 1);
}

void require_dim(Index n, const char* what) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": n must be positive", "n");
  }
}

}  // namespace

UnitaryPath simulate_path(Index n, const InitialLaw& init, const TimeGrid& grid,
                          RngStream& rng, const Tolerances& tol) {
  require_dim(n, "simulate_path");
  RngStream init_rng = initial_stream(rng);
  ComplexMatrix state = initial_columns(n, n, init, init_rng);
  std::vector<UnitaryMatrix> states;
  states.reserve(grid.size());
  evolve(n, grid, state, rng, [&](std::size_t, const ComplexMatrix& u) {
    states.emplace_back(u, tol.unitarity);
  });
  return UnitaryPath{grid, std::move(states), init};
}

ColumnPath simulate_columns(Index n, Index p, const InitialLaw& init,
                            const TimeGrid& grid, RngStream& rng,
                            const Tolerances& tol) {
  require_dim(n, "simulate_columns");
  if (p < 1 || p > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "simulate_columns: need 1 <= p <= n, got p = " +
                    std::to_string(p));
  }
  RngStream init_rng = initial_stream(rng);
  ComplexMatrix state = initial_columns(n, p, init, init_rng);
  std::vector<ComplexMatrix> cols;
  cols.reserve(grid.size());
  evolve(n, grid, state, rng, [&](std::size_t j, const ComplexMatrix& u) {
    const double defect = unitarity_defect(u);
    if (!(defect <= tol.unitarity)) {
      throw Error(ErrorCode::kNotUnitary,
                  "simulate_columns: orthonormality defect " +
                      std::to_string(defect) + " at grid index " +
                      std::to_string(j));
    }
    cols.push_back(u);
  });
  return ColumnPath{grid, std::move(cols), init, n};
}

// ---------------------------------------------------------------------------

ObservableFamily::ObservableFamily(std::vector<ComplexMatrix> matrices,
                                   double alpha_n)
    : m_(std::move(matrices)), alpha_n_(alpha_n) {
  if (m_.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ObservableFamily: need at least one matrix");
  }
  for (const auto& a : m_) {
    require_square_finite(a, "ObservableFamily");
    require_same_dim(m_.front(), a, "ObservableFamily");
  }
  if (!(alpha_n_ > 0.0) || !std::isfinite(alpha_n_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "ObservableFamily: alpha_n must be positive and finite",
                "alpha_n");
  }
}

Index ObservableFamily::row_support() const {
  Index rows = 0;
  for (const auto& a : m_) {
    for (Index i = a.rows(); i > rows; --i) {
      if (!a.row(i - 1).isZero(0.0)) {
        rows = i;
        break;
      }
    }
  }
  return rows;
}

namespace {

// Tr(A X) for an n x p block X, with A supported on its first p rows.
Complex trace_against_columns(const ComplexMatrix& a, const ComplexMatrix& x) {
  const Index p = x.cols();
  return a.topRows(p).cwiseProduct(x.transpose()).sum();
}

template <typename Block>
LinearStatisticPath statistic_impl(const TimeGrid& grid,
                                   const std::vector<Block>& states,
                                   const ObservableFamily& obs, bool centered) {
  const double scale = 1.0 / std::sqrt(obs.alpha_n());
  const auto k = static_cast<Index>(obs.size());
  std::vector<ComplexVector> values;
  values.reserve(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    const double growth = std::exp(0.5 * grid.times()[j]);
    const ComplexMatrix& u = states[j];
    ComplexVector v(k);
    for (Index l = 0; l < k; ++l) {
      const ComplexMatrix& a = obs.matrices()[static_cast<std::size_t>(l)];
      Complex tr = growth * trace_against_columns(a, u);
      if (centered) tr -= a.trace();
      v(l) = scale * tr;
    }
    values.push_back(std::move(v));
  }
  return {grid, std::move(values)};
}

std::vector<ComplexMatrix> raw_states(const UnitaryPath& path) {
  std::vector<ComplexMatrix> out;
  out.reserve(path.states.size());
  for (const auto& s : path.states) out.push_back(s.matrix());
  return out;
}

template <typename Block>
std::vector<ComplexMatrix> corner_impl(const TimeGrid& grid,
                                       const std::vector<Block>& states,
                                       Index p, double alpha_n) {
  if (!(alpha_n > 0.0) || !std::isfinite(alpha_n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "corner_process: alpha_n must be positive and finite",
                "alpha_n");
  }
  std::vector<ComplexMatrix> out;
  out.reserve(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    const ComplexMatrix& u = states[j];
    const double scale = std::sqrt(static_cast<double>(u.rows()) / alpha_n);
    ComplexMatrix c = std::exp(0.5 * grid.times()[j]) * u.topLeftCorner(p, p);
    c -= ComplexMatrix::Identity(p, p);
    out.push_back(scale * c);
  }
  return out;
}

void require_corner(Index p, Index n, Index available) {
  if (p < 1 || p > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "corner_process: need 1 <= p <= n, got p = " +
                    std::to_string(p), "p");
  }
  if (p > available) {
    throw Error(ErrorCode::kDimensionMismatch,
                "corner_process: path carries only " +
                    std::to_string(available) + " columns, corner needs " +
                    std::to_string(p));
  }
}

}  // namespace

LinearStatisticPath linear_statistic(const UnitaryPath& path,
                                     const ObservableFamily& obs,
                                     bool centered) {
  if (path.states.empty() || obs.dim() != path.states.front().dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "linear_statistic: observable dimension does not match path");
  }
  return statistic_impl(path.grid, raw_states(path), obs, centered);
}

LinearStatisticPath linear_statistic(const ColumnPath& path,
                                     const ObservableFamily& obs,
                                     bool centered) {
  if (path.columns.empty() || obs.dim() != path.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "linear_statistic: observable dimension does not match path");
  }
  const Index p = path.columns.front().cols();
  if (obs.row_support() > p) {
    throw Error(ErrorCode::kDimensionMismatch,
                "linear_statistic: observables reach row " +
                    std::to_string(obs.row_support()) +
                    " but the column path carries " + std::to_string(p));
  }
  return statistic_impl(path.grid, path.columns, obs, centered);
}

std::vector<ComplexMatrix> corner_process(const UnitaryPath& path, Index p,
                                          double alpha_n) {
  const Index n = path.states.empty() ? 0 : path.states.front().dim();
  require_corner(p, n, n);
  return corner_impl(path.grid, raw_states(path), p, alpha_n);
}

std::vector<ComplexMatrix> corner_process(const ColumnPath& path, Index p,
                                          double alpha_n) {
  const Index avail = path.columns.empty() ? 0 : path.columns.front().cols();
  require_corner(p, path.n, avail);
  return corner_impl(path.grid, path.columns, p, alpha_n);
}

}  // namespace ubm
