#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ubm/linalg.hpp"
#include "ubm/rng.hpp"

namespace ubm {

class InitialLaw {
 public:
  enum class Kind { kIdentity, kHaar, kPermutation, kFixed };

  static InitialLaw identity() { return InitialLaw(Kind::kIdentity); }
  static InitialLaw haar() { return InitialLaw(Kind::kHaar); }
  static InitialLaw permutation() { return InitialLaw(Kind::kPermutation); }
  static InitialLaw fixed(UnitaryMatrix u);

  Kind kind() const noexcept { return kind_; }
  const UnitaryMatrix& fixed_matrix() const;
  std::string name() const;

 private:
  explicit InitialLaw(Kind k) : kind_(k) {}
  Kind kind_;
  std::optional<UnitaryMatrix> fixed_;
};

// Grid of simulation times s_0 = 0 < s_1 < ... together with the outer times
// t_j they were derived from (equal to s_j unless the grid is rescaled).
class TimeGrid {
 public:
  TimeGrid(std::vector<double> times, double step_cap);
  TimeGrid(std::vector<double> times, std::vector<double> outer_times,
           double step_cap);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& outer_times() const noexcept { return outer_; }
  double step_cap() const noexcept { return step_cap_; }
  std::size_t size() const noexcept { return times_.size(); }

  // Number of equal inner steps used on [s_{j-1}, s_j].
  long inner_steps(std::size_t j) const;

 private:
  std::vector<double> times_;
  std::vector<double> outer_;
  double step_cap_;
};

// s_j = log(alpha_n t_j + 1).
TimeGrid rescaled_grid(double alpha_n, const std::vector<double>& outer_times,
                       double step_cap = 0.01);

struct UnitaryPath {
  TimeGrid grid;
  std::vector<UnitaryMatrix> states;
  InitialLaw initial;
};

// The leading n x p column block of every grid state. Exactly the first p
// columns of the UnitaryPath the same stream would produce: the increments are
// the same draws, only the multiplication is restricted.
struct ColumnPath {
  TimeGrid grid;
  std::vector<ComplexMatrix> columns;
  InitialLaw initial;
  Index n = 0;
};

// U <- exp(i dH) U over ceil(ds / step_cap) equal inner steps per grid
// interval; the Ito drift comes out of E[exp(i dH)] = (1 - dt/2) I + O(dt^2).
// Increments use `rng`; the initial law is drawn from the sibling substream
// rng.substream() + 1 so that it does not shift the increment sequence.
// Grid states are checked against `tol.unitarity`.
UnitaryPath simulate_path(Index n, const InitialLaw& init, const TimeGrid& grid,
                          RngStream& rng,
                          const Tolerances& tol = kDefaultTolerances);
ColumnPath simulate_columns(Index n, Index p, const InitialLaw& init,
                            const TimeGrid& grid, RngStream& rng,
                            const Tolerances& tol = kDefaultTolerances);

class ObservableFamily {
 public:
  ObservableFamily(std::vector<ComplexMatrix> matrices, double alpha_n);

  const std::vector<ComplexMatrix>& matrices() const noexcept { return m_; }
  double alpha_n() const noexcept { return alpha_n_; }
  Index dim() const { return m_.front().rows(); }
  std::size_t size() const noexcept { return m_.size(); }
  // 1 + the largest row index holding a nonzero entry in any matrix; a column
  // path of that width is enough to evaluate every statistic.
  Index row_support() const;

 private:
  std::vector<ComplexMatrix> m_;
  double alpha_n_;
};

struct LinearStatisticPath {
  TimeGrid grid;
  std::vector<ComplexVector> values;  // values[j](l)
};

// values[j](l) = alpha_n^{-1/2} Tr[A_l (V_{s_j} - centered I)],
// V_s = e^{s/2} U_s.
LinearStatisticPath linear_statistic(const UnitaryPath& path,
                                     const ObservableFamily& obs,
                                     bool centered);
LinearStatisticPath linear_statistic(const ColumnPath& path,
                                     const ObservableFamily& obs,
                                     bool centered);

// Upper-left p x p corner of sqrt(n / alpha_n) (V_{s_j} - I) at every grid time.
std::vector<ComplexMatrix> corner_process(const UnitaryPath& path, Index p,
                                          double alpha_n);
std::vector<ComplexMatrix> corner_process(const ColumnPath& path, Index p,
                                          double alpha_n);

}  // namespace ubm
