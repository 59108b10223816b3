#pragma once

#include <optional>
#include <vector>

#include "limitdyn/sdpmodel.hpp"

namespace ld {

struct SigmaSchedule {
  enum class Mode { fixed, balance, sweep };
  Mode mode = Mode::fixed;
  double sigma0 = 1.0;
  // balance heuristic
  double mu = 10.0;
  double gamma = 1.5;
  long cadence = 100;
  long freeze = 20000;
  // log-linear sweep from sigma0 to sweep_end over sweep_iters iterations
  double sweep_end = 10.0;
  long sweep_iters = 1000;

  // sigma to use for step k (k = 0 is the first step), given the current
  // sigma and the residuals observed after step k - 1.
  double next(long k, double current, const KktResiduals* last) const;
};

struct TrajectoryRow {
  long iter = 0;
  KktResiduals res;
  double dz = 0, dx = 0, ds = 0;
  std::optional<double> angle;  // empty when a difference norm underflows
  double sigma = 0;
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  Iterate last;
  bool converged = false;
};

enum class Solver { three_step, one_step };

struct RunOptions {
  long max_iters = 1000;
  double tol_rmax = 1e-14;
  Solver solver = Solver::three_step;
};

Iterate three_step_admm_step(const SdpProblem& p, const Iterate& it);
SymMatrix one_step_drs_step(const SdpProblem& p, const SymMatrix& z, double sigma);

// (X, S) = (Pi_+(Z), Pi_+(-Z)/sigma), y by least squares.
Iterate iterate_from_z(const SdpProblem& p, const SymMatrix& z, double sigma);
inline SymMatrix z_of(const Iterate& it) { return it.x - it.sigma * it.s; }

// Rows record, for k = 1..K, the iterate after k steps, the norms of the
// k-th differences and the angle between the (k-1)-th and k-th differences.
TrajectoryRecord run(const SdpProblem& p, const SigmaSchedule& schedule, const Iterate& start,
                     const RunOptions& opt);

// Longest stretch of rows (at least min_len) where ||dZ|| changes by at most
// rel_change per iteration.
struct StallWindow {
  bool found = false;
  size_t begin = 0, end = 0;  // row indices, end exclusive
  double median_dz = 0;
  double median_angle = 0;  // NaN when no angle is recorded in the window
};
StallWindow find_stall_window(const TrajectoryRecord& rec, double rel_change = 1e-3,
                              size_t min_len = 10);

// First row whose angle exceeds factor times the median of the previous
// `window` recorded angles.
std::optional<size_t> first_spike(const TrajectoryRecord& rec, size_t window = 50,
                                  double factor = 10.0);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ld
