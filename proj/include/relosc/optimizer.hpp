#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "relosc/functional.hpp"
#include "relosc/model.hpp"
#include "relosc/path.hpp"

namespace relosc {

/// One iteration record for streamed JSON-lines logs.
struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct MinimizeOptions {
  int N = 64;
  int max_iter = 5000;
  double grad_tol = 1e-8;  // scaled by (1 + |energy|) internally
  double eps_bd = 1e-6;
  double backtrack = 0.5;
  double armijo = 1e-4;
  std::uint64_t seed = 0;
  int starts = 20;
  double value_tol = 1e-8;       // scaled by (1 + |best|) when clustering
  double dist_tol_factor = 1e-3; // times LT
  int threads = 1;
  std::function<void(const IterationRecord&)> on_iteration;  // optional log sink
};

struct Minimum {
  enum class StopReason { converged, max_iter, line_search_stall };
  PeriodicPath path;
  EnergyBreakdown energy;
  double lambda = 0.0;
  double projected_grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  StopReason stop = StopReason::max_iter;
  int start_index = 0;
};

/// Projected gradient descent over the discrete constraint set: gradient step,
/// Dykstra projection back to feasibility, Armijo backtracking on the
/// projected point, growing trial step after accepted moves. Energy is
/// non-increasing; stops when the projected move is gradient-small.
Minimum minimize(const ProblemInstance& inst, double lambda, const PeriodicPath& start,
                 const MinimizeOptions& opts);

/// Deterministic start portfolio: constants at the declared witness points,
/// quasi-random constants (with antithetic partners) in the coercivity ball of
/// the best constant level, and random feasible oscillations. Results sorted
/// by (energy, start index). `opts.threads > 1` parallelizes the runs with a
/// deterministic merge.
std::vector<Minimum> multistart(const ProblemInstance& inst, double lambda,
                                const MinimizeOptions& opts);

struct Cluster {
  Minimum representative;   // best member
  int size = 0;
  bool global = false;      // best value <= overall best + value tolerance
};

/// Single-linkage clustering of minima under path_distance with threshold
/// dist_tol, then a midpoint-barrier merge: two clusters whose midpoint path
/// stays at the global level belong to one flat valley and are merged.
/// Value-level flagging uses value_tol against the overall best.
std::vector<Cluster> cluster_minima(const ProblemInstance& inst, double lambda,
                                    const std::vector<Minimum>& results,
                                    double value_tol, double dist_tol);

}  // namespace relosc
