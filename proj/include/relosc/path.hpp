#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "relosc/types.hpp"

namespace relosc {

/// Uniformly sampled T-periodic path: column k holds the node u_k at time
/// t_k = k*T/N. The closing increment u_0 - u_{N-1} is implicit, so increments
/// always sum to zero. Evaluation between nodes is piecewise linear.
struct PeriodicPath {
  Mat nodes;  // n x N
  double T = 1.0;

  int N() const { return static_cast<int>(nodes.cols()); }
  int dim() const { return static_cast<int>(nodes.rows()); }
  double h() const { return T / N(); }

  /// Wrapped increments d_k = u_{k+1} - u_k, one column per k.
  Mat increments() const;
  double max_speed() const;
  Vec mean() const { return nodes.rowwise().mean(); }
  /// Periodic piecewise-linear interpolation at arbitrary t.
  Vec value_at(double t) const;
};

PeriodicPath constant_path(const Vec& x, int N, double T);

/// Piecewise-linear resample onto M uniform nodes (any M >= 2).
PeriodicPath resample(const PeriodicPath& path, int M);

/// Speed constraint max_k |d_k|/h <= (1 - eps_bd)*L, with a relative
/// roundoff allowance.
bool feasible(const PeriodicPath& path, double L, double eps_bd = 0.0);

struct ProjectionResult {
  PeriodicPath path;
  int iterations = 0;
  bool converged = false;
};

/// Nearest feasible path to `raw_nodes` in the increment metric: Dykstra
/// alternating projection between the zero-mean plane and the product of
/// speed balls of radius (1 - eps_bd)*L*h, then reconstruction anchored so
/// the node mean matches the input. Already-feasible input is returned
/// unchanged in zero iterations.
ProjectionResult project_feasible(const Mat& raw_nodes, double T, double L,
                                  double eps_bd = 1e-6, int max_iter = 10000,
                                  double tol = 1e-12);

/// Deterministic random feasible path: a few low-frequency Fourier modes of
/// the given amplitude added to `base` (default: the zero path), speed-clamped
/// to 0.9*(1 - eps_bd)*L and projected. Same seed, same path.
PeriodicPath random_feasible(int n, int N, double T, double L, double amplitude,
                             std::uint64_t seed,
                             const std::optional<PeriodicPath>& base = std::nullopt,
                             double eps_bd = 1e-6);

/// sup-norm distance sup_t |a(t) - b(t)| between two paths of equal period.
/// Exact for piecewise-linear paths (evaluated on the union of breakpoints).
double path_distance(const PeriodicPath& a, const PeriodicPath& b);

/// CSV with mandatory header t,u_1,...,u_n and one row per node, written with
/// round-trip precision. The reader skips leading '#' metadata lines.
void write_path_csv(std::ostream& os, const PeriodicPath& path);
void write_path_csv_file(const std::string& filename, const PeriodicPath& path);
PeriodicPath read_path_csv(std::istream& is);
PeriodicPath read_path_csv_file(const std::string& filename);

}  // namespace relosc
