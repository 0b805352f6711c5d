#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "relosc/model.hpp"
#include "relosc/optimizer.hpp"
#include "relosc/path.hpp"

namespace relosc {

/// Nodewise defect of the discrete stationarity equation
///   [phi(d_k/h) - phi(d_{k-1}/h)]/h = gradF(t_k,u_k) + lambda*psi(t_k)*gradG(u_k).
/// The periodic representation satisfies the boundary conditions identically;
/// the two gaps are reported as zero for the record.
struct ResidualReport {
  Mat residuals;  // n x N
  double max_norm = 0.0;
  double boundary_value_gap = 0.0;
  double boundary_slope_gap = 0.0;
};

ResidualReport el_residual(const ProblemInstance& inst, double lambda,
                           const PeriodicPath& path);

/// One RK4 sweep of the first-order system u' = phi_inv(w), w' = gradF + lambda*psi*gradG
/// over [0,T] with fixed step T/steps; returns (u(T), w(T)).
std::pair<Vec, Vec> shoot(const ProblemInstance& inst, double lambda, const Vec& u0,
                          const Vec& w0, int steps);

/// Same sweep, returning the node samples of u as a periodic path.
PeriodicPath shoot_path(const ProblemInstance& inst, double lambda, const Vec& u0,
                        const Vec& w0, int steps);

/// First integral of the autonomous flow:
///   E(u,w) = <w, phi_inv(w)> - Phi(phi_inv(w)) - F(u) - lambda*psibar*G(u),
/// constant along solutions when F is time-independent and psi constant.
double autonomous_energy(const ProblemInstance& inst, double lambda, const Vec& u,
                         const Vec& w);

struct ShootingSolution {
  Vec u0, w0;
  double defect = 0.0;  // period-map residual after Newton
  int newton_iterations = 0;
  PeriodicPath path;
};

struct ShootingOptions {
  int steps = 1024;
  int max_newton = 50;
  double tol = 1e-10;       // scaled by (1 + |state|)
  double dedup_tol = 1e-6;  // root identification distance
};

/// Damped Newton (finite-difference Jacobian, halving line search) on the
/// period-map defect from each start; converged roots are deduplicated.
std::vector<ShootingSolution> solve_by_shooting(
    const ProblemInstance& inst, double lambda,
    const std::vector<std::pair<Vec, Vec>>& starts, const ShootingOptions& opts);

/// Tensor grid of (u0, w0) starts: per_axis points per coordinate in
/// [-radius_u, radius_u]^n x [-radius_w, radius_w]^n.
std::vector<std::pair<Vec, Vec>> shooting_grid(int n, double radius_u, double radius_w,
                                               int per_axis);

/// Grid-refinement certificate: re-minimizes at N, 2N, ..., checks the
/// cross-grid distances do not grow and the finest residual is small.
struct Certificate {
  bool passed = false;
  std::vector<int> grid_sizes;
  std::vector<double> cross_distances;
  double final_residual = 0.0;
  double residual_scale = 1.0;
  std::string detail;
  Minimum finest;
};

Certificate certify(const Minimum& m, const ProblemInstance& inst, double lambda,
                    int refine_levels = 2);

nlohmann::json certificate_json(const Certificate& cert);

}  // namespace relosc
