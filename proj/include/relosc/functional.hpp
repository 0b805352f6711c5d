#pragma once

#include "json.hpp"
#include "relosc/model.hpp"
#include "relosc/path.hpp"
#include "relosc/types.hpp"

namespace relosc {

/// Action pieces of a discrete path. The unperturbed action is
/// psi_value() = kinetic + potential; the perturbation couples through
/// total(lambda) = psi_value() + lambda * j_value().
struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double perturbation = 0.0;

  double psi_value() const { return kinetic + potential; }
  double j_value() const { return perturbation; }
  double total(double lambda) const { return psi_value() + lambda * j_value(); }
};

/// Periodic rectangle rule on the node grid; the kinetic term uses the exact
/// per-segment speed d_k/h, so it is exact for the piecewise-linear path.
/// Throws std::domain_error when a segment moves at speed >= L.
EnergyBreakdown eval_energy(const ProblemInstance& inst, const PeriodicPath& path);

/// Analytic gradient of total(lambda) with respect to the nodes, one column
/// per node: g_k = phi(d_{k-1}/h) - phi(d_k/h) + h*(gradF + lambda*psi*gradG).
Mat path_gradient(const ProblemInstance& inst, const PeriodicPath& path, double lambda);

/// Lower bound on J + lambda*Psi over feasible paths whose sup node norm is S:
///   -delta*(int psi)*S + lambda*T*gamma(max(0, S - LT)) - delta*int psi
///   + lambda*Phi(0)*T.
double coercivity_lower_bound(const ProblemInstance& inst, double lambda, double S);

/// Radius LT + gamma_inv((r - Phi(0)T)/T) confining every feasible path with
/// Psi <= r. Throws std::invalid_argument below the floor r >= Phi(0)T + T*gamma(0).
double sublevel_radius(const ProblemInstance& inst, double r);

/// Upper crossing of S -> lambda*coercivity_lower_bound(inst, 1/lambda, S)
/// against `value`: every feasible path with total(lambda) <= value has sup
/// node norm below the returned radius. The bound is convex in S, so the
/// crossing is found by doubling plus bisection (capped at 1e9).
double coercive_radius(const ProblemInstance& inst, double lambda, double value);

/// Flat record with keys kinetic, potential, perturbation, psi, j, lambda, total.
nlohmann::json energy_to_json(const EnergyBreakdown& e, double lambda);

}  // namespace relosc
