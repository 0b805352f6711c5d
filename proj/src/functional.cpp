#include "relosc/functional.hpp"

#include <cmath>
#include <stdexcept>

namespace relosc {

EnergyBreakdown eval_energy(const ProblemInstance& inst, const PeriodicPath& path) {
  if (path.dim() != inst.n)
    throw std::invalid_argument("eval_energy: path dimension does not match instance");
  const int N = path.N();
  const double h = path.h();
  const Mat d = path.increments();
  EnergyBreakdown e;
  for (int k = 0; k < N; ++k) {
    const Vec v = d.col(k) / h;
    if (v.norm() >= inst.kinetic.L)
      throw std::domain_error("eval_energy: infeasible path (segment speed >= L)");
    e.kinetic += h * inst.kinetic.Phi(v);
    const double t = k * h;
    e.potential += h * inst.potential.F(t, path.nodes.col(k));
    e.perturbation += h * inst.weight.psi(t) * inst.perturbation.G(path.nodes.col(k));
  }
  return e;
}

Mat path_gradient(const ProblemInstance& inst, const PeriodicPath& path, double lambda) {
  if (path.dim() != inst.n)
    throw std::invalid_argument("path_gradient: path dimension does not match instance");
  const int N = path.N();
  const double h = path.h();
  const Mat d = path.increments();
  Mat momenta(inst.n, N);  // phi(d_k/h)
  for (int k = 0; k < N; ++k) {
    const Vec v = d.col(k) / h;
    if (v.norm() >= inst.kinetic.L)
      throw std::domain_error("path_gradient: infeasible path (segment speed >= L)");
    momenta.col(k) = inst.kinetic.phi(v);
  }
  Mat g(inst.n, N);
  for (int k = 0; k < N; ++k) {
    const double t = k * h;
    const Vec force = inst.potential.gradF(t, path.nodes.col(k)) +
                      lambda * inst.weight.psi(t) * inst.perturbation.gradG(path.nodes.col(k));
    g.col(k) = momenta.col((k + N - 1) % N) - momenta.col(k) + h * force;
  }
  return g;
}

double coercivity_lower_bound(const ProblemInstance& inst, double lambda, double S) {
  if (!(lambda > 0.0)) throw std::invalid_argument("coercivity_lower_bound: lambda must be positive");
  if (!(S >= 0.0)) throw std::invalid_argument("coercivity_lower_bound: S must be >= 0");
  const double psi_mass = inst.weight.integral;
  const double delta = inst.perturbation.delta_bound;
  const double Phi0 = inst.kinetic.Phi(Vec::Zero(inst.n));
  const double arg = std::max(0.0, S - inst.kinetic.L * inst.T);
  return -delta * psi_mass * S + lambda * inst.T * inst.growth.gamma(arg) -
         delta * psi_mass + lambda * Phi0 * inst.T;
}

double sublevel_radius(const ProblemInstance& inst, double r) {
  const double Phi0 = inst.kinetic.Phi(Vec::Zero(inst.n));
  const double floor = Phi0 * inst.T + inst.T * inst.growth.gamma(0.0);
  if (r < floor - 1e-12 * std::max(1.0, std::abs(floor)))
    throw std::invalid_argument("sublevel_radius: level below the empty-sublevel floor");
  const double y = std::max(inst.growth.gamma(0.0), (r - Phi0 * inst.T) / inst.T);
  return inst.kinetic.L * inst.T + gamma_inverse(inst.growth, y);
}

double coercive_radius(const ProblemInstance& inst, double lambda, double value) {
  if (!(lambda > 0.0)) throw std::invalid_argument("coercive_radius: lambda must be positive");
  auto bound = [&](double S) {
    return lambda * coercivity_lower_bound(inst, 1.0 / lambda, S);
  };
  const double cap = 1e9;
  // the bound is convex in S; locate its minimum first
  double a = 0.0, b = cap;
  for (int it = 0; it < 300; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (bound(m1) < bound(m2))
      b = m2;
    else
      a = m1;
  }
  const double s_min = 0.5 * (a + b);
  if (bound(s_min) > value) return 0.0;  // no feasible path reaches this level
  double lo = s_min;
  double hi = s_min + 1.0;
  while (bound(hi) <= value) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) return cap;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (bound(mid) <= value ? lo : hi) = mid;
  }
  return hi;
}

nlohmann::json energy_to_json(const EnergyBreakdown& e, double lambda) {
  return nlohmann::json{{"kinetic", e.kinetic},
                        {"potential", e.potential},
                        {"perturbation", e.perturbation},
                        {"psi", e.psi_value()},
                        {"j", e.j_value()},
                        {"lambda", lambda},
                        {"total", e.total(lambda)}};
}

}  // namespace relosc
