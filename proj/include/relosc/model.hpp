#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relosc/types.hpp"

namespace relosc {

/// Kinetic ingredient: a strictly convex potential Phi <= 0 on the closed
/// speed ball of radius L, its gradient phi (a homeomorphism from the open
/// ball onto R^n with phi(0)=0) and the globally defined inverse map.
struct KineticLaw {
  double L = 1.0;
  std::function<double(const Vec&)> Phi;
  std::function<Vec(const Vec&)> phi;
  std::function<Vec(const Vec&)> phi_inv;
};

/// Canonical law Phi(v) = -sqrt(L^2 - |v|^2); all three maps are closed-form.
KineticLaw relativistic_kinetic(double L);

/// Potential F(t,x) with spatial gradient. `time_independent` enables exact
/// time integrals T*F(0,x).
struct Potential {
  std::function<double(double, const Vec&)> F;
  std::function<Vec(double, const Vec&)> gradF;
  bool time_independent = true;
};

/// F(t,x) = mu*|x|^p/p, optionally plus <omega(t), x>.
Potential power_potential(double p, double mu);
Potential power_potential(double p, double mu, std::function<Vec(double)> omega);

/// Convex strictly increasing gamma with gamma(s)/s -> infinity, used as the
/// superlinear floor of the potential. Closed-form inverse optional; the
/// generic inverse falls back to doubling + bisection.
struct GrowthBound {
  std::function<double(double)> gamma;
  std::function<double(double)> gamma_inv_closed;  // empty when unavailable
  std::vector<double> superlinear_schedule;        // samples where gamma(s)/s grows
};

/// gamma(s) = coef * s^p with p > 1, coef > 0. Inverse is closed-form.
GrowthBound power_growth(double p, double coef);

double gamma_inverse(const GrowthBound& growth, double y);

/// Perturbation term G with gradient. `delta_bound` is the author-declared
/// constant in -delta*(|x|+1) <= G(x); it is sample-checked, never derived.
struct Perturbation {
  std::function<double(const Vec&)> G;
  std::function<Vec(const Vec&)> gradG;
  double delta_bound = 0.0;
  enum class MinAttained { yes, no, unknown };
  MinAttained min_attained = MinAttained::unknown;
};

/// Nonnegative integrable weight on [0,T] with its cached integral.
struct Weight {
  std::function<double(double)> psi;
  double integral = 0.0;
};

Weight constant_weight(double value, double T);
/// Piecewise-constant weight from equally spaced samples on [0,T].
Weight table_weight(std::vector<double> values, double T);

/// One oscillator system: kinetic law, potential, growth floor, perturbation,
/// weight, dimension and period, plus optional extras used by the drivers.
struct ProblemInstance {
  KineticLaw kinetic;
  Potential potential;
  GrowthBound growth;
  Perturbation perturbation;
  Weight weight;
  int n = 1;
  double T = 1.0;
  std::optional<double> plateau_radius;             // rho for the plateau check
  std::optional<std::pair<Vec, Vec>> witness_pair;  // candidate two-point ball minimum of G
  std::string name;
};

/// integral over [0,T] of F(t,x) at fixed x (exact for time-independent F).
double integral_F(const ProblemInstance& inst, const Vec& x);
/// time-averaged spatial gradient of F at fixed x.
Vec avg_gradF(const ProblemInstance& inst, const Vec& x);

/// Built-in instances. Accepted names:
///   example-3.1, example-3.2, example-3.3, two-minima-symmetric,
///   two-minima-asymmetric, theorem-3.2
/// All are radially defined and instantiate at any dimension n >= 1.
ProblemInstance preset(const std::string& name, int n = 1);
std::vector<std::string> preset_names();

/// Sampled checks of the component-type contracts (phi round trip, strict
/// convexity, gradient consistency, declared delta bound, ...). Returns a
/// list of human-readable failures; empty means all checks passed.
std::vector<std::string> validate_instance(const ProblemInstance& inst,
                                           std::uint64_t seed = 0);

}  // namespace relosc
