#include "relosc/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relosc/radial.hpp"
#include "relosc/sampling.hpp"

namespace relosc {

KineticLaw relativistic_kinetic(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("relativistic_kinetic: L must be positive");
  KineticLaw law;
  law.L = L;
  law.Phi = [L](const Vec& v) {
    const double s = v.squaredNorm();
    const double rad = L * L - s;
    if (rad < 0.0) throw std::domain_error("kinetic law evaluated at speed above L");
    return -std::sqrt(rad);
  };
  law.phi = [L](const Vec& v) -> Vec {
    const double s = v.squaredNorm();
    const double rad = L * L - s;
    if (rad <= 0.0) throw std::domain_error("kinetic gradient evaluated at speed >= L");
    return v / std::sqrt(rad);
  };
  law.phi_inv = [L](const Vec& w) -> Vec {
    return (L / std::sqrt(1.0 + w.squaredNorm())) * w;
  };
  return law;
}

Potential power_potential(double p, double mu) {
  if (!(p > 1.0)) throw std::invalid_argument("power_potential: need p > 1");
  if (!(mu >= 0.0)) throw std::invalid_argument("power_potential: need mu >= 0");
  Potential pot;
  pot.time_independent = true;
  if (p == 2.0) {
    pot.F = [mu](double, const Vec& x) { return 0.5 * mu * x.squaredNorm(); };
    pot.gradF = [mu](double, const Vec& x) -> Vec { return mu * x; };
  } else {
    pot.F = [p, mu](double, const Vec& x) { return mu * std::pow(x.norm(), p) / p; };
    pot.gradF = [p, mu](double, const Vec& x) -> Vec {
      const double r = x.norm();
      if (r == 0.0) return Vec::Zero(x.size());
      return mu * std::pow(r, p - 2.0) * x;
    };
  }
  return pot;
}

Potential power_potential(double p, double mu, std::function<Vec(double)> omega) {
  Potential pot = power_potential(p, mu);
  if (!omega) return pot;
  auto baseF = pot.F;
  auto baseG = pot.gradF;
  pot.time_independent = false;
  pot.F = [baseF, omega](double t, const Vec& x) {
    return baseF(t, x) + omega(t).dot(x);
  };
  pot.gradF = [baseG, omega](double t, const Vec& x) -> Vec {
    return baseG(t, x) + omega(t);
  };
  return pot;
}

GrowthBound power_growth(double p, double coef) {
  if (!(p > 1.0)) throw std::invalid_argument("power_growth: need p > 1 for superlinearity");
  if (!(coef > 0.0)) throw std::invalid_argument("power_growth: need coef > 0");
  GrowthBound g;
  if (p == 2.0) {
    g.gamma = [coef](double s) { return coef * s * s; };
    g.gamma_inv_closed = [coef](double y) { return std::sqrt(y / coef); };
  } else {
    g.gamma = [p, coef](double s) { return coef * std::pow(s, p); };
    g.gamma_inv_closed = [p, coef](double y) { return std::pow(y / coef, 1.0 / p); };
  }
  g.superlinear_schedule = [] {
    std::vector<double> s;
    for (double v = 1.0; v <= 40000.0; v *= 2.0) s.push_back(v);
    return s;
  }();
  return g;
}

double gamma_inverse(const GrowthBound& growth, double y) {
  const double at0 = growth.gamma(0.0);
  if (y < at0 - 1e-14 * std::max(1.0, std::abs(at0)))
    throw std::invalid_argument("gamma_inverse: y below gamma(0)");
  if (y <= at0) return 0.0;
  if (growth.gamma_inv_closed) return growth.gamma_inv_closed(y);
  double hi = 1.0;
  while (growth.gamma(hi) < y) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("gamma_inverse: bracket search diverged");
  }
  double lo = 0.0;
  const double tol = 1e-10 * std::max(1.0, std::abs(y));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = growth.gamma(mid);
    if (std::abs(val - y) <= tol) return mid;
    (val < y ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

Weight constant_weight(double value, double T) {
  if (!(value >= 0.0)) throw std::invalid_argument("constant_weight: value must be >= 0");
  Weight w;
  w.psi = [value](double) { return value; };
  w.integral = value * T;
  return w;
}

Weight table_weight(std::vector<double> values, double T) {
  if (values.empty()) throw std::invalid_argument("table_weight: empty table");
  for (double v : values)
    if (!(v >= 0.0)) throw std::invalid_argument("table_weight: negative entry");
  Weight w;
  const auto n = values.size();
  const double h = T / static_cast<double>(n);
  double sum = 0.0;
  for (double v : values) sum += v;
  w.integral = sum * h;
  // piecewise-constant on [kh, (k+1)h), periodic
  w.psi = [values = std::move(values), T, h, n](double t) {
    double tt = std::fmod(t, T);
    if (tt < 0.0) tt += T;
    auto k = static_cast<std::size_t>(tt / h);
    if (k >= n) k = n - 1;
    return values[k];
  };
  return w;
}

double integral_F(const ProblemInstance& inst, const Vec& x) {
  if (inst.potential.time_independent) return inst.T * inst.potential.F(0.0, x);
  const int K = 256;
  const double h = inst.T / K;
  double acc = 0.0;
  for (int k = 0; k < K; ++k) acc += inst.potential.F(k * h, x);
  return acc * h;
}

Vec avg_gradF(const ProblemInstance& inst, const Vec& x) {
  if (inst.potential.time_independent) return inst.potential.gradF(0.0, x);
  const int K = 256;
  const double h = inst.T / K;
  Vec acc = Vec::Zero(x.size());
  for (int k = 0; k < K; ++k) acc += inst.potential.gradF(k * h, x);
  return acc * (h / inst.T);
}

namespace {

Vec unit1(int n) {
  Vec e = Vec::Zero(n);
  e(0) = 1.0;
  return e;
}

// (|x|^2 - 1/4)^2 / (1 + |x|^4): double well on the sphere |x| = 1/2,
// bounded by 1 at infinity.
double well_value(const Vec& x) {
  const double s = x.squaredNorm();
  const double num = (s - 0.25) * (s - 0.25);
  const double den = 1.0 + s * s;
  return num / den;
}

Vec well_grad(const Vec& x) {
  const double s = x.squaredNorm();
  const double a = s - 0.25;
  const double den = 1.0 + s * s;
  const double dds = (2.0 * a * den - a * a * 2.0 * s) / (den * den);
  return (2.0 * dds) * x;
}

Vec radial_grad(const Vec& x, double slope) {
  const double r = x.norm();
  if (r == 0.0) return Vec::Zero(x.size());
  return (slope / r) * x;
}

Perturbation two_minima_perturbation(int n, const Vec& shift) {
  Perturbation pert;
  pert.G = [shift](const Vec& x) {
    const Vec y = x - shift;
    return well_value(y) - bounded_tail(y.norm(), 2.0);
  };
  pert.gradG = [shift](const Vec& x) -> Vec {
    const Vec y = x - shift;
    return well_grad(y) - radial_grad(y, bounded_tail_deriv(y.norm(), 2.0));
  };
  pert.delta_bound = 1.1;
  pert.min_attained = Perturbation::MinAttained::no;
  (void)n;
  return pert;
}

ProblemInstance base_unit_instance(int n) {
  ProblemInstance inst;
  inst.n = n;
  inst.T = 1.0;
  inst.kinetic = relativistic_kinetic(1.0);
  inst.potential = power_potential(2.0, 1.0);
  inst.growth = power_growth(2.0, 0.5);
  inst.weight = constant_weight(1.0, inst.T);
  return inst;
}

}  // namespace

ProblemInstance preset(const std::string& name, int n) {
  if (n < 1) throw std::invalid_argument("preset: dimension must be >= 1");
  if (name == "example-3.1") {
    ProblemInstance inst = base_unit_instance(n);
    inst.name = name;
    const Vec z = unit1(n);
    inst.perturbation.G = [z](const Vec& x) { return z.dot(x); };
    inst.perturbation.gradG = [z](const Vec& x) -> Vec {
      (void)x;
      return z;
    };
    inst.perturbation.delta_bound = 1.1;
    inst.perturbation.min_attained = Perturbation::MinAttained::no;
    inst.witness_pair = {0.5 * unit1(n), -0.5 * unit1(n)};
    return inst;
  }
  if (name == "example-3.2") {
    ProblemInstance inst = base_unit_instance(n);
    inst.name = name;
    inst.perturbation.G = [](const Vec& x) {
      (void)x;
      return 0.0;
    };
    inst.perturbation.gradG = [](const Vec& x) -> Vec { return Vec::Zero(x.size()); };
    inst.perturbation.delta_bound = 0.0;
    inst.perturbation.min_attained = Perturbation::MinAttained::yes;
    inst.witness_pair = {0.5 * unit1(n), -0.5 * unit1(n)};
    return inst;
  }
  if (name == "example-3.3") {
    ProblemInstance inst = base_unit_instance(n);
    inst.name = name;
    inst.potential = power_potential(2.0, 2.0);
    inst.growth = power_growth(2.0, 1.0);
    const double theta = inst.kinetic.L * inst.T + 1.0;
    inst.perturbation.G = [theta](const Vec& x) { return -cubic_tail(x.norm(), theta); };
    inst.perturbation.gradG = [theta](const Vec& x) -> Vec {
      return -radial_grad(x, cubic_tail_deriv(x.norm(), theta));
    };
    inst.perturbation.delta_bound = 150.0;
    inst.perturbation.min_attained = Perturbation::MinAttained::no;
    inst.witness_pair = {0.5 * unit1(n), -0.5 * unit1(n)};
    return inst;
  }
  if (name == "two-minima-symmetric") {
    ProblemInstance inst = base_unit_instance(n);
    inst.name = name;
    inst.perturbation = two_minima_perturbation(n, Vec::Zero(n));
    inst.witness_pair = {0.5 * unit1(n), -0.5 * unit1(n)};
    return inst;
  }
  if (name == "two-minima-asymmetric") {
    ProblemInstance inst = base_unit_instance(n);
    inst.name = name;
    inst.perturbation = two_minima_perturbation(n, 0.1 * unit1(n));
    inst.witness_pair = {0.6 * unit1(n), -0.4 * unit1(n)};
    return inst;
  }
  if (name == "theorem-3.2") {
    ProblemInstance inst;
    inst.n = n;
    inst.T = 1.0;
    inst.name = name;
    inst.kinetic = relativistic_kinetic(0.5);
    inst.potential = power_potential(2.0, 1.0);
    inst.growth = power_growth(2.0, 0.5);
    inst.weight = constant_weight(1.0, inst.T);
    const double rho = 0.8;
    inst.plateau_radius = rho;
    inst.perturbation.G = [rho](const Vec& x) { return -bounded_tail(x.norm(), rho); };
    inst.perturbation.gradG = [rho](const Vec& x) -> Vec {
      return -radial_grad(x, bounded_tail_deriv(x.norm(), rho));
    };
    inst.perturbation.delta_bound = 1.1;
    inst.perturbation.min_attained = Perturbation::MinAttained::no;
    inst.witness_pair = {0.3 * unit1(n), -0.3 * unit1(n)};
    return inst;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"example-3.1",         "example-3.2",          "example-3.3",
          "two-minima-symmetric", "two-minima-asymmetric", "theorem-3.2"};
}

namespace {

Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& x) {
  const double step = 1e-6 * (1.0 + x.norm());
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    g(i) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

void check_gradient(const std::function<double(const Vec&)>& f,
                    const std::function<Vec(const Vec&)>& grad, const Vec& x,
                    const std::string& label, std::vector<std::string>& issues) {
  const Vec g = grad(x);
  const Vec gn = fd_grad(f, x);
  const double err = (g - gn).norm();
  if (err > 1e-5 * (1.0 + gn.norm())) {
    std::ostringstream os;
    os << label << ": gradient disagrees with finite differences (err " << err << ")";
    issues.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> validate_instance(const ProblemInstance& inst, std::uint64_t seed) {
  std::vector<std::string> issues;
  const int n = inst.n;
  const double L = inst.kinetic.L;
  const double T = inst.T;
  if (n < 1) issues.push_back("dimension must be >= 1");
  if (!(T > 0.0)) issues.push_back("period must be positive");
  if (!(L > 0.0)) issues.push_back("kinetic bound L must be positive");
  if (!issues.empty()) return issues;

  Rng rng(derive_seed(seed, 0xa11dULL));

  // kinetic law: phi(0) = 0 exactly, Phi nonpositive with minimum at 0
  if (inst.kinetic.phi(Vec::Zero(n)).norm() != 0.0)
    issues.push_back("kinetic: phi(0) is not exactly zero");
  const double Phi0 = inst.kinetic.Phi(Vec::Zero(n));
  for (int k = 0; k < 200; ++k) {
    const Vec v = rng.ball_point(n, 0.999 * L);
    const double val = inst.kinetic.Phi(v);
    if (val > 0.0) issues.push_back("kinetic: Phi takes a positive value");
    if (val < Phi0 - 1e-14) issues.push_back("kinetic: Phi(0) is not the minimum");
    const Vec back = inst.kinetic.phi_inv(inst.kinetic.phi(v));
    if ((back - v).norm() > 1e-12 * L)
      issues.push_back("kinetic: phi_inv does not invert phi");
    if (!issues.empty()) break;
  }
  // strict midpoint convexity with margin scaled to 1/L
  for (int k = 0; k < 200 && issues.empty(); ++k) {
    const Vec v = rng.ball_point(n, 0.99 * L);
    const Vec w = rng.ball_point(n, 0.99 * L);
    const double lhs = inst.kinetic.Phi(0.5 * (v + w));
    const double rhs = 0.5 * (inst.kinetic.Phi(v) + inst.kinetic.Phi(w));
    if (lhs > rhs - 0.05 / L * (v - w).squaredNorm() + 1e-14)
      issues.push_back("kinetic: Phi fails strict midpoint convexity");
  }
  // |phi| should blow up along rays approaching the speed limit
  for (int k = 0; k < 20 && issues.empty(); ++k) {
    const Vec dir = rng.sphere_point(n, 1.0);
    double prev = -1.0;
    for (double frac : {0.1, 0.5, 0.9, 0.99, 0.9999}) {
      const double cur = inst.kinetic.phi(frac * L * dir).norm();
      if (cur <= prev) {
        issues.push_back("kinetic: |phi| not increasing toward the speed limit");
        break;
      }
      prev = cur;
    }
  }

  // growth bound: gamma(0) finite, strictly increasing, midpoint convex, inverse
  const double g0 = inst.growth.gamma(0.0);
  if (!std::isfinite(g0)) issues.push_back("growth: gamma(0) not finite");
  for (int k = 0; k < 100 && issues.empty(); ++k) {
    const double a = rng.uniform(0.0, 50.0);
    const double b = a + rng.uniform(1e-6, 50.0);
    if (inst.growth.gamma(b) <= inst.growth.gamma(a))
      issues.push_back("growth: gamma not strictly increasing");
    const double mid = inst.growth.gamma(0.5 * (a + b));
    if (mid > 0.5 * (inst.growth.gamma(a) + inst.growth.gamma(b)) + 1e-12)
      issues.push_back("growth: gamma fails midpoint convexity");
    const double y = inst.growth.gamma(b);
    const double s = gamma_inverse(inst.growth, y);
    if (std::abs(inst.growth.gamma(s) - y) > 1e-8 * std::max(1.0, std::abs(y)))
      issues.push_back("growth: gamma_inverse round trip failed");
  }

  // weight: nonnegative, positive mass, integral consistent with sampling
  double psi_acc = 0.0;
  const int wk = 512;
  for (int k = 0; k < wk; ++k) {
    const double t = (k + 0.5) * T / wk;
    const double val = inst.weight.psi(t);
    if (val < 0.0) {
      issues.push_back("weight: psi takes a negative value");
      break;
    }
    psi_acc += val;
  }
  psi_acc *= T / wk;
  if (!(inst.weight.integral > 0.0)) issues.push_back("weight: integral must be positive");
  if (std::abs(psi_acc - inst.weight.integral) > 1e-6 * std::max(1.0, inst.weight.integral))
    issues.push_back("weight: stored integral disagrees with quadrature");

  // gradients of F and G against finite differences
  for (int k = 0; k < 20 && issues.empty(); ++k) {
    const double t = rng.uniform(0.0, T);
    const Vec x = rng.ball_point(n, 5.0);
    check_gradient([&](const Vec& y) { return inst.potential.F(t, y); },
                   [&](const Vec& y) { return inst.potential.gradF(t, y); }, x,
                   "potential", issues);
    check_gradient(inst.perturbation.G, inst.perturbation.gradG, x, "perturbation",
                   issues);
  }

  // declared slope bound delta on a sampled window
  double cval = L * T + 1.0;
  if (inst.witness_pair) {
    const double f1 = integral_F(inst, inst.witness_pair->first);
    const double f2 = integral_F(inst, inst.witness_pair->second);
    const double lvl = std::max(f1, f2) / T;
    if (lvl >= inst.growth.gamma(0.0)) cval = L * T + gamma_inverse(inst.growth, lvl);
  }
  const double window = 10.0 * cval;
  const double delta = inst.perturbation.delta_bound;
  for (int k = 0; k < 400 && issues.empty(); ++k) {
    const Vec x = rng.ball_point(n, window);
    if (std::abs(inst.perturbation.G(x)) > delta * (1.0 + x.norm()) + 1e-9) {
      std::ostringstream os;
      os << "perturbation: |G| exceeds declared slope bound at |x| = " << x.norm();
      issues.push_back(os.str());
    }
  }

  if (inst.plateau_radius) {
    if (!(*inst.plateau_radius > L * T))
      issues.push_back("plateau radius must exceed L*T");
  }
  if (inst.witness_pair) {
    if (inst.witness_pair->first.size() != n || inst.witness_pair->second.size() != n)
      issues.push_back("witness points have wrong dimension");
    else if ((inst.witness_pair->first - inst.witness_pair->second).norm() == 0.0)
      issues.push_back("witness points coincide");
  }
  return issues;
}

}  // namespace relosc
