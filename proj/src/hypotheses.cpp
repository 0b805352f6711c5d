#include "relosc/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relosc/sampling.hpp"

namespace relosc {

std::string to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::verified_on_samples:
      return "verified-on-samples";
    case Verdict::Status::falsified:
      return "falsified";
    case Verdict::Status::declared:
      return "declared";
  }
  return "unknown";
}

nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json j{{"status", to_string(v.status)}, {"holds", v.holds}, {"detail", v.detail}};
  if (v.witness_x) j["witness_x"] = std::vector<double>(v.witness_x->begin(), v.witness_x->end());
  if (v.witness_t) j["witness_t"] = *v.witness_t;
  if (v.witness_value) j["witness_value"] = *v.witness_value;
  return j;
}

nlohmann::json certificate_to_json(const I4Certificate& cert) {
  return nlohmann::json{
      {"x1", std::vector<double>(cert.x1.begin(), cert.x1.end())},
      {"x2", std::vector<double>(cert.x2.begin(), cert.x2.end())},
      {"c", cert.c},
      {"inf_F_ball", cert.inf_F_ball},
      {"G_at_points", cert.G_at_points},
      {"inf_G_ball", cert.inf_G_ball},
      {"strict_gap", cert.strict_gap}};
}

std::pair<Vec, double> minimize_in_ball(const std::function<double(const Vec&)>& f,
                                        const std::function<Vec(const Vec&)>& grad,
                                        int n, double radius, int budget,
                                        std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xba11));
  std::vector<std::pair<double, Vec>> pool;
  auto consider = [&](const Vec& x) { pool.emplace_back(f(x), x); };
  consider(Vec::Zero(n));
  for (int k = 0; k < budget; ++k)
    consider(k % 2 == 0 ? low_discrepancy_ball(n, static_cast<std::uint64_t>(k / 2), radius)
                        : rng.ball_point(n, radius));
  std::partial_sort(pool.begin(), pool.begin() + std::min<std::size_t>(10, pool.size()),
                    pool.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });

  auto project = [&](Vec x) {
    const double r = x.norm();
    if (r > radius) x *= radius / r;
    return x;
  };

  Vec best_x = pool.front().second;
  double best_v = pool.front().first;
  const std::size_t refine_count = std::min<std::size_t>(10, pool.size());
  for (std::size_t s = 0; s < refine_count; ++s) {
    Vec x = pool[s].second;
    double fx = pool[s].first;
    double step = 0.1 * (1.0 + radius);
    bool done = false;
    for (int it = 0; it < 500 && !done; ++it) {
      const Vec g = grad(x);
      bool accepted = false;
      for (int back = 0; back < 60; ++back) {
        const Vec trial = project(x - step * g);
        const double ft = f(trial);
        // sufficient decrease measured on the projected move
        if (ft <= fx - 1e-4 / std::max(step, 1e-300) * (trial - x).squaredNorm()) {
          done = (trial - x).norm() <= 1e-12 * (1.0 + radius);
          x = trial;
          fx = ft;
          step *= 2.0;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // line search bottomed out at machine precision
    }
    if (fx < best_v) {
      best_v = fx;
      best_x = x;
    }
  }
  return {best_x, best_v};
}

Verdict check_i1(const ProblemInstance& inst, const SampleSpec& spec) {
  Rng rng(derive_seed(spec.seed, 0x11));
  Verdict v;
  for (int k = 0; k < spec.count; ++k) {
    const double t = inst.T * halton(static_cast<std::uint64_t>(k) + 1, 2);
    const Vec x = k % 2 == 0
                      ? low_discrepancy_ball(inst.n, static_cast<std::uint64_t>(k / 2),
                                             spec.radius)
                      : rng.ball_point(inst.n, spec.radius);
    const double lhs = inst.growth.gamma(x.norm());
    const double rhs = inst.potential.F(t, x);
    if (lhs > rhs + 1e-12) {
      v.status = Verdict::Status::falsified;
      v.holds = false;
      v.witness_x = x;
      v.witness_t = t;
      v.witness_value = lhs - rhs;
      std::ostringstream os;
      os << "gamma(|x|) = " << lhs << " exceeds F(t,x) = " << rhs << " at |x| = "
         << x.norm();
      v.detail = os.str();
      return v;
    }
  }
  v.status = Verdict::Status::verified_on_samples;
  v.holds = true;
  std::ostringstream os;
  os << "gamma(|x|) <= F(t,x) on " << spec.count << " samples up to radius "
     << spec.radius;
  v.detail = os.str();
  return v;
}

Verdict check_i2(const ProblemInstance& inst, std::vector<double> radii) {
  if (radii.empty())
    for (double r = 1.0; r <= 1024.0; r *= 2.0) radii.push_back(r);
  const double delta = inst.perturbation.delta_bound;
  Rng rng(derive_seed(0, 0x12));
  const int dirs = inst.n == 1 ? 2 : 32 * inst.n;

  std::vector<double> slope_min(radii.size());
  std::vector<Vec> slope_arg(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double m = kInf;
    Vec arg;
    for (int k = 0; k < dirs; ++k) {
      const Vec dir = k % 2 == 0 ? low_discrepancy_direction(inst.n, k / 2)
                                 : rng.sphere_point(inst.n, 1.0);
      const Vec x = radii[i] * dir;
      const double s = inst.perturbation.G(x) / radii[i];
      if (s < m) {
        m = s;
        arg = x;
      }
    }
    slope_min[i] = m;
    slope_arg[i] = arg;
  }

  Verdict v;
  const double tol = 1e-9 * (1.0 + delta);
  const double running_min = *std::min_element(slope_min.begin(), slope_min.end());
  if (running_min >= -delta - tol) {
    v.status = Verdict::Status::verified_on_samples;
    v.holds = true;
    std::ostringstream os;
    os << "sphere minima of G/|x| stay above the declared -" << delta
       << " out to radius " << radii.back();
    v.detail = os.str();
    return v;
  }
  // divergence evidence: the slope keeps worsening by a solid factor across
  // the last radii, which a bounded-below G/|x| cannot sustain
  bool diverging = radii.size() >= 3;
  for (std::size_t i = radii.size() - 2; diverging && i < radii.size(); ++i)
    diverging = slope_min[i] < -delta && slope_min[i] <= 1.5 * slope_min[i - 1];
  if (diverging) {
    v.status = Verdict::Status::falsified;
    v.holds = false;
    v.witness_x = slope_arg.back();
    v.witness_value = slope_min.back();
    std::ostringstream os;
    os << "G(x)/|x| reaches " << slope_min.back() << " at radius " << radii.back()
       << " and keeps worsening superlinearly";
    v.detail = os.str();
    return v;
  }
  v.status = Verdict::Status::declared;
  v.holds = false;
  v.witness_x = slope_arg[static_cast<std::size_t>(
      std::min_element(slope_min.begin(), slope_min.end()) - slope_min.begin())];
  v.witness_value = running_min;
  v.detail = "sphere slope drops below the declared bound without clear divergence";
  return v;
}

namespace {

double default_confinement_radius(const ProblemInstance& inst) {
  double c = inst.kinetic.L * inst.T + 1.0;
  if (inst.witness_pair) {
    const double lvl = std::max(integral_F(inst, inst.witness_pair->first),
                                integral_F(inst, inst.witness_pair->second)) /
                       inst.T;
    if (lvl >= inst.growth.gamma(0.0))
      c = inst.kinetic.L * inst.T + gamma_inverse(inst.growth, lvl);
  }
  return c;
}

}  // namespace

Verdict check_i3(const ProblemInstance& inst, double search_radius, int budget,
                 std::uint64_t seed) {
  if (search_radius <= 0.0) search_radius = 2.0 * default_confinement_radius(inst);
  if (budget <= 0) budget = 4000 * inst.n;
  const auto [xmin, ball_min] =
      minimize_in_ball(inst.perturbation.G, inst.perturbation.gradG, inst.n,
                       search_radius, budget, derive_seed(seed, 0x13));

  Rng rng(derive_seed(seed, 0x13b));
  const int dirs = inst.n == 1 ? 2 : 16 * inst.n;
  for (double factor : {2.0, 4.0, 8.0, 16.0}) {
    const double r = factor * search_radius;
    for (int k = 0; k < dirs; ++k) {
      const Vec dir = k % 2 == 0 ? low_discrepancy_direction(inst.n, k / 2)
                                 : rng.sphere_point(inst.n, 1.0);
      const Vec x = r * dir;
      const double val = inst.perturbation.G(x);
      if (val < ball_min - 1e-9) {
        Verdict v;
        v.status = Verdict::Status::verified_on_samples;
        v.holds = true;
        v.witness_x = x;
        v.witness_value = val;
        std::ostringstream os;
        os << "G escapes: value " << val << " at radius " << r
           << " undercuts the ball minimum " << ball_min << " (radius "
           << search_radius << ")";
        v.detail = os.str();
        return v;
      }
    }
  }

  Verdict v;
  v.status = Verdict::Status::declared;
  v.witness_x = xmin;
  v.witness_value = ball_min;
  switch (inst.perturbation.min_attained) {
    case Perturbation::MinAttained::yes:
      v.holds = false;
      v.detail = "no escape found and the instance declares inf G attained";
      break;
    case Perturbation::MinAttained::no:
      v.holds = true;
      v.detail = "no escape found within the sampled radii; recording the declared "
                 "non-attainment";
      break;
    case Perturbation::MinAttained::unknown:
      v.holds = false;
      v.detail = "no escape found and no declaration; treating attainment as possible";
      break;
  }
  return v;
}

std::pair<I4Certificate, Verdict> check_i4(const ProblemInstance& inst, const Vec& x1,
                                           const Vec& x2, std::uint64_t seed) {
  I4Certificate cert;
  cert.x1 = x1;
  cert.x2 = x2;
  Verdict v;
  if ((x1 - x2).norm() == 0.0) {
    v.status = Verdict::Status::falsified;
    v.holds = false;
    v.detail = "witness points coincide";
    return {cert, v};
  }
  const double f1 = integral_F(inst, x1);
  const double f2 = integral_F(inst, x2);
  const double level = std::max(f1, f2);
  cert.c = inst.kinetic.L * inst.T + gamma_inverse(inst.growth, level / inst.T);

  // (i1) confines the global infimum of the F integral to a computable ball
  auto intF = [&](const Vec& x) { return integral_F(inst, x); };
  auto dintF = [&](const Vec& x) { return Vec(inst.T * avg_gradF(inst, x)); };
  const double v0 = std::min({f1, f2, intF(Vec::Zero(inst.n))});
  double confine = 1.0;
  if (v0 / inst.T >= inst.growth.gamma(0.0))
    confine = std::max(1.0, gamma_inverse(inst.growth, v0 / inst.T));
  const auto [fx, f_inf] = minimize_in_ball(intF, dintF, inst.n, confine,
                                            10000 * inst.n, derive_seed(seed, 0x14a));
  cert.inf_F_ball = f_inf;
  cert.strict_gap = level - f_inf;

  const auto [gx, g_inf] =
      minimize_in_ball(inst.perturbation.G, inst.perturbation.gradG, inst.n, cert.c,
                       10000 * inst.n, derive_seed(seed, 0x14b));
  cert.inf_G_ball = g_inf;
  const double g1 = inst.perturbation.G(x1);
  const double g2 = inst.perturbation.G(x2);
  cert.G_at_points = g1;

  const double tol = 1e-9;
  std::ostringstream os;
  if (x1.norm() > cert.c + tol || x2.norm() > cert.c + tol) {
    v.status = Verdict::Status::falsified;
    v.holds = false;
    os << "witness points lie outside the ball of radius c = " << cert.c;
    v.detail = os.str();
    return {cert, v};
  }
  if (std::abs(g1 - g2) > tol) {
    v.status = Verdict::Status::falsified;
    v.holds = false;
    v.witness_value = g1 - g2;
    os << "G(x1) = " << g1 << " and G(x2) = " << g2 << " differ";
    v.detail = os.str();
    return {cert, v};
  }
  if (g_inf < g1 - tol) {
    v.status = Verdict::Status::falsified;
    v.holds = false;
    v.witness_x = gx;
    v.witness_value = g_inf;
    os << "G reaches " << g_inf << " inside the ball, below G(x1) = " << g1;
    v.detail = os.str();
    return {cert, v};
  }
  if (cert.strict_gap <= tol) {
    v.status = Verdict::Status::falsified;
    v.holds = false;
    v.witness_x = fx;
    v.witness_value = f_inf;
    os << "no strict gap: inf of the F integral " << f_inf
       << " is not below the witness level " << level;
    v.detail = os.str();
    return {cert, v};
  }
  v.status = Verdict::Status::verified_on_samples;
  v.holds = true;
  os << "c = " << cert.c << ", G(x1) = G(x2) = ball minimum within " << tol
     << ", strict gap " << cert.strict_gap;
  v.detail = os.str();
  return {cert, v};
}

Verdict check_j1(const ProblemInstance& inst, double rho, const SampleSpec& spec) {
  Verdict v;
  if (!(rho > inst.kinetic.L * inst.T)) {
    v.status = Verdict::Status::falsified;
    v.holds = false;
    std::ostringstream os;
    os << "plateau radius " << rho << " does not exceed LT = "
       << inst.kinetic.L * inst.T;
    v.detail = os.str();
    return v;
  }
  Rng rng(derive_seed(spec.seed, 0x21));
  const double g0 = inst.perturbation.G(Vec::Zero(inst.n));
  for (int k = 0; k < spec.count; ++k) {
    Vec x = k % 2 == 0 ? low_discrepancy_ball(inst.n, static_cast<std::uint64_t>(k / 2), rho)
                       : rng.ball_point(inst.n, rho);
    if (k % 7 == 3 && x.norm() > 0.0) x *= rho / x.norm();  // hit the boundary too
    const double dv = std::abs(inst.perturbation.G(x) - g0);
    const double dg = inst.perturbation.gradG(x).norm();
    if (dv > 1e-12 || dg > 1e-10) {
      v.status = Verdict::Status::falsified;
      v.holds = false;
      v.witness_x = x;
      v.witness_value = dv > 1e-12 ? dv : dg;
      std::ostringstream os;
      os << "G is not constant on the plateau: |G - G(0)| = " << dv
         << ", |grad G| = " << dg << " at |x| = " << x.norm();
      v.detail = os.str();
      return v;
    }
  }
  v.status = Verdict::Status::verified_on_samples;
  v.holds = true;
  std::ostringstream os;
  os << "G constant (value and gradient) on " << spec.count
     << " samples of the ball of radius " << rho << " > LT";
  v.detail = os.str();
  return v;
}

nlohmann::json check_all(const ProblemInstance& inst, std::uint64_t seed) {
  nlohmann::json report;
  report["instance"] = inst.name.empty() ? "(unnamed)" : inst.name;
  std::vector<std::string> failing;

  SampleSpec i1spec;
  i1spec.seed = seed;
  i1spec.radius = 10.0 * default_confinement_radius(inst);
  const Verdict v1 = check_i1(inst, i1spec);
  report["i1"] = verdict_to_json(v1);
  if (!v1.holds) failing.push_back("i1");

  const Verdict v2 = check_i2(inst);
  report["i2"] = verdict_to_json(v2);
  if (!v2.holds) failing.push_back("i2");

  const Verdict v3 = check_i3(inst, 0.0, 0, seed);
  report["i3"] = verdict_to_json(v3);
  if (!v3.holds) failing.push_back("i3");

  if (inst.witness_pair) {
    const auto [cert, v4] = check_i4(inst, inst.witness_pair->first,
                                     inst.witness_pair->second, seed);
    report["i4"] = verdict_to_json(v4);
    report["i4_certificate"] = certificate_to_json(cert);
    if (!v4.holds) failing.push_back("i4");
  }

  if (inst.plateau_radius) {
    SampleSpec jspec;
    jspec.seed = seed;
    const Verdict vj = check_j1(inst, *inst.plateau_radius, jspec);
    report["j1"] = verdict_to_json(vj);
    if (!vj.holds) failing.push_back("j1");
  }

  report["failing"] = failing;
  report["all_hold"] = failing.empty();
  return report;
}

}  // namespace relosc
