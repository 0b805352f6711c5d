// Acceptance gate: one line per criterion, exit status = number of failures.
// Each criterion pins its tolerances in the label so regressions are explicit.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "relosc/cli.hpp"
#include "relosc/functional.hpp"
#include "relosc/hypotheses.hpp"
#include "relosc/model.hpp"
#include "relosc/multiplicity.hpp"
#include "relosc/optimizer.hpp"
#include "relosc/path.hpp"
#include "relosc/sampling.hpp"
#include "relosc/verify.hpp"
#include "relosc/wellposed.hpp"

namespace fs = std::filesystem;
using namespace relosc;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (!ok) why << "; ";
    ok = false;
    why << what;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

PeriodicPath offset_oscillation(const ProblemInstance& inst, int n, int N,
                                double offset_radius, double amplitude, Rng& rng,
                                std::uint64_t seed) {
  const Vec c = rng.ball_point(n, offset_radius);
  const PeriodicPath base = constant_path(c, N, inst.T);
  return random_feasible(n, N, inst.T, inst.kinetic.L, amplitude, seed, base);
}

// ---- criterion bodies ------------------------------------------------------

void gradient_fidelity(Check& c) {
  for (const std::string& name : preset_names()) {
    for (int n : {1, 2}) {
      const ProblemInstance inst = preset(name, n);
      for (int N : {16, 64}) {
        Rng rng(derive_seed(11, N + 100 * n));
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
          const double amplitude = 0.1 + 0.35 * (trial % 3);
          const double lambda = (trial % 3 == 0) ? 0.3 : (trial % 3 == 1 ? 1.0 : 2.5);
          PeriodicPath p = offset_oscillation(inst, n, N, 2.0, amplitude, rng,
                                              derive_seed(13, trial));
          const Mat g = path_gradient(inst, p, lambda);
          Mat fd(n, N);
          for (int k = 0; k < N; ++k)
            for (int i = 0; i < n; ++i) {
              // small enough that the cubic curvature of the kinetic term near
              // the speed bound does not inflate the truncation error
              const double eps = 2e-7 * (1.0 + std::abs(p.nodes(i, k)));
              PeriodicPath hi = p, lo = p;
              hi.nodes(i, k) += eps;
              lo.nodes(i, k) -= eps;
              const double ehi = eval_energy(inst, hi).total(lambda);
              const double elo = eval_energy(inst, lo).total(lambda);
              fd(i, k) = (ehi - elo) / (2.0 * eps);
            }
          const double scale = 1.0 + g.cwiseAbs().maxCoeff();
          worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / scale);
        }
        c.require(worst <= 1e-6, name + " n=" + std::to_string(n) + " N=" +
                                     std::to_string(N) + " rel err " + fmt(worst));
      }
    }
  }
}

void node_norm_inequality(Check& c) {
  for (const std::string& name : preset_names()) {
    const double tol = 1e-12;
    int violations = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 1 + trial % 2;
      const ProblemInstance inst = preset(name, n);
      Rng rng(derive_seed(17, trial));
      const PeriodicPath p = offset_oscillation(inst, n, 32, 3.0, 0.8, rng,
                                                derive_seed(19, trial));
      const Vec norms = p.nodes.colwise().norm();
      const double lhs = norms.maxCoeff();
      const double rhs = inst.kinetic.L * inst.T + norms.minCoeff() + tol;
      if (lhs > rhs) {
        ++violations;
        worst = std::max(worst, lhs - rhs);
      }
    }
    c.require(violations == 0,
              name + ": " + std::to_string(violations) + " violations, worst " + fmt(worst));
  }
}

void coercivity_bound(Check& c) {
  const ProblemInstance inst = preset("two-minima-symmetric");
  for (double lambda : {0.1, 1.0, 10.0}) {
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Rng rng(derive_seed(23, trial));
      const double offset = (trial % 4) * 2.0 + 0.25;
      const PeriodicPath p = offset_oscillation(inst, 1, 32, offset, 0.5, rng,
                                                derive_seed(29, trial));
      const EnergyBreakdown e = eval_energy(inst, p);
      const double weighted = e.j_value() + lambda * e.psi_value();
      const double S = p.nodes.colwise().norm().maxCoeff();
      if (weighted < coercivity_lower_bound(inst, lambda, S)) ++violations;
    }
    c.require(violations == 0, "lambda=" + fmt(lambda) + ": " +
                                   std::to_string(violations) + " bound violations");
  }
}

void sublevel_radius_criterion(Check& c) {
  const ProblemInstance inst = preset("two-minima-symmetric");
  const double r = 0.125 + inst.kinetic.Phi(Vec::Zero(1)) * inst.T;  // 0.125 - 1
  c.require(sublevel_radius(inst, r) == 1.5, "confinement radius is not exactly 1.5");

  int qualifying = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(derive_seed(31, trial));
    const double offset = (trial % 2 == 0) ? 0.45 : 1.2;
    const PeriodicPath p = offset_oscillation(inst, 1, 32, offset, 0.03, rng,
                                              derive_seed(37, trial));
    const EnergyBreakdown e = eval_energy(inst, p);
    if (e.psi_value() > r) continue;
    ++qualifying;
    worst = std::max(worst, p.nodes.colwise().norm().maxCoeff());
  }
  c.require(qualifying >= 50, "only " + std::to_string(qualifying) + " sub-level paths");
  c.require(worst <= 1.5 + 1e-9, "sub-level sup norm " + fmt(worst) + " exceeds 1.5");

  if (inst.witness_pair) {
    const auto [cert, verdict] =
        check_i4(inst, inst.witness_pair->first, inst.witness_pair->second, 0);
    c.require(verdict.holds, "two-point ball-minimum check failed");
    c.require(cert.c == 1.5, "certificate radius " + fmt(cert.c) + " != 1.5");
  } else {
    c.require(false, "preset lost its witness pair");
  }
}

void linear_perturbation_uniqueness(Check& c) {
  const ProblemInstance inst = preset("example-3.1");
  for (double lambda : {0.5, 1.0, 2.0}) {
    MinimizeOptions opts;
    opts.N = 128;
    opts.starts = 20;
    opts.threads = 2;
    const auto results = multistart(inst, lambda, opts);
    const auto clusters = cluster_minima(inst, lambda, results, 1e-8, 1e-3);
    int global = 0;
    for (const auto& cl : clusters)
      if (cl.global) ++global;
    c.require(global == 1, "lambda=" + fmt(lambda) + ": " + std::to_string(global) +
                               " global clusters");

    const auto roots =
        solve_by_shooting(inst, lambda, shooting_grid(1, 2.0, 2.0, 3), ShootingOptions{});
    c.require(roots.size() == 1,
              "lambda=" + fmt(lambda) + ": " + std::to_string(roots.size()) + " roots");
    if (global >= 1 && roots.size() == 1) {
      const PeriodicPath expected = constant_path(Vec::Constant(1, -lambda), 16, inst.T);
      const Minimum& rep = clusters.front().representative;
      const double d_min = path_distance(rep.path, expected);
      const double d_root = path_distance(roots.front().path, expected);
      const double d_cross = path_distance(rep.path, roots.front().path);
      c.require(d_min <= 1e-4, "minimizer misses the constant solution by " + fmt(d_min));
      c.require(d_root <= 1e-4, "shooting misses the constant solution by " + fmt(d_root));
      c.require(d_cross <= 1e-4, "methods disagree by " + fmt(d_cross));
    }
  }
}

void unperturbed_ground_state(Check& c) {
  MinimizeOptions opts;
  opts.N = 64;
  opts.starts = 20;
  opts.threads = 2;
  const auto results = multistart(preset("example-3.2"), 1.0, opts);
  c.require(!results.empty() && results.front().converged, "descent did not converge");
  const double total = results.front().energy.total(1.0);
  c.require(std::abs(total + 1.0) <= 1e-8, "ground energy " + fmt(total) + " != -1");
}

void unbounded_detection(Check& c) {
  const ProblemInstance inst = preset("example-3.3");
  const double probe10 =
      eval_energy(inst, constant_path(Vec::Constant(1, 10.0), 8, inst.T)).total(1.0);
  c.require(std::abs(probe10 + 413.0) <= 1e-9,
            "radius-10 probe " + fmt(probe10) + " != -413");
  const Verdict v = detect_unbounded(inst, 1.0);
  c.require(!v.holds, "no unboundedness evidence");
  c.require(v.witness_value && *v.witness_value <= -1e6,
            "witness energy above the -1e6 abort level");
}

void two_minima_split(Check& c) {
  MinimizeOptions opts;
  opts.N = 64;
  opts.starts = 20;
  opts.threads = 4;
  const TwoMinimaResult r = find_two_minima(preset("two-minima-symmetric"), opts);
  c.require(r.status == TwoMinimaResult::Status::found,
            std::string("status ") + to_string(r.status));
  if (r.status != TwoMinimaResult::Status::found) return;

  const double e1 = r.first.energy.total(r.lambda);
  const double e2 = r.second.energy.total(r.lambda);
  c.require(std::abs(e1 - e2) <= 1e-8 * (1.0 + std::abs(e1)),
            "energy gap " + fmt(std::abs(e1 - e2)));

  const PeriodicPath& p1 = r.cert_first.finest.path;
  const PeriodicPath& p2 = r.cert_second.finest.path;
  c.require(path_distance(p1, p2) >= 0.5,
            "separation " + fmt(path_distance(p1, p2)) + " below 0.5");

  for (const Certificate* cert : {&r.cert_first, &r.cert_second}) {
    c.require(cert->passed, "certificate failed: " + cert->detail);
    c.require(!cert->grid_sizes.empty() && cert->grid_sizes.back() == 256,
              "refinement did not reach N=256");
    c.require(cert->final_residual <= 1e-6,
              "refined residual " + fmt(cert->final_residual) + " above 1e-6");
  }

  PeriodicPath mirrored = p2;
  mirrored.nodes = -mirrored.nodes;
  const double mirror_gap = path_distance(p1, mirrored);
  c.require(mirror_gap <= 1e-6, "mirror map gap " + fmt(mirror_gap) + " above 1e-6");
}

void annular_minimizer(Check& c) {
  MinimizeOptions opts;
  opts.N = 64;
  opts.starts = 20;
  opts.threads = 4;
  const PlateauResult res = range_exclusion_driver(preset("theorem-3.2"), opts);
  c.require(res.ok, "driver failed: " + res.detail);
  c.require(std::abs(res.exclusion_radius - 0.3) <= 1e-12,
            "exclusion radius " + fmt(res.exclusion_radius) + " != 0.3");
  c.require(res.min_node_norm > 0.3,
            "min node norm " + fmt(res.min_node_norm) + " inside the excluded ball");
  c.require(res.zero_gap > 0.0, "zero path is not strictly worse");
}

void checker_controls(Check& c) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> expected = {
      {"example-3.1", {"i4"}},
      {"example-3.2", {"i3"}},
      {"example-3.3", {"i2"}},
      {"two-minima-symmetric", {}},
  };
  for (const auto& [name, want] : expected) {
    const auto report = check_all(preset(name), 0);
    const auto got = report.at("failing").get<std::vector<std::string>>();
    std::ostringstream left;
    for (const auto& s : got) left << s << ' ';
    c.require(got == want, name + " flags [" + left.str() + "]");
  }
}

void scalarization_lab(Check& c) {
  const ScalarizedProblem quad = quadratic_lab();
  const AlphaBeta ab = alpha_beta(quad);
  c.require(std::abs(ab.alpha) <= 1e-9, "alpha " + fmt(ab.alpha) + " not 0");

  for (double r : {0.25, 1.0, 4.0}) {
    const LevelResult res = level_minimize(quad, r);
    c.require(res.status == LevelResult::Status::ok, "level r=" + fmt(r) + " not ok");
    if (res.status != LevelResult::Status::ok) continue;
    const double sr = std::sqrt(r);
    c.require(std::abs(res.x_hat[0] + sr) <= 1e-6 && std::abs(res.x_hat[1]) <= 1e-6,
              "level r=" + fmt(r) + " minimizer off by " +
                  fmt(std::abs(res.x_hat[0] + sr) + std::abs(res.x_hat[1])));
    c.require(std::abs(res.lambda_hat - 1.0 / (2.0 * sr)) <= 1e-6,
              "level r=" + fmt(r) + " multiplier " + fmt(res.lambda_hat));
  }

  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.25 + (4.0 - 0.25) * i / 20.0);
  const ContinuityReport cont = continuity_probe(quad, grid);
  c.require(!cont.discontinuity_flag, "reference lab flagged discontinuous");
  for (std::size_t i = 0; i + 1 < cont.r.size(); ++i) {
    const double mid = 0.5 * (cont.r[i] + cont.r[i + 1]);
    const double predicted = 1.0 / (2.0 * std::sqrt(mid));
    const double ratio = cont.x_jump_ratio[i];
    if (std::abs(ratio - predicted) > 0.10 * predicted) {
      c.require(false, "jump ratio " + fmt(ratio) + " vs derivative " + fmt(predicted) +
                           " at r=" + fmt(mid));
      break;
    }
  }

  const WellposednessReport good = wellposedness_probe(quad, 1.0, 200, 0);
  c.require(good.well_posed_evidence, "reference lab lost its well-posedness evidence");
  const WellposednessReport bad = wellposedness_probe(symmetric_control_lab(), 4.0, 200, 0);
  c.require(!bad.well_posed_evidence, "negative control passed the well-posedness probe");
}

void scalarization_monotonicity(Check& c) {
  Rng rng(101);
  for (const ScalarizedProblem& prob : {quadratic_lab(), symmetric_control_lab()}) {
    for (int trial = 0; trial < 20; ++trial) {
      double l1 = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
      double l2 = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
      if (l1 > l2) std::swap(l1, l2);
      if (l2 - l1 < 1e-6) l2 += 1e-3;
      const double psi1 = prob.Psi(minimize_scalarized(prob, l1).x);
      const double psi2 = prob.Psi(minimize_scalarized(prob, l2).x);
      if (psi2 > psi1 + 1e-9) {
        c.require(false, prob.name + ": level rose " + fmt(psi1) + " -> " + fmt(psi2) +
                             " for weights " + fmt(l1) + " < " + fmt(l2));
        return;
      }
    }
  }
}

void integrator_order(Check& c) {
  ProblemInstance inst = preset("example-3.2");
  const double A = 0.1;
  const double w = 2.0 * std::numbers::pi;
  inst.potential = power_potential(2.0, 1.0, [A, w](double t) {
    const double u = A * std::sin(w * t);
    const double du = A * w * std::cos(w * t);
    const double ddu = -A * w * w * std::sin(w * t);
    Vec f(1);
    f[0] = ddu / std::pow(1.0 - du * du, 1.5) - u;
    return f;
  });
  auto defect = [&](int steps) {
    Vec u0 = Vec::Zero(1);
    Vec v0 = Vec::Constant(1, A * w);
    const Vec w0 = inst.kinetic.phi(v0);
    const auto [uT, wT] = shoot(inst, 0.0, u0, w0, steps);
    return std::sqrt((uT - u0).squaredNorm() + (wT - w0).squaredNorm());
  };
  const double ratio = defect(256) / defect(512);
  c.require(ratio >= 12.0 && ratio <= 20.0,
            "defect ratio " + fmt(ratio) + " outside [12, 20]");

  const ProblemInstance base = preset("example-3.2");
  const Vec u0 = Vec::Constant(1, 0.3);
  const Vec w0 = Vec::Constant(1, 0.2);
  const double e0 = autonomous_energy(base, 1.0, u0, w0);
  const auto [uT, wT] = shoot(base, 1.0, u0, w0, 1024);
  const double drift = std::abs(autonomous_energy(base, 1.0, uT, wT) - e0);
  c.require(drift <= 1e-8, "energy drift " + fmt(drift) + " above 1e-8 per period");
}

std::string slurp(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return "<missing " + file.string() + ">";
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void deterministic_artifacts(Check& c) {
  const fs::path root = "acceptance_det";
  fs::remove_all(root);
  const fs::path a = root / "a";
  const fs::path b = root / "b";
  for (const fs::path& dir : {a, b}) {
    const std::string out = dir.string();
    const char* argv[] = {"relosc",  "find-two", "--preset", "two-minima-symmetric",
                          "--seed",  "3",        "--threads", "4",
                          "--out",   out.c_str()};
    const int code = run_cli(static_cast<int>(std::size(argv)), argv);
    c.require(code == 0, "find-two exited with " + std::to_string(code));
  }
  for (const char* name : {"find_two.json", "scan.csv", "first.csv", "second.csv"}) {
    c.require(slurp(a / name) == slurp(b / name),
              std::string(name) + " differs between identical runs");
  }
  fs::remove_all(root);
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {"analytic path gradient matches central differences (rel <= 1e-6, all presets, "
       "n in {1,2}, N in {16,64}, 100 paths each)",
       gradient_fidelity},
      {"feasible paths satisfy max|u_k| <= L*T + min|u_k| + 1e-12 (1000 paths per preset)",
       node_norm_inequality},
      {"weighted action dominates its coercivity lower bound (two-minima-symmetric, "
       "lambda in {0.1,1,10}, 1000 paths each)",
       coercivity_bound},
      {"sub-level confinement: Psi <= 0.125 + Phi(0)T forces sup|u_k| <= 1.5 + 1e-9 "
       "and the two-point certificate radius is exactly 1.5",
       sublevel_radius_criterion},
      {"example-3.1: minimization (20 starts, N=128) and shooting (9 starts) agree on "
       "the single solution u = -lambda within sup 1e-4, lambda in {0.5,1,2}",
       linear_perturbation_uniqueness},
      {"example-3.2: minimized energy within 1e-8 of -1", unperturbed_ground_state},
      {"example-3.3: constant-path probe certifies unboundedness (energy <= -1e6, "
       "radius-10 anchor -413 +- 1e-9)",
       unbounded_detection},
      {"two-minima-symmetric: scan detects lambda with two global minima; equal "
       "energies (1e-8), separation >= 0.5, refined residuals <= 1e-6 at N=256, "
       "mirror symmetry within 1e-6",
       two_minima_split},
      {"theorem-3.2: certified minimizer stays outside radius 0.3 and strictly beats "
       "the zero path",
       annular_minimizer},
      {"hypothesis checker flags exactly i4 / i3 / i2 / none on the four control "
       "presets",
       checker_controls},
      {"scalarization lab: alpha = 0 (1e-9), level minimizers (-sqrt(r), 0) and "
       "multipliers 1/(2 sqrt(r)) within 1e-6, jump ratios within 10%, negative "
       "control flagged",
       scalarization_lab},
      {"level of the scalarized minimizer is nonincreasing in the weight "
       "(20 random pairs per lab, slack 1e-9)",
       scalarization_monotonicity},
      {"integrator: period-map defect ratio in [12,20] when halving the step; "
       "autonomous energy drift <= 1e-8 per period at 1024 steps",
       integrator_order},
      {"find-two reruns with the same seed produce byte-identical artifacts",
       deterministic_artifacts},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].body(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %2zu/%zu: %s%s%s\n", check.ok ? "PASS" : "FAIL", i + 1,
                criteria.size(), criteria[i].label, check.ok ? "" : " -- ",
                check.ok ? "" : check.why.str().c_str());
    std::fflush(stdout);
    if (!check.ok) ++failures;
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures;
}
