#include "relosc/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relosc {

ResidualReport el_residual(const ProblemInstance& inst, double lambda,
                           const PeriodicPath& path) {
  const int n = path.dim();
  const int N = path.N();
  if (n != inst.n) throw std::invalid_argument("el_residual: dimension mismatch");
  const double h = path.h();
  const double L = inst.kinetic.L;

  Mat momenta(n, N);  // phi(d_k/h), k = 0..N-1
  for (int k = 0; k < N; ++k) {
    const int kp = (k + 1) % N;
    Vec v = (path.nodes.col(kp) - path.nodes.col(k)) / h;
    if (v.norm() >= L)
      throw std::domain_error("el_residual: path touches the speed bound");
    momenta.col(k) = inst.kinetic.phi(v);
  }

  ResidualReport rep;
  rep.residuals.resize(n, N);
  for (int k = 0; k < N; ++k) {
    const int km = (k - 1 + N) % N;
    const double t = k * h;
    Vec force = inst.potential.gradF(t, path.nodes.col(k)) +
                lambda * inst.weight.psi(t) * inst.perturbation.gradG(path.nodes.col(k));
    rep.residuals.col(k) = (momenta.col(k) - momenta.col(km)) / h - force;
    rep.max_norm = std::max(rep.max_norm, rep.residuals.col(k).norm());
  }
  return rep;
}

namespace {

// Right-hand side of the first-order system.
void flow_rhs(const ProblemInstance& inst, double lambda, double t, const Vec& u,
              const Vec& w, Vec& du, Vec& dw) {
  du = inst.kinetic.phi_inv(w);
  dw = inst.potential.gradF(t, u) + lambda * inst.weight.psi(t) * inst.perturbation.gradG(u);
}

}  // namespace

std::pair<Vec, Vec> shoot(const ProblemInstance& inst, double lambda, const Vec& u0,
                          const Vec& w0, int steps) {
  if (steps < 1) throw std::invalid_argument("shoot: steps must be positive");
  if (u0.size() != inst.n || w0.size() != inst.n)
    throw std::invalid_argument("shoot: state dimension mismatch");
  const double h = inst.T / steps;
  Vec u = u0, w = w0;
  Vec k1u(inst.n), k1w(inst.n), k2u(inst.n), k2w(inst.n), k3u(inst.n), k3w(inst.n),
      k4u(inst.n), k4w(inst.n);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    flow_rhs(inst, lambda, t, u, w, k1u, k1w);
    flow_rhs(inst, lambda, t + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    flow_rhs(inst, lambda, t + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    flow_rhs(inst, lambda, t + h, u + h * k3u, w + h * k3w, k4u, k4w);
    u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  }
  return {u, w};
}

PeriodicPath shoot_path(const ProblemInstance& inst, double lambda, const Vec& u0,
                        const Vec& w0, int steps) {
  if (steps < 2) throw std::invalid_argument("shoot_path: need at least 2 steps");
  const double h = inst.T / steps;
  PeriodicPath path;
  path.T = inst.T;
  path.nodes.resize(inst.n, steps);
  Vec u = u0, w = w0;
  Vec k1u(inst.n), k1w(inst.n), k2u(inst.n), k2w(inst.n), k3u(inst.n), k3w(inst.n),
      k4u(inst.n), k4w(inst.n);
  for (int s = 0; s < steps; ++s) {
    path.nodes.col(s) = u;
    const double t = s * h;
    flow_rhs(inst, lambda, t, u, w, k1u, k1w);
    flow_rhs(inst, lambda, t + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    flow_rhs(inst, lambda, t + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    flow_rhs(inst, lambda, t + h, u + h * k3u, w + h * k3w, k4u, k4w);
    u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  }
  return path;
}

double autonomous_energy(const ProblemInstance& inst, double lambda, const Vec& u,
                         const Vec& w) {
  const Vec v = inst.kinetic.phi_inv(w);
  const double psibar = inst.weight.integral / inst.T;
  return w.dot(v) - inst.kinetic.Phi(v) - inst.potential.F(0.0, u) -
         lambda * psibar * inst.perturbation.G(u);
}

namespace {

Vec period_defect(const ProblemInstance& inst, double lambda, const Vec& z, int steps) {
  const int n = inst.n;
  auto [uT, wT] = shoot(inst, lambda, z.head(n), z.tail(n), steps);
  Vec d(2 * n);
  d.head(n) = uT - z.head(n);
  d.tail(n) = wT - z.tail(n);
  return d;
}

}  // namespace

std::vector<ShootingSolution> solve_by_shooting(
    const ProblemInstance& inst, double lambda,
    const std::vector<std::pair<Vec, Vec>>& starts, const ShootingOptions& opts) {
  const int n = inst.n;
  const int m = 2 * n;
  std::vector<ShootingSolution> roots;

  for (const auto& [u0, w0] : starts) {
    Vec z(m);
    z.head(n) = u0;
    z.tail(n) = w0;
    Vec defect = period_defect(inst, lambda, z, opts.steps);
    int it = 0;
    bool ok = false;
    for (; it < opts.max_newton; ++it) {
      const double scale = 1.0 + z.norm();
      if (defect.norm() <= opts.tol * scale) {
        ok = true;
        break;
      }
      // Central finite-difference Jacobian of the period map defect.
      Mat jac(m, m);
      for (int j = 0; j < m; ++j) {
        const double eps = 1e-6 * (1.0 + std::abs(z[j]));
        Vec zp = z, zm = z;
        zp[j] += eps;
        zm[j] -= eps;
        jac.col(j) = (period_defect(inst, lambda, zp, opts.steps) -
                      period_defect(inst, lambda, zm, opts.steps)) /
                     (2.0 * eps);
      }
      Eigen::FullPivLU<Mat> lu(jac);
      lu.setThreshold(1e-12);
      Vec step;
      if (lu.isInvertible()) {
        step = lu.solve(-defect);
      } else {
        // Degenerate period map (e.g. a continuum of rest points): fall back
        // to a regularized least-squares step.
        Mat reg = jac.transpose() * jac + 1e-10 * Mat::Identity(m, m);
        step = reg.ldlt().solve(-jac.transpose() * defect);
      }
      double damping = 1.0;
      bool accepted = false;
      for (int half = 0; half < 40; ++half) {
        Vec trial = z + damping * step;
        Vec trial_defect;
        try {
          trial_defect = period_defect(inst, lambda, trial, opts.steps);
        } catch (const std::exception&) {
          damping *= 0.5;
          continue;
        }
        if (trial_defect.norm() < defect.norm()) {
          z = trial;
          defect = trial_defect;
          accepted = true;
          break;
        }
        damping *= 0.5;
      }
      if (!accepted) break;
    }
    if (!ok) {
      const double scale = 1.0 + z.norm();
      ok = defect.norm() <= opts.tol * scale;
    }
    if (!ok) continue;

    bool duplicate = false;
    for (const auto& r : roots) {
      Vec zr(m);
      zr.head(n) = r.u0;
      zr.tail(n) = r.w0;
      if ((z - zr).norm() <= opts.dedup_tol * (1.0 + zr.norm())) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    ShootingSolution sol;
    sol.u0 = z.head(n);
    sol.w0 = z.tail(n);
    sol.defect = defect.norm();
    sol.newton_iterations = it;
    sol.path = shoot_path(inst, lambda, sol.u0, sol.w0, opts.steps);
    roots.push_back(std::move(sol));
  }
  return roots;
}

std::vector<std::pair<Vec, Vec>> shooting_grid(int n, double radius_u, double radius_w,
                                               int per_axis) {
  if (per_axis < 1) throw std::invalid_argument("shooting_grid: per_axis must be positive");
  auto axis = [per_axis](double radius) {
    std::vector<double> pts;
    if (per_axis == 1) {
      pts.push_back(0.0);
    } else {
      for (int i = 0; i < per_axis; ++i)
        pts.push_back(-radius + 2.0 * radius * i / (per_axis - 1));
    }
    return pts;
  };
  const auto us = axis(radius_u);
  const auto ws = axis(radius_w);

  // Odometer over 2n coordinates: u coordinates first, then w.
  const int m = 2 * n;
  std::vector<int> idx(m, 0);
  std::vector<std::pair<Vec, Vec>> grid;
  while (true) {
    Vec u(n), w(n);
    for (int i = 0; i < n; ++i) u[i] = us[idx[i]];
    for (int i = 0; i < n; ++i) w[i] = ws[idx[n + i]];
    grid.emplace_back(std::move(u), std::move(w));
    int carry = 0;
    while (carry < m) {
      if (++idx[carry] < per_axis) break;
      idx[carry] = 0;
      ++carry;
    }
    if (carry == m) break;
  }
  return grid;
}

namespace {

double force_scale(const ProblemInstance& inst, double lambda,
                   const PeriodicPath& path) {
  double force_max = 0.0;
  const double h = path.h();
  for (int k = 0; k < path.N(); ++k) {
    const double t = k * h;
    Vec f = inst.potential.gradF(t, path.nodes.col(k)) +
            lambda * inst.weight.psi(t) * inst.perturbation.gradG(path.nodes.col(k));
    force_max = std::max(force_max, f.norm());
  }
  return 1.0 + force_max;
}

}  // namespace

Certificate certify(const Minimum& m, const ProblemInstance& inst, double lambda,
                    int refine_levels) {
  Certificate cert;
  cert.grid_sizes.push_back(m.path.N());

  MinimizeOptions polish;
  polish.grad_tol = 1e-9;
  polish.max_iter = 20000;

  PeriodicPath prev = m.path;
  Minimum current = m;
  const double floor_scale = 1.0 + m.path.nodes.cwiseAbs().maxCoeff();
  bool ok = true;
  std::ostringstream detail;

  // The input must already be stationary at its own grid; a loose residual
  // gate rejects non-minimizing paths before any refinement can mask them.
  try {
    const double input_res = el_residual(inst, lambda, m.path).max_norm;
    if (input_res > 1e-3 * force_scale(inst, lambda, m.path)) {
      ok = false;
      detail << "input path is not stationary (residual " << input_res << "); ";
    }
  } catch (const std::domain_error&) {
    ok = false;
    detail << "input path touches the speed bound; ";
  }

  for (int level = 1; level <= refine_levels; ++level) {
    const int N_next = m.path.N() << level;
    polish.N = N_next;
    PeriodicPath start = resample(prev, N_next);
    Minimum refined = minimize(inst, lambda, start, polish);
    cert.grid_sizes.push_back(N_next);
    if (!refined.converged) {
      ok = false;
      detail << "refinement at N=" << N_next << " did not converge; ";
    }
    const double dist = path_distance(refined.path, prev);
    cert.cross_distances.push_back(dist);
    prev = refined.path;
    current = std::move(refined);
  }

  // Distances should not grow across refinements; values below the floor are
  // treated as converged-in-place (constant minimizers report zeros).
  const double dist_floor = 1e-7 * floor_scale;
  for (std::size_t i = 1; i < cert.cross_distances.size(); ++i) {
    const double a = cert.cross_distances[i - 1];
    const double b = cert.cross_distances[i];
    if (b > dist_floor && b > a * 1.05 + dist_floor) {
      ok = false;
      detail << "cross-grid distance grew from " << a << " to " << b << "; ";
    }
  }

  ResidualReport rep = el_residual(inst, lambda, current.path);
  cert.final_residual = rep.max_norm;
  cert.residual_scale = force_scale(inst, lambda, current.path);
  if (cert.final_residual > 1e-6 * cert.residual_scale) {
    ok = false;
    detail << "final residual " << cert.final_residual << " exceeds tolerance; ";
  }

  cert.finest = std::move(current);
  cert.passed = ok;
  cert.detail = detail.str();
  if (cert.detail.empty()) cert.detail = "ok";
  return cert;
}

nlohmann::json certificate_json(const Certificate& cert) {
  nlohmann::json j;
  j["passed"] = cert.passed;
  j["grid_sizes"] = cert.grid_sizes;
  j["cross_distances"] = cert.cross_distances;
  j["final_residual"] = cert.final_residual;
  j["residual_scale"] = cert.residual_scale;
  j["detail"] = cert.detail;
  j["energy"] = cert.finest.energy.total(cert.finest.lambda);
  j["projected_grad_norm"] = cert.finest.projected_grad_norm;
  return j;
}

}  // namespace relosc
