#include "relosc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "relosc/sampling.hpp"

namespace relosc {

Minimum minimize(const ProblemInstance& inst, double lambda, const PeriodicPath& start,
                 const MinimizeOptions& opts) {
  Minimum out;
  out.lambda = lambda;

  PeriodicPath p = start;
  if (!feasible(p, inst.kinetic.L, opts.eps_bd))
    p = project_feasible(p.nodes, p.T, inst.kinetic.L, opts.eps_bd).path;
  EnergyBreakdown e = eval_energy(inst, p);
  double E = e.total(lambda);

  double step = 0.1;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const Mat g = path_gradient(inst, p, lambda);
    const double gnorm = g.norm();
    const double tol = opts.grad_tol * (1.0 + std::abs(E));
    if (gnorm <= tol) {
      // the projection is non-expansive, so the projected measure can only be
      // smaller; stop without spending a trial step
      out.projected_grad_norm = gnorm;
      out.converged = true;
      out.stop = Minimum::StopReason::converged;
      break;
    }
    bool accepted = false;
    double pg = gnorm;
    for (int back = 0; back < 80; ++back) {
      const Mat trial_nodes = p.nodes - step * g;
      const PeriodicPath trial =
          project_feasible(trial_nodes, p.T, inst.kinetic.L, opts.eps_bd).path;
      const double moved = (trial.nodes - p.nodes).norm();
      const EnergyBreakdown et = eval_energy(inst, trial);
      const double Et = et.total(lambda);
      if (Et <= E - opts.armijo / step * moved * moved) {
        pg = moved / step;
        p = trial;
        e = et;
        E = Et;
        step /= opts.backtrack;  // grow after success
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (opts.on_iteration)
      opts.on_iteration(IterationRecord{it + 1, E, pg, step});
    if (!accepted) {
      out.projected_grad_norm = pg;
      out.stop = Minimum::StopReason::line_search_stall;
      // a stalled line search at a tiny projected gradient is convergence in
      // all but name; report it as such only under the stationarity tolerance
      out.converged = pg <= tol;
      if (out.converged) out.stop = Minimum::StopReason::converged;
      ++it;
      break;
    }
    if (pg <= tol) {
      out.projected_grad_norm = pg;
      out.converged = true;
      out.stop = Minimum::StopReason::converged;
      ++it;
      break;
    }
    out.projected_grad_norm = pg;
  }
  out.path = std::move(p);
  out.energy = e;
  out.iterations = it;
  if (!out.converged && out.stop != Minimum::StopReason::line_search_stall)
    out.stop = Minimum::StopReason::max_iter;
  return out;
}

namespace {

PeriodicPath constant_start(const Vec& x, int N, double T) {
  return constant_path(x, N, T);
}

}  // namespace

std::vector<Minimum> multistart(const ProblemInstance& inst, double lambda,
                                const MinimizeOptions& opts) {
  const int N = opts.N;
  const double T = inst.T;
  const double L = inst.kinetic.L;

  // incumbent level from cheap constant candidates
  std::vector<Vec> anchors;
  if (inst.witness_pair) {
    anchors.push_back(inst.witness_pair->first);
    anchors.push_back(inst.witness_pair->second);
  }
  anchors.push_back(Vec::Zero(inst.n));
  double incumbent = kInf;
  for (const Vec& a : anchors)
    incumbent = std::min(incumbent,
                         eval_energy(inst, constant_start(a, N, T)).total(lambda));
  const double radius = std::min(coercive_radius(inst, lambda, incumbent), 1e4);

  // deterministic portfolio: anchors, antithetic quasi-random constants in the
  // coercivity ball, then random feasible oscillations around ball constants
  std::vector<PeriodicPath> starts;
  starts.reserve(static_cast<std::size_t>(std::max(opts.starts, 1)));
  for (const Vec& a : anchors) starts.push_back(constant_start(a, N, T));
  const int want = std::max(opts.starts, 1);
  const int const_budget = std::max(want * 7 / 10 - static_cast<int>(anchors.size()), 0);
  for (int j = 0; starts.size() < anchors.size() + const_budget; ++j) {
    const Vec q = low_discrepancy_ball(inst.n, static_cast<std::uint64_t>(j), radius);
    starts.push_back(constant_start(q, N, T));
    if (static_cast<int>(starts.size()) < static_cast<int>(anchors.size()) + const_budget)
      starts.push_back(constant_start(Vec(-q), N, T));
  }
  for (int j = 0; static_cast<int>(starts.size()) < want; ++j) {
    const Vec q = low_discrepancy_ball(inst.n, static_cast<std::uint64_t>(100 + j), radius);
    starts.push_back(random_feasible(inst.n, N, T, L, 0.25 * L * T,
                                     derive_seed(opts.seed, 1000 + j),
                                     constant_start(q, N, T), opts.eps_bd));
  }
  starts.resize(static_cast<std::size_t>(want), starts.front());

  std::vector<Minimum> results(starts.size());
  MinimizeOptions run_opts = opts;
  if (opts.threads > 1) run_opts.on_iteration = nullptr;  // keep logs deterministic
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      results[i] = minimize(inst, lambda, starts[i], run_opts);
      results[i].start_index = static_cast<int>(i);
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(starts.size())));
  if (threads == 1) {
    run_range(0, starts.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (starts.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(starts.size(), lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::sort(results.begin(), results.end(), [lambda](const Minimum& a, const Minimum& b) {
    const double ea = a.energy.total(lambda), eb = b.energy.total(lambda);
    if (ea != eb) return ea < eb;
    return a.start_index < b.start_index;
  });
  return results;
}

std::vector<Cluster> cluster_minima(const ProblemInstance& inst, double lambda,
                                    const std::vector<Minimum>& results,
                                    double value_tol, double dist_tol) {
  std::vector<Cluster> clusters;
  if (results.empty()) return clusters;
  const std::size_t n = results.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (find(i) != find(j) &&
          path_distance(results[i].path, results[j].path) <= dist_tol)
        unite(i, j);

  double best = kInf;
  for (const auto& r : results) best = std::min(best, r.energy.total(lambda));

  // flat-valley merge: two clusters at the global level whose midpoint also
  // sits at the global level are one degenerate valley, not two minima
  auto cluster_best = [&](std::size_t root) {
    double v = kInf;
    for (std::size_t i = 0; i < n; ++i)
      if (find(i) == root) v = std::min(v, results[i].energy.total(lambda));
    return v;
  };
  auto representative = [&](std::size_t root) {
    std::size_t arg = root;
    double v = kInf;
    for (std::size_t i = 0; i < n; ++i)
      if (find(i) == root && results[i].energy.total(lambda) < v) {
        v = results[i].energy.total(lambda);
        arg = i;
      }
    return arg;
  };
  for (int pass = 0; pass < 5; ++pass) {
    bool merged = false;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i)
      if (find(i) == i) roots.push_back(i);
    for (std::size_t a = 0; a < roots.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < roots.size() && !merged; ++b) {
        if (cluster_best(roots[a]) > best + value_tol) continue;
        if (cluster_best(roots[b]) > best + value_tol) continue;
        const auto& pa = results[representative(roots[a])].path;
        const auto& pb = results[representative(roots[b])].path;
        if (pa.N() != pb.N()) continue;
        const Mat mid_nodes = 0.5 * (pa.nodes + pb.nodes);
        const PeriodicPath mid =
            project_feasible(mid_nodes, pa.T, inst.kinetic.L).path;
        if (eval_energy(inst, mid).total(lambda) <= best + value_tol) {
          unite(roots[a], roots[b]);
          merged = true;
        }
      }
    }
    if (!merged) break;
  }

  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) == i) roots.push_back(i);
  for (std::size_t root : roots) {
    Cluster c;
    c.representative = results[representative(root)];
    for (std::size_t i = 0; i < n; ++i)
      if (find(i) == root) ++c.size;
    c.global = c.representative.energy.total(lambda) <= best + value_tol;
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(), [lambda](const Cluster& a, const Cluster& b) {
    return a.representative.energy.total(lambda) < b.representative.energy.total(lambda);
  });
  return clusters;
}

}  // namespace relosc
