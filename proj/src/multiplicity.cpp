#include "relosc/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "relosc/functional.hpp"
#include "relosc/sampling.hpp"

namespace relosc {

namespace {
constexpr double kAbortLevel = -1e6;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(25);
  for (int k = 0; k < 25; ++k) grid[k] = std::pow(10.0, -2.0 + k / 6.0);
  grid[12] = 1.0;
  return grid;
}

namespace {

LambdaReport scan_point(const ProblemInstance& inst, double lambda,
                        const MinimizeOptions& opts) {
  LambdaReport row;
  row.lambda = lambda;
  std::vector<Minimum> results = multistart(inst, lambda, opts);
  row.best_energy = results.front().energy.total(lambda);
  for (const auto& r : results) row.all_converged = row.all_converged && r.converged;
  if (row.best_energy <= kAbortLevel) return row;  // clustering is meaningless here

  const double value_tol = opts.value_tol * (1.0 + std::abs(row.best_energy));
  const double dist_tol =
      opts.dist_tol_factor * (1.0 + inst.kinetic.L * inst.T);
  std::vector<Cluster> clusters =
      cluster_minima(inst, lambda, results, value_tol, dist_tol);
  for (const auto& c : clusters) {
    if (c.global && c.representative.converged) {
      ++row.n_global_clusters;
      row.representatives.push_back(c.representative);
    }
  }
  row.detected = row.n_global_clusters >= 2;
  return row;
}

}  // namespace

ScanReport lambda_scan(const ProblemInstance& inst, const std::vector<double>& grid,
                       const MinimizeOptions& opts, bool stop_on_detection) {
  ScanReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    LambdaReport row = scan_point(inst, grid[i], opts);
    const bool abort = row.best_energy <= kAbortLevel;
    report.entries.push_back(std::move(row));
    if (abort) {
      report.unbounded_evidence = true;
      break;
    }
    if (report.entries.back().detected && !report.detected_lambda) {
      report.detected_lambda = grid[i];
      report.detected_index = i;
      if (stop_on_detection) break;
    }
  }
  return report;
}

void write_scan_csv(std::ostream& out, const ScanReport& report) {
  out << "lambda,best_energy,n_global_clusters,detected\n";
  out << std::setprecision(17);
  for (const auto& row : report.entries) {
    out << row.lambda << ',' << row.best_energy << ',' << row.n_global_clusters << ','
        << (row.detected ? 1 : 0) << '\n';
  }
}

nlohmann::json scan_to_json(const ScanReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.entries) {
    nlohmann::json r;
    r["lambda"] = row.lambda;
    r["best_energy"] = row.best_energy;
    r["n_global_clusters"] = row.n_global_clusters;
    r["all_converged"] = row.all_converged;
    r["detected"] = row.detected;
    rows.push_back(std::move(r));
  }
  nlohmann::json j;
  j["entries"] = std::move(rows);
  if (report.detected_lambda) j["detected_lambda"] = *report.detected_lambda;
  if (report.detected_index) j["detected_index"] = *report.detected_index;
  j["unbounded_evidence"] = report.unbounded_evidence;
  return j;
}

Verdict detect_unbounded(const ProblemInstance& inst, double lambda,
                         std::vector<double> radius_schedule) {
  if (radius_schedule.empty())
    for (double r = 1.0; r <= 4096.0; r *= 2.0) radius_schedule.push_back(r);

  const int n = inst.n;
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else {
    for (int k = 0; k < 8 * n; ++k) dirs.push_back(low_discrepancy_direction(n, k));
  }

  Verdict v;
  v.status = Verdict::Status::declared;
  v.holds = true;  // bounded below until evidence says otherwise
  double best = kInf;
  Vec best_x;
  std::vector<double> trace;
  for (double r : radius_schedule) {
    double level_best = kInf;
    for (const auto& d : dirs) {
      Vec x = r * d;
      EnergyBreakdown e = eval_energy(inst, constant_path(x, 8, inst.T));
      const double total = e.total(lambda);
      if (total < level_best) level_best = total;
      if (total < best) {
        best = total;
        best_x = x;
      }
    }
    trace.push_back(level_best);
    if (best <= kAbortLevel) break;
  }

  std::ostringstream detail;
  detail << "constant-path energies by radius:";
  for (double t : trace) detail << ' ' << t;
  if (best <= kAbortLevel) {
    v.status = Verdict::Status::verified_on_samples;
    v.holds = false;
    v.witness_x = best_x;
    v.witness_value = best;
    detail << "; unbounded-below evidence at |x|=" << best_x.norm();
  } else {
    v.witness_value = best;
    detail << "; no evidence of unboundedness down to " << best;
  }
  v.detail = detail.str();
  return v;
}

const char* to_string(TwoMinimaResult::Status s) {
  switch (s) {
    case TwoMinimaResult::Status::found: return "found";
    case TwoMinimaResult::Status::none_detected: return "none-detected";
    case TwoMinimaResult::Status::certification_failed: return "certification-failed";
    case TwoMinimaResult::Status::unbounded_detected: return "unbounded-detected";
  }
  return "unknown";
}

TwoMinimaResult find_two_minima(const ProblemInstance& inst,
                                const MinimizeOptions& opts) {
  TwoMinimaResult result;
  const std::vector<double> grid = default_lambda_grid();

  // Cheap screen before spending the optimization budget: constant paths at
  // growing radii expose functionals that are unbounded from below.
  for (double lam : {1.0, grid.back()}) {
    Verdict v = detect_unbounded(inst, lam);
    if (!v.holds) {
      result.status = TwoMinimaResult::Status::unbounded_detected;
      result.lambda = lam;
      result.unbounded = std::move(v);
      return result;
    }
  }

  result.scan = lambda_scan(inst, grid, opts, /*stop_on_detection=*/true);
  if (result.scan.unbounded_evidence) {
    result.status = TwoMinimaResult::Status::unbounded_detected;
    result.lambda = result.scan.entries.back().lambda;
    result.unbounded = detect_unbounded(inst, result.lambda);
    return result;
  }
  if (!result.scan.detected_lambda) {
    result.status = TwoMinimaResult::Status::none_detected;
    return result;
  }

  const std::size_t idx = *result.scan.detected_index;
  result.lambda = grid[idx];

  // Log-bisection toward the onset of multiplicity; the certified pair stays
  // at the detected grid point, where the two minimizers are well separated.
  result.onset_lambda = result.lambda;
  if (idx > 0) {
    double lo = grid[idx - 1], hi = grid[idx];
    for (int round = 0; round < 3; ++round) {
      const double mid = std::sqrt(lo * hi);
      LambdaReport row = scan_point(inst, mid, opts);
      if (row.detected)
        hi = mid;
      else
        lo = mid;
    }
    result.onset_lambda = hi;
  }

  const LambdaReport& hit = result.scan.entries[idx];
  result.first = hit.representatives[0];
  result.second = hit.representatives[1];
  result.cert_first = certify(result.first, inst, result.lambda);
  result.cert_second = certify(result.second, inst, result.lambda);
  result.status = (result.cert_first.passed && result.cert_second.passed)
                      ? TwoMinimaResult::Status::found
                      : TwoMinimaResult::Status::certification_failed;
  return result;
}

nlohmann::json two_minima_to_json(const TwoMinimaResult& result) {
  nlohmann::json j;
  j["status"] = to_string(result.status);
  j["scan"] = scan_to_json(result.scan);
  if (result.status == TwoMinimaResult::Status::unbounded_detected) {
    j["lambda"] = result.lambda;
    j["unbounded"] = verdict_to_json(result.unbounded);
    return j;
  }
  if (result.status == TwoMinimaResult::Status::none_detected) return j;
  j["lambda"] = result.lambda;
  j["onset_lambda"] = result.onset_lambda;
  j["first"] = {{"energy", result.first.energy.total(result.lambda)},
                {"certificate", certificate_json(result.cert_first)}};
  j["second"] = {{"energy", result.second.energy.total(result.lambda)},
                 {"certificate", certificate_json(result.cert_second)}};
  j["separation"] = path_distance(result.cert_first.finest.path,
                                  result.cert_second.finest.path);
  return j;
}

PlateauResult range_exclusion_driver(const ProblemInstance& inst,
                                     const MinimizeOptions& opts) {
  if (!inst.plateau_radius) {
    PlateauResult res;
    res.detail = "instance declares no flat radius for the perturbation";
    return res;
  }
  SampleSpec spec;
  spec.seed = opts.seed;
  if (!check_j1(inst, *inst.plateau_radius, spec).holds) {
    // Report the failed flatness check without spending the search budget.
    return range_exclusion_check(inst, TwoMinimaResult{}, opts.seed);
  }
  return range_exclusion_check(inst, find_two_minima(inst, opts), opts.seed);
}

PlateauResult range_exclusion_check(const ProblemInstance& inst,
                                    const TwoMinimaResult& two, std::uint64_t seed) {
  PlateauResult res;
  if (!inst.plateau_radius) {
    res.detail = "instance declares no flat radius for the perturbation";
    return res;
  }
  const double rho = *inst.plateau_radius;
  res.exclusion_radius = rho - inst.kinetic.L * inst.T;

  SampleSpec spec;
  spec.seed = seed;
  res.flatness = check_j1(inst, rho, spec);
  if (!res.flatness.holds) {
    res.detail = "flatness check failed at radius " + std::to_string(rho) + ": " +
                 res.flatness.detail;
    return res;
  }

  res.two = two;
  if (res.two.status != TwoMinimaResult::Status::found) {
    res.detail = std::string("two-minima search ended with status ") +
                 to_string(res.two.status);
    return res;
  }

  // Pick the certified minimizer whose range stays farthest outside the
  // excluded ball; with a symmetric perturbation both qualify.
  const Minimum* pick = nullptr;
  double best_margin = 0.0;
  for (const Minimum* cand :
       {&res.two.cert_first.finest, &res.two.cert_second.finest}) {
    double min_norm = kInf;
    for (int k = 0; k < cand->path.N(); ++k)
      min_norm = std::min(min_norm, cand->path.nodes.col(k).norm());
    if (min_norm > res.exclusion_radius && min_norm > best_margin) {
      best_margin = min_norm;
      pick = cand;
    }
  }
  if (!pick) {
    res.detail = "no certified global minimizer stays outside the excluded ball";
    return res;
  }
  res.minimizer = *pick;
  res.min_node_norm = best_margin;

  const EnergyBreakdown zero =
      eval_energy(inst, constant_path(Vec::Zero(inst.n), 8, inst.T));
  res.zero_gap = zero.total(res.two.lambda) - res.minimizer.energy.total(res.two.lambda);
  if (res.zero_gap <= 0.0) {
    res.detail = "zero path is not strictly worse than the minimizer";
    return res;
  }

  res.ok = true;
  res.detail = "ok";
  return res;
}

nlohmann::json plateau_to_json(const PlateauResult& result) {
  nlohmann::json j;
  j["ok"] = result.ok;
  j["detail"] = result.detail;
  j["exclusion_radius"] = result.exclusion_radius;
  j["min_node_norm"] = result.min_node_norm;
  j["zero_gap"] = result.zero_gap;
  j["flatness"] = verdict_to_json(result.flatness);
  j["two_minima"] = two_minima_to_json(result.two);
  return j;
}

}  // namespace relosc
