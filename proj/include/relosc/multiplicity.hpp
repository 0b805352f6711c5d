#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "relosc/hypotheses.hpp"
#include "relosc/model.hpp"
#include "relosc/optimizer.hpp"
#include "relosc/verify.hpp"

namespace relosc {

/// Default logarithmic grid: 25 points from 1e-2 to 1e2 (index 12 is exactly 1).
std::vector<double> default_lambda_grid();

struct LambdaReport {
  double lambda = 0.0;
  double best_energy = 0.0;
  int n_global_clusters = 0;
  bool all_converged = true;
  bool detected = false;  // >= 2 distinct global minimizers at this lambda
  std::vector<Minimum> representatives;
};

struct ScanReport {
  std::vector<LambdaReport> entries;
  std::optional<double> detected_lambda;
  std::optional<std::size_t> detected_index;
  bool unbounded_evidence = false;  // a portfolio value fell below the abort level
};

/// Multistart + clustering at each grid point. With stop_on_detection the scan
/// ends at the first lambda carrying two distinct global minimizers.
ScanReport lambda_scan(const ProblemInstance& inst, const std::vector<double>& grid,
                       const MinimizeOptions& opts, bool stop_on_detection = false);

void write_scan_csv(std::ostream& out, const ScanReport& report);
nlohmann::json scan_to_json(const ScanReport& report);

/// Probes constant paths at growing radii; "verified" evidence means the
/// energy drops below -1e6, i.e. the functional is unbounded from below.
Verdict detect_unbounded(const ProblemInstance& inst, double lambda,
                         std::vector<double> radius_schedule = {});

struct TwoMinimaResult {
  enum class Status { found, none_detected, certification_failed, unbounded_detected };
  Status status = Status::none_detected;
  double lambda = 0.0;        // grid point of the first detection
  double onset_lambda = 0.0;  // bisection-refined estimate of the onset
  Minimum first, second;      // the two certified global minimizers (status found)
  Certificate cert_first, cert_second;
  ScanReport scan;
  Verdict unbounded;  // filled when status == unbounded_detected
};

const char* to_string(TwoMinimaResult::Status s);

/// Scans the default grid, stops at the first detection, bisects three rounds
/// toward the onset, and certifies the two global minimizers at the detected
/// grid point by grid refinement.
TwoMinimaResult find_two_minima(const ProblemInstance& inst, const MinimizeOptions& opts);

nlohmann::json two_minima_to_json(const TwoMinimaResult& result);

/// Range-exclusion driver for instances whose perturbation is flat on a ball
/// of radius plateau_radius: finds a certified global minimizer staying
/// outside the ball of radius plateau_radius - L*T and checks it strictly
/// beats the zero path.
struct PlateauResult {
  bool ok = false;
  std::string detail;
  TwoMinimaResult two;
  Minimum minimizer;
  double min_node_norm = 0.0;
  double exclusion_radius = 0.0;  // plateau_radius - L*T
  double zero_gap = 0.0;          // energy(zero path) - energy(minimizer), > 0 on success
  Verdict flatness;               // plateau flatness check at plateau_radius
};

PlateauResult range_exclusion_driver(const ProblemInstance& inst,
                                     const MinimizeOptions& opts);

/// Same check on an already-computed two-minima search result.
PlateauResult range_exclusion_check(const ProblemInstance& inst,
                                    const TwoMinimaResult& two, std::uint64_t seed);

nlohmann::json plateau_to_json(const PlateauResult& result);

}  // namespace relosc
