#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relosc/types.hpp"

namespace relosc {

/// Finite-dimensional laboratory for the level-constrained scalarization: two
/// objectives J and Psi on a box (a proxy for the whole space; an optimum on
/// the box boundary is read as attainment at infinity).
struct ScalarizedProblem {
  int m = 2;
  std::function<double(const Vec&)> J;
  std::function<Vec(const Vec&)> gradJ;
  std::function<double(const Vec&)> Psi;
  std::function<Vec(const Vec&)> gradPsi;
  double a = 0.0;   // scalarization weights range over ]a, b[
  double b = kInf;
  Vec box_lo, box_hi;
  std::string name;
};

/// J = x_1, Psi = |x|^2 on [-8,8]^2: the well-posed reference case.
ScalarizedProblem quadratic_lab();

/// J = -x_1^2, Psi = |x|^2 on [-8,8]^2: symmetric minimizers, levels jump.
ScalarizedProblem symmetric_control_lab();

struct BoxMin {
  Vec x;
  double value = 0.0;
  bool on_boundary = false;
};

/// Multistart box-projected descent of J + lambda * Psi.
BoxMin minimize_scalarized(const ScalarizedProblem& prob, double lambda);

/// Feasible range of the level parameter. Conventions: an infimum or supremum
/// attained on the box boundary is treated as unbounded (+/- infinity), the
/// supremum over an empty set is -infinity, the infimum +infinity.
struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
  double inf_psi = 0.0;
  double sup_psi = 0.0;
  std::optional<Vec> a_witness;  // minimizer of J + a*Psi, when interior
  std::optional<Vec> b_witness;  // minimizer of J + b*Psi, when b finite and interior
};

AlphaBeta alpha_beta(const ScalarizedProblem& prob);

/// Minimizes J subject to Psi = r by bisecting the scalarization weight,
/// using that Psi along the scalarized minimizers decreases in lambda.
struct LevelResult {
  enum class Status { ok, stalled, rejected };
  Status status = Status::rejected;
  Vec x_hat;
  double lambda_hat = 0.0;
  double psi_value = 0.0;
  double j_value = 0.0;
  // On a stall the weight interval collapsed while Psi jumped across r;
  // the two flanking minimizers document the jump.
  Vec flank_lo, flank_hi;
  double flank_lo_psi = 0.0, flank_hi_psi = 0.0;
  std::string detail;
};

LevelResult level_minimize(const ScalarizedProblem& prob, double r, double tol = 1e-8);

struct ContinuityReport {
  std::vector<double> r;
  std::vector<Vec> x_hat;
  std::vector<double> j_value;
  std::vector<double> lambda_hat;
  std::vector<double> x_jump_ratio;  // |x(r_{i+1}) - x(r_i)| / (r_{i+1} - r_i)
  std::vector<double> j_jump_ratio;
  bool discontinuity_flag = false;
};

ContinuityReport continuity_probe(const ScalarizedProblem& prob,
                                  const std::vector<double>& r_grid);

/// Samples near-optimal points of J on the level set Psi = r at shrinking
/// optimality gaps; well-posedness evidence means the near-optimal set
/// collapses onto the minimizer as the gap goes to zero.
struct WellposednessReport {
  std::vector<double> eps;
  std::vector<double> max_dist;  // sup distance to the minimizer at each gap
  bool well_posed_evidence = false;
  Vec x_hat;
  double j_min = 0.0;
  std::string detail;
};

WellposednessReport wellposedness_probe(const ScalarizedProblem& prob, double r,
                                        int trials = 200, std::uint64_t seed = 0);

nlohmann::json levelresult_to_json(const LevelResult& res);
nlohmann::json wellposedness_to_json(const WellposednessReport& rep);

}  // namespace relosc
