#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "relosc/model.hpp"
#include "relosc/types.hpp"

namespace relosc {

/// Evidence-graded outcome of a structural check. `holds` is the bottom line;
/// `status` says how it was reached: verified_on_samples (finite evidence
/// supports it), falsified (a reproducible counterexample is attached), or
/// declared (not finitely decidable, the author's declaration is recorded).
struct Verdict {
  enum class Status { verified_on_samples, falsified, declared };
  Status status = Status::declared;
  bool holds = false;
  std::optional<Vec> witness_x;
  std::optional<double> witness_t;
  std::optional<double> witness_value;
  std::string detail;
};

std::string to_string(Verdict::Status s);
nlohmann::json verdict_to_json(const Verdict& v);

/// Sampling plan shared by the pointwise checks.
struct SampleSpec {
  int count = 2000;
  double radius = 10.0;
  std::uint64_t seed = 0;
};

/// Certificate data for the two-point ball-minimum condition.
struct I4Certificate {
  Vec x1, x2;
  double c = 0.0;            // LT + gamma_inv((1/T) max of the two F integrals)
  double inf_F_ball = 0.0;   // estimated global infimum of x -> integral of F
  double G_at_points = 0.0;  // common value G(x1) = G(x2)
  double inf_G_ball = 0.0;   // estimated infimum of G over the ball of radius c
  double strict_gap = 0.0;   // max{int F(x1), int F(x2)} - inf_F_ball
};

nlohmann::json certificate_to_json(const I4Certificate& cert);

/// Superlinear floor: gamma(|x|) <= F(t,x) + 1e-12 on sampled (t,x).
Verdict check_i1(const ProblemInstance& inst, const SampleSpec& spec);

/// Linear lower bound at infinity: sphere minima of G(x)/|x| along a radius
/// schedule must stay above the declared -delta; a sustained superlinear drop
/// across successive radii falsifies.
Verdict check_i2(const ProblemInstance& inst, std::vector<double> radii = {});

/// Non-attainment of inf G. Never falsifiable by finitely many samples:
/// escape evidence (values outside the search ball beating the ball minimum)
/// yields verified_on_samples, otherwise the author's declaration is recorded.
Verdict check_i3(const ProblemInstance& inst, double search_radius = 0.0,
                 int budget = 0, std::uint64_t seed = 0);

/// Two-point ball-minimum condition at radius c, plus the strict gap
/// inf integral-F < max over the two points.
std::pair<I4Certificate, Verdict> check_i4(const ProblemInstance& inst, const Vec& x1,
                                           const Vec& x2, std::uint64_t seed = 0);

/// Plateau condition: rho > LT and G constant (value and gradient) on the
/// closed ball of radius rho.
Verdict check_j1(const ProblemInstance& inst, double rho, const SampleSpec& spec);

/// Runs every applicable check and assembles a JSON report; `failing` in the
/// report lists the labels of checks whose verdict does not hold.
nlohmann::json check_all(const ProblemInstance& inst, std::uint64_t seed = 0);

/// Sampled plus descent-refined minimization of f over the closed ball.
/// Budget counts sample evaluations; the best few samples are polished by
/// projected gradient descent to tolerance 1e-9.
std::pair<Vec, double> minimize_in_ball(const std::function<double(const Vec&)>& f,
                                        const std::function<Vec(const Vec&)>& grad,
                                        int n, double radius, int budget,
                                        std::uint64_t seed);

}  // namespace relosc
