#include "relosc/wellposed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relosc/sampling.hpp"

namespace relosc {

ScalarizedProblem quadratic_lab() {
  ScalarizedProblem p;
  p.m = 2;
  p.J = [](const Vec& x) { return x[0]; };
  p.gradJ = [](const Vec& x) {
    Vec g = Vec::Zero(x.size());
    g[0] = 1.0;
    return g;
  };
  p.Psi = [](const Vec& x) { return x.squaredNorm(); };
  p.gradPsi = [](const Vec& x) { return Vec(2.0 * x); };
  p.a = 0.0;
  p.b = kInf;
  p.box_lo = Vec::Constant(2, -8.0);
  p.box_hi = Vec::Constant(2, 8.0);
  p.name = "quadratic-lab";
  return p;
}

ScalarizedProblem symmetric_control_lab() {
  ScalarizedProblem p = quadratic_lab();
  p.J = [](const Vec& x) { return -x[0] * x[0]; };
  p.gradJ = [](const Vec& x) {
    Vec g = Vec::Zero(x.size());
    g[0] = -2.0 * x[0];
    return g;
  };
  p.name = "symmetric-control";
  return p;
}

namespace {

Vec box_clamp(Vec x, const Vec& lo, const Vec& hi) {
  for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

bool touches_box(const Vec& x, const Vec& lo, const Vec& hi) {
  for (int i = 0; i < x.size(); ++i) {
    const double tol = 1e-9 * (1.0 + hi[i] - lo[i]);
    if (x[i] <= lo[i] + tol || x[i] >= hi[i] - tol) return true;
  }
  return false;
}

BoxMin descend_box(const std::function<double(const Vec&)>& f,
                   const std::function<Vec(const Vec&)>& grad, Vec x, const Vec& lo,
                   const Vec& hi, int max_iter = 5000) {
  x = box_clamp(std::move(x), lo, hi);
  double fx = f(x);
  double step = 0.1;
  for (int it = 0; it < max_iter; ++it) {
    const Vec g = grad(x);
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      Vec trial = box_clamp(x - step * g, lo, hi);
      const Vec move = trial - x;
      const double ft = f(trial);
      if (ft <= fx - (1e-4 / step) * move.squaredNorm()) {
        const double moved = move.norm();
        x = std::move(trial);
        fx = ft;
        accepted = true;
        step = std::min(step * 2.0, 1e6);
        if (moved <= 1e-13 * (1.0 + x.norm())) it = max_iter;  // converged
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  BoxMin out;
  out.value = fx;
  out.on_boundary = touches_box(x, lo, hi);
  out.x = std::move(x);
  return out;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13};

Vec halton_box_point(std::uint64_t k, const Vec& lo, const Vec& hi) {
  Vec x(lo.size());
  for (int i = 0; i < lo.size(); ++i)
    x[i] = lo[i] + (hi[i] - lo[i]) * halton(k + 1, kPrimes[i % 6]);
  return x;
}

}  // namespace

BoxMin minimize_scalarized(const ScalarizedProblem& prob, double lambda) {
  auto f = [&](const Vec& x) { return prob.J(x) + lambda * prob.Psi(x); };
  auto g = [&](const Vec& x) { return Vec(prob.gradJ(x) + lambda * prob.gradPsi(x)); };

  std::vector<Vec> starts;
  starts.push_back(0.5 * (prob.box_lo + prob.box_hi));
  for (std::uint64_t k = 0; k < 32; ++k)
    starts.push_back(halton_box_point(k, prob.box_lo, prob.box_hi));
  std::sort(starts.begin(), starts.end(),
            [&](const Vec& p, const Vec& q) { return f(p) < f(q); });

  BoxMin best;
  bool have = false;
  for (std::size_t i = 0; i < std::min<std::size_t>(starts.size(), 8); ++i) {
    BoxMin cand = descend_box(f, g, starts[i], prob.box_lo, prob.box_hi);
    if (!have || cand.value < best.value) {
      best = std::move(cand);
      have = true;
    }
  }
  return best;
}

AlphaBeta alpha_beta(const ScalarizedProblem& prob) {
  AlphaBeta out;
  const BoxMin psi_min = descend_box(prob.Psi, prob.gradPsi,
                                     0.5 * (prob.box_lo + prob.box_hi), prob.box_lo,
                                     prob.box_hi);
  out.inf_psi = psi_min.on_boundary ? -kInf : psi_min.value;

  auto neg_psi = [&](const Vec& x) { return -prob.Psi(x); };
  auto neg_grad = [&](const Vec& x) { return Vec(-prob.gradPsi(x)); };
  BoxMin psi_max;
  bool have = false;
  for (std::uint64_t k = 0; k < 16; ++k) {
    BoxMin cand = descend_box(neg_psi, neg_grad,
                              halton_box_point(k, prob.box_lo, prob.box_hi),
                              prob.box_lo, prob.box_hi);
    if (!have || cand.value < psi_max.value) {
      psi_max = std::move(cand);
      have = true;
    }
  }
  out.sup_psi = psi_max.on_boundary ? kInf : -psi_max.value;

  double inf_Ma_psi = kInf;  // infimum over an empty set
  if (std::isfinite(prob.a)) {
    BoxMin at_a = minimize_scalarized(prob, prob.a);
    if (!at_a.on_boundary) {
      inf_Ma_psi = prob.Psi(at_a.x);
      out.a_witness = at_a.x;
    }
  }
  double sup_Mb_psi = -kInf;  // supremum over an empty set
  if (std::isfinite(prob.b)) {
    BoxMin at_b = minimize_scalarized(prob, prob.b);
    if (!at_b.on_boundary) {
      sup_Mb_psi = prob.Psi(at_b.x);
      out.b_witness = at_b.x;
    }
  }
  out.alpha = std::max(out.inf_psi, sup_Mb_psi);
  out.beta = std::min(out.sup_psi, inf_Ma_psi);
  return out;
}

LevelResult level_minimize(const ScalarizedProblem& prob, double r, double tol) {
  LevelResult res;
  const AlphaBeta range = alpha_beta(prob);
  if (!(r > range.alpha && r < range.beta)) {
    res.status = LevelResult::Status::rejected;
    std::ostringstream os;
    os << "level " << r << " outside the admissible range ]" << range.alpha << ", "
       << range.beta << "[";
    res.detail = os.str();
    return res;
  }

  auto psi_at = [&](double lambda) {
    BoxMin m = minimize_scalarized(prob, lambda);
    return std::make_pair(prob.Psi(m.x), std::move(m));
  };

  // Bracket: Psi decreases along lambda, so walk the weight until the level
  // is straddled. Weights stay inside ]a, b[ by geometric approach.
  double lam0 = std::isfinite(prob.b) ? 0.5 * (prob.a + prob.b) : prob.a + 1.0;
  auto [psi0, m0] = psi_at(lam0);
  double lo = lam0, hi = lam0;
  Vec x_lo = m0.x, x_hi = m0.x;
  double psi_lo = psi0, psi_hi = psi0;
  if (psi0 > r) {
    lo = lam0;
    x_lo = m0.x;
    psi_lo = psi0;
    bool bracketed = false;
    for (int k = 1; k <= 200 && !bracketed; ++k) {
      hi = std::isfinite(prob.b) ? prob.b - (prob.b - lam0) / std::pow(2.0, k)
                                 : prob.a + (lam0 - prob.a) * std::pow(2.0, k);
      auto [p, m] = psi_at(hi);
      psi_hi = p;
      x_hi = m.x;
      bracketed = p <= r;
    }
    if (!bracketed) {
      res.status = LevelResult::Status::rejected;
      res.detail = "could not bracket the level from above";
      return res;
    }
  } else {
    hi = lam0;
    x_hi = m0.x;
    psi_hi = psi0;
    bool bracketed = false;
    for (int k = 1; k <= 200 && !bracketed; ++k) {
      lo = prob.a + (lam0 - prob.a) / std::pow(2.0, k);
      auto [p, m] = psi_at(lo);
      psi_lo = p;
      x_lo = m.x;
      bracketed = p >= r;
    }
    if (!bracketed) {
      res.status = LevelResult::Status::rejected;
      res.detail = "could not bracket the level from below";
      return res;
    }
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto [p, m] = psi_at(mid);
    if (std::abs(p - r) <= tol * (1.0 + std::abs(r))) {
      res.status = LevelResult::Status::ok;
      res.x_hat = m.x;
      res.lambda_hat = mid;
      res.psi_value = p;
      res.j_value = prob.J(m.x);
      res.detail = "ok";
      return res;
    }
    if (p > r) {
      lo = mid;
      x_lo = m.x;
      psi_lo = p;
    } else {
      hi = mid;
      x_hi = m.x;
      psi_hi = p;
    }
    if (hi - lo <= 1e-15 * (1.0 + std::abs(hi))) break;
  }

  res.status = LevelResult::Status::stalled;
  res.flank_lo = x_lo;
  res.flank_hi = x_hi;
  res.flank_lo_psi = psi_lo;
  res.flank_hi_psi = psi_hi;
  res.lambda_hat = 0.5 * (lo + hi);
  std::ostringstream os;
  os << "weight interval collapsed at " << res.lambda_hat << " with the level jumping "
     << psi_lo << " -> " << psi_hi << " across " << r;
  res.detail = os.str();
  return res;
}

ContinuityReport continuity_probe(const ScalarizedProblem& prob,
                                  const std::vector<double>& r_grid) {
  ContinuityReport rep;
  for (double r : r_grid) {
    LevelResult lr = level_minimize(prob, r);
    if (lr.status != LevelResult::Status::ok) {
      rep.discontinuity_flag = true;
      if (lr.status == LevelResult::Status::stalled) {
        lr.x_hat = lr.flank_hi;
        lr.j_value = prob.J(lr.flank_hi);
      } else {
        continue;  // rejected levels carry no row
      }
    }
    rep.r.push_back(r);
    rep.x_hat.push_back(lr.x_hat);
    rep.j_value.push_back(lr.j_value);
    rep.lambda_hat.push_back(lr.lambda_hat);
  }
  for (std::size_t i = 0; i + 1 < rep.r.size(); ++i) {
    const double dr = rep.r[i + 1] - rep.r[i];
    rep.x_jump_ratio.push_back((rep.x_hat[i + 1] - rep.x_hat[i]).norm() / dr);
    rep.j_jump_ratio.push_back(std::abs(rep.j_value[i + 1] - rep.j_value[i]) / dr);
  }
  if (!rep.x_jump_ratio.empty()) {
    std::vector<double> sorted = rep.x_jump_ratio;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (double ratio : rep.x_jump_ratio)
      if (ratio > 1e3 * std::max(median, 1e-12)) rep.discontinuity_flag = true;
  }
  return rep;
}

namespace {

// Point on the level set Psi = r along the ray through `dir`, assuming Psi
// increases along rays from the box center (star-shaped levels; holds for the
// laboratory problems).
Vec radial_root(const ScalarizedProblem& prob, const Vec& dir, double r) {
  double t_hi = 1.0;
  int guard = 0;
  while (prob.Psi(t_hi * dir) < r && guard++ < 100) t_hi *= 2.0;
  double t_lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    (prob.Psi(mid * dir) < r ? t_lo : t_hi) = mid;
  }
  return 0.5 * (t_lo + t_hi) * dir;
}

// Projected descent of J along the level set Psi = r; stops early once the
// value drops to `target` (pass -inf to run to stationarity).
Vec level_descend(const ScalarizedProblem& prob, double r, Vec x, double target,
                  int max_iter = 4000) {
  double step = 0.1;
  double jx = prob.J(x);
  for (int it = 0; it < max_iter && jx > target; ++it) {
    Vec gpsi = prob.gradPsi(x);
    const double gn = gpsi.norm();
    Vec tangent = prob.gradJ(x);
    if (gn > 1e-14) tangent -= (tangent.dot(gpsi) / (gn * gn)) * gpsi;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      Vec moved = x - step * tangent;
      if (moved.norm() <= 1e-12) {
        step *= 0.5;
        continue;
      }
      Vec trial = radial_root(prob, moved.normalized(), r);
      const double jt = prob.J(trial);
      if (jt < jx - (1e-4 / step) * (trial - x).squaredNorm()) {
        const double dist = (trial - x).norm();
        x = std::move(trial);
        jx = jt;
        accepted = true;
        step = std::min(step * 2.0, 1e4);
        if (dist <= 1e-13 * (1.0 + x.norm())) return x;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return x;
}

}  // namespace

WellposednessReport wellposedness_probe(const ScalarizedProblem& prob, double r,
                                        int trials, std::uint64_t seed) {
  WellposednessReport rep;

  // Level-set minimizer of J from spread starts.
  Vec best;
  double best_j = kInf;
  const int starts = 16;
  for (int k = 0; k < starts; ++k) {
    Vec dir = low_discrepancy_direction(prob.m, static_cast<std::uint64_t>(k));
    Vec x = level_descend(prob, r, radial_root(prob, dir, r), -kInf);
    const double j = prob.J(x);
    if (j < best_j) {
      best_j = j;
      best = x;
    }
  }
  rep.x_hat = best;
  rep.j_min = best_j;

  rep.eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  bool all_sampled = true;
  for (std::size_t ei = 0; ei < rep.eps.size(); ++ei) {
    const double eps = rep.eps[ei];
    const double target = best_j + eps;
    double worst = 0.0;
    int reached = 0;
    Rng rng(derive_seed(seed, 0xe5ULL * 1000 + ei));
    for (int k = 0; k < trials; ++k) {
      Vec dir = rng.sphere_point(prob.m, 1.0);
      Vec x = radial_root(prob, dir, r);
      x = level_descend(prob, r, std::move(x), target);
      if (prob.J(x) <= target) {
        ++reached;
        worst = std::max(worst, (x - rep.x_hat).norm());
      }
    }
    rep.max_dist.push_back(worst);
    if (reached == 0) all_sampled = false;
  }

  const double first = rep.max_dist.front();
  const double last = rep.max_dist.back();
  rep.well_posed_evidence = all_sampled && last <= 0.5 * first + 1e-9;
  std::ostringstream os;
  os << "near-optimal diameter by gap:";
  for (double d : rep.max_dist) os << ' ' << d;
  if (!all_sampled) os << "; some gaps drew no near-optimal samples";
  rep.detail = os.str();
  return rep;
}

nlohmann::json levelresult_to_json(const LevelResult& res) {
  nlohmann::json j;
  switch (res.status) {
    case LevelResult::Status::ok: j["status"] = "ok"; break;
    case LevelResult::Status::stalled: j["status"] = "stalled"; break;
    case LevelResult::Status::rejected: j["status"] = "rejected"; break;
  }
  j["detail"] = res.detail;
  if (res.status == LevelResult::Status::ok) {
    j["x_hat"] = std::vector<double>(res.x_hat.data(), res.x_hat.data() + res.x_hat.size());
    j["lambda_hat"] = res.lambda_hat;
    j["psi"] = res.psi_value;
    j["j"] = res.j_value;
  }
  if (res.status == LevelResult::Status::stalled) {
    j["lambda_hat"] = res.lambda_hat;
    j["flank_lo_psi"] = res.flank_lo_psi;
    j["flank_hi_psi"] = res.flank_hi_psi;
  }
  return j;
}

nlohmann::json wellposedness_to_json(const WellposednessReport& rep) {
  nlohmann::json j;
  j["eps"] = rep.eps;
  j["max_dist"] = rep.max_dist;
  j["well_posed_evidence"] = rep.well_posed_evidence;
  j["j_min"] = rep.j_min;
  j["detail"] = rep.detail;
  return j;
}

}  // namespace relosc
