#include <cmath>

#include "doctest.h"
#include "relosc/functional.hpp"
#include "relosc/sampling.hpp"

using namespace relosc;

namespace {

double fd_total(const ProblemInstance& inst, const PeriodicPath& p, double lambda,
                int i, int k, double step) {
  PeriodicPath plus = p, minus = p;
  plus.nodes(i, k) += step;
  minus.nodes(i, k) -= step;
  return (eval_energy(inst, plus).total(lambda) - eval_energy(inst, minus).total(lambda)) /
         (2.0 * step);
}

}  // namespace

TEST_SUITE("functional") {

TEST_CASE("constant-path energies match closed forms") {
  const ProblemInstance tm = preset("two-minima-symmetric", 1);
  const auto e1 = eval_energy(tm, constant_path(Vec::Constant(1, 1.0), 20, 1.0));
  CHECK(e1.kinetic == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(e1.potential == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e1.perturbation == doctest::Approx(0.28125).epsilon(1e-14));

  const auto e0 = eval_energy(preset("example-3.2", 1), constant_path(Vec::Zero(1), 8, 1.0));
  CHECK(e0.psi_value() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(e0.j_value() == 0.0);

  const auto e33 =
      eval_energy(preset("example-3.3", 1), constant_path(Vec::Constant(1, 10.0), 16, 1.0));
  CHECK(e33.total(1.0) == doctest::Approx(-413.0).epsilon(1e-13));
}

TEST_CASE("total is affine in lambda and total(0) = psi") {
  EnergyBreakdown e;
  e.kinetic = -0.4;
  e.potential = 1.3;
  e.perturbation = 0.7;
  CHECK(e.total(0.0) == e.psi_value());
  const double l1 = 0.3, l2 = 1.9;
  const double mid = e.total(0.5 * (l1 + l2));
  CHECK(mid == doctest::Approx(0.5 * (e.total(l1) + e.total(l2))).epsilon(1e-15));
}

TEST_CASE("infeasible paths are rejected") {
  const ProblemInstance tm = preset("two-minima-symmetric", 1);
  PeriodicPath p;
  p.T = 1.0;
  p.nodes.resize(1, 4);
  p.nodes << 0.0, 0.5, 0.0, -0.5;  // speed 2 > L = 1
  CHECK_THROWS_AS(eval_energy(tm, p), std::domain_error);
  CHECK_THROWS_AS(path_gradient(tm, p, 1.0), std::domain_error);
}

TEST_CASE("gradient vanishes exactly at the shifted constant of the linear example") {
  const double lambda = 0.7;
  const ProblemInstance ex = preset("example-3.1", 1);
  const PeriodicPath p = constant_path(Vec::Constant(1, -lambda), 12, 1.0);
  CHECK(path_gradient(ex, p, lambda).norm() == 0.0);
}

TEST_CASE("gradient matches finite differences on random feasible paths") {
  for (const char* name : {"two-minima-symmetric", "example-3.3", "theorem-3.2"}) {
    for (int n : {1, 2}) {
      const ProblemInstance inst = preset(name, n);
      for (int N : {16, 64}) {
        const PeriodicPath p =
            random_feasible(n, N, inst.T, inst.kinetic.L, 0.2, 1000 + N + n);
        const double lambda = 1.3;
        const Mat g = path_gradient(inst, p, lambda);
        const double scale = 1.0 + p.nodes.cwiseAbs().maxCoeff();
        Rng pick(55);
        for (int probe = 0; probe < 12; ++probe) {
          const int i = static_cast<int>(pick.raw() % static_cast<std::uint64_t>(n));
          const int k = static_cast<int>(pick.raw() % static_cast<std::uint64_t>(N));
          const double fd = fd_total(inst, p, lambda, i, k, 1e-6 * scale);
          CHECK(std::abs(g(i, k) - fd) <= 1e-6 * (1.0 + std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("coercivity bound closed-form spot values") {
  const ProblemInstance tm = preset("two-minima-symmetric", 1);
  CHECK(coercivity_lower_bound(tm, 1.0, 0.0) == doctest::Approx(-2.1).epsilon(1e-14));
  // below LT the gamma term is clamped to gamma(0) = 0
  CHECK(coercivity_lower_bound(tm, 1.0, 0.3) == doctest::Approx(-2.43).epsilon(1e-14));
  CHECK_THROWS_AS(coercivity_lower_bound(tm, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(coercivity_lower_bound(tm, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("coercivity bound holds on random feasible paths") {
  const ProblemInstance tm = preset("two-minima-symmetric", 2);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    PeriodicPath p = random_feasible(2, 16, 1.0, 1.0, 0.4, 2000 + trial);
    p.nodes.colwise() += Vec(Vec::Constant(2, (trial % 7) - 3.0));  // move the path around
    const auto e = eval_energy(tm, p);
    const double S = p.nodes.colwise().norm().maxCoeff();
    for (double lambda : {0.1, 1.0, 10.0}) {
      const double lhs = e.j_value() + lambda * e.psi_value();
      CHECK(lhs >= coercivity_lower_bound(tm, lambda, S) - 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("sublevel radius closed forms") {
  const ProblemInstance tm = preset("two-minima-symmetric", 1);
  CHECK(sublevel_radius(tm, -0.875) == 1.5);  // the certificate radius of the witness pair
  CHECK(sublevel_radius(tm, -1.0) == 1.0);    // level Phi(0)T gives exactly LT
  CHECK_THROWS_AS(sublevel_radius(tm, -1.5), std::invalid_argument);
}

TEST_CASE("sublevel radius confines random paths") {
  const ProblemInstance tm = preset("two-minima-symmetric", 1);
  for (int trial = 0; trial < 50; ++trial) {
    PeriodicPath p = random_feasible(1, 24, 1.0, 1.0, 0.3, 3000 + trial);
    p.nodes.array() += 0.2 * (trial % 5);
    const double psi = eval_energy(tm, p).psi_value();
    const double S = p.nodes.colwise().norm().maxCoeff();
    CHECK(S <= sublevel_radius(tm, psi) + 1e-9);
  }
}

TEST_CASE("coercive radius confines sublevel paths of the lambda functional") {
  const ProblemInstance tm = preset("two-minima-symmetric", 1);
  const double lambda = 1.0;
  const double v = eval_energy(tm, constant_path(Vec::Zero(1), 8, 1.0)).total(lambda);
  const double R = coercive_radius(tm, lambda, v);
  CHECK(R > 1.0);
  CHECK(R < 1e4);
  // beyond R the lower bound exceeds the level
  CHECK(lambda * coercivity_lower_bound(tm, 1.0 / lambda, R + 1.0) > v);
  for (int trial = 0; trial < 50; ++trial) {
    PeriodicPath p = random_feasible(1, 16, 1.0, 1.0, 0.3, 4000 + trial);
    p.nodes.array() += 0.3 * (trial % 9) - 1.2;
    if (eval_energy(tm, p).total(lambda) <= v)
      CHECK(p.nodes.colwise().norm().maxCoeff() <= R + 1e-9);
  }
}

TEST_CASE("coercive radius reports zero for unreachable levels") {
  const ProblemInstance tm = preset("two-minima-symmetric", 1);
  CHECK(coercive_radius(tm, 1.0, -1e6) == 0.0);
}

TEST_CASE("energy json record carries all keys") {
  EnergyBreakdown e;
  e.kinetic = -1.0;
  e.potential = 0.5;
  e.perturbation = 0.25;
  const auto j = energy_to_json(e, 2.0);
  CHECK(j.at("kinetic").get<double>() == -1.0);
  CHECK(j.at("potential").get<double>() == 0.5);
  CHECK(j.at("perturbation").get<double>() == 0.25);
  CHECK(j.at("psi").get<double>() == -0.5);
  CHECK(j.at("j").get<double>() == 0.25);
  CHECK(j.at("lambda").get<double>() == 2.0);
  CHECK(j.at("total").get<double>() == 0.0);
}

}  // TEST_SUITE
