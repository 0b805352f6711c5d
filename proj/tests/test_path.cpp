#include <cmath>
#include <sstream>

#include "doctest.h"
#include "relosc/path.hpp"
#include "relosc/sampling.hpp"

using namespace relosc;

namespace {

PeriodicPath sine_path(int n, int N, double T, double amp) {
  PeriodicPath p;
  p.T = T;
  p.nodes.resize(n, N);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < n; ++i)
      p.nodes(i, k) = amp * std::sin(2.0 * M_PI * (k + i) / N);
  return p;
}

}  // namespace

TEST_SUITE("path") {

TEST_CASE("increments wrap and sum to zero") {
  const PeriodicPath p = sine_path(2, 16, 1.0, 0.3);
  const Mat d = p.increments();
  CHECK(d.cols() == 16);
  CHECK(d.rowwise().sum().norm() <= 1e-14);
  CHECK((d.col(15) - (p.nodes.col(0) - p.nodes.col(15))).norm() == 0.0);
}

TEST_CASE("piecewise-linear evaluation with periodic wrap") {
  PeriodicPath p;
  p.T = 1.0;
  p.nodes.resize(1, 2);
  p.nodes << 0.0, 1.0;
  CHECK(p.value_at(0.25)(0) == 0.5);
  CHECK(p.value_at(0.75)(0) == 0.5);  // descending wrap segment
  CHECK(p.value_at(0.0)(0) == 0.0);
  CHECK(p.value_at(-0.5)(0) == 1.0);
  CHECK(p.value_at(17.5)(0) == 1.0);
}

TEST_CASE("constant path basics") {
  const PeriodicPath p = constant_path(Vec::Constant(3, 2.0), 8, 2.0);
  CHECK(p.N() == 8);
  CHECK(p.dim() == 3);
  CHECK(p.h() == 0.25);
  CHECK(p.max_speed() == 0.0);
  CHECK((p.value_at(0.37) - Vec::Constant(3, 2.0)).norm() == 0.0);
  CHECK_THROWS_AS(constant_path(Vec::Zero(1), 1, 1.0), std::invalid_argument);
}

TEST_CASE("resample lands on original breakpoints") {
  const PeriodicPath p = sine_path(1, 8, 1.0, 1.0);
  const PeriodicPath fine = resample(p, 32);
  const PeriodicPath back = resample(fine, 8);
  CHECK((back.nodes - p.nodes).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("feasibility threshold") {
  PeriodicPath p;
  p.T = 1.0;
  p.nodes.resize(1, 4);
  p.nodes << 0.0, 0.2, 0.0, -0.2;  // speeds 0.8
  CHECK(feasible(p, 1.0));
  CHECK(feasible(p, 1.0, 0.1));
  CHECK_FALSE(feasible(p, 1.0, 0.25));
  CHECK_FALSE(feasible(p, 0.5));
}

TEST_CASE("projection short-circuits on feasible input") {
  const PeriodicPath p = sine_path(2, 16, 1.0, 0.01);
  const auto res = project_feasible(p.nodes, 1.0, 1.0);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK((res.path.nodes - p.nodes).norm() == 0.0);
}

TEST_CASE("projection of a two-node overshoot has a closed form") {
  Mat raw(1, 2);
  raw << -1.5, 1.5;  // increments (3, -3), cap L*h = 0.5
  const auto res = project_feasible(raw, 1.0, 1.0, 0.0);
  CHECK(res.converged);
  CHECK(res.path.nodes(0, 0) == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(res.path.nodes(0, 1) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("projection output is feasible, zero-sum, mean-preserving") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3;
    const int N = 8 + 4 * trial;
    Mat raw(n, N);
    for (int k = 0; k < N; ++k) raw.col(k) = rng.ball_point(n, 3.0);
    const auto res = project_feasible(raw, 1.0, 1.0);
    CHECK(res.converged);
    CHECK(feasible(res.path, 1.0, 1e-6));
    CHECK(res.path.increments().rowwise().sum().norm() <= 1e-10);
    CHECK((res.path.mean() - raw.rowwise().mean()).norm() <= 1e-10);
  }
}

TEST_CASE("projection is no farther than any feasible competitor") {
  Rng rng(9);
  const int n = 2, N = 12;
  Mat raw(n, N);
  for (int k = 0; k < N; ++k) raw.col(k) = rng.ball_point(n, 2.0);
  const auto res = project_feasible(raw, 1.0, 1.0);
  PeriodicPath rawp;
  rawp.T = 1.0;
  rawp.nodes = raw;
  const double proj_dist = (res.path.increments() - rawp.increments()).norm();
  for (int trial = 0; trial < 20; ++trial) {
    const PeriodicPath cand = random_feasible(n, N, 1.0, 1.0, 0.3, 100 + trial);
    const double cand_dist = (cand.increments() - rawp.increments()).norm();
    CHECK(proj_dist <= cand_dist + 1e-8);
  }
}

TEST_CASE("random_feasible is deterministic and feasible") {
  const PeriodicPath a = random_feasible(2, 32, 1.0, 1.0, 0.5, 77);
  const PeriodicPath b = random_feasible(2, 32, 1.0, 1.0, 0.5, 77);
  const PeriodicPath c = random_feasible(2, 32, 1.0, 1.0, 0.5, 78);
  CHECK((a.nodes - b.nodes).norm() == 0.0);
  CHECK((a.nodes - c.nodes).norm() > 0.0);
  CHECK(feasible(a, 1.0, 1e-6));
  CHECK(a.N() == 32);
  CHECK(a.dim() == 2);
}

TEST_CASE("random_feasible perturbs around a base path") {
  const PeriodicPath base = constant_path(Vec::Constant(1, 5.0), 16, 1.0);
  const PeriodicPath p = random_feasible(1, 16, 1.0, 1.0, 0.05, 3, base);
  CHECK((p.mean() - base.mean()).norm() <= 0.2);
  CHECK(path_distance(p, base) > 0.0);
}

TEST_CASE("path distance between constants and sines") {
  const PeriodicPath x = constant_path(Vec::Constant(1, 1.0), 8, 1.0);
  const PeriodicPath y = constant_path(Vec::Constant(1, -2.0), 16, 1.0);
  CHECK(path_distance(x, y) == 3.0);
  CHECK(path_distance(x, x) == 0.0);
  const PeriodicPath s = sine_path(1, 8, 1.0, 0.7);
  const PeriodicPath z = constant_path(Vec::Zero(1), 8, 1.0);
  CHECK(path_distance(s, z) == doctest::Approx(0.7));
  PeriodicPath other_T = x;
  other_T.T = 2.0;
  CHECK_THROWS_AS(path_distance(x, other_T), std::invalid_argument);
}

TEST_CASE("csv round trip preserves nodes and period") {
  const PeriodicPath p = sine_path(3, 10, 2.5, 1.2);
  std::stringstream ss;
  write_path_csv(ss, p);
  const std::string text = ss.str();
  CHECK(text.rfind("t,u_1,u_2,u_3\n", 0) == 0);
  std::stringstream in(text);
  const PeriodicPath q = read_path_csv(in);
  CHECK(q.N() == 10);
  CHECK(q.dim() == 3);
  CHECK(q.T == doctest::Approx(2.5).epsilon(1e-14));
  CHECK((q.nodes - p.nodes).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("csv rejects malformed input") {
  std::stringstream bad_header("time,x\n0,1\n0.5,2\n");
  CHECK_THROWS_AS(read_path_csv(bad_header), std::runtime_error);
  std::stringstream ragged("t,u_1\n0,1\n0.5\n");
  CHECK_THROWS_AS(read_path_csv(ragged), std::runtime_error);
  std::stringstream nonuniform("t,u_1\n0,1\n0.5,2\n0.7,3\n");
  CHECK_THROWS_AS(read_path_csv(nonuniform), std::runtime_error);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_path_csv(empty), std::runtime_error);
}

}  // TEST_SUITE
