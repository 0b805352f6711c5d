#include "doctest.h"
#include "json.hpp"
#include "relosc/expression.hpp"
#include "relosc/model.hpp"
#include "relosc/sampling.hpp"

using namespace relosc;
using nlohmann::json;

namespace {

Vec fd_gradient(const ScalarField& f, const Vec& x) {
  const double step = 1e-6 * (1.0 + x.norm());
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    g(i) = (f.value(xp) - f.value(xm)) / (2.0 * step);
  }
  return g;
}

// the double-well-with-tail shape of the two-minima presets, spelled as JSON
json two_minima_expr() {
  return json::parse(R"({
    "op": "sub",
    "args": [
      {"op": "div", "args": [
        {"op": "pow", "arg": {"op": "sub", "args": [
          {"op": "sqnorm"}, {"op": "const", "value": 0.25}]}, "exponent": 2},
        {"op": "add", "args": [
          {"op": "const", "value": 1},
          {"op": "pow", "arg": {"op": "sqnorm"}, "exponent": 2}]}]},
      {"op": "tail3", "threshold": 2}
    ]})");
}

}  // namespace

TEST_SUITE("expression") {

TEST_CASE("leaf ops") {
  Vec x(2);
  x << 3.0, -4.0;
  CHECK(ScalarField::parse(json{{"op", "const"}, {"value", 2.5}}).value(x) == 2.5);
  CHECK(ScalarField::parse(json{{"op", "coord"}, {"index", 1}}).value(x) == -4.0);
  CHECK(ScalarField::parse(json{{"op", "norm"}}).value(x) == 5.0);
  CHECK(ScalarField::parse(json{{"op", "sqnorm"}}).value(x) == 25.0);
  const auto dot = ScalarField::parse(json{{"op", "dot"}, {"z", {2.0, 0.5}}});
  CHECK(dot.value(x) == 4.0);
  CHECK(dot.gradient(x)(0) == 2.0);
  CHECK(ScalarField::parse(json{{"op", "norm"}}).gradient(x)(1) == doctest::Approx(-0.8));
  CHECK(ScalarField::parse(json{{"op", "norm"}}).gradient(Vec::Zero(2)).norm() == 0.0);
}

TEST_CASE("composite expression matches the hand-coded preset perturbation") {
  const ScalarField f = ScalarField::parse(two_minima_expr());
  const ProblemInstance inst = preset("two-minima-symmetric", 2);
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Vec x = rng.ball_point(2, 4.0);
    CHECK(f.value(x) == doctest::Approx(inst.perturbation.G(x)).epsilon(1e-12));
    CHECK((f.gradient(x) - inst.perturbation.gradG(x)).norm() <= 1e-10);
  }
  CHECK(f.value(Vec::Zero(2)) == 0.0625);
}

TEST_CASE("gradients agree with finite differences") {
  const json specs[] = {
      two_minima_expr(),
      json::parse(R"({"op":"mul","args":[{"op":"coord","index":0},
                      {"op":"pow","arg":{"op":"sqnorm"},"exponent":1.5}]})"),
      json::parse(R"({"op":"neg","arg":{"op":"cube3","threshold":1.5}})"),
  };
  Rng rng(23);
  for (const auto& spec : specs) {
    const ScalarField f = ScalarField::parse(spec);
    for (int i = 0; i < 30; ++i) {
      const Vec x = rng.ball_point(3, 5.0);
      const Vec g = f.gradient(x);
      const Vec gn = fd_gradient(f, x);
      CHECK((g - gn).norm() <= 1e-5 * (1.0 + gn.norm()));
    }
  }
}

TEST_CASE("pow handles integer edge cases at zero") {
  const auto sq = ScalarField::parse(
      json::parse(R"({"op":"pow","arg":{"op":"coord","index":0},"exponent":2})"));
  CHECK(sq.value(Vec::Zero(1)) == 0.0);
  CHECK(sq.gradient(Vec::Zero(1))(0) == 0.0);
}

TEST_CASE("parse errors carry the offending op") {
  CHECK_THROWS_WITH_AS(ScalarField::parse(json::parse(R"({"op":"spline"})")),
                       doctest::Contains("unknown op"), std::invalid_argument);
  CHECK_THROWS_AS(ScalarField::parse(json::parse(R"({"op":"dot"})")), std::invalid_argument);
  CHECK_THROWS_AS(ScalarField::parse(json::parse(R"({"op":"sub","args":[{"op":"norm"}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScalarField::parse(json::parse(R"([1,2])")), std::invalid_argument);
}

TEST_CASE("runtime domain errors") {
  const auto div = ScalarField::parse(
      json::parse(R"({"op":"div","args":[{"op":"const","value":1},{"op":"coord","index":0}]})"));
  CHECK_THROWS_AS((void)div.value(Vec::Zero(1)), std::domain_error);
  const auto coord = ScalarField::parse(json::parse(R"({"op":"coord","index":5})"));
  CHECK_THROWS_AS((void)coord.value(Vec::Zero(2)), std::out_of_range);
}

}  // TEST_SUITE
