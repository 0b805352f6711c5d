#include "relosc/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relosc/expression.hpp"

namespace relosc {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("instance description: " + what);
}

double number_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

Vec vec_from_json(const nlohmann::json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(std::string(what) + " must be an array of length " + std::to_string(n));
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) fail(std::string(what) + " entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

struct ForcingTerm {
  Vec amplitude;
  double harmonic = 1.0;
  double phase = 0.0;
};

Potential build_potential(const nlohmann::json& j, int n, double T) {
  if (!j.is_object()) fail("potential must be an object");
  const std::string family = j.value("family", "power");
  if (family != "power") fail("unknown potential family '" + family + "'");
  const double p = number_or(j, "p", 2.0);
  const double mu = number_or(j, "mu", 1.0);
  if (p <= 1.0) fail("potential exponent p must exceed 1");
  if (mu <= 0.0) fail("potential coefficient mu must be positive");
  if (!j.contains("omega")) return power_potential(p, mu);

  const auto& om = j.at("omega");
  if (!om.is_array()) fail("omega must be an array of forcing terms");
  std::vector<ForcingTerm> terms;
  for (const auto& t : om) {
    ForcingTerm term;
    if (!t.contains("amplitude")) fail("forcing term needs an amplitude");
    term.amplitude = vec_from_json(t.at("amplitude"), n, "forcing amplitude");
    term.harmonic = number_or(t, "harmonic", 1.0);
    term.phase = number_or(t, "phase", 0.0);
    terms.push_back(std::move(term));
  }
  auto omega = [terms = std::move(terms), T](double t) {
    Vec w = Vec::Zero(terms.front().amplitude.size());
    for (const auto& term : terms)
      w += term.amplitude *
           std::cos(2.0 * std::numbers::pi * term.harmonic * t / T + term.phase);
    return w;
  };
  return power_potential(p, mu, std::move(omega));
}

GrowthBound build_growth(const nlohmann::json& j) {
  if (!j.is_object()) fail("growth must be an object");
  const std::string family = j.value("family", "power");
  if (family != "power") fail("unknown growth family '" + family + "'");
  const double p = number_or(j, "p", 2.0);
  const double coef = number_or(j, "coef", 0.5);
  if (p <= 1.0) fail("growth exponent p must exceed 1");
  if (coef <= 0.0) fail("growth coefficient must be positive");
  return power_growth(p, coef);
}

Perturbation build_perturbation(const nlohmann::json& j) {
  if (!j.is_object()) fail("perturbation must be an object");
  Perturbation pert;
  pert.delta_bound = number_or(j, "delta", 0.0);
  if (pert.delta_bound < 0.0) fail("delta must be nonnegative");
  const std::string attained = j.value("global_min_attained", "unknown");
  if (attained == "yes")
    pert.min_attained = Perturbation::MinAttained::yes;
  else if (attained == "no")
    pert.min_attained = Perturbation::MinAttained::no;
  else if (attained == "unknown")
    pert.min_attained = Perturbation::MinAttained::unknown;
  else
    fail("global_min_attained must be yes, no or unknown");

  if (!j.contains("expression") || j.at("expression").is_null()) {
    pert.G = [](const Vec&) { return 0.0; };
    pert.gradG = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    return pert;
  }
  ScalarField field = ScalarField::parse(j.at("expression"));
  pert.G = [field](const Vec& x) { return field.value(x); };
  pert.gradG = [field](const Vec& x) { return field.gradient(x); };
  return pert;
}

Weight build_weight(const nlohmann::json& j, double T) {
  if (!j.is_object()) fail("weight must be an object");
  const std::string family = j.value("family", "constant");
  if (family == "constant") {
    const double value = number_or(j, "value", 1.0);
    if (value < 0.0) fail("weight must be nonnegative");
    return constant_weight(value, T);
  }
  if (family == "table") {
    if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty())
      fail("table weight needs a nonempty values array");
    std::vector<double> values;
    for (const auto& v : j.at("values")) {
      if (!v.is_number()) fail("table weight values must be numbers");
      values.push_back(v.get<double>());
      if (values.back() < 0.0) fail("weight must be nonnegative");
    }
    return table_weight(std::move(values), T);
  }
  fail("unknown weight family '" + family + "'");
}

}  // namespace

ProblemInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail("top level must be an object");

  if (j.contains("preset")) {
    if (!j.at("preset").is_string()) fail("preset must be a string");
    const int n = static_cast<int>(number_or(j, "n", 1.0));
    try {
      return preset(j.at("preset").get<std::string>(), n);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  const int n = static_cast<int>(number_or(j, "n", 1.0));
  if (n < 1) fail("dimension n must be at least 1");
  const double T = number_or(j, "T", 1.0);
  if (T <= 0.0) fail("period T must be positive");

  ProblemInstance inst;
  inst.n = n;
  inst.T = T;

  if (j.contains("kinetic")) {
    const auto& k = j.at("kinetic");
    if (!k.is_object()) fail("kinetic must be an object");
    const std::string family = k.value("family", "relativistic");
    if (family != "relativistic") fail("unknown kinetic family '" + family + "'");
    const double L = number_or(k, "L", 1.0);
    if (L <= 0.0) fail("speed bound L must be positive");
    inst.kinetic = relativistic_kinetic(L);
  } else {
    inst.kinetic = relativistic_kinetic(1.0);
  }

  inst.potential = j.contains("potential") ? build_potential(j.at("potential"), n, T)
                                           : power_potential(2.0, 1.0);
  inst.growth = j.contains("growth") ? build_growth(j.at("growth"))
                                     : power_growth(2.0, 0.5);
  if (j.contains("perturbation")) {
    inst.perturbation = build_perturbation(j.at("perturbation"));
  } else {
    inst.perturbation.G = [](const Vec&) { return 0.0; };
    inst.perturbation.gradG = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    inst.perturbation.delta_bound = 0.0;
  }
  inst.weight = j.contains("weight") ? build_weight(j.at("weight"), T)
                                     : constant_weight(1.0, T);

  if (j.contains("plateau_radius")) {
    const double rho = number_or(j, "plateau_radius", 0.0);
    if (rho <= 0.0) fail("plateau_radius must be positive");
    inst.plateau_radius = rho;
  }
  if (j.contains("witness")) {
    const auto& w = j.at("witness");
    if (!w.is_array() || w.size() != 2) fail("witness must be a pair of points");
    inst.witness_pair = std::make_pair(vec_from_json(w[0], n, "witness point"),
                                       vec_from_json(w[1], n, "witness point"));
  }
  inst.name = j.value("name", "composed");
  return inst;
}

ProblemInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail("parse error in '" + path + "': " + e.what());
  }
  return instance_from_json(j);
}

}  // namespace relosc
