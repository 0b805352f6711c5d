#pragma once

#include <string>

#include "json.hpp"
#include "relosc/model.hpp"

namespace relosc {

/// Builds a ProblemInstance from its JSON description. Two forms:
///
///   {"preset": "two-minima-symmetric", "n": 1}
///
/// or a composed instance (every section optional, defaults in brackets):
///
///   {
///     "n": 1,                     // dimension [1]
///     "T": 1.0,                   // period [1.0]
///     "kinetic":      {"family": "relativistic", "L": 1.0},
///     "potential":    {"family": "power", "p": 2.0, "mu": 1.0,
///                      "omega": [{"amplitude": [0.3], "harmonic": 1, "phase": 0.0}]},
///     "growth":       {"family": "power", "p": 2.0, "coef": 0.5},
///     "perturbation": {"expression": <scalar-field JSON>, "delta": 1.1,
///                      "global_min_attained": "yes" | "no" | "unknown"},
///     "weight":       {"family": "constant", "value": 1.0}
///                   | {"family": "table", "values": [1.0, 2.0, ...]},
///     "plateau_radius": 0.8,      // optional flat radius of the perturbation
///     "witness": [[0.5], [-0.5]], // optional two-point ball-minimum candidate
///     "name": "my-instance"
///   }
///
/// The scalar-field grammar is documented in relosc/expression.hpp. `omega`
/// adds a periodic forcing sum_k amplitude_k * cos(2*pi*harmonic_k*t/T + phase_k)
/// to the potential gradient's time dependence.
ProblemInstance instance_from_json(const nlohmann::json& j);

ProblemInstance load_instance_file(const std::string& path);

}  // namespace relosc
