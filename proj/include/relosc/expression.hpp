#pragma once

#include <memory>
#include <string>

#include "json.hpp"
#include "relosc/types.hpp"

namespace relosc {

// Small closed-form scalar fields R^n -> R with exact gradients, built from a
// JSON description. Used to define perturbation shapes in instance files.
//
// Grammar (each node is an object with an "op" key):
//   {"op":"const","value":c}
//   {"op":"coord","index":i}            x_i, zero-based
//   {"op":"norm"}                       |x|
//   {"op":"sqnorm"}                     |x|^2
//   {"op":"dot","z":[...]}              <z,x>
//   {"op":"add","args":[...]}           also "mul" with >= 1 operands
//   {"op":"sub","args":[a,b]}           also "div"
//   {"op":"neg","arg":a}
//   {"op":"pow","arg":a,"exponent":k}
//   {"op":"tail3","threshold":t}        (|x|-t)^3/(1+(|x|-t)^2) past t, else 0
//   {"op":"cube3","threshold":t}        (|x|-t)^3 past t, else 0
class ScalarField {
 public:
  struct Node;

  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  bool empty() const { return root_ == nullptr; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;

  static ScalarField parse(const nlohmann::json& spec);

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace relosc
