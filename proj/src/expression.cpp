#include "relosc/expression.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "relosc/radial.hpp"

namespace relosc {

namespace {

enum class Op {
  kConst,
  kCoord,
  kNorm,
  kSqnorm,
  kDot,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPow,
  kTail3,
  kCube3,
};

struct Eval {
  double v = 0.0;
  Vec g;
};

}  // namespace

struct ScalarField::Node {
  Op op;
  double scalar = 0.0;  // const value, pow exponent, or tail threshold
  int index = 0;
  Vec z;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const ScalarField::Node>;

Eval evaluate(const ScalarField::Node& node, const Vec& x) {
  const auto n = x.size();
  auto zero = [n] { return Vec::Zero(n).eval(); };
  switch (node.op) {
    case Op::kConst:
      return {node.scalar, zero()};
    case Op::kCoord: {
      if (node.index < 0 || node.index >= n)
        throw std::out_of_range("scalar field: coord index out of range");
      Vec g = zero();
      g(node.index) = 1.0;
      return {x(node.index), g};
    }
    case Op::kNorm: {
      const double r = x.norm();
      if (r == 0.0) return {0.0, zero()};
      return {r, x / r};
    }
    case Op::kSqnorm:
      return {x.squaredNorm(), 2.0 * x};
    case Op::kDot: {
      if (node.z.size() != n)
        throw std::invalid_argument("scalar field: dot vector dimension mismatch");
      return {node.z.dot(x), node.z};
    }
    case Op::kAdd: {
      Eval acc{0.0, zero()};
      for (const auto& a : node.args) {
        Eval e = evaluate(*a, x);
        acc.v += e.v;
        acc.g += e.g;
      }
      return acc;
    }
    case Op::kMul: {
      Eval acc{1.0, zero()};
      for (const auto& a : node.args) {
        Eval e = evaluate(*a, x);
        acc.g = acc.v * e.g + e.v * acc.g;
        acc.v *= e.v;
      }
      return acc;
    }
    case Op::kSub: {
      Eval ea = evaluate(*node.args[0], x);
      Eval eb = evaluate(*node.args[1], x);
      return {ea.v - eb.v, ea.g - eb.g};
    }
    case Op::kDiv: {
      Eval ea = evaluate(*node.args[0], x);
      Eval eb = evaluate(*node.args[1], x);
      if (eb.v == 0.0) throw std::domain_error("scalar field: division by zero");
      return {ea.v / eb.v, (ea.g - (ea.v / eb.v) * eb.g) / eb.v};
    }
    case Op::kNeg: {
      Eval e = evaluate(*node.args[0], x);
      return {-e.v, -e.g};
    }
    case Op::kPow: {
      Eval e = evaluate(*node.args[0], x);
      const double k = node.scalar;
      const double v = std::pow(e.v, k);
      if (!std::isfinite(v)) throw std::domain_error("scalar field: pow out of domain");
      double slope;
      if (e.v == 0.0)
        slope = (k > 1.0) ? 0.0 : (k == 1.0 ? 1.0 : std::numeric_limits<double>::infinity());
      else
        slope = k * std::pow(e.v, k - 1.0);
      if (!std::isfinite(slope))
        throw std::domain_error("scalar field: pow gradient out of domain");
      return {v, slope * e.g};
    }
    case Op::kTail3: {
      const double r = x.norm();
      const double d = bounded_tail_deriv(r, node.scalar);
      Vec g = (r == 0.0 || d == 0.0) ? zero() : Vec((d / r) * x);
      return {bounded_tail(r, node.scalar), g};
    }
    case Op::kCube3: {
      const double r = x.norm();
      const double d = cubic_tail_deriv(r, node.scalar);
      Vec g = (r == 0.0 || d == 0.0) ? zero() : Vec((d / r) * x);
      return {cubic_tail(r, node.scalar), g};
    }
  }
  throw std::logic_error("scalar field: unhandled op");
}

NodePtr parse_node(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("op"))
    throw std::invalid_argument("scalar field: node must be an object with an \"op\" key");
  const std::string op = spec.at("op").get<std::string>();
  auto node = std::make_shared<ScalarField::Node>();

  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!spec.contains(key))
      throw std::invalid_argument("scalar field: op \"" + op + "\" needs key \"" + key + "\"");
    return spec.at(key);
  };
  auto child_list = [&](std::size_t min_count) {
    const auto& arr = need("args");
    if (!arr.is_array() || arr.size() < min_count)
      throw std::invalid_argument("scalar field: op \"" + op + "\" needs >= " +
                                  std::to_string(min_count) + " args");
    for (const auto& a : arr) node->args.push_back(parse_node(a));
  };

  if (op == "const") {
    node->op = Op::kConst;
    node->scalar = need("value").get<double>();
  } else if (op == "coord") {
    node->op = Op::kCoord;
    node->index = need("index").get<int>();
  } else if (op == "norm") {
    node->op = Op::kNorm;
  } else if (op == "sqnorm") {
    node->op = Op::kSqnorm;
  } else if (op == "dot") {
    node->op = Op::kDot;
    const auto& zs = need("z");
    if (!zs.is_array() || zs.empty())
      throw std::invalid_argument("scalar field: dot needs a nonempty \"z\" array");
    node->z.resize(static_cast<Eigen::Index>(zs.size()));
    for (std::size_t i = 0; i < zs.size(); ++i)
      node->z(static_cast<Eigen::Index>(i)) = zs[i].get<double>();
  } else if (op == "add") {
    node->op = Op::kAdd;
    child_list(1);
  } else if (op == "mul") {
    node->op = Op::kMul;
    child_list(1);
  } else if (op == "sub") {
    node->op = Op::kSub;
    child_list(2);
    if (node->args.size() != 2)
      throw std::invalid_argument("scalar field: sub takes exactly 2 args");
  } else if (op == "div") {
    node->op = Op::kDiv;
    child_list(2);
    if (node->args.size() != 2)
      throw std::invalid_argument("scalar field: div takes exactly 2 args");
  } else if (op == "neg") {
    node->op = Op::kNeg;
    node->args.push_back(parse_node(need("arg")));
  } else if (op == "pow") {
    node->op = Op::kPow;
    node->args.push_back(parse_node(need("arg")));
    node->scalar = need("exponent").get<double>();
  } else if (op == "tail3") {
    node->op = Op::kTail3;
    node->scalar = need("threshold").get<double>();
  } else if (op == "cube3") {
    node->op = Op::kCube3;
    node->scalar = need("threshold").get<double>();
  } else {
    throw std::invalid_argument("scalar field: unknown op \"" + op + "\"");
  }
  return node;
}

}  // namespace

double ScalarField::value(const Vec& x) const {
  if (!root_) throw std::logic_error("scalar field: empty expression");
  return evaluate(*root_, x).v;
}

Vec ScalarField::gradient(const Vec& x) const {
  if (!root_) throw std::logic_error("scalar field: empty expression");
  return evaluate(*root_, x).g;
}

ScalarField ScalarField::parse(const nlohmann::json& spec) {
  return ScalarField(parse_node(spec));
}

}  // namespace relosc
