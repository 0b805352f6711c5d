#pragma once

#include <Eigen/Dense>

#include <limits>

namespace relosc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sqr(double x) { return x * x; }

}  // namespace relosc
