#pragma once

#include <Eigen/Dense>

namespace kinlr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace kinlr
