#pragma once

#include <Eigen/Dense>

namespace vocabflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace vocabflow
