#pragma once

#include <Eigen/Dense>

namespace slnlap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<int>;

}  // namespace slnlap
