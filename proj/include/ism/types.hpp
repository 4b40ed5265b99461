#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ism {

/// n x d sample matrix, one sample per row.
using DataMatrix = Eigen::MatrixXd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense class or cluster ids, 0-based.
using Labels = std::vector<int>;

}  // namespace ism
