#pragma once

#include <limits>

#include <Eigen/Dense>

namespace daebvp
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double machine_epsilon = std::numeric_limits<double>::epsilon();

// blockdiag(top, bottom); either block may be empty.
inline Matrix block_diagonal(const Matrix &top, const Matrix &bottom)
{
    Matrix out = Matrix::Zero(top.rows() + bottom.rows(), top.cols() + bottom.cols());
    out.topLeftCorner(top.rows(), top.cols()) = top;
    out.bottomRightCorner(bottom.rows(), bottom.cols()) = bottom;
    return out;
}

} // namespace daebvp
