#pragma once

#include <Eigen/Core>

namespace sparsepred {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ArrayXd = ArrayX<double>;
using VectorXd = VectorX<double>;

}  // namespace sparsepred
