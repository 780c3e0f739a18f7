#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgeom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Chart coordinates of a point in a manifold model.
using ChartPoint = Vec;

// Rank-3 array A[k](i,j), outer index = last (derivative) slot.
using Tensor3 = std::vector<Mat>;
// Rank-4 array A[l][k](i,j).
using Tensor4 = std::vector<Tensor3>;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Tensor3 zero_tensor3(int n) { return Tensor3(n, Mat::Zero(n, n)); }
inline Tensor4 zero_tensor4(int n) { return Tensor4(n, zero_tensor3(n)); }

}  // namespace wgeom
