#pragma once

#include <Eigen/Dense>

namespace kahlerlab {

/// Largest complex dimension handled anywhere in the library.
inline constexpr int kMaxDim = 3;

/// Small fixed-capacity vectors and matrices for per-node geometry; these never allocate.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace kahlerlab
