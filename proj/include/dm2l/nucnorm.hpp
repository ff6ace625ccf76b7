#pragma once

#include "dm2l/types.hpp"

namespace dm2l {

// Threshold below which singular values are dropped from the subgradient.
inline constexpr double kDefaultDelta = 0.005;

// Sum of singular values.
double nuclear_norm(const Matrix& M);

struct SubgradientResult {
    Matrix G;             // U1 * V1^T, spectral norm <= 1
    Index retained = 0;   // number of singular values above the threshold
    double threshold = kDefaultDelta;
};

// Thresholded-SVD subgradient of the nuclear norm: keep the singular vector
// pairs whose singular value exceeds delta.
SubgradientResult nuclear_norm_subgradient(const Matrix& M, double delta);

}  // namespace dm2l
