#pragma once

#include <vector>

#include "dm2l/types.hpp"

namespace dm2l {

enum class KernelKind { Linear, Gaussian };

struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    double sigma = 1.0;  // Gaussian width; ignored for Linear
};

struct GramMatrix {
    Matrix values;  // n x n, symmetric
    KernelSpec spec;
};

// Linear: X X^T.  Gaussian: K(i,j) = exp(-|x_i - x_j|^2 / (2 sigma^2)).
GramMatrix gram_matrix(const Matrix& X, const KernelSpec& spec);

// kappa(x_test_i, x_train_j) for all pairs; m x n.
Matrix cross_kernel(const Matrix& X_test, const Matrix& X_train,
                    const KernelSpec& spec);

// Row submatrix M[group, :] in the given order.
Matrix group_rows(const Matrix& M, const std::vector<Index>& group);

}  // namespace dm2l
