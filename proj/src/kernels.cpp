#include "dm2l/kernels.hpp"

namespace dm2l {

Matrix cross_kernel(const Matrix& X_test, const Matrix& X_train,
                    const KernelSpec& spec) {
    if (X_test.cols() != X_train.cols()) {
        throw Error("cross_kernel: feature dimensions differ");
    }
    if (!X_test.allFinite() || !X_train.allFinite()) {
        throw Error("cross_kernel: non-finite feature values");
    }
    if (spec.kind == KernelKind::Linear) {
        return X_test * X_train.transpose();
    }
    if (spec.sigma <= 0.0) {
        throw Error("cross_kernel: Gaussian sigma must be positive");
    }
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    Matrix K(X_test.rows(), X_train.rows());
    for (Index i = 0; i < X_test.rows(); ++i) {
        for (Index j = 0; j < X_train.rows(); ++j) {
            const double d2 = (X_test.row(i) - X_train.row(j)).squaredNorm();
            K(i, j) = std::exp(-d2 * inv);
        }
    }
    return K;
}

GramMatrix gram_matrix(const Matrix& X, const KernelSpec& spec) {
    if (X.rows() < 1) throw Error("gram_matrix: need at least one instance");
    return GramMatrix{cross_kernel(X, X, spec), spec};
}

Matrix group_rows(const Matrix& M, const std::vector<Index>& group) {
    Matrix out(static_cast<Index>(group.size()), M.cols());
    for (Index i = 0; i < out.rows(); ++i) {
        const Index r = group[static_cast<std::size_t>(i)];
        if (r < 0 || r >= M.rows()) {
            throw Error("group_rows: row index out of range");
        }
        out.row(i) = M.row(r);
    }
    return out;
}

}  // namespace dm2l
