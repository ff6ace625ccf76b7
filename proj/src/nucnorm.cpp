#include "dm2l/nucnorm.hpp"

#include <Eigen/SVD>

namespace dm2l {

double nuclear_norm(const Matrix& M) {
    if (!M.allFinite()) throw Error("nuclear_norm: non-finite entries");
    if (M.size() == 0) return 0.0;
    return Eigen::BDCSVD<Matrix>(M).singularValues().sum();
}

SubgradientResult nuclear_norm_subgradient(const Matrix& M, double delta) {
    if (delta <= 0.0) {
        throw Error("nuclear_norm_subgradient: delta must be positive");
    }
    if (!M.allFinite()) {
        throw Error("nuclear_norm_subgradient: non-finite entries");
    }
    if (M.size() == 0) {
        return SubgradientResult{Matrix::Zero(M.rows(), M.cols()), 0, delta};
    }
    if (M.rows() < M.cols()) {
        SubgradientResult r = nuclear_norm_subgradient(M.transpose(), delta);
        r.G.transposeInPlace();
        return r;
    }

    Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    Index s = 0;
    while (s < sv.size() && sv(s) > delta) ++s;  // strictly greater

    SubgradientResult r;
    r.threshold = delta;
    r.retained = s;
    if (s == 0) {
        r.G = Matrix::Zero(M.rows(), M.cols());
    } else {
        r.G = svd.matrixU().leftCols(s) * svd.matrixV().leftCols(s).transpose();
    }
    return r;
}

}  // namespace dm2l
