#include "dm2l/objective.hpp"

#include <Eigen/SVD>

#include "dm2l/kernels.hpp"

namespace dm2l {

LabelGroups build_label_groups(const ObservedLabelMatrix& observed) {
    LabelGroups lg;
    lg.groups.resize(static_cast<std::size_t>(observed.cols()));
    for (Index k = 0; k < observed.cols(); ++k) {
        auto& g = lg.groups[static_cast<std::size_t>(k)];
        for (Index i = 0; i < observed.rows(); ++i) {
            if (observed.mask.contains(i, k) && observed.values(i, k) > 0.0) {
                g.push_back(i);
            }
        }
    }
    return lg;
}

void ObjectiveSpec::check() const {
    if (lambda_d < 0.0) throw Error("objective: lambda_d must be nonnegative");
    if (delta <= 0.0) throw Error("objective: delta must be positive");
    if (Z.rows() != observed.rows()) {
        throw Error("objective: Z and observed label rows differ");
    }
    for (const auto& g : groups.groups) {
        for (Index i : g) {
            if (i < 0 || i >= Z.rows()) {
                throw Error("objective: group index out of range");
            }
        }
    }
}

namespace {

struct NuclearEval {
    double value = 0.0;
    Matrix subgrad;  // empty unless requested
};

NuclearEval nuclear_eval(const Matrix& M, double delta, bool want_subgrad) {
    NuclearEval out;
    if (M.size() == 0) {
        if (want_subgrad) out.subgrad = Matrix::Zero(M.rows(), M.cols());
        return out;
    }
    if (!want_subgrad) {
        out.value = Eigen::BDCSVD<Matrix>(M).singularValues().sum();
        return out;
    }
    const bool wide = M.rows() < M.cols();
    const Matrix T = wide ? Matrix(M.transpose()) : M;
    Eigen::BDCSVD<Matrix> svd(T, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    out.value = sv.sum();
    Index s = 0;
    while (s < sv.size() && sv(s) > delta) ++s;
    if (s == 0) {
        out.subgrad = Matrix::Zero(M.rows(), M.cols());
    } else {
        out.subgrad =
            svd.matrixU().leftCols(s) * svd.matrixV().leftCols(s).transpose();
        if (wide) out.subgrad.transposeInPlace();
    }
    return out;
}

}  // namespace

ConvexEval convex_eval(const Matrix& theta, const ObjectiveSpec& spec,
                       bool want_subgrad) {
    if (!theta.allFinite()) throw Error("objective: non-finite parameters");
    if (theta.rows() != spec.Z.cols() || theta.cols() != spec.observed.cols()) {
        throw Error("objective: parameter shape mismatch");
    }

    const Matrix P = spec.Z * theta;
    const Matrix resid = mask_residual(P, spec.observed);

    ConvexEval out;
    out.loss = 0.5 * resid.squaredNorm();

    // scatter of per-group subgradients back to full row indices
    Matrix scatter;
    if (want_subgrad) scatter = Matrix::Zero(P.rows(), P.cols());

    if (spec.kind != ObjectiveKind::GlobalOnly && spec.lambda_d > 0.0) {
        for (const auto& g : spec.groups.groups) {
            if (g.empty()) continue;
            const NuclearEval ev =
                nuclear_eval(group_rows(P, g), spec.delta, want_subgrad);
            out.local_sum += ev.value;
            if (want_subgrad) {
                for (Index r = 0; r < ev.subgrad.rows(); ++r) {
                    scatter.row(g[static_cast<std::size_t>(r)]) +=
                        ev.subgrad.row(r);
                }
            }
        }
    }
    if (spec.kind == ObjectiveKind::GlobalOnly && spec.lambda_d > 0.0) {
        const NuclearEval ev = nuclear_eval(P, spec.delta, want_subgrad);
        out.global = ev.value;
        if (want_subgrad) scatter += ev.subgrad;
    }

    const double reg = spec.kind == ObjectiveKind::GlobalOnly ? out.global
                                                              : out.local_sum;
    out.jvex = out.loss + spec.lambda_d * reg;
    if (want_subgrad) {
        out.subgrad = spec.Z.transpose() * (resid + spec.lambda_d * scatter);
    }
    return out;
}

ObjectiveParts objective_value(const Matrix& theta, const ObjectiveSpec& spec) {
    if (!theta.allFinite()) throw Error("objective: non-finite parameters");
    if (theta.rows() != spec.Z.cols() || theta.cols() != spec.observed.cols()) {
        throw Error("objective: parameter shape mismatch");
    }
    const Matrix P = spec.Z * theta;
    const Matrix resid = mask_residual(P, spec.observed);

    ObjectiveParts parts;
    parts.loss = 0.5 * resid.squaredNorm();
    for (const auto& g : spec.groups.groups) {
        if (g.empty()) continue;
        parts.local_sum += nuclear_eval(group_rows(P, g), spec.delta, false).value;
    }
    parts.global = nuclear_eval(P, spec.delta, false).value;

    switch (spec.kind) {
        case ObjectiveKind::Dm2l:
            parts.total =
                parts.loss + spec.lambda_d * (parts.local_sum - parts.global);
            break;
        case ObjectiveKind::LocalOnly:
            parts.total = parts.loss + spec.lambda_d * parts.local_sum;
            break;
        case ObjectiveKind::GlobalOnly:
            parts.total = parts.loss + spec.lambda_d * parts.global;
            break;
    }
    return parts;
}

Matrix convex_subgradient(const Matrix& theta, const ObjectiveSpec& spec) {
    return convex_eval(theta, spec, true).subgrad;
}

ConcaveLinearization concave_linearization(const Matrix& theta_t,
                                           const ObjectiveSpec& spec) {
    ConcaveLinearization lin;
    if (spec.kind != ObjectiveKind::Dm2l || spec.lambda_d == 0.0) {
        lin.slope = Matrix::Zero(theta_t.rows(), theta_t.cols());
        lin.offset = 0.0;
        return lin;
    }
    const Matrix P = spec.Z * theta_t;
    const NuclearEval ev = nuclear_eval(P, spec.delta, true);
    lin.slope = -spec.lambda_d * (spec.Z.transpose() * ev.subgrad);
    // tangency: value at theta_t must equal -lambda_d * |Z theta_t|_*
    lin.offset = -spec.lambda_d * ev.value -
                 lin.slope.cwiseProduct(theta_t).sum();
    return lin;
}

double surrogate_value(const Matrix& theta, const ConcaveLinearization& lin,
                       const ObjectiveSpec& spec) {
    return convex_eval(theta, spec, false).jvex + lin.value_at(theta);
}

double surrogate_value(const Matrix& theta, const Matrix& theta_t,
                       const ObjectiveSpec& spec) {
    return surrogate_value(theta, concave_linearization(theta_t, spec), spec);
}

}  // namespace dm2l
