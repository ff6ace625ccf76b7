#pragma once

#include <vector>

#include "dm2l/dataset.hpp"
#include "dm2l/nucnorm.hpp"
#include "dm2l/types.hpp"

namespace dm2l {

// Which regularizer variant the objective carries.  Dm2l is the full
// local-minus-global form; the others back the ablation baselines.
enum class ObjectiveKind { Dm2l, LocalOnly, GlobalOnly };

// Per-label row-index sets: group k holds the rows observed positive for
// label k, sorted ascending.
struct LabelGroups {
    std::vector<std::vector<Index>> groups;
};

LabelGroups build_label_groups(const ObservedLabelMatrix& observed);

struct ObjectiveSpec {
    Matrix Z;  // design matrix: X for the linear model, K for the kernel one
    ObservedLabelMatrix observed;
    LabelGroups groups;
    double lambda_d = 0.0;
    double delta = kDefaultDelta;
    ObjectiveKind kind = ObjectiveKind::Dm2l;

    void check() const;
};

struct ObjectiveParts {
    double loss = 0.0;       // 0.5 |R_Omega(Z Theta) - Ytilde|_F^2
    double local_sum = 0.0;  // sum_k |Z_k Theta|_*
    double global = 0.0;     // |Z Theta|_*
    double total = 0.0;
};

ObjectiveParts objective_value(const Matrix& theta, const ObjectiveSpec& spec);

// Subgradient of the convex part J_vex at theta.
Matrix convex_subgradient(const Matrix& theta, const ObjectiveSpec& spec);

// Affine under-approximation slope/offset of the concave part, tangent at
// the expansion point.
struct ConcaveLinearization {
    Matrix slope;
    double offset = 0.0;

    double value_at(const Matrix& theta) const {
        return slope.size() == 0 ? offset
                                 : slope.cwiseProduct(theta).sum() + offset;
    }
};

ConcaveLinearization concave_linearization(const Matrix& theta_t,
                                           const ObjectiveSpec& spec);

// J_vex(theta) plus the linearized concave part.
double surrogate_value(const Matrix& theta, const ConcaveLinearization& lin,
                       const ObjectiveSpec& spec);
double surrogate_value(const Matrix& theta, const Matrix& theta_t,
                       const ObjectiveSpec& spec);

// Value and subgradient of the convex part from a single SVD pass per block.
struct ConvexEval {
    double loss = 0.0;
    double local_sum = 0.0;
    double global = 0.0;  // only filled for GlobalOnly
    double jvex = 0.0;
    Matrix subgrad;
};

ConvexEval convex_eval(const Matrix& theta, const ObjectiveSpec& spec,
                       bool want_subgrad = true);

}  // namespace dm2l
