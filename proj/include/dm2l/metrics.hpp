#pragma once

#include "dm2l/types.hpp"

namespace dm2l {

// Ranking-based evaluation over real-valued scores and {-1,+1} labels.
// Degenerate instances/labels (no positives or no negatives where the
// metric needs both) are excluded from the averages and counted.
struct EvaluationReport {
    double ranking_loss = 0.0;       // in [0,1], lower is better
    double macro_auc = 0.0;          // in [0,1], higher is better
    double coverage = 0.0;           // in [0, c-1], lower is better
    double average_precision = 0.0;  // in (0,1], higher is better

    Index rkl_instances = 0, rkl_excluded = 0;
    Index auc_labels = 0, auc_excluded = 0;
    Index cvg_instances = 0, cvg_excluded = 0;
    Index ap_instances = 0, ap_excluded = 0;
};

double ranking_loss(const Matrix& scores, const Matrix& labels);
double macro_auc(const Matrix& scores, const Matrix& labels);
double coverage(const Matrix& scores, const Matrix& labels);
double average_precision(const Matrix& scores, const Matrix& labels);

EvaluationReport evaluate_all(const Matrix& scores, const Matrix& labels);

// Literal pair/rank enumeration of the same four metrics; test oracle,
// guarded to small inputs.
EvaluationReport brute_force_oracle(const Matrix& scores, const Matrix& labels);

}  // namespace dm2l
