#include "dm2l/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace dm2l {

void CccpConfig::check() const {
    if (max_outer < 1 || max_inner < 1) {
        throw Error("cccp: iteration limits must be positive");
    }
    if (eta0 <= 0.0) throw Error("cccp: eta0 must be positive");
    if (outer_rel_tol <= 0.0) throw Error("cccp: outer_rel_tol must be positive");
    if (delta <= 0.0) throw Error("cccp: delta must be positive");
    if (lambda_d < 0.0) throw Error("cccp: lambda_d must be nonnegative");
}

Matrix init_parameters(Index p, Index c) {
    if (p < 1 || c < 1) throw Error("init_parameters: dimensions must be >= 1");
    Matrix theta = Matrix::Zero(p, c);
    for (Index i = 0; i < std::min(p, c); ++i) theta(i, i) = 1.0;
    return theta;
}

namespace {

struct InnerResult {
    Matrix theta;
    double surrogate;
    int iters;
};

InnerResult inner_solve_impl(const ObjectiveSpec& spec, const Matrix& theta_t,
                             const ConcaveLinearization& lin,
                             const CccpConfig& cfg) {
    InnerResult best;
    best.theta = theta_t;
    best.surrogate = surrogate_value(theta_t, lin, spec);
    best.iters = 0;

    Matrix theta = theta_t;
    for (int t = 1; t <= cfg.max_inner; ++t) {
        const ConvexEval ev = convex_eval(theta, spec, true);
        const Matrix g = ev.subgrad + lin.slope;
        const double gnorm = g.norm();
        best.iters = t;
        if (gnorm <= 1e-12 * std::max(1.0, theta.norm())) break;

        theta -= (cfg.eta0 / std::sqrt(static_cast<double>(t))) * g;
        if (!theta.allFinite()) {
            throw Error("inner_solve: iterate diverged to non-finite values "
                        "(step " + std::to_string(t) + "); reduce eta0");
        }
        const double s = surrogate_value(theta, lin, spec);
        if (s < best.surrogate) {
            best.surrogate = s;
            best.theta = theta;
        }
    }
    return best;
}

}  // namespace

Matrix inner_solve(const ObjectiveSpec& spec, const Matrix& theta_t,
                   const CccpConfig& cfg, int* iters_used) {
    cfg.check();
    spec.check();
    const ConcaveLinearization lin = concave_linearization(theta_t, spec);
    InnerResult r = inner_solve_impl(spec, theta_t, lin, cfg);
    if (iters_used) *iters_used = r.iters;
    return std::move(r.theta);
}

std::pair<Matrix, CccpTrace> fit(const ObjectiveSpec& spec,
                                 const CccpConfig& cfg) {
    cfg.check();
    spec.check();
    using clock = std::chrono::steady_clock;

    Matrix theta = init_parameters(spec.Z.cols(), spec.observed.cols());
    double objective = objective_value(theta, spec).total;

    Matrix best_theta = theta;
    double best_objective = objective;

    CccpTrace trace;
    trace.status = FitStatus::MaxIters;
    int stall_count = 0;

    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        const auto t0 = clock::now();
        const ConcaveLinearization lin = concave_linearization(theta, spec);
        InnerResult inner = inner_solve_impl(spec, theta, lin, cfg);
        const double next_objective = objective_value(inner.theta, spec).total;

        OuterRecord rec;
        rec.objective = next_objective;
        rec.surrogate = inner.surrogate;
        rec.inner_iters = inner.iters;
        rec.seconds =
            std::chrono::duration<double>(clock::now() - t0).count();
        trace.iterations.push_back(rec);

        if (next_objective < best_objective) {
            best_objective = next_objective;
            best_theta = inner.theta;
        }

        const double change = std::abs(next_objective - objective);
        const bool converged =
            change <= cfg.outer_rel_tol * std::max(1.0, std::abs(objective));
        stall_count = (objective - next_objective < cfg.outer_rel_tol)
                          ? stall_count + 1
                          : 0;

        theta = std::move(inner.theta);
        objective = next_objective;

        if (converged) {
            trace.status = FitStatus::Converged;
            break;
        }
        if (stall_count >= 5) {
            trace.status = FitStatus::Stalled;
            break;
        }
    }

    trace.best_objective = best_objective;
    return {std::move(best_theta), std::move(trace)};
}

Matrix fit_linear(const Matrix& X, const ObservedLabelMatrix& observed,
                  const LabelGroups& groups, double lambda_d,
                  const CccpConfig& cfg, CccpTrace* trace, ObjectiveKind kind) {
    ObjectiveSpec spec{X, observed, groups, lambda_d, cfg.delta, kind};
    auto [theta, tr] = fit(spec, cfg);
    if (trace) *trace = std::move(tr);
    return theta;
}

Matrix fit_kernel(const Matrix& K, const ObservedLabelMatrix& observed,
                  const LabelGroups& groups, double lambda_d,
                  const CccpConfig& cfg, CccpTrace* trace, ObjectiveKind kind) {
    if (K.rows() != K.cols()) throw Error("fit_kernel: K must be square");
    ObjectiveSpec spec{K, observed, groups, lambda_d, cfg.delta, kind};
    auto [theta, tr] = fit(spec, cfg);
    if (trace) *trace = std::move(tr);
    return theta;
}

void write_trace_csv(const CccpTrace& trace, std::ostream& out) {
    out << "iter,objective,surrogate,inner_iters,seconds\n";
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
        const OuterRecord& r = trace.iterations[i];
        out << i + 1 << ',' << r.objective << ',' << r.surrogate << ','
            << r.inner_iters << ',' << r.seconds << '\n';
    }
}

}  // namespace dm2l
