#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "dm2l/objective.hpp"
#include "dm2l/types.hpp"

namespace dm2l {

struct CccpConfig {
    int max_outer = 50;
    int max_inner = 200;
    double eta0 = 1e-3;          // inner step scale, eta_t = eta0 / sqrt(t)
    double outer_rel_tol = 1e-5;
    double delta = kDefaultDelta;
    double lambda_d = 0.0;
    std::uint64_t seed = 0;

    void check() const;
};

enum class FitStatus { Converged, MaxIters, Stalled };

struct OuterRecord {
    double objective = 0.0;  // total objective at the accepted iterate
    double surrogate = 0.0;  // surrogate value at the inner solution
    int inner_iters = 0;
    double seconds = 0.0;
};

struct CccpTrace {
    std::vector<OuterRecord> iterations;
    FitStatus status = FitStatus::MaxIters;
    double best_objective = 0.0;
};

// Rectangular truncation of the identity: the leading p x c block of I.
Matrix init_parameters(Index p, Index c);

// Subgradient descent on the CCCP surrogate with diminishing steps,
// tracking the best iterate.  Never returns a point whose surrogate value
// exceeds the starting one.
Matrix inner_solve(const ObjectiveSpec& spec, const Matrix& theta_t,
                   const CccpConfig& cfg, int* iters_used = nullptr);

std::pair<Matrix, CccpTrace> fit(const ObjectiveSpec& spec,
                                 const CccpConfig& cfg);

Matrix fit_linear(const Matrix& X, const ObservedLabelMatrix& observed,
                  const LabelGroups& groups, double lambda_d,
                  const CccpConfig& cfg, CccpTrace* trace = nullptr,
                  ObjectiveKind kind = ObjectiveKind::Dm2l);

Matrix fit_kernel(const Matrix& K, const ObservedLabelMatrix& observed,
                  const LabelGroups& groups, double lambda_d,
                  const CccpConfig& cfg, CccpTrace* trace = nullptr,
                  ObjectiveKind kind = ObjectiveKind::Dm2l);

// One CSV line per outer iteration: iter,objective,surrogate,inner_iters,seconds
void write_trace_csv(const CccpTrace& trace, std::ostream& out);

}  // namespace dm2l
