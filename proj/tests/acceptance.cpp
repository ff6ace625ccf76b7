// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Properties come first, then desk-scale directional experiments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dm2l/experiments.hpp"

using namespace dm2l;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, double secs) {
    std::printf("[%s] %s (%.2fs)\n", pass ? "PASS" : "FAIL", name.c_str(),
                secs);
    if (!pass) ++g_failures;
}

void run(const std::string& name, const std::function<bool()>& body) {
    const auto t0 = Clock::now();
    bool pass = false;
    try {
        pass = body();
    } catch (const std::exception& e) {
        std::printf("  unexpected error: %s\n", e.what());
    }
    report(name, pass, std::chrono::duration<double>(Clock::now() - t0).count());
}

Matrix randn(Index r, Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix M(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) M(i, j) = g(rng);
    return M;
}

Matrix rand_labels(Index r, Index c, std::mt19937_64& rng) {
    Matrix Y(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) Y(i, j) = (rng() & 1) ? 1.0 : -1.0;
    return Y;
}

Matrix hcat(const std::vector<const Matrix*>& parts) {
    Index cols = 0;
    for (const Matrix* p : parts) cols += p->cols();
    Matrix M(parts[0]->rows(), cols);
    Index at = 0;
    for (const Matrix* p : parts) {
        M.middleCols(at, p->cols()) = *p;
        at += p->cols();
    }
    return M;
}

// --- property criteria ----------------------------------------------------

bool column_concatenation_bound() {
    std::mt19937_64 rng(101);
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 1000; ++trial) {
        const Index r = 1 + static_cast<Index>(rng() % 20);
        const Matrix A = randn(r, 1 + static_cast<Index>(rng() % 6), rng);
        const Matrix B = randn(r, 1 + static_cast<Index>(rng() % 6), rng);
        const Matrix C = randn(r, 1 + static_cast<Index>(rng() % 6), rng);
        const double lhs = nuclear_norm(hcat({&A, &B, &C}));
        const double rhs =
            nuclear_norm(hcat({&A, &C})) + nuclear_norm(hcat({&B, &C}));
        if (lhs > rhs + 1e-8) return false;
    }
    return std::chrono::duration<double>(Clock::now() - t0).count() < 10.0;
}

bool row_cover_bound() {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 500; ++trial) {
        const Index n = 4 + static_cast<Index>(rng() % 16);
        const Index d = 2 + static_cast<Index>(rng() % 6);
        const Index c = 2 + static_cast<Index>(rng() % 5);
        const Matrix X = randn(n, d, rng);
        const Matrix W = randn(d, c, rng);
        const Index k = 2 + static_cast<Index>(rng() % 3);
        std::vector<std::vector<Index>> parts(static_cast<std::size_t>(k));
        for (Index i = 0; i < n; ++i)
            parts[rng() % static_cast<std::uint64_t>(k)].push_back(i);
        double local = 0.0;
        for (const auto& part : parts) {
            if (!part.empty()) local += nuclear_norm(group_rows(X, part) * W);
        }
        if (local < nuclear_norm(X * W) - 1e-8) return false;
    }
    return true;
}

bool subgradient_oracle() {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> gap(0.5, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Index r = 3 + static_cast<Index>(rng() % 6);
        const Index c = 3 + static_cast<Index>(rng() % 6);
        const Index k = std::min(r, c);
        // well-separated singular values, all far above the cutoff
        Vector s(k);
        double acc = 0.5;
        for (Index i = k - 1; i >= 0; --i) {
            acc += gap(rng);
            s(i) = acc;
        }
        Eigen::BDCSVD<Matrix> ur(randn(r, r, rng),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::BDCSVD<Matrix> vr(randn(c, c, rng),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Matrix M = ur.matrixU().leftCols(k) * s.asDiagonal() *
                         vr.matrixU().leftCols(k).transpose();
        const Matrix G = nuclear_norm_subgradient(M, kDefaultDelta).G;
        if (G.operatorNorm() > 1.0 + 1e-8) return false;
        for (int dir = 0; dir < 20; ++dir) {
            const Matrix D = randn(r, c, rng);
            const double h = 1e-6;
            const double fd =
                (nuclear_norm(M + h * D) - nuclear_norm(M - h * D)) / (2 * h);
            const double pred = G.cwiseProduct(D).sum();
            if (std::abs(fd - pred) > 1e-5 * std::max(1.0, std::abs(fd)))
                return false;
        }
    }
    return true;
}

ObjectiveSpec random_spec(std::mt19937_64& rng, Index n, Index d, Index c,
                          double lambda, double rho, std::uint64_t seed) {
    const Matrix Z = randn(n, d, rng);
    const auto mask = generate_mask(n, c, rho, seed);
    const auto observed = apply_mask(rand_labels(n, c, rng), mask);
    const auto groups = build_label_groups(observed);
    return ObjectiveSpec{Z, observed, groups, lambda, kDefaultDelta,
                        ObjectiveKind::Dm2l};
}

bool majorization_and_tangency() {
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = random_spec(rng, 8, 4, 3, 0.5, 0.7, 300 + trial);
        const Matrix theta_t = randn(4, 3, rng);
        const Matrix theta = randn(4, 3, rng);
        const double obj = objective_value(theta, spec).total;
        if (surrogate_value(theta, theta_t, spec) < obj - 1e-10) return false;
        const double at_t = objective_value(theta_t, spec).total;
        if (std::abs(surrogate_value(theta_t, theta_t, spec) - at_t) > 1e-10)
            return false;
    }
    return true;
}

bool cccp_descent() {
    std::mt19937_64 rng(113);
    const double rhos[] = {1.0, 0.7, 0.3};
    for (int trial = 0; trial < 20; ++trial) {
        const auto t0 = Clock::now();
        const auto spec =
            random_spec(rng, 100, 15, 8, 0.1, rhos[trial % 3], 400 + trial);
        CccpConfig cfg;
        cfg.eta0 = 2e-3;
        cfg.outer_rel_tol = 1e-4;
        auto [theta, trace] = fit(spec, cfg);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& rec : trace.iterations) {
            const double next = std::min(best, rec.objective);
            if (next > best) return false;
            best = next;
        }
        if (trace.status == FitStatus::MaxIters) return false;
        if (std::chrono::duration<double>(Clock::now() - t0).count() >= 30.0)
            return false;
    }
    return true;
}

bool linear_kernel_equivalence() {
    std::mt19937_64 rng(127);
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 5 + static_cast<Index>(rng() % 8);
        const Index d = 2 + static_cast<Index>(rng() % 5);
        const Index c = 2 + static_cast<Index>(rng() % 4);
        const Matrix X = randn(n, d, rng);
        const Matrix A = randn(n, c, rng);
        const auto mask = generate_mask(n, c, 0.7, 500 + trial);
        const auto observed = apply_mask(rand_labels(n, c, rng), mask);
        const auto groups = build_label_groups(observed);
        const double lambda = lam(rng);

        const Matrix K = X * X.transpose();
        const ObjectiveSpec kspec{K, observed, groups, lambda, kDefaultDelta,
                                 ObjectiveKind::Dm2l};
        const ObjectiveSpec lspec{X, observed, groups, lambda, kDefaultDelta,
                                 ObjectiveKind::Dm2l};
        const Matrix W = X.transpose() * A;
        const double jk = objective_value(A, kspec).total;
        const double jl = objective_value(W, lspec).total;
        if (std::abs(jk - jl) > 1e-8 * std::max(1.0, std::abs(jl)))
            return false;

        const Matrix X_test = randn(4, d, rng);
        const Matrix pk =
            cross_kernel(X_test, X, KernelSpec{KernelKind::Linear, 1.0}) * A;
        const Matrix pl = X_test * W;
        if ((pk - pl).cwiseAbs().maxCoeff() > 1e-10) return false;
    }
    return true;
}

bool lambda_zero_reduction() {
    std::mt19937_64 rng(131);
    for (int trial = 0; trial < 10; ++trial) {
        const Index d = 4 + static_cast<Index>(rng() % 4);
        const Index n = d * 5;
        const Index c = 2 + static_cast<Index>(rng() % 3);
        const Matrix X = randn(n, d, rng);
        const Matrix Y = rand_labels(n, c, rng);
        const auto observed = apply_mask(Y, ObservationMask::full(n, c));
        const auto groups = build_label_groups(observed);
        const ObjectiveSpec spec{X, observed, groups, 0.0, kDefaultDelta,
                                ObjectiveKind::Dm2l};
        CccpConfig cfg;
        cfg.eta0 = 1e-2;
        cfg.max_inner = 800;
        cfg.max_outer = 300;
        cfg.outer_rel_tol = 1e-10;
        auto [theta, trace] = fit(spec, cfg);
        const Matrix W_star =
            (X.transpose() * X).ldlt().solve(X.transpose() * Y);
        const double loss_star = 0.5 * (X * W_star - Y).squaredNorm();
        const double loss_fit = objective_value(theta, spec).loss;
        if (std::abs(loss_fit - loss_star) > 1e-4 * std::max(1.0, loss_star))
            return false;
    }
    return true;
}

bool metrics_oracle() {
    std::mt19937_64 rng(137);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const Index p = 1 + static_cast<Index>(rng() % 20);
        const Index c = 2 + static_cast<Index>(rng() % 7);
        const bool quantize = (trial % 2) == 0;
        Matrix S(p, c), Y(p, c);
        for (Index i = 0; i < p; ++i) {
            for (Index j = 0; j < c; ++j) {
                const double s = g(rng);
                S(i, j) = quantize ? std::round(s * 2.0) / 2.0 : s;
                Y(i, j) = (rng() & 1) ? 1.0 : -1.0;
            }
        }
        EvaluationReport fast, slow;
        bool ft = false, st = false;
        try {
            fast = evaluate_all(S, Y);
        } catch (const Error&) {
            ft = true;
        }
        try {
            slow = brute_force_oracle(S, Y);
        } catch (const Error&) {
            st = true;
        }
        if (ft != st) return false;
        if (ft) continue;
        const bool equal =
            fast.ranking_loss == slow.ranking_loss &&
            fast.macro_auc == slow.macro_auc &&
            fast.coverage == slow.coverage &&
            fast.average_precision == slow.average_precision &&
            fast.rkl_instances == slow.rkl_instances &&
            fast.auc_labels == slow.auc_labels &&
            fast.cvg_instances == slow.cvg_instances &&
            fast.ap_instances == slow.ap_instances;
        if (!equal) return false;
    }
    return std::abs(nemenyi_cd(6, 24, 3.102) - 1.6753) <= 1e-4;
}

// --- directional experiments ----------------------------------------------

struct PairedRun {
    double auc_a = 0.0;  // mean over seeds, method A
    double auc_b = 0.0;  // mean over seeds, method B
};

// Shared split/mask per seed; fixed hyperparameters unless a CV grid is given.
PairedRun paired_experiment(const Dataset& base_template, Method method_a,
                            Method method_b, double rho, int seeds,
                            const std::vector<double>& lambda_grid,
                            const std::vector<double>& sigma_grid,
                            const CccpConfig& opt, std::uint64_t base_seed,
                            bool fresh_data_per_seed,
                            const std::function<Dataset(std::uint64_t)>& gen) {
    PairedRun out;
    for (int s = 0; s < seeds; ++s) {
        const Dataset ds =
            fresh_data_per_seed ? gen(derive_seed(base_seed, s, 9))
                                : base_template;
        const auto split =
            split_train_test(ds, 0.6, derive_seed(base_seed, s, 0));
        Matrix X_train = group_rows(ds.features, split.train_indices);
        const Matrix Y_train = group_rows(ds.labels, split.train_indices);
        const Matrix X_test = group_rows(ds.features, split.test_indices);
        const Matrix Y_test = group_rows(ds.labels, split.test_indices);

        const auto scaler = FeatureScaler::fit(X_train);
        X_train = scaler.apply(X_train);
        const Matrix X_test_n = scaler.apply(X_test);

        const auto mask = generate_mask(Y_train.rows(), Y_train.cols(), rho,
                                        derive_seed(base_seed, s, 1));
        const auto observed = apply_mask(Y_train, mask);

        auto eval_method = [&](Method m) {
            double lambda = lambda_grid.empty() ? 0.0 : lambda_grid.front();
            double sigma = sigma_grid.empty() ? 1.0 : sigma_grid.front();
            if (lambda_grid.size() > 1 || sigma_grid.size() > 1) {
                const auto choice = cross_validate(
                    X_train, observed, m, lambda_grid, sigma_grid, 2,
                    derive_seed(base_seed, s, 2), opt);
                lambda = choice.lambda;
                if (choice.sigma > 0.0) sigma = choice.sigma;
            }
            const auto model =
                train_method(m, X_train, observed, lambda, sigma, opt);
            Matrix scores;
            if (model.variant == ModelVariant::Kernel) {
                scores = cross_kernel(X_test_n, X_train, model.kernel) *
                         model.coefficients;
            } else {
                scores = X_test_n * model.weights;
            }
            return macro_auc(scores, Y_test);
        };
        out.auc_a += eval_method(method_a) / seeds;
        out.auc_b += eval_method(method_b) / seeds;
    }
    return out;
}

bool directional_experiment() {
    CccpConfig opt;
    opt.eta0 = 1e-2;
    opt.max_outer = 8;
    opt.max_inner = 60;
    opt.outer_rel_tol = 1e-4;

    const auto gen_lowrank = [](std::uint64_t seed) {
        return generate_synthetic(500, 20, 10, 3, 0.1, seed);
    };
    const auto linear = paired_experiment(
        Dataset{}, Method::Dm2lLinear, Method::Ridge, 0.3, 10,
        {1e-4, 1e-3, 1e-2, 1e-1}, {}, opt, 1001, true, gen_lowrank);
    std::printf("  dm2l-l mean AUC %.4f vs ridge %.4f\n", linear.auc_a,
                linear.auc_b);
    if (linear.auc_a < linear.auc_b) return false;

    const auto gen_xor = [](std::uint64_t seed) {
        return generate_xor_dataset(200, 0.05, seed);
    };
    const auto nonlinear = paired_experiment(
        Dataset{}, Method::Dm2lKernel, Method::Dm2lLinear, 0.3, 10, {1e-3},
        {0.5, 1.0}, opt, 2002, true, gen_xor);
    std::printf("  dm2l-nl mean AUC %.4f vs dm2l-l %.4f (xor)\n",
                nonlinear.auc_a, nonlinear.auc_b);
    return nonlinear.auc_a >= nonlinear.auc_b;
}

bool ablation_direction() {
    CccpConfig opt;
    opt.eta0 = 1e-2;
    opt.max_outer = 8;
    opt.max_inner = 60;
    opt.outer_rel_tol = 1e-4;

    const auto gen_lowrank = [](std::uint64_t seed) {
        return generate_synthetic(500, 20, 10, 3, 0.1, seed);
    };
    // strong regularization makes the rank pressure actually bind
    const auto full = paired_experiment(
        Dataset{}, Method::Dm2lLocalOnly, Method::GlobalOnly, 1.0, 10, {0.3},
        {}, opt, 3003, true, gen_lowrank);
    std::printf("  dm2l-lo mean AUC %.4f vs global-only %.4f (rho=1)\n",
                full.auc_a, full.auc_b);
    if (full.auc_a < full.auc_b) return false;

    const auto missing = paired_experiment(
        Dataset{}, Method::Dm2lLinear, Method::Dm2lLocalOnly, 0.3, 10, {1.0},
        {}, opt, 4004, true, gen_lowrank);
    std::printf("  dm2l mean AUC %.4f vs dm2l-lo %.4f (rho=0.3)\n",
                missing.auc_a, missing.auc_b);
    return missing.auc_a >= missing.auc_b;
}

bool image_scale_pipeline(bool* skipped) {
    const char* path = std::getenv("DM2L_IMAGE_DATA");
    if (path == nullptr) {
        *skipped = true;
        return true;
    }
    const auto t0 = Clock::now();
    const auto ds = load_dataset(path, DatasetFormat::SparseMultilabel);
    ExperimentConfig cfg;
    cfg.dataset_path = path;
    cfg.method = Method::Dm2lLinear;
    cfg.rho = 0.7;
    cfg.repetitions = 1;
    cfg.lambda_grid = {1e-2};
    cfg.sigma_grid = {1.0};
    cfg.seed = 7;
    cfg.opt.eta0 = 1e-3;
    cfg.opt.max_outer = 10;
    const auto table = run_experiment(cfg);
    const double secs =
        std::chrono::duration<double>(Clock::now() - t0).count();
    return table.rows.size() == 1 &&
           std::isfinite(table.rows[0].report.macro_auc) && secs < 600.0;
}

}  // namespace

int main() {
    run("column concatenation bound (1000 triples)", column_concatenation_bound);
    run("row-cover bound (500 pairs)", row_cover_bound);
    run("nuclear-norm subgradient vs finite differences (100 matrices)",
        subgradient_oracle);
    run("surrogate majorization and tangency (200 points)",
        majorization_and_tangency);
    run("monotone descent and termination (20 fits)", cccp_descent);
    run("linear-kernel objective and prediction equivalence (100 cases)",
        linear_kernel_equivalence);
    run("least-squares reduction at zero regularization (10 instances)",
        lambda_zero_reduction);
    run("ranking metrics vs literal oracle (500 instances) and critical "
        "difference",
        metrics_oracle);
    run("directional experiment: regularized beats ridge; kernel beats linear "
        "on xor",
        directional_experiment);
    run("ablation direction: local-only vs global-only; full vs local-only",
        ablation_direction);

    {
        bool skipped = false;
        const auto t0 = Clock::now();
        bool pass = false;
        try {
            pass = image_scale_pipeline(&skipped);
        } catch (const std::exception& e) {
            std::printf("  unexpected error: %s\n", e.what());
        }
        const double secs =
            std::chrono::duration<double>(Clock::now() - t0).count();
        if (skipped) {
            std::printf(
                "[SKIP] full pipeline on user-supplied image-scale data (set "
                "DM2L_IMAGE_DATA to enable) (%.2fs)\n",
                secs);
        } else {
            report("full pipeline on user-supplied image-scale data", pass,
                   secs);
        }
    }

    return g_failures == 0 ? 0 : 1;
}
