#include "dm2l/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dm2l/kernels.hpp"

namespace dm2l {

std::string method_name(Method m) {
    switch (m) {
        case Method::Dm2lLinear: return "dm2l-l";
        case Method::Dm2lKernel: return "dm2l-nl";
        case Method::Dm2lLocalOnly: return "dm2l-lo";
        case Method::GlobalOnly: return "global-only";
        case Method::Ridge: return "ridge";
    }
    throw Error("unknown method");
}

Method parse_method(const std::string& name) {
    if (name == "dm2l-l") return Method::Dm2lLinear;
    if (name == "dm2l-nl") return Method::Dm2lKernel;
    if (name == "dm2l-lo") return Method::Dm2lLocalOnly;
    if (name == "global-only") return Method::GlobalOnly;
    if (name == "ridge") return Method::Ridge;
    throw Error("unknown method `" + name +
                "` (expected dm2l-l, dm2l-nl, dm2l-lo, global-only or ridge)");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b) {
    // splitmix64 finalizer over the mixed key triple
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) +
                      0xbf58476d1ce4e5b9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double nemenyi_cd(int k, int N, double q_alpha) {
    if (k < 2) throw Error("nemenyi_cd: need at least 2 methods");
    if (N < 1) throw Error("nemenyi_cd: need at least 1 dataset");
    return q_alpha * std::sqrt(static_cast<double>(k) * (k + 1) /
                               (6.0 * static_cast<double>(N)));
}

void ExperimentConfig::apply_grid_defaults() {
    if (lambda_grid.empty()) {
        for (int e = -5; e <= 5; ++e) {
            lambda_grid.push_back(std::pow(10.0, e));
        }
    }
    if (sigma_grid.empty()) sigma_grid = {0.5, 1.0, 1.5, 2.0};
}

void ExperimentConfig::check() const {
    if (rho <= 0.0 || rho > 1.0) throw Error("config: rho must lie in (0,1]");
    if (train_frac <= 0.0 || train_frac >= 1.0) {
        throw Error("config: train_frac must lie in (0,1)");
    }
    if (repetitions < 1) throw Error("config: repetitions must be >= 1");
    if (cv_folds < 2) throw Error("config: cv_folds must be >= 2");
    if (lambda_grid.empty()) throw Error("config: empty lambda grid");
    if (sigma_grid.empty()) throw Error("config: empty sigma grid");
    if (dataset_path.empty() && !synth) {
        throw Error("config: need a dataset path or a synthetic spec");
    }
    opt.check();
}

Dataset generate_xor_dataset(Index n, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Dataset ds;
    ds.features = Matrix(n, 2);
    ds.labels = Matrix(n, 2);
    ds.label_names = {"quad-even", "quad-odd"};
    for (Index i = 0; i < n; ++i) {
        const double x0 = unif(rng);
        const double x1 = unif(rng);
        ds.features(i, 0) = x0;
        ds.features(i, 1) = x1;
        const double s = x0 * x1 + noise * gauss(rng);
        ds.labels(i, 0) = s >= 0.0 ? 1.0 : -1.0;
        ds.labels(i, 1) = -ds.labels(i, 0);
    }
    return ds;
}

namespace {

std::uint64_t config_digest(const CccpConfig& opt, double lambda,
                            double sigma) {
    auto mix = [](std::uint64_t h, std::uint64_t v) {
        return (h ^ v) * 0x100000001b3ULL;
    };
    auto bits = [](double d) {
        std::uint64_t u;
        std::memcpy(&u, &d, sizeof u);
        return u;
    };
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = mix(h, static_cast<std::uint64_t>(opt.max_outer));
    h = mix(h, static_cast<std::uint64_t>(opt.max_inner));
    h = mix(h, bits(opt.eta0));
    h = mix(h, bits(opt.outer_rel_tol));
    h = mix(h, bits(opt.delta));
    h = mix(h, bits(lambda));
    h = mix(h, bits(sigma));
    return h;
}

int thread_budget() {
    if (const char* env = std::getenv("DM2L_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// run fn(i) for i in [0, count) on up to thread_budget() workers
void parallel_for(Index count, const std::function<void(Index)>& fn) {
    const int workers = std::min<Index>(thread_budget(), count);
    if (workers <= 1) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (Index i = next.fetch_add(1); i < count;
                     i = next.fetch_add(1)) {
                    fn(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

ObservedLabelMatrix select_rows(const ObservedLabelMatrix& observed,
                                const std::vector<Index>& rows) {
    ObservationMask mask(static_cast<Index>(rows.size()), observed.cols());
    Matrix values =
        Matrix::Zero(static_cast<Index>(rows.size()), observed.cols());
    for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
        const Index src = rows[static_cast<std::size_t>(i)];
        for (Index j = 0; j < observed.cols(); ++j) {
            if (observed.mask.contains(src, j)) {
                mask.insert(i, j);
                values(i, j) = observed.values(src, j);
            }
        }
    }
    return ObservedLabelMatrix{std::move(values), std::move(mask)};
}

bool method_is_kernel(Method m) { return m == Method::Dm2lKernel; }

}  // namespace

TrainedModel train_method(Method method, const Matrix& X_train,
                          const ObservedLabelMatrix& observed, double lambda,
                          double sigma, const CccpConfig& opt,
                          CccpTrace* trace) {
    const LabelGroups groups = build_label_groups(observed);
    CccpTrace local_trace;
    CccpTrace* tr = trace ? trace : &local_trace;

    TrainedModel model;
    model.scaler = FeatureScaler::identity(X_train.cols());
    model.config_digest = config_digest(opt, lambda, sigma);

    if (method_is_kernel(method)) {
        model.variant = ModelVariant::Kernel;
        model.kernel = KernelSpec{KernelKind::Gaussian, sigma};
        const GramMatrix gram = gram_matrix(X_train, model.kernel);
        model.coefficients =
            fit_kernel(gram.values, observed, groups, lambda, opt, tr);
        model.train_features = X_train;
        model.lambda_d = lambda;
    } else {
        ObjectiveKind kind = ObjectiveKind::Dm2l;
        double lam = lambda;
        if (method == Method::Dm2lLocalOnly) kind = ObjectiveKind::LocalOnly;
        if (method == Method::GlobalOnly) kind = ObjectiveKind::GlobalOnly;
        if (method == Method::Ridge) lam = 0.0;
        model.variant = ModelVariant::Linear;
        model.weights =
            fit_linear(X_train, observed, groups, lam, opt, tr, kind);
        model.lambda_d = lam;
    }
    model.training_objective = tr->best_objective;
    return model;
}

double masked_average_precision(const Matrix& scores,
                                const ObservedLabelMatrix& observed) {
    if (scores.rows() != observed.rows() || scores.cols() != observed.cols()) {
        throw Error("masked_average_precision: shape mismatch");
    }
    double sum = 0.0;
    Index counted = 0;
    for (Index i = 0; i < scores.rows(); ++i) {
        std::vector<Index> cols;
        bool any_pos = false;
        for (Index j = 0; j < scores.cols(); ++j) {
            if (observed.mask.contains(i, j)) {
                cols.push_back(j);
                any_pos = any_pos || observed.values(i, j) > 0.0;
            }
        }
        if (!any_pos) continue;

        // ranks within the observed columns: descending score, index tiebreak
        const Index m = static_cast<Index>(cols.size());
        std::vector<Index> order(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            return scores(i, cols[static_cast<std::size_t>(a)]) >
                   scores(i, cols[static_cast<std::size_t>(b)]);
        });
        std::vector<Index> rank(static_cast<std::size_t>(m));
        for (Index pos = 0; pos < m; ++pos) {
            rank[static_cast<std::size_t>(
                order[static_cast<std::size_t>(pos)])] = pos + 1;
        }

        double inst = 0.0;
        Index npos = 0;
        for (Index a = 0; a < m; ++a) {
            if (observed.values(i, cols[static_cast<std::size_t>(a)]) <= 0.0) {
                continue;
            }
            ++npos;
            Index above = 0;
            for (Index b = 0; b < m; ++b) {
                if (observed.values(i, cols[static_cast<std::size_t>(b)]) >
                        0.0 &&
                    rank[static_cast<std::size_t>(b)] <=
                        rank[static_cast<std::size_t>(a)]) {
                    ++above;
                }
            }
            inst += static_cast<double>(above) /
                    static_cast<double>(rank[static_cast<std::size_t>(a)]);
        }
        sum += inst / static_cast<double>(npos);
        ++counted;
    }
    return counted == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : sum / static_cast<double>(counted);
}

HyperChoice cross_validate(const Matrix& X_train,
                           const ObservedLabelMatrix& observed, Method method,
                           const std::vector<double>& lambda_grid,
                           const std::vector<double>& sigma_grid, int folds,
                           std::uint64_t seed, const CccpConfig& opt) {
    if (folds < 2) throw Error("cross_validate: folds must be >= 2");
    if (lambda_grid.empty()) throw Error("cross_validate: empty lambda grid");
    if (method == Method::Ridge) return HyperChoice{0.0, 0.0, 0.0};

    std::vector<double> lambdas = lambda_grid;
    std::sort(lambdas.begin(), lambdas.end());
    std::vector<double> sigmas;
    if (method_is_kernel(method)) {
        if (sigma_grid.empty()) throw Error("cross_validate: empty sigma grid");
        sigmas = sigma_grid;
        std::sort(sigmas.begin(), sigmas.end());
    } else {
        sigmas = {0.0};
    }

    const Index n = X_train.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    // contiguous chunks of the shuffled order
    std::vector<std::vector<Index>> fold_rows(static_cast<std::size_t>(folds));
    for (Index i = 0; i < n; ++i) {
        fold_rows[static_cast<std::size_t>(i % folds)].push_back(order[
            static_cast<std::size_t>(i)]);
    }

    struct FoldData {
        std::vector<Index> train, val;
    };
    std::vector<FoldData> fold_data;
    for (int f = 0; f < folds; ++f) {
        FoldData fd;
        fd.val = fold_rows[static_cast<std::size_t>(f)];
        for (int g = 0; g < folds; ++g) {
            if (g == f) continue;
            fd.train.insert(fd.train.end(),
                            fold_rows[static_cast<std::size_t>(g)].begin(),
                            fold_rows[static_cast<std::size_t>(g)].end());
        }
        if (fd.train.empty() || fd.val.empty()) {
            throw Error("cross_validate: fold with an empty side");
        }
        fold_data.push_back(std::move(fd));
    }

    HyperChoice best;
    best.cv_ap = -std::numeric_limits<double>::infinity();
    bool have_best = false;

    for (double lambda : lambdas) {
        for (double sigma : sigmas) {
            double ap_sum = 0.0;
            int ap_count = 0;
            for (const FoldData& fd : fold_data) {
                const Matrix Xtr = group_rows(X_train, fd.train);
                const Matrix Xval = group_rows(X_train, fd.val);
                const ObservedLabelMatrix obs_tr =
                    select_rows(observed, fd.train);
                const ObservedLabelMatrix obs_val =
                    select_rows(observed, fd.val);

                const TrainedModel model =
                    train_method(method, Xtr, obs_tr, lambda, sigma, opt);
                const Matrix scores = predict_scores(model, Xval);
                const double ap = masked_average_precision(scores, obs_val);
                if (!std::isnan(ap)) {
                    ap_sum += ap;
                    ++ap_count;
                }
            }
            if (ap_count == 0) continue;
            const double mean_ap = ap_sum / ap_count;
            // strict improvement keeps the smallest (lambda, sigma) on ties
            if (!have_best || mean_ap > best.cv_ap) {
                best = HyperChoice{lambda, sigma, mean_ap};
                have_best = true;
            }
        }
    }
    if (!have_best) {
        // no fold had countable validation rows; fall back to the smallest point
        best = HyperChoice{lambdas.front(),
                           method_is_kernel(method) ? sigmas.front() : 0.0,
                           0.0};
    }
    return best;
}

namespace {

Dataset resolve_dataset(const ExperimentConfig& cfg) {
    if (!cfg.dataset_path.empty()) {
        return load_dataset(cfg.dataset_path, cfg.format);
    }
    const SyntheticSpec& s = *cfg.synth;
    const std::uint64_t data_seed = derive_seed(cfg.seed, 0xDA7AULL, 0);
    if (s.flavor == SyntheticSpec::Flavor::Xor) {
        return generate_xor_dataset(s.n, s.noise, data_seed);
    }
    return generate_synthetic(s.n, s.d, s.c, s.rank, s.noise, data_seed);
}

ResultTable run_methods(const ExperimentConfig& base,
                        const std::vector<Method>& methods) {
    ExperimentConfig cfg = base;
    cfg.apply_grid_defaults();
    cfg.check();

    const Dataset ds = resolve_dataset(cfg);
    ds.validate();

    const Index reps = cfg.repetitions;
    std::vector<std::vector<RepetitionResult>> results(
        static_cast<std::size_t>(reps));

    parallel_for(reps, [&](Index rep) {
        const DataSplit split = split_train_test(
            ds, cfg.train_frac, derive_seed(cfg.seed, rep, 0));
        const Matrix Xtr_raw = group_rows(ds.features, split.train_indices);
        const Matrix Xte_raw = group_rows(ds.features, split.test_indices);
        const Matrix Ytr = group_rows(ds.labels, split.train_indices);
        const Matrix Yte = group_rows(ds.labels, split.test_indices);

        const FeatureScaler scaler = FeatureScaler::fit(Xtr_raw);
        const Matrix Xtr = scaler.apply(Xtr_raw);
        const Matrix Xte = scaler.apply(Xte_raw);

        const ObservationMask mask = generate_mask(
            Ytr.rows(), Ytr.cols(), cfg.rho, derive_seed(cfg.seed, rep, 1));
        const ObservedLabelMatrix observed = apply_mask(Ytr, mask);

        for (Method method : methods) {
            const HyperChoice hp = cross_validate(
                Xtr, observed, method, cfg.lambda_grid, cfg.sigma_grid,
                cfg.cv_folds, derive_seed(cfg.seed, rep, 2), cfg.opt);
            const TrainedModel model = train_method(
                method, Xtr, observed, hp.lambda, hp.sigma, cfg.opt);
            const Matrix scores = predict_scores(model, Xte);

            RepetitionResult row;
            row.method = method;
            row.rho = cfg.rho;
            row.rep = static_cast<int>(rep);
            row.report = evaluate_all(scores, Yte);
            row.lambda = hp.lambda;
            row.sigma = hp.sigma;
            results[static_cast<std::size_t>(rep)].push_back(row);
        }
    });

    ResultTable table;
    for (const auto& rep_rows : results) {
        table.rows.insert(table.rows.end(), rep_rows.begin(), rep_rows.end());
    }
    return table;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    return run_methods(cfg, {cfg.method});
}

ResultTable run_ablation(const ExperimentConfig& cfg) {
    return run_methods(cfg, {Method::Dm2lLinear, Method::Dm2lLocalOnly,
                             Method::GlobalOnly, Method::Ridge});
}

MetricAggregate ResultTable::aggregate(Method m, double rho) const {
    std::vector<const RepetitionResult*> cell;
    for (const auto& r : rows) {
        if (r.method == m && r.rho == rho) cell.push_back(&r);
    }
    if (cell.empty()) throw Error("aggregate: empty (method, rho) cell");

    auto stats = [&](auto metric, double& mean, double& sd) {
        double sum = 0.0;
        for (const auto* r : cell) sum += metric(r->report);
        mean = sum / static_cast<double>(cell.size());
        double sq = 0.0;
        for (const auto* r : cell) {
            const double x = metric(r->report) - mean;
            sq += x * x;
        }
        sd = std::sqrt(sq / static_cast<double>(cell.size()));
    };

    MetricAggregate agg;
    stats([](const EvaluationReport& r) { return r.ranking_loss; },
          agg.mean_rkl, agg.std_rkl);
    stats([](const EvaluationReport& r) { return r.macro_auc; }, agg.mean_auc,
          agg.std_auc);
    stats([](const EvaluationReport& r) { return r.coverage; }, agg.mean_cvg,
          agg.std_cvg);
    stats([](const EvaluationReport& r) { return r.average_precision; },
          agg.mean_ap, agg.std_ap);
    return agg;
}

std::vector<std::pair<Method, double>> ResultTable::cells() const {
    std::vector<std::pair<Method, double>> out;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.method, r.rho);
        if (std::find(out.begin(), out.end(), key) == out.end()) {
            out.push_back(key);
        }
    }
    return out;
}

void emit_results(const ResultTable& table, const std::string& path,
                  ResultFormat format) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write results file: " + path);
    out.precision(std::numeric_limits<double>::max_digits10);

    if (format == ResultFormat::Csv) {
        out << "method,rho,rep,rkl,auc,cvg,ap,lambda,sigma\n";
        for (const auto& r : table.rows) {
            out << method_name(r.method) << ',' << r.rho << ',' << r.rep << ','
                << r.report.ranking_loss << ',' << r.report.macro_auc << ','
                << r.report.coverage << ',' << r.report.average_precision
                << ',' << r.lambda << ',' << r.sigma << '\n';
        }
        for (const auto& [m, rho] : table.cells()) {
            const MetricAggregate a = table.aggregate(m, rho);
            out << method_name(m) << ',' << rho << ",mean," << a.mean_rkl
                << ',' << a.mean_auc << ',' << a.mean_cvg << ',' << a.mean_ap
                << ",,\n";
            out << method_name(m) << ',' << rho << ",std," << a.std_rkl << ','
                << a.std_auc << ',' << a.std_cvg << ',' << a.std_ap << ",,\n";
        }
        return;
    }

    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : table.rows) {
        j["rows"].push_back({{"method", method_name(r.method)},
                             {"rho", r.rho},
                             {"rep", r.rep},
                             {"rkl", r.report.ranking_loss},
                             {"auc", r.report.macro_auc},
                             {"cvg", r.report.coverage},
                             {"ap", r.report.average_precision},
                             {"lambda", r.lambda},
                             {"sigma", r.sigma}});
    }
    j["aggregates"] = nlohmann::json::array();
    for (const auto& [m, rho] : table.cells()) {
        const MetricAggregate a = table.aggregate(m, rho);
        j["aggregates"].push_back({{"method", method_name(m)},
                                   {"rho", rho},
                                   {"mean_rkl", a.mean_rkl},
                                   {"std_rkl", a.std_rkl},
                                   {"mean_auc", a.mean_auc},
                                   {"std_auc", a.std_auc},
                                   {"mean_cvg", a.mean_cvg},
                                   {"std_cvg", a.std_cvg},
                                   {"mean_ap", a.mean_ap},
                                   {"std_ap", a.std_ap}});
    }
    out << j.dump(2) << '\n';
}

ResultTable load_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open results file: " + path);

    std::string line;
    if (!std::getline(in, line) ||
        line != "method,rho,rep,rkl,auc,cvg,ap,lambda,sigma") {
        throw Error("results file: unexpected header");
    }

    ResultTable table;
    Index lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> tok;
        std::istringstream ls(line);
        std::string t;
        while (std::getline(ls, t, ',')) tok.push_back(t);
        tok.resize(9);
        if (tok[2] == "mean" || tok[2] == "std") continue;  // aggregate rows
        try {
            RepetitionResult r;
            r.method = parse_method(tok[0]);
            r.rho = std::stod(tok[1]);
            r.rep = std::stoi(tok[2]);
            r.report.ranking_loss = std::stod(tok[3]);
            r.report.macro_auc = std::stod(tok[4]);
            r.report.coverage = std::stod(tok[5]);
            r.report.average_precision = std::stod(tok[6]);
            r.lambda = std::stod(tok[7]);
            r.sigma = std::stod(tok[8]);
            table.rows.push_back(r);
        } catch (const std::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return table;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);

    ExperimentConfig cfg;
    SyntheticSpec synth;
    bool have_synth = false;

    auto parse_grid = [](const std::string& v) {
        std::vector<double> grid;
        std::istringstream gs(v);
        std::string tok;
        while (std::getline(gs, tok, ',')) {
            if (!tok.empty()) grid.push_back(std::stod(tok));
        }
        return grid;
    };

    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{}
                                          : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "dataset") cfg.dataset_path = val;
            else if (key == "format") {
                if (val == "sparse") cfg.format = DatasetFormat::SparseMultilabel;
                else if (val == "csv") cfg.format = DatasetFormat::DenseCsv;
                else throw Error("format must be sparse or csv");
            }
            else if (key == "method") cfg.method = parse_method(val);
            else if (key == "rho") cfg.rho = std::stod(val);
            else if (key == "train_frac") cfg.train_frac = std::stod(val);
            else if (key == "repetitions") cfg.repetitions = std::stoi(val);
            else if (key == "lambda_grid") cfg.lambda_grid = parse_grid(val);
            else if (key == "sigma_grid") cfg.sigma_grid = parse_grid(val);
            else if (key == "cv_folds") cfg.cv_folds = std::stoi(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "synth") {
                have_synth = true;
                if (val == "lowrank") synth.flavor = SyntheticSpec::Flavor::LowRank;
                else if (val == "xor") synth.flavor = SyntheticSpec::Flavor::Xor;
                else throw Error("synth must be lowrank or xor");
            }
            else if (key == "synth_n") { have_synth = true; synth.n = std::stoll(val); }
            else if (key == "synth_d") { have_synth = true; synth.d = std::stoll(val); }
            else if (key == "synth_c") { have_synth = true; synth.c = std::stoll(val); }
            else if (key == "synth_rank") { have_synth = true; synth.rank = std::stoll(val); }
            else if (key == "synth_noise") { have_synth = true; synth.noise = std::stod(val); }
            else if (key == "max_outer") cfg.opt.max_outer = std::stoi(val);
            else if (key == "max_inner") cfg.opt.max_inner = std::stoi(val);
            else if (key == "eta0") cfg.opt.eta0 = std::stod(val);
            else if (key == "outer_rel_tol") cfg.opt.outer_rel_tol = std::stod(val);
            else if (key == "delta") cfg.opt.delta = std::stod(val);
            else throw Error("unknown key `" + key + "`");
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (have_synth) cfg.synth = synth;
    cfg.opt.lambda_d = 0.0;  // selected per run, not a config constant
    return cfg;
}

}  // namespace dm2l
