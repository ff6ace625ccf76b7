// Command-line front end: train/predict/evaluate single models, run the
// experiment harness, generate synthetic datasets, compute Nemenyi critical
// differences.

#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "dm2l/dataset.hpp"
#include "dm2l/experiments.hpp"
#include "dm2l/metrics.hpp"
#include "dm2l/model.hpp"
#include "dm2l/optimizer.hpp"

namespace {

using namespace dm2l;

DatasetFormat parse_format(const std::string& f) {
    if (f == "sparse") return DatasetFormat::SparseMultilabel;
    if (f == "csv") return DatasetFormat::DenseCsv;
    throw Error("format must be `sparse` or `csv`");
}

void write_scores_csv(const Matrix& scores, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write scores file: " + path);
    out.precision(std::numeric_limits<double>::max_digits10);
    for (Index i = 0; i < scores.rows(); ++i) {
        for (Index j = 0; j < scores.cols(); ++j) {
            out << scores(i, j) << (j + 1 == scores.cols() ? '\n' : ',');
        }
    }
}

Matrix read_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scores file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("scores file is empty: " + path);
    Matrix M(static_cast<Index>(rows.size()),
             static_cast<Index>(rows[0].size()));
    for (Index i = 0; i < M.rows(); ++i) {
        if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) !=
            M.cols()) {
            throw Error("scores file: ragged rows");
        }
        for (Index j = 0; j < M.cols(); ++j) {
            M(i, j) = rows[static_cast<std::size_t>(i)][
                static_cast<std::size_t>(j)];
        }
    }
    return M;
}

void print_report(const EvaluationReport& r) {
    std::cout << "ranking_loss      " << r.ranking_loss << "  (" << r.rkl_instances
              << " instances, " << r.rkl_excluded << " excluded)\n"
              << "macro_auc         " << r.macro_auc << "  (" << r.auc_labels
              << " labels, " << r.auc_excluded << " excluded)\n"
              << "coverage          " << r.coverage << "  (" << r.cvg_instances
              << " instances, " << r.cvg_excluded << " excluded)\n"
              << "average_precision " << r.average_precision << "  ("
              << r.ap_instances << " instances, " << r.ap_excluded
              << " excluded)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DM2L: discriminant multi-label learning with missing labels"};
    app.require_subcommand(1);

    // ---- train ----
    auto* train = app.add_subcommand("train", "fit a model on a dataset");
    std::string tr_data, tr_format = "sparse", tr_method = "dm2l-l";
    std::string tr_out = "model.dm2l", tr_trace;
    double tr_lambda = 0.0, tr_sigma = 1.0, tr_rho = 1.0;
    std::uint64_t tr_seed = 0;
    CccpConfig tr_cfg;
    train->add_option("--data", tr_data, "dataset file")->required();
    train->add_option("--format", tr_format, "sparse|csv");
    train->add_option("--method", tr_method,
                      "dm2l-l|dm2l-nl|dm2l-lo|global-only|ridge");
    train->add_option("--lambda", tr_lambda, "discriminant weight lambda_d");
    train->add_option("--sigma", tr_sigma, "Gaussian kernel width");
    train->add_option("--rho", tr_rho, "observed label fraction in (0,1]");
    train->add_option("--seed", tr_seed, "mask seed");
    train->add_option("--out", tr_out, "model output path");
    train->add_option("--trace", tr_trace, "write per-iteration CSV trace");
    train->add_option("--max-outer", tr_cfg.max_outer);
    train->add_option("--max-inner", tr_cfg.max_inner);
    train->add_option("--eta0", tr_cfg.eta0);
    train->add_option("--outer-rel-tol", tr_cfg.outer_rel_tol);
    train->add_option("--delta", tr_cfg.delta);

    // ---- predict ----
    auto* predict = app.add_subcommand("predict", "score instances with a model");
    std::string pr_model, pr_data, pr_format = "sparse", pr_out = "scores.csv";
    predict->add_option("--model", pr_model)->required();
    predict->add_option("--data", pr_data)->required();
    predict->add_option("--format", pr_format, "sparse|csv");
    predict->add_option("--out", pr_out, "scores CSV output");

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand(
        "evaluate", "ranking metrics of scores against true labels");
    std::string ev_scores, ev_model, ev_data, ev_format = "sparse";
    evaluate->add_option("--scores", ev_scores, "scores CSV (or use --model)");
    evaluate->add_option("--model", ev_model, "model to score with");
    evaluate->add_option("--data", ev_data)->required();
    evaluate->add_option("--format", ev_format, "sparse|csv");

    // ---- experiment ----
    auto* experiment =
        app.add_subcommand("experiment", "run the repetition/CV protocol");
    std::string ex_config, ex_out = "results.csv", ex_format = "csv";
    bool ex_ablation = false;
    experiment->add_option("--config", ex_config, "flat key=value config file")
        ->required();
    experiment->add_option("--out", ex_out, "results output path");
    experiment->add_option("--output-format", ex_format, "csv|json");
    experiment->add_flag("--ablation", ex_ablation,
                         "compare dm2l-l/dm2l-lo/global-only/ridge");

    // ---- gen-synth ----
    auto* gen = app.add_subcommand("gen-synth", "generate a synthetic dataset");
    std::string g_out = "synth.txt", g_format = "sparse", g_flavor = "lowrank";
    Index g_n = 500, g_d = 20, g_c = 10, g_rank = 3;
    double g_noise = 0.1;
    std::uint64_t g_seed = 0;
    gen->add_option("--out", g_out)->required();
    gen->add_option("--format", g_format, "sparse|csv");
    gen->add_option("--flavor", g_flavor, "lowrank|xor");
    gen->add_option("--n", g_n);
    gen->add_option("--d", g_d);
    gen->add_option("--c", g_c);
    gen->add_option("--rank", g_rank);
    gen->add_option("--noise", g_noise);
    gen->add_option("--seed", g_seed);

    // ---- nemenyi ----
    auto* nemenyi =
        app.add_subcommand("nemenyi", "critical difference for k methods on N datasets");
    int nm_k = 6, nm_n = 24;
    double nm_q = 3.102;
    nemenyi->add_option("--k", nm_k, "number of methods");
    nemenyi->add_option("--n", nm_n, "number of datasets");
    nemenyi->add_option("--q", nm_q, "studentized range quantile q_alpha");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            const Dataset ds = load_dataset(tr_data, parse_format(tr_format));
            const FeatureScaler scaler = FeatureScaler::fit(ds.features);
            const Matrix X = scaler.apply(ds.features);
            const ObservationMask mask = generate_mask(
                ds.instance_count(), ds.label_count(), tr_rho, tr_seed);
            const ObservedLabelMatrix observed = apply_mask(ds.labels, mask);

            CccpTrace trace;
            TrainedModel model =
                train_method(parse_method(tr_method), X, observed, tr_lambda,
                             tr_sigma, tr_cfg, &trace);
            model.scaler = scaler;  // predict on raw features later
            save_model(model, tr_out);
            if (!tr_trace.empty()) {
                std::ofstream tf(tr_trace);
                if (!tf) throw Error("cannot write trace file: " + tr_trace);
                write_trace_csv(trace, tf);
            }
            std::cout << "trained " << tr_method << ": objective "
                      << trace.best_objective << " after "
                      << trace.iterations.size() << " outer iterations -> "
                      << tr_out << "\n";
        } else if (*predict) {
            const TrainedModel model = load_model(pr_model);
            const Dataset ds = load_dataset(pr_data, parse_format(pr_format));
            write_scores_csv(predict_scores(model, ds.features), pr_out);
            std::cout << "wrote scores for " << ds.instance_count()
                      << " instances -> " << pr_out << "\n";
        } else if (*evaluate) {
            const Dataset ds = load_dataset(ev_data, parse_format(ev_format));
            Matrix scores;
            if (!ev_scores.empty()) {
                scores = read_scores_csv(ev_scores);
            } else if (!ev_model.empty()) {
                scores = predict_scores(load_model(ev_model), ds.features);
            } else {
                throw Error("evaluate: need --scores or --model");
            }
            print_report(evaluate_all(scores, ds.labels));
        } else if (*experiment) {
            const ExperimentConfig cfg = load_experiment_config(ex_config);
            const ResultTable table =
                ex_ablation ? run_ablation(cfg) : run_experiment(cfg);
            emit_results(table, ex_out,
                         ex_format == "json" ? ResultFormat::Json
                                             : ResultFormat::Csv);
            for (const auto& [m, rho] : table.cells()) {
                const MetricAggregate a = table.aggregate(m, rho);
                std::cout << method_name(m) << " rho=" << rho << ": rkl "
                          << a.mean_rkl << ", auc " << a.mean_auc << ", cvg "
                          << a.mean_cvg << ", ap " << a.mean_ap << "\n";
            }
            std::cout << "wrote " << ex_out << "\n";
        } else if (*gen) {
            Dataset ds;
            if (g_flavor == "xor") {
                ds = generate_xor_dataset(g_n, g_noise, g_seed);
            } else if (g_flavor == "lowrank") {
                ds = generate_synthetic(g_n, g_d, g_c, g_rank, g_noise, g_seed);
            } else {
                throw Error("flavor must be lowrank or xor");
            }
            save_dataset(ds, g_out, parse_format(g_format));
            std::cout << "wrote " << ds.instance_count() << "x"
                      << ds.feature_dim() << " dataset with "
                      << ds.label_count() << " labels -> " << g_out << "\n";
        } else if (*nemenyi) {
            std::cout << "CD = " << nemenyi_cd(nm_k, nm_n, nm_q) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
