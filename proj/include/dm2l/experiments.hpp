#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dm2l/dataset.hpp"
#include "dm2l/metrics.hpp"
#include "dm2l/model.hpp"
#include "dm2l/optimizer.hpp"
#include "dm2l/types.hpp"

namespace dm2l {

enum class Method { Dm2lLinear, Dm2lKernel, Dm2lLocalOnly, GlobalOnly, Ridge };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct SyntheticSpec {
    enum class Flavor { LowRank, Xor };
    Flavor flavor = Flavor::LowRank;
    Index n = 500, d = 20, c = 10, rank = 3;
    double noise = 0.1;
};

struct ExperimentConfig {
    // data source: a file path or a synthetic spec
    std::string dataset_path;
    DatasetFormat format = DatasetFormat::SparseMultilabel;
    std::optional<SyntheticSpec> synth;

    Method method = Method::Dm2lLinear;
    double rho = 1.0;
    double train_frac = 0.6;
    int repetitions = 10;  // desk default; the full protocol uses 30
    std::vector<double> lambda_grid;  // defaults to 1e-5..1e5 decades
    std::vector<double> sigma_grid;   // defaults to {0.5, 1, 1.5, 2}
    int cv_folds = 5;
    std::uint64_t seed = 0;
    CccpConfig opt;

    void apply_grid_defaults();
    void check() const;
};

struct RepetitionResult {
    Method method = Method::Dm2lLinear;
    double rho = 1.0;
    int rep = 0;
    EvaluationReport report;
    double lambda = 0.0;
    double sigma = 0.0;  // 0 when the method has no kernel width
};

struct MetricAggregate {
    double mean_rkl = 0, std_rkl = 0;
    double mean_auc = 0, std_auc = 0;
    double mean_cvg = 0, std_cvg = 0;
    double mean_ap = 0, std_ap = 0;
};

struct ResultTable {
    std::vector<RepetitionResult> rows;

    // aggregate over the rows of one (method, rho) cell
    MetricAggregate aggregate(Method m, double rho) const;
    std::vector<std::pair<Method, double>> cells() const;
};

struct HyperChoice {
    double lambda = 0.0;
    double sigma = 0.0;
    double cv_ap = 0.0;  // mean validation average precision of the winner
};

// 5-fold style grid search maximizing mean validation average precision on
// the observed entries of held-out instances.
HyperChoice cross_validate(const Matrix& X_train,
                           const ObservedLabelMatrix& observed, Method method,
                           const std::vector<double>& lambda_grid,
                           const std::vector<double>& sigma_grid, int folds,
                           std::uint64_t seed, const CccpConfig& opt);

ResultTable run_experiment(const ExperimentConfig& cfg);

// Same protocol across {dm2l-l, dm2l-lo, global-only, ridge} with shared
// per-repetition splits and masks.
ResultTable run_ablation(const ExperimentConfig& cfg);

// Nemenyi critical difference: q_alpha * sqrt(k (k+1) / (6 N)).
double nemenyi_cd(int k, int N, double q_alpha);

enum class ResultFormat { Csv, Json };
void emit_results(const ResultTable& table, const std::string& path,
                  ResultFormat format);
ResultTable load_results_csv(const std::string& path);

// Deterministic child-seed derivation (splitmix64 over the key triple).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Flat key=value config file mirroring ExperimentConfig.
ExperimentConfig load_experiment_config(const std::string& path);

// Single fit on already-normalized features; backs both the harness and the
// CLI `train` subcommand.
TrainedModel train_method(Method method, const Matrix& X_train,
                          const ObservedLabelMatrix& observed, double lambda,
                          double sigma, const CccpConfig& opt,
                          CccpTrace* trace = nullptr);

// XOR-layout nonlinear dataset with c = 2 complementary labels.
Dataset generate_xor_dataset(Index n, double noise, std::uint64_t seed);

// Average precision restricted to the observed entries of each row; rows
// without an observed positive are skipped.  NaN when nothing is countable.
double masked_average_precision(const Matrix& scores,
                                const ObservedLabelMatrix& observed);

}  // namespace dm2l
