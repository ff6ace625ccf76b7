#pragma once

#include <cstdint>
#include <string>

#include "dm2l/dataset.hpp"
#include "dm2l/kernels.hpp"
#include "dm2l/types.hpp"

namespace dm2l {

enum class ModelVariant : std::uint8_t { Linear = 0, Kernel = 1 };

// Trained parameters plus everything needed to score new instances.
struct TrainedModel {
    ModelVariant variant = ModelVariant::Linear;
    Matrix weights;         // d x c, Linear variant
    Matrix coefficients;    // n x c, Kernel variant
    Matrix train_features;  // normalized training features, Kernel variant
    KernelSpec kernel;
    FeatureScaler scaler;

    double lambda_d = 0.0;
    std::uint64_t config_digest = 0;
    double training_objective = 0.0;
};

// Scores raw test instances: the stored scaler is applied first.
Matrix predict_scores(const TrainedModel& model, const Matrix& X_test);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace dm2l
