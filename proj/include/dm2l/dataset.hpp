#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dm2l/types.hpp"

namespace dm2l {

// Multi-label dataset: features X (n x d) and labels Y (n x c) with entries
// in {-1, +1}.
struct Dataset {
    Matrix features;
    Matrix labels;
    std::vector<std::string> label_names;

    Index instance_count() const { return features.rows(); }
    Index feature_dim() const { return features.cols(); }
    Index label_count() const { return labels.cols(); }

    // Checks shape consistency and the {-1,+1} label alphabet.
    void validate() const;
};

// Set of observed (row, col) entries of a label matrix, stored densely.
class ObservationMask {
public:
    ObservationMask(Index rows, Index cols)
        : flags_(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
              rows, cols, false)),
          count_(0) {}

    static ObservationMask full(Index rows, Index cols);

    Index rows() const { return flags_.rows(); }
    Index cols() const { return flags_.cols(); }
    Index count() const { return count_; }
    bool contains(Index i, Index j) const { return flags_(i, j); }

    void insert(Index i, Index j);

private:
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> flags_;
    Index count_;
};

// Observed label matrix: values in {-1, 0, +1}, zero exactly off-mask.
struct ObservedLabelMatrix {
    Matrix values;
    ObservationMask mask;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
};

struct DataSplit {
    std::vector<Index> train_indices;
    std::vector<Index> test_indices;
    std::uint64_t seed = 0;
};

enum class DatasetFormat { SparseMultilabel, DenseCsv };

// R_Omega: keep Y on the mask, zero elsewhere.
ObservedLabelMatrix apply_mask(const Matrix& Y, const ObservationMask& mask);

// R_Omega(P) - Ytilde: entrywise residual on the mask, zero elsewhere.
Matrix mask_residual(const Matrix& P, const ObservedLabelMatrix& observed);

// Uniform sample of round(rho * n * c) cells without replacement.
ObservationMask generate_mask(Index n, Index c, double rho, std::uint64_t seed);

DataSplit split_train_test(const Dataset& ds, double train_frac,
                           std::uint64_t seed);

Dataset load_dataset(const std::string& path, DatasetFormat format);
void save_dataset(const Dataset& ds, const std::string& path,
                  DatasetFormat format);

// Synthetic low-rank dataset plus the real-valued score matrix it was
// thresholded from.
struct SyntheticData {
    Dataset dataset;
    Matrix scores;  // X * U * V^T, before noise and sign
};

SyntheticData generate_synthetic_full(Index n, Index d, Index c, Index rank,
                                      double noise, std::uint64_t seed);
Dataset generate_synthetic(Index n, Index d, Index c, Index rank, double noise,
                           std::uint64_t seed);

// Per-feature z-score statistics; constant columns map to all-zero.
struct FeatureScaler {
    Vector mean;
    Vector stddev;  // population std; 0 marks a constant column

    static FeatureScaler fit(const Matrix& X);
    static FeatureScaler identity(Index d);
    Matrix apply(const Matrix& X) const;
};

// Column-wise z-score of X against its own statistics.
Matrix normalize_features(const Matrix& X);

}  // namespace dm2l
