#include "dm2l/model.hpp"

#include <cstring>
#include <fstream>

namespace dm2l {

namespace {

constexpr char kMagic[4] = {'D', 'M', '2', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw Error("model file: truncated");
    }
    return v;
}
std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw Error("model file: truncated");
    }
    return v;
}
double read_f64(std::istream& in) {
    double v = 0.0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw Error("model file: truncated");
    }
    return v;
}

// row-major, shape-prefixed
void write_matrix(std::ostream& out, const Matrix& M) {
    write_u64(out, static_cast<std::uint64_t>(M.rows()));
    write_u64(out, static_cast<std::uint64_t>(M.cols()));
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) write_f64(out, M(i, j));
    }
}

Matrix read_matrix(std::istream& in) {
    const auto rows = static_cast<Index>(read_u64(in));
    const auto cols = static_cast<Index>(read_u64(in));
    if (rows < 0 || cols < 0 || rows * cols > (Index{1} << 32)) {
        throw Error("model file: corrupt matrix header");
    }
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) M(i, j) = read_f64(in);
    }
    return M;
}

Matrix vec_as_matrix(const Vector& v) {
    Matrix M(v.size(), 1);
    M.col(0) = v;
    return M;
}

}  // namespace

Matrix predict_scores(const TrainedModel& model, const Matrix& X_test) {
    const Matrix X = model.scaler.apply(X_test);
    if (model.variant == ModelVariant::Linear) {
        if (X.cols() != model.weights.rows()) {
            throw Error("predict: feature dimension mismatch");
        }
        return X * model.weights;
    }
    if (X.cols() != model.train_features.cols()) {
        throw Error("predict: feature dimension mismatch");
    }
    return cross_kernel(X, model.train_features, model.kernel) *
           model.coefficients;
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path);

    out.write(kMagic, sizeof kMagic);
    write_u32(out, kFormatVersion);
    write_u32(out, static_cast<std::uint32_t>(model.variant));
    write_u32(out, static_cast<std::uint32_t>(model.kernel.kind));
    write_f64(out, model.kernel.sigma);
    write_f64(out, model.lambda_d);
    write_u64(out, model.config_digest);
    write_f64(out, model.training_objective);
    write_matrix(out, vec_as_matrix(model.scaler.mean));
    write_matrix(out, vec_as_matrix(model.scaler.stddev));
    if (model.variant == ModelVariant::Linear) {
        write_matrix(out, model.weights);
    } else {
        write_matrix(out, model.coefficients);
        write_matrix(out, model.train_features);
    }
    if (!out) throw Error("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);

    char magic[4] = {};
    if (!in.read(magic, sizeof magic) ||
        std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw Error("model file: bad magic bytes (not a DM2L model)");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kFormatVersion) {
        throw Error("model file: unsupported format version " +
                    std::to_string(version));
    }

    TrainedModel model;
    const std::uint32_t variant = read_u32(in);
    if (variant > 1) throw Error("model file: unknown variant tag");
    model.variant = static_cast<ModelVariant>(variant);
    const std::uint32_t kind = read_u32(in);
    if (kind > 1) throw Error("model file: unknown kernel kind");
    model.kernel.kind = static_cast<KernelKind>(kind);
    model.kernel.sigma = read_f64(in);
    model.lambda_d = read_f64(in);
    model.config_digest = read_u64(in);
    model.training_objective = read_f64(in);
    model.scaler.mean = read_matrix(in).col(0);
    model.scaler.stddev = read_matrix(in).col(0);
    if (model.variant == ModelVariant::Linear) {
        model.weights = read_matrix(in);
    } else {
        model.coefficients = read_matrix(in);
        model.train_features = read_matrix(in);
        if (model.coefficients.rows() != model.train_features.rows()) {
            throw Error("model file: coefficient/feature row mismatch");
        }
    }
    return model;
}

}  // namespace dm2l
