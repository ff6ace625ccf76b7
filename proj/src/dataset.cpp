#include "dm2l/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace dm2l {

void Dataset::validate() const {
    if (features.rows() < 1 || features.cols() < 1 || labels.cols() < 1) {
        throw Error("dataset: n, d and c must all be at least 1");
    }
    if (labels.rows() != features.rows()) {
        throw Error("dataset: feature and label row counts differ");
    }
    if (!label_names.empty() &&
        static_cast<Index>(label_names.size()) != labels.cols()) {
        throw Error("dataset: label name count does not match label count");
    }
    for (Index i = 0; i < labels.rows(); ++i) {
        for (Index j = 0; j < labels.cols(); ++j) {
            const double v = labels(i, j);
            if (v != 1.0 && v != -1.0) {
                throw Error("dataset: label entry (" + std::to_string(i) + "," +
                            std::to_string(j) + ") is not in {-1,+1}");
            }
        }
    }
}

ObservationMask ObservationMask::full(Index rows, Index cols) {
    ObservationMask m(rows, cols);
    m.flags_.setConstant(true);
    m.count_ = rows * cols;
    return m;
}

void ObservationMask::insert(Index i, Index j) {
    if (i < 0 || i >= rows() || j < 0 || j >= cols()) {
        throw Error("mask: index out of bounds");
    }
    if (!flags_(i, j)) {
        flags_(i, j) = true;
        ++count_;
    }
}

ObservedLabelMatrix apply_mask(const Matrix& Y, const ObservationMask& mask) {
    if (Y.rows() != mask.rows() || Y.cols() != mask.cols()) {
        throw Error("apply_mask: label matrix and mask shapes differ");
    }
    Matrix out = Matrix::Zero(Y.rows(), Y.cols());
    for (Index i = 0; i < Y.rows(); ++i) {
        for (Index j = 0; j < Y.cols(); ++j) {
            if (mask.contains(i, j)) out(i, j) = Y(i, j);
        }
    }
    return ObservedLabelMatrix{std::move(out), mask};
}

Matrix mask_residual(const Matrix& P, const ObservedLabelMatrix& observed) {
    if (P.rows() != observed.rows() || P.cols() != observed.cols()) {
        throw Error("mask_residual: shape mismatch");
    }
    Matrix out = Matrix::Zero(P.rows(), P.cols());
    for (Index i = 0; i < P.rows(); ++i) {
        for (Index j = 0; j < P.cols(); ++j) {
            if (observed.mask.contains(i, j)) {
                out(i, j) = P(i, j) - observed.values(i, j);
            }
        }
    }
    return out;
}

ObservationMask generate_mask(Index n, Index c, double rho,
                              std::uint64_t seed) {
    if (rho < 0.0 || rho > 1.0) {
        throw Error("generate_mask: rho must lie in [0,1]");
    }
    const Index total = n * c;
    const Index target = static_cast<Index>(std::llround(rho * total));

    std::vector<Index> cells(total);
    std::iota(cells.begin(), cells.end(), Index{0});
    std::mt19937_64 rng(seed);
    // partial Fisher-Yates: only the first `target` positions are needed
    for (Index i = 0; i < target; ++i) {
        std::uniform_int_distribution<Index> pick(i, total - 1);
        std::swap(cells[i], cells[pick(rng)]);
    }

    ObservationMask mask(n, c);
    for (Index i = 0; i < target; ++i) {
        mask.insert(cells[i] / c, cells[i] % c);
    }
    return mask;
}

DataSplit split_train_test(const Dataset& ds, double train_frac,
                           std::uint64_t seed) {
    if (train_frac <= 0.0 || train_frac >= 1.0) {
        throw Error("split_train_test: train_frac must lie in (0,1)");
    }
    const Index n = ds.instance_count();
    const Index n_train = static_cast<Index>(std::llround(train_frac * n));
    if (n_train == 0 || n_train == n) {
        throw Error("split_train_test: split leaves one side empty");
    }
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    DataSplit split;
    split.seed = seed;
    split.train_indices.assign(order.begin(), order.begin() + n_train);
    split.test_indices.assign(order.begin() + n_train, order.end());
    return split;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, Index line,
                             const std::string& msg) {
    throw Error(path + ":" + std::to_string(line) + ": " + msg);
}

Dataset load_sparse(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);

    Index lineno = 1;
    std::string line;
    if (!std::getline(in, line)) parse_fail(path, 1, "missing header line");
    Index n = 0, d = 0, c = 0;
    {
        std::istringstream hs(line);
        if (!(hs >> n >> d >> c) || n < 1 || d < 1 || c < 1) {
            parse_fail(path, 1, "header must be `n d c` with positive counts");
        }
    }

    Dataset ds;
    ds.features = Matrix::Zero(n, d);
    ds.labels = Matrix::Constant(n, c, -1.0);
    for (Index j = 0; j < c; ++j) {
        ds.label_names.push_back("label" + std::to_string(j + 1));
    }

    for (Index i = 0; i < n; ++i) {
        ++lineno;
        if (!std::getline(in, line)) {
            parse_fail(path, lineno, "unexpected end of file");
        }
        const auto sep = line.find(' ');
        const std::string label_field =
            sep == std::string::npos ? line : line.substr(0, sep);
        const std::string feat_field =
            sep == std::string::npos ? std::string{} : line.substr(sep + 1);

        // comma-separated 1-based indices of positive labels; may be empty
        if (!label_field.empty()) {
            std::istringstream ls(label_field);
            std::string tok;
            while (std::getline(ls, tok, ',')) {
                if (tok.empty()) continue;
                Index idx = 0;
                try {
                    idx = std::stoll(tok);
                } catch (const std::exception&) {
                    parse_fail(path, lineno, "bad label index `" + tok + "`");
                }
                if (idx < 1 || idx > c) {
                    parse_fail(path, lineno,
                               "label index " + tok + " outside 1.." +
                                   std::to_string(c));
                }
                ds.labels(i, idx - 1) = 1.0;
            }
        }

        std::istringstream fs(feat_field);
        std::string pair;
        while (fs >> pair) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) {
                parse_fail(path, lineno, "expected feat:val, got `" + pair + "`");
            }
            Index fidx = 0;
            double val = 0.0;
            try {
                fidx = std::stoll(pair.substr(0, colon));
                val = std::stod(pair.substr(colon + 1));
            } catch (const std::exception&) {
                parse_fail(path, lineno, "bad feat:val pair `" + pair + "`");
            }
            if (fidx < 0 || fidx >= d) {
                parse_fail(path, lineno,
                           "feature index " + std::to_string(fidx) +
                               " outside 0.." + std::to_string(d - 1));
            }
            ds.features(i, fidx) = val;
        }
    }
    return ds;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) parse_fail(path, 1, "missing header row");

    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) header.push_back(tok);
    }
    Index c = 0;
    while (c < static_cast<Index>(header.size()) &&
           header[c].rfind("y", 0) == 0) {
        ++c;
    }
    const Index d = static_cast<Index>(header.size()) - c;
    if (c < 1 || d < 1) {
        parse_fail(path, 1, "header must be y1..yc,x1..xd");
    }

    std::vector<std::vector<double>> rows;
    Index lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream rs(line);
        std::string tok;
        while (std::getline(rs, tok, ',')) {
            try {
                row.push_back(std::stod(tok));
            } catch (const std::exception&) {
                parse_fail(path, lineno, "bad numeric value `" + tok + "`");
            }
        }
        if (static_cast<Index>(row.size()) != c + d) {
            parse_fail(path, lineno,
                       "expected " + std::to_string(c + d) + " columns, got " +
                           std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) parse_fail(path, lineno, "no data rows");

    const Index n = static_cast<Index>(rows.size());
    Dataset ds;
    ds.features = Matrix(n, d);
    ds.labels = Matrix(n, c);
    for (Index j = 0; j < c; ++j) ds.label_names.push_back(header[j]);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < c; ++j) {
            const double v = rows[i][j];
            if (v != 1.0 && v != -1.0 && v != 0.0) {
                parse_fail(path, i + 2,
                           "label value outside {-1,0,+1} in column " +
                               std::to_string(j + 1));
            }
            ds.labels(i, j) = v > 0.0 ? 1.0 : -1.0;  // {0,1} maps 0 -> -1
        }
        for (Index j = 0; j < d; ++j) ds.features(i, j) = rows[i][c + j];
    }
    return ds;
}

void save_sparse(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset file: " + path);
    out.precision(std::numeric_limits<double>::max_digits10);
    out << ds.instance_count() << ' ' << ds.feature_dim() << ' '
        << ds.label_count() << '\n';
    for (Index i = 0; i < ds.instance_count(); ++i) {
        bool first = true;
        for (Index j = 0; j < ds.label_count(); ++j) {
            if (ds.labels(i, j) > 0.0) {
                if (!first) out << ',';
                out << (j + 1);
                first = false;
            }
        }
        for (Index j = 0; j < ds.feature_dim(); ++j) {
            if (ds.features(i, j) != 0.0) {
                out << ' ' << j << ':' << ds.features(i, j);
            }
        }
        out << '\n';
    }
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset file: " + path);
    out.precision(std::numeric_limits<double>::max_digits10);
    for (Index j = 0; j < ds.label_count(); ++j) {
        out << 'y' << (j + 1) << ',';
    }
    for (Index j = 0; j < ds.feature_dim(); ++j) {
        out << 'x' << (j + 1) << (j + 1 == ds.feature_dim() ? '\n' : ',');
    }
    for (Index i = 0; i < ds.instance_count(); ++i) {
        for (Index j = 0; j < ds.label_count(); ++j) {
            out << ds.labels(i, j) << ',';
        }
        for (Index j = 0; j < ds.feature_dim(); ++j) {
            out << ds.features(i, j)
                << (j + 1 == ds.feature_dim() ? '\n' : ',');
        }
    }
}

}  // namespace

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    Dataset ds = format == DatasetFormat::SparseMultilabel ? load_sparse(path)
                                                           : load_csv(path);
    ds.validate();
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path,
                  DatasetFormat format) {
    if (format == DatasetFormat::SparseMultilabel) {
        save_sparse(ds, path);
    } else {
        save_csv(ds, path);
    }
}

SyntheticData generate_synthetic_full(Index n, Index d, Index c, Index rank,
                                      double noise, std::uint64_t seed) {
    if (rank > std::min(d, c)) {
        throw Error("generate_synthetic: rank must not exceed min(d, c)");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto fill = [&](Matrix& M) {
        for (Index i = 0; i < M.rows(); ++i) {
            for (Index j = 0; j < M.cols(); ++j) M(i, j) = gauss(rng);
        }
    };

    Matrix X(n, d), U(d, rank), V(c, rank);
    fill(X);
    fill(U);
    fill(V);
    Matrix scores = X * U * V.transpose();

    Matrix Y(n, c);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < c; ++j) {
            const double s = scores(i, j) + noise * gauss(rng);
            Y(i, j) = s >= 0.0 ? 1.0 : -1.0;  // sign(0) -> +1
        }
    }

    SyntheticData out;
    out.dataset.features = std::move(X);
    out.dataset.labels = std::move(Y);
    for (Index j = 0; j < c; ++j) {
        out.dataset.label_names.push_back("label" + std::to_string(j + 1));
    }
    out.scores = std::move(scores);
    return out;
}

Dataset generate_synthetic(Index n, Index d, Index c, Index rank, double noise,
                           std::uint64_t seed) {
    return generate_synthetic_full(n, d, c, rank, noise, seed).dataset;
}

FeatureScaler FeatureScaler::fit(const Matrix& X) {
    if (X.rows() < 2) throw Error("normalize: need at least 2 rows");
    FeatureScaler sc;
    sc.mean = X.colwise().mean();
    sc.stddev = Vector(X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        const double var =
            (X.col(j).array() - sc.mean(j)).square().sum() / X.rows();
        const double sd = std::sqrt(var);
        sc.stddev(j) = sd > 1e-12 ? sd : 0.0;
    }
    return sc;
}

FeatureScaler FeatureScaler::identity(Index d) {
    FeatureScaler sc;
    sc.mean = Vector::Zero(d);
    sc.stddev = Vector::Ones(d);
    return sc;
}

Matrix FeatureScaler::apply(const Matrix& X) const {
    if (X.cols() != mean.size()) {
        throw Error("normalize: feature dimension mismatch");
    }
    Matrix out(X.rows(), X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        if (stddev(j) == 0.0) {
            out.col(j).setZero();
        } else {
            out.col(j) = (X.col(j).array() - mean(j)) / stddev(j);
        }
    }
    return out;
}

Matrix normalize_features(const Matrix& X) {
    return FeatureScaler::fit(X).apply(X);
}

}  // namespace dm2l
