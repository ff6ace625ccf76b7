#include "dm2l/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace dm2l {

namespace {

void check_shapes(const Matrix& scores, const Matrix& labels) {
    if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
        throw Error("metrics: score and label shapes differ");
    }
    if (scores.rows() < 1 || scores.cols() < 1) {
        throw Error("metrics: empty input");
    }
    for (Index i = 0; i < labels.rows(); ++i) {
        for (Index j = 0; j < labels.cols(); ++j) {
            if (labels(i, j) != 1.0 && labels(i, j) != -1.0) {
                throw Error("metrics: labels must be in {-1,+1}");
            }
        }
    }
}

// rank of every label for one instance: descending score, ties broken by
// ascending label index; ranks start at 1
std::vector<Index> ranks_for_instance(const Matrix& scores, Index i) {
    const Index c = scores.cols();
    std::vector<Index> order(static_cast<std::size_t>(c));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return scores(i, a) > scores(i, b);
    });
    std::vector<Index> rank(static_cast<std::size_t>(c));
    for (Index pos = 0; pos < c; ++pos) {
        rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] =
            pos + 1;
    }
    return rank;
}

struct MeanAcc {
    double sum = 0.0;
    Index counted = 0;
    Index excluded = 0;

    void add(double v) {
        sum += v;
        ++counted;
    }
    double mean(const char* what) const {
        if (counted == 0) {
            throw Error(std::string("metrics: no countable ") + what);
        }
        return sum / static_cast<double>(counted);
    }
};

MeanAcc rkl_acc(const Matrix& scores, const Matrix& labels) {
    MeanAcc acc;
    for (Index i = 0; i < scores.rows(); ++i) {
        std::vector<double> neg;
        std::vector<Index> pos;
        for (Index j = 0; j < scores.cols(); ++j) {
            (labels(i, j) > 0.0 ? (void)pos.push_back(j)
                                : (void)neg.push_back(scores(i, j)));
        }
        if (pos.empty() || neg.empty()) {
            ++acc.excluded;
            continue;
        }
        std::sort(neg.begin(), neg.end());
        long long violations = 0;
        for (Index j : pos) {
            // pairs with f_pos <= f_neg: ties count as violations
            violations += neg.end() -
                          std::lower_bound(neg.begin(), neg.end(), scores(i, j));
        }
        acc.add(static_cast<double>(violations) /
                (static_cast<double>(pos.size()) *
                 static_cast<double>(neg.size())));
    }
    return acc;
}

MeanAcc auc_acc(const Matrix& scores, const Matrix& labels) {
    MeanAcc acc;
    for (Index j = 0; j < scores.cols(); ++j) {
        std::vector<double> neg;
        std::vector<Index> pos;
        for (Index i = 0; i < scores.rows(); ++i) {
            (labels(i, j) > 0.0 ? (void)pos.push_back(i)
                                : (void)neg.push_back(scores(i, j)));
        }
        if (pos.empty() || neg.empty()) {
            ++acc.excluded;
            continue;
        }
        std::sort(neg.begin(), neg.end());
        long long successes = 0;
        for (Index i : pos) {
            // pairs with f_pos >= f_neg: ties count as successes
            successes += std::upper_bound(neg.begin(), neg.end(),
                                          scores(i, j)) -
                         neg.begin();
        }
        acc.add(static_cast<double>(successes) /
                (static_cast<double>(pos.size()) *
                 static_cast<double>(neg.size())));
    }
    return acc;
}

MeanAcc cvg_acc(const Matrix& scores, const Matrix& labels) {
    MeanAcc acc;
    for (Index i = 0; i < scores.rows(); ++i) {
        const std::vector<Index> rank = ranks_for_instance(scores, i);
        Index deepest = 0;
        bool any_pos = false;
        for (Index j = 0; j < scores.cols(); ++j) {
            if (labels(i, j) > 0.0) {
                any_pos = true;
                deepest = std::max(deepest, rank[static_cast<std::size_t>(j)]);
            }
        }
        if (!any_pos) {
            ++acc.excluded;
            continue;
        }
        acc.add(static_cast<double>(deepest - 1));
    }
    return acc;
}

MeanAcc ap_acc(const Matrix& scores, const Matrix& labels) {
    MeanAcc acc;
    for (Index i = 0; i < scores.rows(); ++i) {
        const std::vector<Index> rank = ranks_for_instance(scores, i);
        std::vector<Index> pos;
        for (Index j = 0; j < scores.cols(); ++j) {
            if (labels(i, j) > 0.0) pos.push_back(j);
        }
        if (pos.empty()) {
            ++acc.excluded;
            continue;
        }
        // sorted positive ranks allow counting positives at or above a rank
        std::vector<Index> pos_ranks;
        pos_ranks.reserve(pos.size());
        for (Index j : pos) pos_ranks.push_back(rank[static_cast<std::size_t>(j)]);
        std::sort(pos_ranks.begin(), pos_ranks.end());

        double inst = 0.0;
        for (Index j : pos) {
            const Index rj = rank[static_cast<std::size_t>(j)];
            const long long above =
                std::upper_bound(pos_ranks.begin(), pos_ranks.end(), rj) -
                pos_ranks.begin();
            inst += static_cast<double>(above) / static_cast<double>(rj);
        }
        acc.add(inst / static_cast<double>(pos.size()));
    }
    return acc;
}

}  // namespace

double ranking_loss(const Matrix& scores, const Matrix& labels) {
    check_shapes(scores, labels);
    return rkl_acc(scores, labels).mean("instance for ranking loss");
}

double macro_auc(const Matrix& scores, const Matrix& labels) {
    check_shapes(scores, labels);
    return auc_acc(scores, labels).mean("label for macro-AUC");
}

double coverage(const Matrix& scores, const Matrix& labels) {
    check_shapes(scores, labels);
    return cvg_acc(scores, labels).mean("instance for coverage");
}

double average_precision(const Matrix& scores, const Matrix& labels) {
    check_shapes(scores, labels);
    return ap_acc(scores, labels).mean("instance for average precision");
}

EvaluationReport evaluate_all(const Matrix& scores, const Matrix& labels) {
    check_shapes(scores, labels);
    EvaluationReport rep;

    const MeanAcc rkl = rkl_acc(scores, labels);
    rep.ranking_loss = rkl.mean("instance for ranking loss");
    rep.rkl_instances = rkl.counted;
    rep.rkl_excluded = rkl.excluded;

    const MeanAcc auc = auc_acc(scores, labels);
    rep.macro_auc = auc.mean("label for macro-AUC");
    rep.auc_labels = auc.counted;
    rep.auc_excluded = auc.excluded;

    const MeanAcc cvg = cvg_acc(scores, labels);
    rep.coverage = cvg.mean("instance for coverage");
    rep.cvg_instances = cvg.counted;
    rep.cvg_excluded = cvg.excluded;

    const MeanAcc ap = ap_acc(scores, labels);
    rep.average_precision = ap.mean("instance for average precision");
    rep.ap_instances = ap.counted;
    rep.ap_excluded = ap.excluded;

    return rep;
}

EvaluationReport brute_force_oracle(const Matrix& scores,
                                    const Matrix& labels) {
    check_shapes(scores, labels);
    if (scores.rows() > 50 || scores.cols() > 20) {
        throw Error("brute_force_oracle: input exceeds test-scale guard");
    }
    const Index p = scores.rows();
    const Index c = scores.cols();

    // literal rank definition: 1 + #(strictly higher) + #(tied, lower index)
    auto rank_of = [&](Index i, Index j) {
        Index r = 1;
        for (Index k = 0; k < c; ++k) {
            if (scores(i, k) > scores(i, j)) ++r;
            if (k < j && scores(i, k) == scores(i, j)) ++r;
        }
        return r;
    };

    EvaluationReport rep;

    {
        MeanAcc acc;
        for (Index i = 0; i < p; ++i) {
            long long npos = 0, nneg = 0, bad = 0;
            for (Index jp = 0; jp < c; ++jp) {
                if (labels(i, jp) <= 0.0) continue;
                ++npos;
                for (Index jn = 0; jn < c; ++jn) {
                    if (labels(i, jn) > 0.0) continue;
                    if (scores(i, jp) <= scores(i, jn)) ++bad;
                }
            }
            for (Index j = 0; j < c; ++j) {
                if (labels(i, j) <= 0.0) ++nneg;
            }
            if (npos == 0 || nneg == 0) {
                ++acc.excluded;
                continue;
            }
            acc.add(static_cast<double>(bad) /
                    (static_cast<double>(npos) * static_cast<double>(nneg)));
        }
        rep.ranking_loss = acc.mean("instance for ranking loss");
        rep.rkl_instances = acc.counted;
        rep.rkl_excluded = acc.excluded;
    }

    {
        MeanAcc acc;
        for (Index j = 0; j < c; ++j) {
            long long npos = 0, nneg = 0, good = 0;
            for (Index ip = 0; ip < p; ++ip) {
                if (labels(ip, j) <= 0.0) continue;
                ++npos;
                for (Index in = 0; in < p; ++in) {
                    if (labels(in, j) > 0.0) continue;
                    if (scores(ip, j) >= scores(in, j)) ++good;
                }
            }
            for (Index i = 0; i < p; ++i) {
                if (labels(i, j) <= 0.0) ++nneg;
            }
            if (npos == 0 || nneg == 0) {
                ++acc.excluded;
                continue;
            }
            acc.add(static_cast<double>(good) /
                    (static_cast<double>(npos) * static_cast<double>(nneg)));
        }
        rep.macro_auc = acc.mean("label for macro-AUC");
        rep.auc_labels = acc.counted;
        rep.auc_excluded = acc.excluded;
    }

    {
        MeanAcc acc;
        for (Index i = 0; i < p; ++i) {
            Index deepest = 0;
            bool any_pos = false;
            for (Index j = 0; j < c; ++j) {
                if (labels(i, j) > 0.0) {
                    any_pos = true;
                    deepest = std::max(deepest, rank_of(i, j));
                }
            }
            if (!any_pos) {
                ++acc.excluded;
                continue;
            }
            acc.add(static_cast<double>(deepest - 1));
        }
        rep.coverage = acc.mean("instance for coverage");
        rep.cvg_instances = acc.counted;
        rep.cvg_excluded = acc.excluded;
    }

    {
        MeanAcc acc;
        for (Index i = 0; i < p; ++i) {
            long long npos = 0;
            for (Index j = 0; j < c; ++j) {
                if (labels(i, j) > 0.0) ++npos;
            }
            if (npos == 0) {
                ++acc.excluded;
                continue;
            }
            double inst = 0.0;
            for (Index y = 0; y < c; ++y) {
                if (labels(i, y) <= 0.0) continue;
                const Index ry = rank_of(i, y);
                long long above = 0;
                for (Index j = 0; j < c; ++j) {
                    if (labels(i, j) > 0.0 && rank_of(i, j) <= ry) ++above;
                }
                inst += static_cast<double>(above) / static_cast<double>(ry);
            }
            acc.add(inst / static_cast<double>(npos));
        }
        rep.average_precision = acc.mean("instance for average precision");
        rep.ap_instances = acc.counted;
        rep.ap_excluded = acc.excluded;
    }

    return rep;
}

}  // namespace dm2l
