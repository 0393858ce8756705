#include "modea/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

#include "modea/error.hpp"

namespace modea {

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

template <typename T>
std::vector<T> select(const std::vector<T>& values, const std::vector<std::size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (auto r : rows) {
        out.push_back(values[r]);
    }
    return out;
}

std::vector<int> distinct_sorted(const std::vector<int>& labels) {
    std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

}  // namespace

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) {
            out.push_back(i);
        }
    }
    return out;
}

FoldPlan make_folds(const std::vector<int>& labels, std::size_t folds, std::uint64_t seed, bool stratified) {
    if (folds < 2) {
        throw Error(ErrorCode::InvalidConfig, "cross validation needs at least 2 folds");
    }
    if (labels.size() < folds) {
        throw Error(ErrorCode::TooFewRecords, std::to_string(labels.size()) + " records cannot fill " +
                                                  std::to_string(folds) + " folds");
    }
    FoldPlan plan;
    plan.folds = folds;
    plan.seed = seed;
    plan.stratified = stratified;
    plan.assignments.assign(labels.size(), 0);

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> strata;
    if (stratified) {
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            by_class[labels[i]].push_back(i);
        }
        for (auto& [label, members] : by_class) {
            strata.push_back(std::move(members));
        }
    } else {
        strata.emplace_back(labels.size());
        std::iota(strata.front().begin(), strata.front().end(), 0);
    }

    std::size_t cursor = 0;
    for (auto& members : strata) {
        std::shuffle(members.begin(), members.end(), rng);
        for (auto idx : members) {
            plan.assignments[idx] = cursor;
            cursor = (cursor + 1) % folds;
        }
    }
    return plan;
}

std::string_view to_string(FoldWeighting weighting) {
    switch (weighting) {
    case FoldWeighting::FoldSize: return "fold-size";
    case FoldWeighting::ClassProportion: return "class-proportion";
    }
    return "unknown";
}

FoldWeighting parse_weighting(const std::string& text) {
    if (text == "fold-size") return FoldWeighting::FoldSize;
    if (text == "class-proportion") return FoldWeighting::ClassProportion;
    throw Error(ErrorCode::InvalidConfig, "unknown fold weighting '" + text + "'");
}

CvReport weighted_cv(const Eigen::MatrixXd& x, const std::vector<int>& labels, const RmConfig& config,
                     const FoldPlan& plan, const CvOptions& options) {
    if (static_cast<Eigen::Index>(labels.size()) != x.rows() || plan.assignments.size() != labels.size()) {
        throw Error(ErrorCode::DimensionMismatch, "features, labels, and fold plan must cover the same records");
    }
    CvReport report;
    report.weighting = options.weighting;
    report.classes = options.classes ? *options.classes : distinct_sorted(labels);
    report.records = labels.size();
    const auto n = static_cast<double>(labels.size());

    for (std::size_t fold = 0; fold < plan.folds; ++fold) {
        auto test = plan.test_indices(fold);
        auto train = plan.train_indices(fold);
        if (train.empty()) {
            throw Error(ErrorCode::EmptyTrainingFold, "fold " + std::to_string(fold) + " leaves no training records");
        }
        Eigen::MatrixXd x_train = select_rows(x, train);
        Eigen::MatrixXd x_test = select_rows(x, test);
        if (options.normalize_within_folds && x_train.rows() >= 2) {
            auto stats = fit_normalization(x_train);
            x_train = stats.apply(x_train);
            x_test = stats.apply(x_test);
        }
        auto model = fit(x_train, select(labels, train), config, report.classes);

        FoldResult result;
        result.fold = fold;
        result.test_size = test.size();
        result.class_weights.assign(report.classes.size(), 0.0);
        for (std::size_t i = 0; i < test.size(); ++i) {
            const int truth = labels[test[i]];
            if (predict(model, x_test.row(static_cast<Eigen::Index>(i)).transpose()) != truth) {
                ++result.errors;
            }
            auto it = std::lower_bound(report.classes.begin(), report.classes.end(), truth);
            if (it != report.classes.end() && *it == truth) {
                result.class_weights[static_cast<std::size_t>(it - report.classes.begin())] += 1.0;
            }
        }
        if (!test.empty()) {
            result.error_rate = static_cast<double>(result.errors) / static_cast<double>(test.size());
            for (auto& w : result.class_weights) {
                w /= static_cast<double>(test.size());
            }
        }
        result.weight = static_cast<double>(test.size()) / n;
        report.correct += test.size() - result.errors;
        report.per_fold.push_back(std::move(result));
    }

    if (options.weighting == FoldWeighting::FoldSize) {
        for (const auto& f : report.per_fold) {
            report.weighted_error += f.weight * f.error_rate;
        }
    } else {
        const double k = static_cast<double>(plan.folds);
        report.per_class_error.assign(report.classes.size(), 0.0);
        for (const auto& f : report.per_fold) {
            for (std::size_t j = 0; j < report.classes.size(); ++j) {
                report.per_class_error[j] += f.class_weights[j] * f.error_rate / k;
            }
        }
        report.weighted_error = std::accumulate(report.per_class_error.begin(), report.per_class_error.end(), 0.0);
    }
    report.accuracy = 1.0 - report.weighted_error;
    return report;
}

ModularCombination modular_ca(const std::vector<std::pair<std::size_t, double>>& clusters,
                              std::optional<double> denominator) {
    if (clusters.empty()) {
        throw Error(ErrorCode::EmptyCluster, "no clusters to combine");
    }
    double total = 0.0;
    for (const auto& [count, ca] : clusters) {
        if (count == 0) {
            throw Error(ErrorCode::EmptyCluster, "cluster with no records");
        }
        if (!(ca >= 0.0 && ca <= 1.0)) {
            throw Error(ErrorCode::InvalidConfig, "cluster accuracy must lie in [0,1]");
        }
        total += static_cast<double>(count);
    }
    if (denominator) {
        if (!(*denominator > 0.0)) {
            throw Error(ErrorCode::InvalidConfig, "weight denominator must be positive");
        }
        total = *denominator;
    }
    ModularCombination out;
    for (const auto& [count, ca] : clusters) {
        double w = static_cast<double>(count) / total;
        out.weights.push_back(w);
        out.modular_ca += w * ca;
    }
    return out;
}

ModularReport compare_with_assignments(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                       const std::vector<std::size_t>& assignments, std::size_t k,
                                       const RmConfig& rm, const FoldConfig& folds) {
    if (static_cast<Eigen::Index>(labels.size()) != features.rows() || assignments.size() != labels.size()) {
        throw Error(ErrorCode::DimensionMismatch, "features, labels, and assignments must cover the same records");
    }
    ModularReport report;
    report.assignments = assignments;
    const auto classes = distinct_sorted(labels);
    CvOptions cv_options{folds.weighting, folds.normalize_within_folds, classes};

    auto plan = make_folds(labels, folds.folds, folds.seed, folds.stratified);
    report.nonmodular = weighted_cv(features, labels, rm, plan, cv_options);
    report.nonmodular_ca = report.nonmodular.accuracy;

    const auto sizes = cluster_sizes(assignments, k);
    std::vector<std::pair<std::size_t, double>> combined;
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
            report.warnings.push_back("cluster " + std::to_string(c) + " is empty and was skipped");
            continue;
        }
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            if (assignments[i] == c) {
                rows.push_back(i);
            }
        }
        if (rows.size() < 2) {
            throw Error(ErrorCode::ClusterTooSmall, "cluster " + std::to_string(c) + " has a single record");
        }
        std::size_t k_folds = folds.folds;
        if (rows.size() < k_folds) {
            k_folds = rows.size();
            report.warnings.push_back("cluster " + std::to_string(c) + " has " + std::to_string(rows.size()) +
                                      " records; using " + std::to_string(k_folds) + " folds");
        }
        const auto cluster_labels = select(labels, rows);
        auto cluster_plan = make_folds(cluster_labels, k_folds, folds.seed + 1 + c, folds.stratified);

        ClusterResult result;
        result.cluster = c;
        result.n_records = rows.size();
        result.folds_used = k_folds;
        result.cv = weighted_cv(select_rows(features, rows), cluster_labels, rm, cluster_plan, cv_options);
        result.ca = result.cv.accuracy;
        combined.emplace_back(result.n_records, result.ca);
        report.per_cluster.push_back(std::move(result));
    }
    auto combination = modular_ca(combined);
    report.weights = std::move(combination.weights);
    report.modular_ca = combination.modular_ca;
    for (const auto& w : report.warnings) {
        spdlog::warn("{}", w);
    }
    return report;
}

ModularReport compare_pipelines(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                const SomConfig& som, const RmConfig& rm, const FoldConfig& folds) {
    auto model = train_som(features, som);
    return compare_with_assignments(features, labels, assign_all(model, features), som.k, rm, folds);
}

ModularReport compare_pipelines(const Dataset& data, const std::vector<int>& labels, const SomConfig& som,
                                const RmConfig& rm, const FoldConfig& folds) {
    return compare_pipelines(normalize(data).values, labels, som, rm, folds);
}

}  // namespace modea
