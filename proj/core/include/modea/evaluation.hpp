#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "modea/dataset.hpp"
#include "modea/rm_classifier.hpp"
#include "modea/som.hpp"

namespace modea {

struct FoldPlan {
    std::size_t folds = 10;
    std::vector<std::size_t> assignments;  // record -> fold
    std::uint64_t seed = 0;
    bool stratified = true;

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Shuffles each class by seed and deals it round-robin, continuing the fold
/// cursor across classes so totals stay balanced too. Unstratified plans
/// deal one shuffled sequence.
FoldPlan make_folds(const std::vector<int>& labels, std::size_t folds, std::uint64_t seed, bool stratified = true);

enum class FoldWeighting {
    FoldSize,        // weighted_error = sum_k (|fold k| / n) error(k)
    ClassProportion, // per class j: (1/K) sum_k W_kj error(k); weighted_error sums over j
};

std::string_view to_string(FoldWeighting weighting);
FoldWeighting parse_weighting(const std::string& text);

struct FoldResult {
    std::size_t fold = 0;
    std::size_t test_size = 0;
    std::size_t errors = 0;
    double error_rate = 0.0;
    double weight = 0.0;                // fold-size weight
    std::vector<double> class_weights;  // W_kj per class in the class set
};

struct CvReport {
    std::vector<FoldResult> per_fold;
    std::vector<int> classes;
    std::vector<double> per_class_error;  // ClassProportion mode only
    FoldWeighting weighting = FoldWeighting::FoldSize;
    double weighted_error = 0.0;
    double accuracy = 1.0;
    std::size_t records = 0;
    std::size_t correct = 0;  // pooled over all test folds
};

struct CvOptions {
    FoldWeighting weighting = FoldWeighting::FoldSize;
    // Re-estimate z-scores on each training fold instead of trusting the
    // features as given.
    bool normalize_within_folds = false;
    std::optional<std::vector<int>> classes;
};

CvReport weighted_cv(const Eigen::MatrixXd& x, const std::vector<int>& labels, const RmConfig& config,
                     const FoldPlan& plan, const CvOptions& options = {});

struct ModularCombination {
    std::vector<double> weights;
    double modular_ca = 0.0;
};

/// Combines per-cluster accuracies. Weights are n_i / sum(n_j) unless an
/// explicit denominator is supplied.
ModularCombination modular_ca(const std::vector<std::pair<std::size_t, double>>& clusters,
                              std::optional<double> denominator = std::nullopt);

struct FoldConfig {
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    bool stratified = true;
    FoldWeighting weighting = FoldWeighting::FoldSize;
    bool normalize_within_folds = false;
};

struct ClusterResult {
    std::size_t cluster = 0;
    std::size_t n_records = 0;
    std::size_t folds_used = 0;
    double ca = 0.0;
    CvReport cv;
};

struct ModularReport {
    std::vector<ClusterResult> per_cluster;
    std::vector<double> weights;
    double modular_ca = 0.0;
    double nonmodular_ca = 0.0;
    CvReport nonmodular;
    std::vector<std::size_t> assignments;
    std::vector<std::string> warnings;
};

/// Non-modular CV on every record, then CV inside each cluster, combined by
/// cluster-size weights.
ModularReport compare_with_assignments(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                       const std::vector<std::size_t>& assignments, std::size_t k,
                                       const RmConfig& rm, const FoldConfig& folds);

/// As above, with clusters found by a SOM trained on `features`.
ModularReport compare_pipelines(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                const SomConfig& som, const RmConfig& rm, const FoldConfig& folds);

/// Dataset form: z-scores the features first.
ModularReport compare_pipelines(const Dataset& data, const std::vector<int>& labels, const SomConfig& som,
                                const RmConfig& rm, const FoldConfig& folds);

}  // namespace modea
