#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "modea/dataset.hpp"
#include "modea/dea.hpp"
#include "modea/evaluation.hpp"
#include "modea/rm_classifier.hpp"
#include "modea/som.hpp"
#include "modea/varclus.hpp"

namespace modea {

/// Stage seeds fanned out from the single pipeline seed.
enum class SeedStream : std::uint64_t { Som = 1, Folds = 2 };
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream);

struct PipelineConfig {
    std::filesystem::path input;
    std::optional<std::size_t> input_count;
    PerformanceBins bins;
    std::optional<std::size_t> k_override;
    std::size_t k_max = 0;  // 0: one less than the variable count
    Linkage linkage = Linkage::Average;
    SomConfig som;          // k and seed are filled in by the pipeline
    RmConfig rm;
    std::size_t folds = 10;
    bool stratified = true;
    FoldWeighting weighting = FoldWeighting::FoldSize;
    bool normalize_within_folds = false;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;  // empty: no artifacts written
    bool timestamp = true;

    void validate() const;
    nlohmann::json to_json() const;
};

struct PipelineResult {
    std::vector<EfficiencyScore> scores;
    std::vector<int> labels;
    Dendrogram dendrogram;
    KSelection selection;
    std::size_t k = 0;
    std::vector<VariableClusterStats> stats;
    std::vector<ClusterCorrelationRow> correlation_table;
    NormalizedFeatures features;
    SomModel som;
    std::vector<std::size_t> assignments;
    ModularReport report;
    RmModel nonmodular_model;
    std::vector<RmModel> cluster_models;
    nlohmann::json report_json;
};

/// Scores with DEA, labels by efficiency band, picks k from the variable
/// dendrogram, clusters records with the SOM, and compares per-cluster
/// classifiers with a single global one. Errors are rethrown as StageError.
PipelineResult run_pipeline(const PipelineConfig& config);
PipelineResult run_pipeline(const Dataset& data, const PipelineConfig& config);

/// Fits one classifier on all rows and one per cluster (class set shared).
std::vector<RmModel> fit_cluster_models(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                        const std::vector<std::size_t>& assignments, std::size_t k,
                                        const RmConfig& config);

}  // namespace modea
