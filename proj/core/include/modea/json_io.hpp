#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modea/dataset.hpp"
#include "modea/dea.hpp"
#include "modea/evaluation.hpp"
#include "modea/rm_classifier.hpp"
#include "modea/som.hpp"
#include "modea/varclus.hpp"

namespace modea::io {

using nlohmann::json;

json scores_json(const std::vector<EfficiencyScore>& scores, const PerformanceBins& bins);

/// Labels file: {"labels": [{"id": ..., "label": <int>}]}.
json labels_json(const Dataset& data, const std::vector<int>& labels);

/// Reads class labels aligned with `data` from either a labels file or a
/// score report (class names resolved through `bins`).
std::vector<int> labels_from_json(const json& doc, const Dataset& data, const PerformanceBins& bins = {});

json dendrogram_json(const Dendrogram& tree);
std::string dendrogram_dot(const Dendrogram& tree);
json stats_json(const std::vector<VariableClusterStats>& stats);
json correlation_table_json(const std::vector<ClusterCorrelationRow>& rows);
json selection_json(const KSelection& selection);

json som_json(const SomModel& model, const Dataset& data, const std::vector<std::size_t>& assignments);

/// Reads {"assignments": [{"id", "cluster"}]} aligned with `data`. Returns
/// the labels and sets `k` to the unit count (from "sizes" when present).
std::vector<std::size_t> assignments_from_json(const json& doc, const Dataset& data, std::size_t& k);

json model_json(const RmModel& model, const NormalizationStats* normalization = nullptr);
RmModel model_from_json(const json& doc);

json cv_json(const CvReport& report);
json modular_report_json(const ModularReport& report);

json read_json(const std::filesystem::path& path);
void write_json(const json& doc, const std::filesystem::path& path);

}  // namespace modea::io
