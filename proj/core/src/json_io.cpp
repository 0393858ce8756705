#include "modea/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "modea/error.hpp"

namespace modea::io {

namespace {

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::vector<std::size_t> index_by_id(const json& entries, const Dataset& data, const char* what) {
    std::vector<std::size_t> rows;
    for (const auto& e : entries) {
        auto id = e.at("id").get<std::string>();
        auto row = data.find(id);
        if (!row) {
            throw Error(ErrorCode::IndexOutOfRange, std::string(what) + " refers to unknown id '" + id + "'");
        }
        rows.push_back(*row);
    }
    return rows;
}

}  // namespace

json scores_json(const std::vector<EfficiencyScore>& scores, const PerformanceBins& bins) {
    json out = json::array();
    for (const auto& s : scores) {
        out.push_back({{"id", s.dmu_id},
                       {"theta", s.theta},
                       {"class", bins.names()[bins.assign(std::min(s.theta, 1.0))]},
                       {"reference_set", s.reference_set}});
    }
    return out;
}

json labels_json(const Dataset& data, const std::vector<int>& labels) {
    if (labels.size() != data.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one label per record required");
    }
    json entries = json::array();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        entries.push_back({{"id", data[i].id}, {"label", labels[i]}});
    }
    return {{"labels", entries}};
}

std::vector<int> labels_from_json(const json& doc, const Dataset& data, const PerformanceBins& bins) {
    std::vector<int> labels(data.size(), -1);
    try {
        if (doc.is_object() && doc.contains("labels")) {
            const auto& entries = doc.at("labels");
            auto rows = index_by_id(entries, data, "labels file");
            for (std::size_t i = 0; i < rows.size(); ++i) {
                labels[rows[i]] = entries[i].at("label").get<int>();
            }
        } else if (doc.is_array()) {
            auto rows = index_by_id(doc, data, "score report");
            for (std::size_t i = 0; i < rows.size(); ++i) {
                auto name = doc[i].at("class").get<std::string>();
                const auto& names = bins.names();
                auto it = std::find(names.begin(), names.end(), name);
                if (it == names.end()) {
                    throw Error(ErrorCode::InvalidConfig, "unknown class name '" + name + "'");
                }
                labels[rows[i]] = static_cast<int>(it - names.begin());
            }
        } else {
            throw Error(ErrorCode::InvalidConfig, "labels must be a labels file or a score report");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed labels JSON: ") + e.what());
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) {
            throw Error(ErrorCode::InvalidConfig, "no label for record '" + data[i].id + "'");
        }
    }
    return labels;
}

json dendrogram_json(const Dendrogram& tree) {
    json merges = json::array();
    for (const auto& m : tree.merges) {
        merges.push_back({{"node_a", m.node_a}, {"node_b", m.node_b}, {"height", m.height}, {"size", m.size}});
    }
    return {{"labels", tree.labels}, {"merges", merges}};
}

std::string dendrogram_dot(const Dendrogram& tree) {
    std::ostringstream out;
    out << "digraph dendrogram {\n  node [shape=box];\n";
    const auto p = tree.leaf_count();
    for (std::size_t i = 0; i < p; ++i) {
        out << "  n" << i << " [label=\"" << tree.labels[i] << "\"];\n";
    }
    for (std::size_t i = 0; i < tree.merges.size(); ++i) {
        const auto& m = tree.merges[i];
        out << "  n" << p + i << " [shape=ellipse, label=\"" << m.height << "\"];\n";
        out << "  n" << p + i << " -> n" << m.node_a << ";\n";
        out << "  n" << p + i << " -> n" << m.node_b << ";\n";
    }
    out << "}\n";
    return out.str();
}

json stats_json(const std::vector<VariableClusterStats>& stats) {
    json out = json::array();
    for (const auto& s : stats) {
        out.push_back({{"variable", s.variable},
                       {"cluster", s.cluster},
                       {"own_r2", s.own_r2},
                       {"next_r2", s.next_r2},
                       {"one_minus_r2_ratio", s.one_minus_r2_ratio}});
    }
    return out;
}

json correlation_table_json(const std::vector<ClusterCorrelationRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"variable", r.variable}, {"membership_count", r.membership_count}, {"correlations", r.correlations}});
    }
    return out;
}

json selection_json(const KSelection& selection) {
    json candidates = json::array();
    for (const auto& c : selection.candidates) {
        candidates.push_back({{"k", c.k}, {"relative_gap", finite_or_null(c.relative_gap)}, {"valid", c.valid}});
    }
    return {{"k", selection.k}, {"valid", selection.valid}, {"candidates", candidates}, {"warnings", selection.warnings}};
}

json som_json(const SomModel& model, const Dataset& data, const std::vector<std::size_t>& assignments) {
    json codebooks = json::array();
    for (Eigen::Index u = 0; u < model.codebooks.rows(); ++u) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < model.codebooks.cols(); ++c) {
            row.push_back(model.codebooks(u, c));
        }
        codebooks.push_back(row);
    }
    json entries = json::array();
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        entries.push_back({{"id", data[i].id}, {"cluster", assignments[i]}});
    }
    return {{"codebooks", codebooks},
            {"assignments", entries},
            {"sizes", cluster_sizes(assignments, model.units())},
            {"config",
             {{"k", model.config.k},
              {"learning_rate", model.config.initial_learning_rate},
              {"epochs", model.config.epochs},
              {"initial_radius", model.config.start_radius()},
              {"final_radius", model.config.final_radius},
              {"seed", model.config.seed}}},
            {"training_epochs_run", model.training_epochs_run},
            {"repairs", model.repairs}};
}

std::vector<std::size_t> assignments_from_json(const json& doc, const Dataset& data, std::size_t& k) {
    std::vector<std::size_t> labels(data.size(), static_cast<std::size_t>(-1));
    try {
        const auto& entries = doc.at("assignments");
        auto rows = index_by_id(entries, data, "assignment file");
        std::size_t max_label = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            labels[rows[i]] = entries[i].at("cluster").get<std::size_t>();
            max_label = std::max(max_label, labels[rows[i]]);
        }
        k = doc.contains("sizes") ? doc.at("sizes").size() : max_label + 1;
        if (max_label >= k) {
            throw Error(ErrorCode::IndexOutOfRange, "cluster label exceeds the unit count");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed assignment JSON: ") + e.what());
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == static_cast<std::size_t>(-1)) {
            throw Error(ErrorCode::InvalidConfig, "no cluster for record '" + data[i].id + "'");
        }
    }
    return labels;
}

json model_json(const RmModel& model, const NormalizationStats* normalization) {
    std::vector<double> alpha;
    alpha.reserve(static_cast<std::size_t>(model.alpha.size()));
    for (Eigen::Index r = 0; r < model.alpha.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.alpha.cols(); ++c) {
            alpha.push_back(model.alpha(r, c));
        }
    }
    json out = {{"variant", std::string(to_string(model.config.variant))},
                {"r", model.config.order},
                {"b", model.config.ridge},
                {"l", model.input_dimension},
                {"class_labels", model.class_labels},
                {"terms", model.alpha.rows()},
                {"alpha", alpha},
                {"term_order_version", kTermOrderVersion}};
    if (normalization) {
        out["normalization"] = {
            {"means", std::vector<double>(normalization->means.data(), normalization->means.data() + normalization->means.size())},
            {"stddevs",
             std::vector<double>(normalization->stddevs.data(), normalization->stddevs.data() + normalization->stddevs.size())}};
    }
    return out;
}

RmModel model_from_json(const json& doc) {
    try {
        if (doc.at("term_order_version").get<int>() != kTermOrderVersion) {
            throw Error(ErrorCode::InvalidConfig, "unsupported term order version");
        }
        RmModel model;
        model.config.variant = parse_variant(doc.at("variant").get<std::string>());
        model.config.order = doc.at("r").get<std::size_t>();
        model.config.ridge = doc.at("b").get<double>();
        model.input_dimension = doc.at("l").get<std::size_t>();
        model.class_labels = doc.at("class_labels").get<std::vector<int>>();
        const auto alpha = doc.at("alpha").get<std::vector<double>>();
        const auto k = term_count(model.config.variant, model.input_dimension, model.config.order);
        const auto c = model.class_labels.size();
        if (alpha.size() != k * c) {
            throw Error(ErrorCode::DimensionMismatch, "alpha has " + std::to_string(alpha.size()) + " entries, expected " +
                                                          std::to_string(k * c));
        }
        model.alpha.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t j = 0; j < c; ++j) {
                model.alpha(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = alpha[r * c + j];
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed model JSON: ") + e.what());
    }
}

json cv_json(const CvReport& report) {
    json folds = json::array();
    for (const auto& f : report.per_fold) {
        folds.push_back({{"fold", f.fold},
                         {"test_size", f.test_size},
                         {"errors", f.errors},
                         {"error_rate", f.error_rate},
                         {"weight", f.weight},
                         {"class_weights", f.class_weights}});
    }
    json out = {{"weighting", std::string(to_string(report.weighting))},
                {"classes", report.classes},
                {"per_fold", folds},
                {"weighted_error", report.weighted_error},
                {"accuracy", report.accuracy},
                {"records", report.records},
                {"correct", report.correct}};
    if (!report.per_class_error.empty()) {
        out["per_class_error"] = report.per_class_error;
    }
    return out;
}

json modular_report_json(const ModularReport& report) {
    json clusters = json::array();
    for (const auto& c : report.per_cluster) {
        clusters.push_back({{"cluster", c.cluster},
                            {"n_records", c.n_records},
                            {"folds_used", c.folds_used},
                            {"ca", c.ca},
                            {"correct", c.cv.correct},
                            {"cv", cv_json(c.cv)}});
    }
    return {{"per_cluster", clusters},
            {"weights", report.weights},
            {"modular_ca", report.modular_ca},
            {"nonmodular_ca", report.nonmodular_ca},
            {"nonmodular", cv_json(report.nonmodular)},
            {"warnings", report.warnings}};
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, path.string() + ": " + e.what());
    }
}

void write_json(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

}  // namespace modea::io
