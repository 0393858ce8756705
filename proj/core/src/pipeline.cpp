#include "modea/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "modea/error.hpp"
#include "modea/json_io.hpp"

namespace modea {

namespace {

template <typename F>
auto run_stage(const char* stage, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e);
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) {
    // splitmix64 finalizer over (master, stream)
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void PipelineConfig::validate() const {
    if (bins.class_count() < 2) {
        throw Error(ErrorCode::InvalidConfig, "need at least one bin cut point");
    }
    if (folds < 2) {
        throw Error(ErrorCode::InvalidConfig, "cross validation needs at least 2 folds");
    }
    if (k_override && *k_override < 1) {
        throw Error(ErrorCode::InvalidConfig, "k override must be >= 1");
    }
    SomConfig probe = som;
    probe.k = k_override.value_or(std::max<std::size_t>(probe.k, 1));
    probe.validate();
    rm.validate();
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json j = {
        {"input", input.string()},
        {"bins", bins.cuts()},
        {"class_names", bins.names()},
        {"k_override", k_override ? nlohmann::json(*k_override) : nlohmann::json(nullptr)},
        {"k_max", k_max},
        {"linkage", std::string(to_string(linkage))},
        {"som",
         {{"learning_rate", som.initial_learning_rate},
          {"epochs", som.epochs},
          {"initial_radius", som.initial_radius ? nlohmann::json(*som.initial_radius) : nlohmann::json(nullptr)},
          {"final_radius", som.final_radius}}},
        {"rm", {{"variant", std::string(to_string(rm.variant))}, {"order", rm.order}, {"ridge", rm.ridge}}},
        {"folds", folds},
        {"stratified", stratified},
        {"weighting", std::string(to_string(weighting))},
        {"normalize_within_folds", normalize_within_folds},
        {"seed", seed},
    };
    return j;
}

std::vector<RmModel> fit_cluster_models(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                        const std::vector<std::size_t>& assignments, std::size_t k,
                                        const RmConfig& config) {
    std::set<int> distinct(labels.begin(), labels.end());
    const std::vector<int> classes(distinct.begin(), distinct.end());
    std::vector<RmModel> models;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<Eigen::Index> rows;
        std::vector<int> y;
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            if (assignments[i] == c) {
                rows.push_back(static_cast<Eigen::Index>(i));
                y.push_back(labels[i]);
            }
        }
        if (rows.empty()) {
            throw Error(ErrorCode::EmptyCluster, "cluster " + std::to_string(c) + " has no records");
        }
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            x.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
        }
        models.push_back(fit(x, y, config, classes));
    }
    return models;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    run_stage("config", [&] {
        config.validate();
        return 0;
    });
    auto data = run_stage("load", [&] { return load_csv(config.input, CsvOptions{config.input_count}); });
    return run_pipeline(data, config);
}

PipelineResult run_pipeline(const Dataset& data, const PipelineConfig& config) {
    run_stage("config", [&] {
        config.validate();
        return 0;
    });
    PipelineResult result;

    result.scores = run_stage("dea", [&] { return evaluate_all(data); });
    result.labels = run_stage("labeling", [&] {
        std::vector<int> labels;
        for (const auto& s : result.scores) {
            labels.push_back(static_cast<int>(config.bins.assign(std::min(s.theta, 1.0))));
        }
        return labels;
    });

    run_stage("varclus", [&] {
        const auto names = data.feature_names();
        const auto raw = data.feature_matrix();
        result.dendrogram = agglomerate(correlation_matrix(raw), config.linkage, names);
        const std::size_t k_max = config.k_max ? config.k_max : names.size() - 1;
        if (config.k_override) {
            spdlog::info("k override: using k={}, selection skipped", *config.k_override);
            result.k = *config.k_override;
            result.selection.k = result.k;
        } else {
            result.selection = select_k(result.dendrogram, raw, k_max);
            result.k = result.selection.k;
        }
        const std::size_t cut_k = std::min(result.k, names.size());
        const auto partition = cut(result.dendrogram, cut_k);
        result.stats = cluster_stats(raw, partition, names);
        result.correlation_table = cluster_correlation_table(raw, partition, names);
        return 0;
    });

    run_stage("som", [&] {
        result.features = normalize(data);
        SomConfig som = config.som;
        som.k = result.k;
        som.seed = derive_seed(config.seed, SeedStream::Som);
        result.som = train_som(result.features.values, som);
        result.assignments = assign_all(result.som, result.features.values);
        return 0;
    });

    run_stage("classify", [&] {
        FoldConfig folds{config.folds, derive_seed(config.seed, SeedStream::Folds), config.stratified,
                         config.weighting, config.normalize_within_folds};
        result.report = compare_with_assignments(result.features.values, result.labels, result.assignments, result.k,
                                                 config.rm, folds);
        result.nonmodular_model = fit(result.features.values, result.labels, config.rm);
        result.cluster_models =
            fit_cluster_models(result.features.values, result.labels, result.assignments, result.k, config.rm);
        return 0;
    });

    std::vector<std::size_t> class_counts(config.bins.class_count(), 0);
    std::size_t efficient = 0;
    for (std::size_t i = 0; i < result.scores.size(); ++i) {
        ++class_counts[static_cast<std::size_t>(result.labels[i])];
        efficient += result.scores[i].is_efficient ? 1 : 0;
    }
    auto& report = result.report_json;
    report["config"] = config.to_json();
    report["dea"] = {{"dmus", data.size()}, {"efficient", efficient}, {"class_counts", class_counts}};
    report["varclus"] = {{"selected_k", result.selection.k},
                         {"k", result.k},
                         {"overridden", config.k_override.has_value()},
                         {"warnings", result.selection.warnings}};
    report["som"] = {{"sizes", cluster_sizes(result.assignments, result.k)},
                     {"epochs_run", result.som.training_epochs_run},
                     {"quantization_error", quantization_error(result.som, result.features.values)}};
    report["report"] = io::modular_report_json(result.report);
    if (config.timestamp) {
        report["generated_at"] = utc_timestamp();
    }

    if (!config.out_dir.empty()) {
        run_stage("write", [&] {
            std::error_code ec;
            std::filesystem::create_directories(config.out_dir, ec);
            if (ec) {
                throw Error(ErrorCode::Io, "cannot create " + config.out_dir.string() + ": " + ec.message());
            }
            const auto& dir = config.out_dir;
            io::write_json(io::scores_json(result.scores, config.bins), dir / "scores.json");
            io::write_json(io::labels_json(data, result.labels), dir / "labels.json");
            io::write_json({{"dendrogram", io::dendrogram_json(result.dendrogram)},
                            {"selection", io::selection_json(result.selection)},
                            {"chosen_k", result.k},
                            {"stats", io::stats_json(result.stats)},
                            {"correlations", io::correlation_table_json(result.correlation_table)}},
                           dir / "varclus.json");
            std::ofstream(dir / "dendrogram.dot") << io::dendrogram_dot(result.dendrogram);
            io::write_json(io::som_json(result.som, data, result.assignments), dir / "assignments.json");
            nlohmann::json models = {{"nonmodular", io::model_json(result.nonmodular_model, &result.features.stats)},
                                     {"clusters", nlohmann::json::array()}};
            for (const auto& m : result.cluster_models) {
                models["clusters"].push_back(io::model_json(m, &result.features.stats));
            }
            io::write_json(models, dir / "models.json");
            io::write_json(report, dir / "report.json");
            return 0;
        });
    }
    return result;
}

}  // namespace modea
