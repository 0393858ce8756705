// modea: command-line front end for the modular DEA toolkit.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "modea/dataset.hpp"
#include "modea/dea.hpp"
#include "modea/error.hpp"
#include "modea/evaluation.hpp"
#include "modea/json_io.hpp"
#include "modea/pipeline.hpp"
#include "modea/rm_classifier.hpp"
#include "modea/som.hpp"
#include "modea/synthetic.hpp"
#include "modea/varclus.hpp"

namespace fs = std::filesystem;
using modea::io::json;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out_dir;
    bool no_timestamp = false;
    std::string log_level = "warn";
};

struct DataOptions {
    std::string input;
    std::optional<std::size_t> inputs;

    modea::Dataset load() const { return modea::load_csv(input, modea::CsvOptions{inputs}); }
};

void add_data_options(CLI::App* cmd, DataOptions& opts) {
    cmd->add_option("--input", opts.input, "CSV file: id, inputs, outputs")->required()->check(CLI::ExistingFile);
    cmd->add_option("--inputs", opts.inputs, "Number of input columns (overrides #inputs= directive)");
}

fs::path resolve(const GlobalOptions& g, const std::string& out) {
    fs::path p(out);
    if (!g.out_dir.empty() && p.is_relative()) {
        fs::create_directories(g.out_dir);
        return fs::path(g.out_dir) / p;
    }
    return p;
}

void emit(const GlobalOptions& g, const json& doc, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << doc.dump(2) << '\n';
    } else {
        modea::io::write_json(doc, resolve(g, out));
    }
}

// --- score ---------------------------------------------------------------

struct ScoreOptions {
    DataOptions data;
    std::string bins = "0.55,0.7";
    std::string out;
};

void run_score(const GlobalOptions& g, const ScoreOptions& o) {
    auto bins = modea::PerformanceBins::parse(o.bins);
    auto data = o.data.load();
    emit(g, modea::io::scores_json(modea::evaluate_all(data), bins), o.out);
}

// --- cluster-vars --------------------------------------------------------

struct ClusterVarsOptions {
    DataOptions data;
    std::string linkage = "average";
    std::optional<std::size_t> k;
    std::optional<std::size_t> k_max;
    std::string out;
    std::string dot;
};

void run_cluster_vars(const GlobalOptions& g, const ClusterVarsOptions& o) {
    auto data = o.data.load();
    const auto raw = data.feature_matrix();
    const auto names = data.feature_names();
    auto tree = modea::agglomerate(modea::correlation_matrix(raw), modea::parse_linkage(o.linkage), names);
    auto selection = modea::select_k(tree, raw, o.k_max.value_or(names.size() - 1));
    const std::size_t k = o.k.value_or(selection.k);
    const auto partition = modea::cut(tree, k);
    json doc = {{"dendrogram", modea::io::dendrogram_json(tree)},
                {"selection", modea::io::selection_json(selection)},
                {"chosen_k", k},
                {"overridden", o.k.has_value()},
                {"stats", modea::io::stats_json(modea::cluster_stats(raw, partition, names))},
                {"correlations", modea::io::correlation_table_json(modea::cluster_correlation_table(raw, partition, names))}};
    emit(g, doc, o.out);
    if (!o.dot.empty()) {
        std::ofstream(resolve(g, o.dot)) << modea::io::dendrogram_dot(tree);
    }
}

// --- cluster-records -----------------------------------------------------

struct ClusterRecordsOptions {
    DataOptions data;
    std::size_t k = 3;
    double lr = 0.03;
    std::size_t epochs = 100;
    std::string out;
};

void run_cluster_records(const GlobalOptions& g, const ClusterRecordsOptions& o) {
    auto data = o.data.load();
    auto features = modea::normalize(data);
    modea::SomConfig cfg;
    cfg.k = o.k;
    cfg.initial_learning_rate = o.lr;
    cfg.epochs = o.epochs;
    cfg.seed = g.seed;
    auto model = modea::train_som(features.values, cfg);
    emit(g, modea::io::som_json(model, data, modea::assign_all(model, features.values)), o.out);
}

// --- train ---------------------------------------------------------------

struct ModelOptions {
    std::size_t order = 2;
    double ridge = 1e-4;
    std::string variant = "RM";

    modea::RmConfig config() const {
        modea::RmConfig c{order, ridge, modea::parse_variant(variant)};
        c.validate();
        return c;
    }
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
    cmd->add_option("--order", opts.order, "Polynomial order r")->check(CLI::Range(1, 6));
    cmd->add_option("--ridge", opts.ridge, "Ridge constant b")->check(CLI::NonNegativeNumber);
    cmd->add_option("--variant", opts.variant, "RM, RMprime, or FullMP")
        ->check(CLI::IsMember({"RM", "RMprime", "FullMP"}));
}

struct TrainOptions {
    DataOptions data;
    std::string labels;
    std::string clusters;
    std::string bins = "0.55,0.7";
    ModelOptions model;
    std::string out;
};

void run_train(const GlobalOptions& g, const TrainOptions& o) {
    auto data = o.data.load();
    auto bins = modea::PerformanceBins::parse(o.bins);
    auto labels = modea::io::labels_from_json(modea::io::read_json(o.labels), data, bins);
    auto features = modea::normalize(data);
    auto cfg = o.model.config();
    json doc = {{"nonmodular", modea::io::model_json(modea::fit(features.values, labels, cfg), &features.stats)}};
    if (!o.clusters.empty()) {
        std::size_t k = 0;
        auto assignments = modea::io::assignments_from_json(modea::io::read_json(o.clusters), data, k);
        doc["clusters"] = json::array();
        for (const auto& m : modea::fit_cluster_models(features.values, labels, assignments, k, cfg)) {
            doc["clusters"].push_back(modea::io::model_json(m, &features.stats));
        }
    }
    emit(g, doc, o.out);
}

// --- evaluate ------------------------------------------------------------

struct EvaluateOptions {
    DataOptions data;
    std::string labels;
    std::string bins = "0.55,0.7";
    std::string clusters;
    std::size_t k = 3;
    std::size_t folds = 10;
    std::string weighting = "fold-size";
    bool plain_folds = false;
    ModelOptions model;
    std::string out;
};

void run_evaluate(const GlobalOptions& g, const EvaluateOptions& o) {
    auto data = o.data.load();
    auto bins = modea::PerformanceBins::parse(o.bins);
    std::vector<int> labels;
    if (o.labels.empty()) {
        for (const auto& s : modea::evaluate_all(data)) {
            labels.push_back(static_cast<int>(bins.assign(std::min(s.theta, 1.0))));
        }
    } else {
        labels = modea::io::labels_from_json(modea::io::read_json(o.labels), data, bins);
    }
    auto features = modea::normalize(data);
    const auto rm = o.model.config();
    modea::FoldConfig folds{o.folds, modea::derive_seed(g.seed, modea::SeedStream::Folds), !o.plain_folds,
                            modea::parse_weighting(o.weighting), false};

    std::vector<std::size_t> assignments;
    std::size_t k = o.k;
    if (!o.clusters.empty()) {
        assignments = modea::io::assignments_from_json(modea::io::read_json(o.clusters), data, k);
    } else {
        modea::SomConfig som;
        som.k = o.k;
        som.seed = modea::derive_seed(g.seed, modea::SeedStream::Som);
        assignments = modea::assign_all(modea::train_som(features.values, som), features.values);
    }
    auto report = modea::compare_with_assignments(features.values, labels, assignments, k, rm, folds);
    json doc = modea::io::modular_report_json(report);
    doc["config"] = {{"folds", o.folds},
                     {"seed", g.seed},
                     {"weighting", o.weighting},
                     {"stratified", !o.plain_folds},
                     {"k", k},
                     {"clusters", o.clusters},
                     {"labels", o.labels},
                     {"rm", {{"variant", o.model.variant}, {"order", o.model.order}, {"ridge", o.model.ridge}}}};
    emit(g, doc, o.out);
}

// --- synth ---------------------------------------------------------------

struct SynthOptions {
    std::size_t n = 589;
    std::size_t m = 3;
    std::size_t s = 3;
    std::string kind = "clusters";
    std::string out;
    std::string labels_out;
};

void run_synth(const GlobalOptions& g, const SynthOptions& o) {
    modea::SyntheticDataset synth = [&] {
        if (o.kind == "blocks") {
            return modea::generate_block_correlated(o.n, g.seed);
        }
        if (o.kind == "piecewise") {
            return modea::generate_piecewise(o.n, g.seed);
        }
        return modea::generate_synthetic(o.n, o.m, o.s, modea::default_cluster_specs(o.m, o.s), g.seed);
    }();
    modea::write_csv(synth.data, resolve(g, o.out), g.seed);
    if (!o.labels_out.empty()) {
        if (synth.labels.empty()) {
            // Generating clusters stand in for labels when the generator has none.
            for (auto t : synth.truth) {
                synth.labels.push_back(static_cast<int>(t));
            }
        }
        modea::io::write_json(modea::io::labels_json(synth.data, synth.labels), resolve(g, o.labels_out));
    }
}

// --- pipeline ------------------------------------------------------------

struct PipelineOptions {
    DataOptions data;
    std::string bins = "0.55,0.7";
    std::optional<std::size_t> k;
    std::size_t k_max = 0;
    std::string linkage = "average";
    double lr = 0.03;
    std::size_t epochs = 100;
    std::size_t folds = 10;
    std::string weighting = "fold-size";
    bool fold_normalization = false;
    ModelOptions model;
};

void run_pipeline_command(const GlobalOptions& g, const PipelineOptions& o) {
    modea::PipelineConfig cfg;
    try {
        cfg.bins = modea::PerformanceBins::parse(o.bins);
    } catch (const modea::Error& e) {
        throw modea::StageError("config", e);
    }
    cfg.input = o.data.input;
    cfg.input_count = o.data.inputs;
    cfg.k_override = o.k;
    cfg.k_max = o.k_max;
    cfg.linkage = modea::parse_linkage(o.linkage);
    cfg.som.initial_learning_rate = o.lr;
    cfg.som.epochs = o.epochs;
    cfg.rm = modea::RmConfig{o.model.order, o.model.ridge, modea::parse_variant(o.model.variant)};
    cfg.folds = o.folds;
    cfg.weighting = modea::parse_weighting(o.weighting);
    cfg.normalize_within_folds = o.fold_normalization;
    cfg.seed = g.seed;
    cfg.out_dir = g.out_dir.empty() ? fs::path("modea-out") : fs::path(g.out_dir);
    cfg.timestamp = !g.no_timestamp;
    auto result = modea::run_pipeline(cfg);
    std::cout << "non-modular CA: " << result.report.nonmodular_ca << "\n"
              << "modular CA:     " << result.report.modular_ca << "\n"
              << "artifacts:      " << cfg.out_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular DEA: efficiency scoring, clustering, and reduced polynomial classification"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Master random seed");
    app.add_option("--out-dir", g.out_dir, "Directory for outputs and pipeline artifacts");
    app.add_flag("--no-timestamp", g.no_timestamp, "Omit timestamps from reports");
    app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

    ScoreOptions score;
    auto* score_cmd = app.add_subcommand("score", "Input-oriented CCR efficiency for every DMU");
    add_data_options(score_cmd, score.data);
    score_cmd->add_option("--bins", score.bins, "Interior efficiency cut points");
    score_cmd->add_option("--out", score.out, "Output JSON (stdout when omitted)");

    ClusterVarsOptions vars;
    auto* vars_cmd = app.add_subcommand("cluster-vars", "Hierarchical clustering of the variables");
    add_data_options(vars_cmd, vars.data);
    vars_cmd->add_option("--linkage", vars.linkage, "average, complete, or single")
        ->check(CLI::IsMember({"average", "complete", "single"}));
    vars_cmd->add_option("--k", vars.k, "Use this cluster count instead of the selected one")->check(CLI::PositiveNumber);
    vars_cmd->add_option("--k-max", vars.k_max, "Largest k considered")->check(CLI::PositiveNumber);
    vars_cmd->add_option("--out", vars.out, "Output JSON (stdout when omitted)");
    vars_cmd->add_option("--dot", vars.dot, "Also write the dendrogram as Graphviz DOT");

    ClusterRecordsOptions recs;
    auto* recs_cmd = app.add_subcommand("cluster-records", "Self-organizing map clustering of the records");
    add_data_options(recs_cmd, recs.data);
    recs_cmd->add_option("--k", recs.k, "Number of map units")->check(CLI::PositiveNumber);
    recs_cmd->add_option("--lr", recs.lr, "Initial learning rate")->check(CLI::Range(0.0, 1.0));
    recs_cmd->add_option("--epochs", recs.epochs, "Training epochs")->check(CLI::PositiveNumber);
    recs_cmd->add_option("--out", recs.out, "Output JSON (stdout when omitted)");

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "Fit reduced polynomial classifiers");
    add_data_options(train_cmd, train.data);
    train_cmd->add_option("--labels", train.labels, "Labels JSON or score report")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--clusters", train.clusters, "Assignment JSON; fits one model per cluster")
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--bins", train.bins, "Cut points used to read class names from a score report");
    add_model_options(train_cmd, train.model);
    train_cmd->add_option("--out", train.out, "Output JSON (stdout when omitted)");

    EvaluateOptions eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Cross-validated modular vs non-modular accuracy");
    add_data_options(eval_cmd, eval.data);
    eval_cmd->add_option("--labels", eval.labels, "Labels JSON or score report (default: DEA bands)")
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--bins", eval.bins, "Efficiency cut points");
    eval_cmd->add_option("--clusters", eval.clusters, "Assignment JSON (default: train a SOM)")->check(CLI::ExistingFile);
    eval_cmd->add_option("--k", eval.k, "SOM units when --clusters is absent")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--folds", eval.folds, "Number of CV folds (>= 2)")->check(CLI::Range(2, 1000000));
    eval_cmd->add_option("--weighting", eval.weighting, "fold-size or class-proportion")
        ->check(CLI::IsMember({"fold-size", "class-proportion"}));
    eval_cmd->add_flag("--plain-folds", eval.plain_folds, "Do not stratify folds by class");
    add_model_options(eval_cmd, eval.model);
    eval_cmd->add_option("--out", eval.out, "Output JSON (stdout when omitted)");

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic DMU table");
    synth_cmd->add_option("--n", synth.n, "Records")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--m", synth.m, "Inputs (clusters kind only)")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--s", synth.s, "Outputs (clusters kind only)")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--kind", synth.kind, "clusters, blocks, or piecewise")
        ->check(CLI::IsMember({"clusters", "blocks", "piecewise"}));
    synth_cmd->add_option("--out", synth.out, "Output CSV")->required();
    synth_cmd->add_option("--labels-out", synth.labels_out, "Also write generator labels as JSON");

    PipelineOptions pipe;
    auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage end to end");
    add_data_options(pipe_cmd, pipe.data);
    pipe_cmd->add_option("--bins", pipe.bins, "Efficiency cut points");
    pipe_cmd->add_option("--k", pipe.k, "Cluster count override")->check(CLI::PositiveNumber);
    pipe_cmd->add_option("--k-max", pipe.k_max, "Largest k considered by the dendrogram cut");
    pipe_cmd->add_option("--linkage", pipe.linkage, "average, complete, or single")
        ->check(CLI::IsMember({"average", "complete", "single"}));
    pipe_cmd->add_option("--lr", pipe.lr, "SOM initial learning rate")->check(CLI::Range(0.0, 1.0));
    pipe_cmd->add_option("--epochs", pipe.epochs, "SOM epochs")->check(CLI::PositiveNumber);
    pipe_cmd->add_option("--folds", pipe.folds, "Number of CV folds (>= 2)")->check(CLI::Range(2, 1000000));
    pipe_cmd->add_option("--weighting", pipe.weighting, "fold-size or class-proportion")
        ->check(CLI::IsMember({"fold-size", "class-proportion"}));
    pipe_cmd->add_flag("--fold-normalization", pipe.fold_normalization, "Re-estimate z-scores on each training fold");
    add_model_options(pipe_cmd, pipe.model);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* failing = &app;
        for (const auto* sub : app.get_subcommands()) {
            failing = sub;
        }
        std::cerr << failing->help();
        return 2;
    }

    // stdout carries JSON, so diagnostics go to stderr
    spdlog::set_default_logger(spdlog::stderr_color_mt("modea"));
    spdlog::set_level(spdlog::level::from_str(g.log_level));

    try {
        if (*score_cmd) run_score(g, score);
        else if (*vars_cmd) run_cluster_vars(g, vars);
        else if (*recs_cmd) run_cluster_records(g, recs);
        else if (*train_cmd) run_train(g, train);
        else if (*eval_cmd) run_evaluate(g, eval);
        else if (*synth_cmd) run_synth(g, synth);
        else if (*pipe_cmd) run_pipeline_command(g, pipe);
    } catch (const modea::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
