#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run modea_cli(const std::string& args, const fs::path& dir) {
    const auto err_path = dir / "stderr.txt";
    const std::string cmd = std::string(MODEA_CLI) + " " + args + " 2>" + err_path.string();
    Run run;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return run;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) run.out.append(buf.data(), got);
    const int status = pclose(pipe);
    run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err_path);
    run.err.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return run;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, SynthThenScore) {
    const auto dir = support::scratch_dir("cli_score");
    const auto csv = dir / "branches.csv";
    auto synth = modea_cli("--seed 3 synth --n 589 --out " + quoted(csv), dir);
    ASSERT_EQ(synth.code, 0) << synth.err;
    auto score = modea_cli("score --input " + quoted(csv), dir);
    ASSERT_EQ(score.code, 0) << score.err;
    auto doc = json::parse(score.out);
    ASSERT_EQ(doc.size(), 589u);
    for (const auto& s : doc) {
        EXPECT_GT(s["theta"].get<double>(), 0.0);
        EXPECT_LE(s["theta"].get<double>(), 1.0 + 1e-9);
    }
}

TEST(Cli, HandInstance) {
    const auto dir = support::scratch_dir("cli_hand_scores");
    std::ofstream(dir / "abc.csv") << "id,I1,O1\nA,2,4\nB,4,4\nC,5,10\n";
    auto score = modea_cli("--out-dir " + quoted(dir) + " score --inputs 1 --input " + quoted(dir / "abc.csv") +
                               " --out scores.json",
                           dir);
    ASSERT_EQ(score.code, 0) << score.err;
    std::ifstream in(dir / "scores.json");
    auto doc = json::parse(in);
    ASSERT_EQ(doc.size(), 3u);
    EXPECT_NEAR(doc[0]["theta"].get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(doc[1]["theta"].get<double>(), 0.5, 1e-9);
    EXPECT_NEAR(doc[2]["theta"].get<double>(), 1.0, 1e-9);
    EXPECT_EQ(doc[1]["class"], "Weak");
}

TEST(Cli, UsageErrorsExitTwo) {
    const auto dir = support::scratch_dir("cli_usage");
    std::ofstream(dir / "abc.csv") << "id,I1,O1\nA,2,4\nB,4,4\nC,5,10\n";
    auto folds = modea_cli("evaluate --input " + quoted(dir / "abc.csv") + " --folds 1", dir);
    EXPECT_EQ(folds.code, 2);
    EXPECT_NE(folds.err.find("error"), std::string::npos);
    EXPECT_NE(folds.err.find("--folds"), std::string::npos);
    EXPECT_EQ(modea_cli("", dir).code, 2);
    EXPECT_EQ(modea_cli("score", dir).code, 2);
    EXPECT_EQ(modea_cli("score --input " + quoted(dir / "missing.csv"), dir).code, 2);
}

TEST(Cli, DataErrorsExitOne) {
    const auto dir = support::scratch_dir("cli_data");
    std::ofstream(dir / "bad.csv") << "id,I1,O1\nA,0,4\nB,4,4\n";
    auto run = modea_cli("score --inputs 1 --input " + quoted(dir / "bad.csv"), dir);
    EXPECT_EQ(run.code, 1);
    EXPECT_NE(run.err.find("A"), std::string::npos);
}

TEST(Cli, PipelineWritesArtifacts) {
    const auto dir = support::scratch_dir("cli_pipeline");
    const auto csv = dir / "branches.csv";
    ASSERT_EQ(modea_cli("--seed 5 synth --n 300 --out " + quoted(csv), dir).code, 0);
    const auto out = dir / "run";
    auto run = modea_cli("--seed 5 --no-timestamp --out-dir " + quoted(out) + " pipeline --input " + quoted(csv), dir);
    ASSERT_EQ(run.code, 0) << run.err;
    EXPECT_NE(run.out.find("modular CA:"), std::string::npos);
    for (const char* name : {"scores.json", "labels.json", "varclus.json", "dendrogram.dot", "assignments.json",
                             "models.json", "report.json"}) {
        EXPECT_TRUE(fs::exists(out / name)) << name;
    }
    std::ifstream in(out / "report.json");
    auto report = json::parse(in);
    EXPECT_EQ(report["config"]["seed"], 5);
    EXPECT_FALSE(report.contains("generated_at"));
}

TEST(Cli, PipelineBadBinsNamesConfigStage) {
    const auto dir = support::scratch_dir("cli_bins");
    const auto csv = dir / "branches.csv";
    ASSERT_EQ(modea_cli("synth --n 100 --out " + quoted(csv), dir).code, 0);
    auto run = modea_cli("--out-dir " + quoted(dir / "run") + " pipeline --input " + quoted(csv) + " --bins 0.7,0.55",
                         dir);
    EXPECT_EQ(run.code, 1);
    EXPECT_NE(run.err.find("config"), std::string::npos);
}

TEST(Cli, ModularChainOnPiecewiseData) {
    const auto dir = support::scratch_dir("cli_chain");
    const auto in = "--out-dir " + quoted(dir) + " ";
    ASSERT_EQ(modea_cli(in + "--seed 2 synth --kind piecewise --n 300 --out data.csv --labels-out labels.json", dir).code, 0);
    auto recs = modea_cli(in + "--seed 2 cluster-records --input " + quoted(dir / "data.csv") + " --k 3 --out clusters.json", dir);
    ASSERT_EQ(recs.code, 0) << recs.err;
    auto train = modea_cli(in + "train --input " + quoted(dir / "data.csv") + " --labels " + quoted(dir / "labels.json") + " --clusters " + quoted(dir / "clusters.json") + " --out models.json",
                           dir);
    ASSERT_EQ(train.code, 0) << train.err;
    std::ifstream models_in(dir / "models.json");
    auto models = json::parse(models_in);
    EXPECT_EQ(models["clusters"].size(), 3u);
    EXPECT_EQ(models["nonmodular"]["term_order_version"], 1);

    auto eval = modea_cli(in + "--seed 2 evaluate --input " + quoted(dir / "data.csv") + " --labels " + quoted(dir / "labels.json") + " --clusters " + quoted(dir / "clusters.json") + "", dir);
    ASSERT_EQ(eval.code, 0) << eval.err;
    auto report = json::parse(eval.out);
    EXPECT_EQ(report["per_cluster"].size(), 3u);
    EXPECT_GE(report["modular_ca"].get<double>(), 0.0);
}

TEST(Cli, ClusterVarsOnBlockData) {
    const auto dir = support::scratch_dir("cli_vars");
    const auto in = "--out-dir " + quoted(dir) + " ";
    ASSERT_EQ(modea_cli(in + "--seed 4 synth --kind blocks --n 400 --out blocks.csv", dir).code, 0);
    auto run = modea_cli(in + "cluster-vars --input " + quoted(dir / "blocks.csv") + " --dot tree.dot", dir);
    ASSERT_EQ(run.code, 0) << run.err;
    auto doc = json::parse(run.out);
    EXPECT_EQ(doc["chosen_k"], 3);
    EXPECT_FALSE(doc["overridden"].get<bool>());
    EXPECT_TRUE(fs::exists(dir / "tree.dot"));
}
