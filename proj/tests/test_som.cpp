#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "modea/dataset.hpp"
#include "modea/error.hpp"
#include "modea/som.hpp"
#include "support.hpp"

using namespace modea;

namespace {

struct Blobs {
    Eigen::MatrixXd x;
    std::vector<std::size_t> truth;
};

Blobs two_blobs(std::size_t per_blob, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Blobs b;
    b.x.resize(static_cast<Eigen::Index>(2 * per_blob), 4);
    for (std::size_t i = 0; i < 2 * per_blob; ++i) {
        const std::size_t blob = i % 2;
        b.truth.push_back(blob);
        for (Eigen::Index c = 0; c < 4; ++c) {
            b.x(static_cast<Eigen::Index>(i), c) = (blob == 0 ? -5.0 : 5.0) + 0.5 * g(rng);
        }
    }
    return b;
}

// 1.0 when the labels match the truth up to renaming of the two clusters.
double agreement(const std::vector<std::size_t>& a, const std::vector<std::size_t>& truth) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == truth[i] ? 1 : 0;
    return static_cast<double>(std::max(same, a.size() - same)) / static_cast<double>(a.size());
}

}  // namespace

TEST(Som, SingleUnitConvergesToMean) {
    std::mt19937_64 rng(500);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(500, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    auto z = normalize(x).values;
    SomConfig cfg;
    cfg.k = 1;
    cfg.seed = 9;
    auto model = train_som(z, cfg);
    Eigen::RowVectorXd mean = z.colwise().mean();
    EXPECT_LT((model.codebooks.row(0) - mean).norm(), 0.1);
    EXPECT_LT(model.codebooks.row(0).norm(), 0.1);
}

TEST(Som, TwoBlobsRecovered) {
    auto b = two_blobs(100, 3);
    auto z = normalize(b.x).values;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        SomConfig cfg;
        cfg.k = 2;
        cfg.seed = seed;
        auto model = train_som(z, cfg);
        EXPECT_EQ(agreement(assign_all(model, z), b.truth), 1.0) << "seed " << seed;
    }
}

TEST(Som, DeterministicForSeed) {
    auto b = two_blobs(60, 8);
    auto z = normalize(b.x).values;
    SomConfig cfg;
    cfg.k = 3;
    cfg.seed = 77;
    auto a = train_som(z, cfg);
    auto c = train_som(z, cfg);
    EXPECT_EQ(a.codebooks, c.codebooks);
    EXPECT_EQ(assign_all(a, z), assign_all(c, z));
    cfg.seed = 78;
    EXPECT_NE(train_som(z, cfg).codebooks, a.codebooks);
}

TEST(Som, AssignmentStableAfterTraining) {
    auto b = two_blobs(50, 2);
    auto z = normalize(b.x).values;
    SomConfig cfg;
    cfg.k = 2;
    auto model = train_som(z, cfg);
    auto first = assign_all(model, z);
    EXPECT_EQ(assign_all(model, z), first);
    EXPECT_TRUE(model.codebooks.allFinite());
    EXPECT_EQ(model.units(), 2u);
    EXPECT_EQ(model.dimension(), 4u);
}

TEST(Som, EveryUnitNonEmptyAfterRepair) {
    // Tight, well separated blobs with more units than blobs: the units
    // between blobs end training with nothing to own.
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::pair<int, std::size_t> layouts[] = {{2, 3}, {3, 5}};
    for (const auto& [blobs, k] : layouts) {
        Eigen::MatrixXd x(120, 2);
        for (Eigen::Index i = 0; i < 120; ++i) {
            const auto b = i % blobs;
            x(i, 0) = (b == 0 ? -10.0 : (b == 1 ? 10.0 : 0.0)) + 0.05 * g(rng);
            x(i, 1) = (b == 2 ? 10.0 : 0.0) + 0.05 * g(rng);
        }
        auto z = normalize(x).values;
        std::size_t repairs = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            SomConfig cfg;
            cfg.k = k;
            cfg.seed = seed;
            auto model = train_som(z, cfg);
            auto sizes = cluster_sizes(assign_all(model, z), k);
            EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 0u), 0) << "seed " << seed;
            EXPECT_EQ(model.training_epochs_run, cfg.epochs + model.repairs * 10);
            repairs += model.repairs;
        }
        EXPECT_GT(repairs, 0u);
    }
}

TEST(Som, QuantizationErrorShrinksWithMoreEpochs) {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(300, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    auto z = normalize(x).values;
    std::vector<double> short_runs, long_runs;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SomConfig cfg;
        cfg.k = 4;
        cfg.seed = seed;
        cfg.epochs = 5;
        short_runs.push_back(quantization_error(train_som(z, cfg), z));
        cfg.epochs = 10;
        long_runs.push_back(quantization_error(train_som(z, cfg), z));
    }
    std::nth_element(short_runs.begin(), short_runs.begin() + 5, short_runs.end());
    std::nth_element(long_runs.begin(), long_runs.begin() + 5, long_runs.end());
    EXPECT_LE(long_runs[5], short_runs[5] + 1e-3);
}

TEST(Som, ConfigAndShapeErrors) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Random(3, 2);
    SomConfig cfg;
    cfg.k = 4;
    EXPECT_EQ(support::code_of([&] { train_som(z, cfg); }), ErrorCode::TooFewRecords);
    cfg.k = 0;
    EXPECT_EQ(support::code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
    cfg.k = 2;
    cfg.initial_learning_rate = 1.5;
    EXPECT_EQ(support::code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
    cfg.initial_learning_rate = 0.03;
    cfg.epochs = 0;
    EXPECT_EQ(support::code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
    cfg.epochs = 10;
    EXPECT_DOUBLE_EQ(cfg.start_radius(), 1.0);
}

TEST(Assign, ExactMatchAndTies) {
    SomModel model;
    model.codebooks.resize(3, 2);
    model.codebooks << 0, 0, 2, 0, 5, 5;
    EXPECT_EQ(assign(model, Eigen::Vector2d(5, 5)), 2u);
    EXPECT_EQ(assign(model, Eigen::Vector2d(1, 0)), 0u);
    EXPECT_EQ(assign(model, Eigen::Vector2d(1.5, 0)), 1u);
    EXPECT_EQ(support::code_of([&] { assign(model, Eigen::Vector3d(0, 0, 0)); }), ErrorCode::DimensionMismatch);
}

TEST(ClusterSizes, Counts) {
    EXPECT_EQ(cluster_sizes({0, 0, 1, 2, 2, 2}, 3), (std::vector<std::size_t>{2, 1, 3}));
    EXPECT_EQ(cluster_sizes({}, 3), (std::vector<std::size_t>{0, 0, 0}));
    EXPECT_EQ(support::code_of([] { cluster_sizes({0, 3}, 3); }), ErrorCode::IndexOutOfRange);
}

TEST(ClusterSizes, SumToN) {
    auto b = two_blobs(40, 1);
    auto z = normalize(b.x).values;
    SomConfig cfg;
    cfg.k = 3;
    auto labels = assign_all(train_som(z, cfg), z);
    auto sizes = cluster_sizes(labels, 3);
    EXPECT_EQ(sizes[0] + sizes[1] + sizes[2], 80u);
}
