#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "modea/dataset.hpp"
#include "modea/error.hpp"
#include "modea/synthetic.hpp"
#include "support.hpp"

using namespace modea;

namespace {

using support::code_of;

const char* kThreeRows =
    "id,I1,I2,I3,O1,O2,O3\n"
    "A,1,2,3,4,5,6\n"
    "B,2,3,4,5,6,7\n"
    "C,3,4,5,0,0,1\n";

}  // namespace

TEST(DatasetCsv, ThreeRowsInferSchemaFromHeader) {
    auto d = parse_csv(kThreeRows);
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(d.input_count(), 3u);
    EXPECT_EQ(d.output_count(), 3u);
    EXPECT_EQ(d[2].id, "C");
    EXPECT_DOUBLE_EQ(d[1].outputs[2], 7.0);
}

TEST(DatasetCsv, ZeroInputNamesTheRow) {
    try {
        parse_csv("id,I1,I2,O1\nok,1,1,1\nbad,1,0,1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveInput);
        EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
    }
}

TEST(DatasetCsv, RowErrors) {
    EXPECT_EQ(code_of([] { parse_csv("id,I1,O1\nA,1\n"); }), ErrorCode::MalformedRow);
    EXPECT_EQ(code_of([] { parse_csv("id,I1,O1\nA,1,x\n"); }), ErrorCode::MalformedRow);
    EXPECT_EQ(code_of([] { parse_csv("id,I1,O1\nA,1,1\nA,2,2\n"); }), ErrorCode::DuplicateId);
    EXPECT_EQ(code_of([] { parse_csv("id,I1,O1\nA,1,0\n"); }), ErrorCode::InvalidOutput);
    EXPECT_EQ(code_of([] { parse_csv("id,I1,O1\nA,1,-1\n"); }), ErrorCode::InvalidOutput);
    EXPECT_EQ(code_of([] { parse_csv("id,a,b\nA,1,1\n"); }), ErrorCode::MissingInputCount);
}

TEST(DatasetCsv, InputCountFromDirectiveOrOption) {
    auto d = parse_csv("#inputs=1\nid,a,b,c\nA,1,2,3\n");
    EXPECT_EQ(d.input_count(), 1u);
    EXPECT_EQ(d.output_count(), 2u);
    auto e = parse_csv("id,a,b,c\nA,1,2,3\n", CsvOptions{2});
    EXPECT_EQ(e.input_count(), 2u);
}

TEST(DatasetCsv, FullSizeSyntheticLoads) {
    auto synth = generate_synthetic(589, 3, 3, default_cluster_specs(3, 3), 11);
    auto dir = support::scratch_dir("csv589");
    write_csv(synth.data, dir / "d.csv", 11);
    auto d = load_csv(dir / "d.csv");
    EXPECT_EQ(d.size(), 589u);
}

TEST(DatasetCsv, WriteThenLoadIsIdentity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1e-3, 1e6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> in(7, std::vector<double>(2));
        std::vector<std::vector<double>> out(7, std::vector<double>(3));
        for (auto& row : in) for (auto& v : row) v = u(rng);
        for (auto& row : out) for (auto& v : row) v = u(rng);
        out[3][1] = 0.0;
        auto d = support::make_dataset(in, out);
        EXPECT_EQ(parse_csv(format_csv(d, 42)), d);
    }
}

TEST(DatasetCsv, SeedCommentWritten) {
    auto d = support::make_ratio_dataset({1, 2}, {3, 4});
    auto text = format_csv(d, 9);
    EXPECT_EQ(text.rfind("# seed=9\n", 0), 0u);
    EXPECT_NE(text.find("#inputs=1"), std::string::npos);
}

TEST(DatasetCsv, MissingFileIsIoError) {
    EXPECT_EQ(code_of([] { load_csv("/nonexistent/modea.csv"); }), ErrorCode::Io);
}

TEST(DatasetValidation, EmptyAndShapeErrors) {
    EXPECT_EQ(code_of([] { Dataset({"I1"}, {"O1"}, {}); }), ErrorCode::TooFewRows);
    EXPECT_EQ(code_of([] { Dataset({"I1"}, {"O1"}, {{"A", {1.0, 2.0}, {1.0}}}); }), ErrorCode::DimensionMismatch);
}

TEST(Normalize, HandArithmetic) {
    Eigen::MatrixXd col(3, 1);
    col << 2, 4, 6;
    auto z = normalize(col);
    EXPECT_NEAR(z.values(0, 0), -1.0, 1e-15);
    EXPECT_NEAR(z.values(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(z.values(2, 0), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(z.stats.means(0), 4.0);
    EXPECT_DOUBLE_EQ(z.stats.stddevs(0), 2.0);
}

TEST(Normalize, StandardizedInputUnchanged) {
    Eigen::MatrixXd col(3, 1);
    col << -1, 0, 1;
    auto z = normalize(col);
    EXPECT_LE((z.values - col).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalize, ConstantColumn) {
    Eigen::MatrixXd m(3, 2);
    m << 5, 1, 5, 2, 5, 3;
    auto z = normalize(m);
    EXPECT_EQ(z.values.col(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(z.stats.stddevs(0), 1.0);
    EXPECT_TRUE(z.stats.constant[0]);
    EXPECT_FALSE(z.stats.constant[1]);
}

TEST(Normalize, NeedsTwoRows) {
    EXPECT_EQ(code_of([] { normalize(Eigen::MatrixXd::Ones(1, 3)); }), ErrorCode::TooFewRows);
}

TEST(Normalize, RoundTripAndMoments) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = 5 + trial * 3;
        Eigen::MatrixXd m(n, 4);
        for (Eigen::Index c = 0; c < 4; ++c) {
            const double scale = std::pow(10.0, c * 2 - 2);
            for (Eigen::Index r = 0; r < n; ++r) m(r, c) = 50.0 * scale + scale * g(rng);
        }
        auto z = normalize(m);
        auto back = z.stats.invert(z.values);
        for (Eigen::Index c = 0; c < 4; ++c) {
            EXPECT_LE(std::abs(z.values.col(c).mean()), 1e-10);
            const double sd = std::sqrt((z.values.col(c).array() - z.values.col(c).mean()).square().sum() /
                                        static_cast<double>(n - 1));
            EXPECT_LE(std::abs(sd - 1.0), 1e-10);
            for (Eigen::Index r = 0; r < n; ++r) {
                EXPECT_LE(std::abs(back(r, c) - m(r, c)), 1e-10 * std::abs(m(r, c)));
            }
        }
        EXPECT_LE((z.stats.apply_row(m.row(2).transpose()) - z.values.row(2).transpose()).norm(), 1e-12);
    }
}

TEST(Synthetic, DefaultProportionsGiveFixtureSizes) {
    auto synth = generate_synthetic(589, 3, 3, default_cluster_specs(3, 3), 7);
    std::vector<std::size_t> sizes(3, 0);
    for (auto t : synth.truth) ++sizes[t];
    EXPECT_EQ(sizes, (std::vector<std::size_t>{227, 241, 121}));
}

TEST(Synthetic, SameSeedSameBytes) {
    auto a = generate_synthetic(200, 3, 3, default_cluster_specs(3, 3), 3);
    auto b = generate_synthetic(200, 3, 3, default_cluster_specs(3, 3), 3);
    auto c = generate_synthetic(200, 3, 3, default_cluster_specs(3, 3), 4);
    EXPECT_EQ(format_csv(a.data, 3), format_csv(b.data, 3));
    EXPECT_NE(format_csv(a.data), format_csv(c.data));
}

TEST(Synthetic, SingleClusterStaysNearCenter) {
    ClusterSpec spec{{10, 10, 10, 10}, 0.5, 1.0};
    auto synth = generate_synthetic(10, 2, 2, {spec}, 1);
    ASSERT_EQ(synth.data.size(), 10u);
    auto x = synth.data.feature_matrix();
    EXPECT_LE((x.array() - 10.0).abs().maxCoeff(), 0.5 * 6);
}

TEST(Synthetic, BadProportionsRejected) {
    ClusterSpec a{{1, 1}, 1.0, 0.5};
    ClusterSpec b{{1, 1}, 1.0, 0.4};
    EXPECT_EQ(code_of([&] { generate_synthetic(10, 1, 1, {a, b}, 1); }), ErrorCode::BadProportions);
    ClusterSpec flat{{1, 1}, 0.0, 1.0};
    EXPECT_THROW(generate_synthetic(10, 1, 1, {flat}, 1), Error);
}

TEST(Synthetic, ApportionSumsToN) {
    for (std::size_t n : {1u, 7u, 100u, 589u, 1001u}) {
        auto sizes = apportion(n, {0.2, 0.3, 0.5});
        EXPECT_EQ(sizes[0] + sizes[1] + sizes[2], n);
    }
}
