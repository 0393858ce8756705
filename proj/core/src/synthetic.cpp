#include "modea/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "modea/error.hpp"

namespace modea {

namespace {

constexpr double kMinPositive = 1e-6;

std::string make_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "B%04zu", i + 1);
    return buf;
}

BranchRecord to_record(std::size_t index, const std::vector<double>& values, std::size_t m) {
    BranchRecord rec;
    rec.id = make_id(index);
    rec.inputs.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m));
    rec.outputs.assign(values.begin() + static_cast<std::ptrdiff_t>(m), values.end());
    for (auto& v : rec.inputs) {
        v = std::max(v, kMinPositive);
    }
    bool any_positive = false;
    for (auto& v : rec.outputs) {
        v = std::max(v, 0.0);
        any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) {
        rec.outputs.front() = kMinPositive;
    }
    return rec;
}

std::vector<std::string> numbered(char prefix, std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) {
        names.push_back(std::string(1, prefix) + std::to_string(i + 1));
    }
    return names;
}

}  // namespace

std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& proportions) {
    std::vector<std::size_t> sizes(proportions.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < proportions.size(); ++c) {
        double exact = proportions[c] * static_cast<double>(n);
        sizes[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        assigned += sizes[c];
        remainders.emplace_back(exact - static_cast<double>(sizes[c]), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n && i < remainders.size(); ++i, ++assigned) {
        ++sizes[remainders[i].second];
    }
    return sizes;
}

SyntheticDataset generate_synthetic(std::size_t n, std::size_t m, std::size_t s,
                                    const std::vector<ClusterSpec>& clusters, std::uint64_t seed) {
    if (clusters.empty()) {
        throw Error(ErrorCode::BadProportions, "no clusters given");
    }
    double total = 0.0;
    for (const auto& c : clusters) {
        if (!(c.spread > 0.0)) {
            throw Error(ErrorCode::BadProportions, "cluster spread must be > 0");
        }
        if (c.proportion < 0.0) {
            throw Error(ErrorCode::BadProportions, "negative cluster proportion");
        }
        if (c.center.size() != m + s) {
            throw Error(ErrorCode::DimensionMismatch, "cluster center must have m+s entries");
        }
        total += c.proportion;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::BadProportions, "cluster proportions must sum to 1");
    }

    std::vector<double> proportions;
    for (const auto& c : clusters) {
        proportions.push_back(c.proportion);
    }
    auto sizes = apportion(n, proportions);

    std::vector<std::size_t> truth;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        truth.insert(truth.end(), sizes[c], c);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(truth.begin(), truth.end(), rng);

    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<BranchRecord> records;
    records.reserve(n);
    std::vector<double> values(m + s);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& spec = clusters[truth[i]];
        for (std::size_t f = 0; f < m + s; ++f) {
            values[f] = spec.center[f] + spec.spread * noise(rng);
        }
        records.push_back(to_record(i, values, m));
    }
    return {Dataset(numbered('I', m), numbered('O', s), std::move(records)), std::move(truth), {}, seed};
}

std::vector<ClusterSpec> default_cluster_specs(std::size_t m, std::size_t s) {
    const std::size_t d = m + s;
    std::vector<ClusterSpec> specs(3);
    const double proportions[3] = {227.0 / 589.0, 241.0 / 589.0, 121.0 / 589.0};
    for (std::size_t c = 0; c < 3; ++c) {
        specs[c].center.assign(d, 20.0);
        // Each cluster is shifted up along a different third of the features.
        for (std::size_t f = 0; f < d; ++f) {
            if (f % 3 == c) {
                specs[c].center[f] += 10.0;
            }
        }
        // wide enough that efficiency scores populate every default band
        specs[c].spread = 5.0;
        specs[c].proportion = proportions[c];
    }
    // Sum to exactly 1 so the proportion check is not at the mercy of rounding.
    specs[2].proportion = 1.0 - specs[0].proportion - specs[1].proportion;
    return specs;
}

SyntheticDataset generate_block_correlated(std::size_t n, std::uint64_t seed, double within,
                                           double cross) {
    if (!(cross >= 0.0 && cross <= within && within < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "need 0 <= cross <= within < 1");
    }
    // Feature slot -> latent block: I1,I2,I3,O1,O2,O3 -> blocks 1,2,0,1,0,2.
    constexpr std::size_t kBlockOf[6] = {1, 2, 0, 1, 0, 2};
    const double common = std::sqrt(cross);
    const double block = std::sqrt(within - cross);
    const double unique = std::sqrt(1.0 - within);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<BranchRecord> records;
    records.reserve(n);
    std::vector<double> values(6);
    for (std::size_t i = 0; i < n; ++i) {
        double g = z(rng);
        double latent[3] = {z(rng), z(rng), z(rng)};
        for (std::size_t f = 0; f < 6; ++f) {
            double v = common * g + block * latent[kBlockOf[f]] + unique * z(rng);
            values[f] = 50.0 + 5.0 * v;
        }
        records.push_back(to_record(i, values, 3));
    }
    std::vector<std::size_t> truth(n, 0);
    return {Dataset(numbered('I', 3), numbered('O', 3), std::move(records)), std::move(truth), {}, seed};
}

SyntheticDataset generate_piecewise(std::size_t n, std::uint64_t seed) {
    constexpr std::size_t kDims = 6;
    constexpr double kBase = 30.0;
    constexpr double kShift = 6.0;
    // Centers move mass between coordinates so every center has the same
    // coordinate sum; the sum term of the reduced model cannot tell them apart.
    const std::size_t up[3] = {0, 1, 2};
    const std::size_t down[3] = {1, 2, 0};
    // Class direction per cluster: conflicting orientations on shared axes.
    const double direction[3][kDims] = {
        {0, 0, 0, 1, 0, 0},
        {0, 0, 0, -1, 0, 0},
        {0, 0, 0, 0, 1, -1},
    };

    std::vector<ClusterSpec> specs(3);
    for (std::size_t c = 0; c < 3; ++c) {
        specs[c].center.assign(kDims, kBase);
        specs[c].center[up[c]] += kShift;
        specs[c].center[down[c]] -= kShift;
        specs[c].spread = 1.0;
        specs[c].proportion = 1.0 / 3.0;
    }
    specs[2].proportion = 1.0 - 2.0 / 3.0;

    auto synth = generate_synthetic(n, 3, 3, specs, seed);
    const auto x = synth.data.feature_matrix();
    synth.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = synth.truth[i];
        double t = 0.0;
        double norm = 0.0;
        for (std::size_t f = 0; f < kDims; ++f) {
            t += direction[c][f] * (x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) -
                                    specs[c].center[f]);
            norm += direction[c][f] * direction[c][f];
        }
        t /= std::sqrt(norm);
        synth.labels[i] = t < -0.5 ? 0 : (t < 0.5 ? 1 : 2);
    }
    return synth;
}

}  // namespace modea
