#include "modea/varclus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "modea/error.hpp"

namespace modea {

namespace {

// Column-wise z-scores with sample stddev; constant columns become zero.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& columns) {
    Eigen::MatrixXd z = columns.rowwise() - columns.colwise().mean();
    const double denom = static_cast<double>(std::max<Eigen::Index>(columns.rows() - 1, 1));
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        double sd = std::sqrt(z.col(c).squaredNorm() / denom);
        double scale = std::max(1.0, columns.col(c).cwiseAbs().maxCoeff());
        if (sd > 1e-12 * scale) {
            z.col(c) /= sd;
        } else {
            z.col(c).setZero();
        }
    }
    return z;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd ca = a.array() - a.mean();
    Eigen::VectorXd cb = b.array() - b.mean();
    double na = ca.norm();
    double nb = cb.norm();
    double scale_a = std::max(1.0, a.cwiseAbs().maxCoeff()) * std::sqrt(static_cast<double>(a.size()));
    double scale_b = std::max(1.0, b.cwiseAbs().maxCoeff()) * std::sqrt(static_cast<double>(b.size()));
    if (na <= 1e-12 * scale_a || nb <= 1e-12 * scale_b) {
        return 0.0;
    }
    return std::clamp(ca.dot(cb) / (na * nb), -1.0, 1.0);
}

std::vector<std::string> default_labels(std::size_t p) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < p; ++i) {
        labels.push_back("v" + std::to_string(i + 1));
    }
    return labels;
}

void check_partition(const Partition& partition, Eigen::Index columns) {
    if (static_cast<Eigen::Index>(partition.size()) != columns) {
        throw Error(ErrorCode::DimensionMismatch, "partition must cover every variable");
    }
}

}  // namespace

std::string_view to_string(Linkage linkage) {
    switch (linkage) {
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Single: return "single";
    }
    return "unknown";
}

Linkage parse_linkage(const std::string& text) {
    if (text == "average") return Linkage::Average;
    if (text == "complete") return Linkage::Complete;
    if (text == "single") return Linkage::Single;
    throw Error(ErrorCode::InvalidConfig, "unknown linkage '" + text + "'");
}

std::size_t cluster_count(const Partition& partition) {
    if (partition.empty()) {
        return 0;
    }
    return *std::max_element(partition.begin(), partition.end()) + 1;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& columns) {
    if (columns.rows() < 3) {
        throw Error(ErrorCode::TooFewRows, "correlations need at least 3 rows");
    }
    const auto p = columns.cols();
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = a + 1; b < p; ++b) {
            corr(a, b) = corr(b, a) = pearson(columns.col(a), columns.col(b));
        }
    }
    Eigen::MatrixXd z = standardize(columns);
    for (Eigen::Index c = 0; c < p; ++c) {
        if (z.col(c).isZero()) {
            spdlog::warn("variable column {} is constant; its correlations are set to 0", c);
        }
    }
    return corr;
}

Eigen::MatrixXd correlation_matrix(const Dataset& data) {
    return correlation_matrix(data.feature_matrix());
}

Eigen::MatrixXd correlation_distance(const Eigen::MatrixXd& corr) {
    Eigen::MatrixXd d = (1.0 - corr.array().square()).matrix();
    d.diagonal().setZero();
    return d.cwiseMax(0.0);
}

Dendrogram agglomerate(const Eigen::MatrixXd& corr, Linkage linkage, std::vector<std::string> labels) {
    const auto p = static_cast<std::size_t>(corr.rows());
    if (corr.rows() != corr.cols() || p == 0) {
        throw Error(ErrorCode::DimensionMismatch, "correlation matrix must be square and non-empty");
    }
    if (labels.empty()) {
        labels = default_labels(p);
    }
    if (labels.size() != p) {
        throw Error(ErrorCode::DimensionMismatch, "one label per variable required");
    }

    const std::size_t nodes = 2 * p - 1;
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes),
                                                 static_cast<Eigen::Index>(nodes));
    dist.topLeftCorner(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) =
        correlation_distance(corr);
    std::vector<std::size_t> size(nodes, 1);
    std::vector<std::size_t> active(p);
    std::iota(active.begin(), active.end(), 0);

    Dendrogram tree;
    tree.labels = std::move(labels);
    for (std::size_t step = 0; step + 1 < p; ++step) {
        auto pair_distance = [&](std::size_t x, std::size_t y) {
            return dist(static_cast<Eigen::Index>(active[x]), static_cast<Eigen::Index>(active[y]));
        };
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                lowest = std::min(lowest, pair_distance(x, y));
            }
        }
        // active stays sorted, so the first pair within tolerance of the
        // minimum is the lexicographically smallest.
        std::size_t best_a = 0;
        std::size_t best_b = 0;
        double best = lowest;
        bool found = false;
        for (std::size_t x = 0; x < active.size() && !found; ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                if (pair_distance(x, y) <= lowest + 1e-12) {
                    best = pair_distance(x, y);
                    best_a = active[x];
                    best_b = active[y];
                    found = true;
                    break;
                }
            }
        }
        const std::size_t merged = p + step;
        size[merged] = size[best_a] + size[best_b];
        tree.merges.push_back({best_a, best_b, best, size[merged]});

        const auto ia = static_cast<Eigen::Index>(best_a);
        const auto ib = static_cast<Eigen::Index>(best_b);
        const auto im = static_cast<Eigen::Index>(merged);
        const double na = static_cast<double>(size[best_a]);
        const double nb = static_cast<double>(size[best_b]);
        for (auto other : active) {
            if (other == best_a || other == best_b) {
                continue;
            }
            const auto io = static_cast<Eigen::Index>(other);
            double d = 0.0;
            switch (linkage) {
            case Linkage::Average: d = (na * dist(io, ia) + nb * dist(io, ib)) / (na + nb); break;
            case Linkage::Complete: d = std::max(dist(io, ia), dist(io, ib)); break;
            case Linkage::Single: d = std::min(dist(io, ia), dist(io, ib)); break;
            }
            dist(io, im) = dist(im, io) = d;
        }
        std::erase_if(active, [&](std::size_t v) { return v == best_a || v == best_b; });
        active.push_back(merged);
    }
    return tree;
}

Partition cut(const Dendrogram& tree, std::size_t k) {
    const std::size_t p = tree.leaf_count();
    if (k < 1 || k > p) {
        throw Error(ErrorCode::KOutOfRange, "k=" + std::to_string(k) + " outside [1," + std::to_string(p) + "]");
    }
    std::vector<std::size_t> parent(2 * p - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    for (std::size_t i = 0; i < p - k; ++i) {
        const auto& m = tree.merges[i];
        parent[find(m.node_a)] = p + i;
        parent[find(m.node_b)] = p + i;
    }
    Partition partition(p);
    std::vector<std::size_t> root_to_cluster(2 * p - 1, std::numeric_limits<std::size_t>::max());
    std::size_t next = 0;
    for (std::size_t leaf = 0; leaf < p; ++leaf) {
        auto root = find(leaf);
        if (root_to_cluster[root] == std::numeric_limits<std::size_t>::max()) {
            root_to_cluster[root] = next++;
        }
        partition[leaf] = root_to_cluster[root];
    }
    return partition;
}

Eigen::MatrixXd cluster_centroids(const Eigen::MatrixXd& columns, const Partition& partition) {
    check_partition(partition, columns.cols());
    const auto k = cluster_count(partition);
    Eigen::MatrixXd z = standardize(columns);
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(columns.rows(), static_cast<Eigen::Index>(k));
    std::vector<double> members(k, 0.0);
    for (std::size_t v = 0; v < partition.size(); ++v) {
        centroids.col(static_cast<Eigen::Index>(partition[v])) += z.col(static_cast<Eigen::Index>(v));
        members[partition[v]] += 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
        centroids.col(static_cast<Eigen::Index>(c)) /= members[c];
    }
    return centroids;
}

std::vector<VariableClusterStats> cluster_stats(const Eigen::MatrixXd& columns, const Partition& partition,
                                                const std::vector<std::string>& names) {
    if (columns.rows() < 3) {
        throw Error(ErrorCode::TooFewRows, "cluster statistics need at least 3 rows");
    }
    check_partition(partition, columns.cols());
    const auto k = cluster_count(partition);
    const auto centroids = cluster_centroids(columns, partition);
    std::vector<std::size_t> members(k, 0);
    for (auto c : partition) {
        ++members[c];
    }

    std::vector<VariableClusterStats> stats;
    for (std::size_t v = 0; v < partition.size(); ++v) {
        VariableClusterStats row;
        row.variable = v < names.size() ? names[v] : "v" + std::to_string(v + 1);
        row.cluster = partition[v];
        const Eigen::VectorXd col = columns.col(static_cast<Eigen::Index>(v));
        if (members[row.cluster] == 1) {
            row.own_r2 = 1.0;
        } else {
            double r = pearson(col, centroids.col(static_cast<Eigen::Index>(row.cluster)));
            row.own_r2 = r * r;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (c != row.cluster) {
                double r = pearson(col, centroids.col(static_cast<Eigen::Index>(c)));
                row.next_r2 = std::max(row.next_r2, r * r);
            }
        }
        row.one_minus_r2_ratio = (1.0 - row.own_r2) / (1.0 - std::min(row.next_r2, 1.0 - 1e-12));
        stats.push_back(std::move(row));
    }
    return stats;
}

std::vector<VariableClusterStats> cluster_stats(const Dataset& data, const Partition& partition) {
    return cluster_stats(data.feature_matrix(), partition, data.feature_names());
}

std::vector<ClusterCorrelationRow> cluster_correlation_table(const Eigen::MatrixXd& columns,
                                                             const Partition& partition,
                                                             const std::vector<std::string>& names) {
    if (columns.rows() < 3) {
        throw Error(ErrorCode::TooFewRows, "cluster correlations need at least 3 rows");
    }
    const auto centroids = cluster_centroids(columns, partition);
    std::vector<ClusterCorrelationRow> rows;
    for (std::size_t v = 0; v < partition.size(); ++v) {
        ClusterCorrelationRow row;
        row.variable = v < names.size() ? names[v] : "v" + std::to_string(v + 1);
        const Eigen::VectorXd col = columns.col(static_cast<Eigen::Index>(v));
        for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
            double r = pearson(col, centroids.col(c));
            row.correlations.push_back(r);
            if (std::abs(r) > kMembershipThreshold) {
                ++row.membership_count;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ClusterCorrelationRow> cluster_correlation_table(const Dataset& data, const Partition& partition) {
    return cluster_correlation_table(data.feature_matrix(), partition, data.feature_names());
}

KSelection select_k(const Dendrogram& tree, const Eigen::MatrixXd& columns, std::size_t k_max) {
    const std::size_t p = tree.leaf_count();
    if (static_cast<Eigen::Index>(p) != columns.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "dendrogram and data disagree on variable count");
    }
    if (k_max > p) {
        throw Error(ErrorCode::KOutOfRange, "k_max exceeds the number of variables");
    }
    KSelection selection;
    const std::size_t upper = std::min(k_max, p - 1);
    if (upper < 2) {
        selection.k = 1;
        selection.warnings.push_back("fewer than three variables; no cut to choose");
        return selection;
    }

    std::vector<double> absolute_gaps;
    for (std::size_t k = 2; k <= upper; ++k) {
        KCandidate cand;
        cand.k = k;
        const double last = tree.merges[p - k - 1].height;
        const double next = tree.merges[p - k].height;
        const double jump = next - last;
        absolute_gaps.push_back(jump);
        if (last > 0.0) {
            cand.relative_gap = jump / last;
        } else {
            cand.relative_gap = jump > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
        const auto partition = cut(tree, k);
        const auto stats = cluster_stats(columns, partition, tree.labels);
        const auto table = cluster_correlation_table(columns, partition, tree.labels);
        cand.valid = std::all_of(stats.begin(), stats.end(),
                                 [](const auto& s) { return s.one_minus_r2_ratio < 1.0; }) &&
                     std::all_of(table.begin(), table.end(),
                                 [](const auto& r) { return r.membership_count == 1; });
        selection.candidates.push_back(cand);
    }

    auto pick = [&](bool require_valid) -> const KCandidate* {
        const KCandidate* best = nullptr;
        for (const auto& c : selection.candidates) {
            if (require_valid && !c.valid) {
                continue;
            }
            if (!best || c.relative_gap > best->relative_gap) {
                best = &c;
            }
        }
        return best;
    };

    if (const auto* best = pick(true)) {
        selection.k = best->k;
        selection.valid = true;
    } else {
        selection.k = pick(false)->k;
        selection.warnings.push_back("no cut passes the ratio < 1 / single-membership checks; k=" +
                                     std::to_string(selection.k) + " chosen by gap alone");
    }

    const auto [lo, hi] = std::minmax_element(absolute_gaps.begin(), absolute_gaps.end());
    const double scale = std::max(1e-300, std::abs(tree.merges.back().height));
    if (absolute_gaps.size() > 1 && *hi - *lo <= 1e-9 * scale) {
        selection.warnings.push_back("merge heights are evenly spaced; no distinguished gap");
    }
    for (const auto& w : selection.warnings) {
        spdlog::warn("select_k: {}", w);
    }
    return selection;
}

KSelection select_k(const Dendrogram& tree, const Dataset& data, std::size_t k_max) {
    return select_k(tree, data.feature_matrix(), k_max);
}

}  // namespace modea
