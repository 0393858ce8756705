#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modea/dataset.hpp"

namespace modea {

enum class Linkage { Average, Complete, Single };

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(const std::string& text);

/// One agglomeration step. Leaves are nodes 0..p-1; the i-th merge creates
/// node p+i.
struct Merge {
    std::size_t node_a = 0;  // smaller id
    std::size_t node_b = 0;
    double height = 0.0;
    std::size_t size = 0;    // leaves under the new node

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::vector<std::string> labels;
    std::vector<Merge> merges;

    std::size_t leaf_count() const noexcept { return labels.size(); }
};

/// Cluster index per variable; clusters numbered by their lowest member.
using Partition = std::vector<std::size_t>;

std::size_t cluster_count(const Partition& partition);

/// Pearson correlations between columns. Constant columns correlate 0 with
/// everything else (and 1 with themselves).
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& columns);
Eigen::MatrixXd correlation_matrix(const Dataset& data);

/// Pairwise variable distances 1 - corr^2.
Eigen::MatrixXd correlation_distance(const Eigen::MatrixXd& corr);

/// Agglomerative clustering on 1 - corr^2 via Lance-Williams updates.
/// Ties within 1e-12 go to the lexicographically smallest (node_a, node_b).
Dendrogram agglomerate(const Eigen::MatrixXd& corr, Linkage linkage = Linkage::Average,
                       std::vector<std::string> labels = {});

Partition cut(const Dendrogram& tree, std::size_t k);

struct VariableClusterStats {
    std::string variable;
    std::size_t cluster = 0;
    double own_r2 = 0.0;
    double next_r2 = 0.0;
    double one_minus_r2_ratio = 0.0;
};

struct ClusterCorrelationRow {
    std::string variable;
    std::size_t membership_count = 0;
    std::vector<double> correlations;  // one per cluster centroid
};

inline constexpr double kMembershipThreshold = 0.7;

/// Per-cluster centroids: mean of the z-scored member columns (n x k).
Eigen::MatrixXd cluster_centroids(const Eigen::MatrixXd& columns, const Partition& partition);

std::vector<VariableClusterStats> cluster_stats(const Eigen::MatrixXd& columns,
                                                const Partition& partition,
                                                const std::vector<std::string>& names);
std::vector<VariableClusterStats> cluster_stats(const Dataset& data, const Partition& partition);

std::vector<ClusterCorrelationRow> cluster_correlation_table(const Eigen::MatrixXd& columns,
                                                             const Partition& partition,
                                                             const std::vector<std::string>& names);
std::vector<ClusterCorrelationRow> cluster_correlation_table(const Dataset& data,
                                                             const Partition& partition);

struct KCandidate {
    std::size_t k = 0;
    double relative_gap = 0.0;
    bool valid = false;
};

struct KSelection {
    std::size_t k = 0;
    bool valid = false;
    std::vector<KCandidate> candidates;
    std::vector<std::string> warnings;
};

/// Picks k in [2, min(k_max, p-1)] with the largest relative jump between the
/// last merge kept and the first merge undone, preferring cuts where every
/// variable has ratio < 1 and exactly one |corr| > 0.7.
KSelection select_k(const Dendrogram& tree, const Eigen::MatrixXd& columns, std::size_t k_max);
KSelection select_k(const Dendrogram& tree, const Dataset& data, std::size_t k_max);

}  // namespace modea
