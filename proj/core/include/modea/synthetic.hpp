#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "modea/dataset.hpp"

namespace modea {

/// One generating cluster: Gaussian noise of `spread` around `center`
/// (length m+s, inputs then outputs), drawn for `proportion` of the rows.
struct ClusterSpec {
    std::vector<double> center;
    double spread = 1.0;
    double proportion = 1.0;
};

struct SyntheticDataset {
    Dataset data;
    std::vector<std::size_t> truth;  // generating cluster per record
    std::vector<int> labels;         // class labels, only for labelled generators
    std::uint64_t seed = 0;
};

/// Cluster sizes from proportions by largest remainder; sums to n.
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& proportions);

SyntheticDataset generate_synthetic(std::size_t n, std::size_t m, std::size_t s,
                                    const std::vector<ClusterSpec>& clusters, std::uint64_t seed);

/// Three clusters sized 227/241/121 out of 589 (scaled to any n).
std::vector<ClusterSpec> default_cluster_specs(std::size_t m, std::size_t s);

/// Six variables (I1..I3, O1..O3) built from three latent blocks
/// {I3,O2}, {I1,O1}, {I2,O3}. Within-block correlation is `within`, across
/// blocks `cross`.
SyntheticDataset generate_block_correlated(std::size_t n, std::uint64_t seed,
                                           double within = 0.72, double cross = 0.05);

/// Three equal-sum clusters whose class boundaries are linear in a
/// cluster-specific direction. Labels are 0/1/2. No single reduced
/// polynomial of low order fits all three local rules.
SyntheticDataset generate_piecewise(std::size_t n, std::uint64_t seed);

}  // namespace modea
