#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace modea {

struct SomConfig {
    std::size_t k = 3;
    double initial_learning_rate = 0.03;
    std::size_t epochs = 100;
    std::optional<double> initial_radius;  // defaults to k/2
    double final_radius = 0.01;
    std::uint64_t seed = 0;

    double start_radius() const { return initial_radius.value_or(static_cast<double>(k) / 2.0); }
    void validate() const;
};

/// Trained one-dimensional (1 x k) map.
struct SomModel {
    Eigen::MatrixXd codebooks;  // k x d
    SomConfig config;
    std::size_t training_epochs_run = 0;
    std::size_t repairs = 0;  // empty units re-seeded after the main schedule

    std::size_t units() const { return static_cast<std::size_t>(codebooks.rows()); }
    std::size_t dimension() const { return static_cast<std::size_t>(codebooks.cols()); }
};

/// Online SOM: per shuffled sample, find the best-matching unit and pull
/// every codebook toward the sample by alpha(t) * exp(-d^2 / (2 sigma(t)^2)),
/// where d is the grid distance to the BMU. alpha decays linearly to 0 and
/// sigma linearly from the start radius to the final radius.
SomModel train_som(const Eigen::MatrixXd& features, const SomConfig& config);

/// Nearest codebook by Euclidean distance; ties go to the lowest index.
std::size_t assign(const SomModel& model, const Eigen::VectorXd& row);
std::vector<std::size_t> assign_all(const SomModel& model, const Eigen::MatrixXd& features);

std::vector<std::size_t> cluster_sizes(const std::vector<std::size_t>& assignments, std::size_t k);

/// Mean Euclidean distance from each row to its best-matching unit.
double quantization_error(const SomModel& model, const Eigen::MatrixXd& features);

}  // namespace modea
