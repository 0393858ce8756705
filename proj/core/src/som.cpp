#include "modea/som.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "modea/error.hpp"

namespace modea {

namespace {

std::size_t nearest_unit(const Eigen::MatrixXd& codebooks, const Eigen::VectorXd& row, double* distance = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index u = 0; u < codebooks.rows(); ++u) {
        double d = (codebooks.row(u).transpose() - row).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::size_t>(u);
        }
    }
    if (distance) {
        *distance = std::sqrt(best_d);
    }
    return best;
}

struct Schedule {
    double lr_start;
    double radius_start;
    double radius_end;
};

void run_epochs(Eigen::MatrixXd& codebooks, const Eigen::MatrixXd& features, std::size_t epochs,
                const Schedule& schedule, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(features.rows());
    const auto k = codebooks.rows();
    const double total = static_cast<double>(epochs * n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto idx : order) {
            const double progress = static_cast<double>(step++) / total;
            const double alpha = schedule.lr_start * (1.0 - progress);
            const double sigma = schedule.radius_start + (schedule.radius_end - schedule.radius_start) * progress;
            const Eigen::VectorXd x = features.row(static_cast<Eigen::Index>(idx)).transpose();
            const auto bmu = static_cast<double>(nearest_unit(codebooks, x));
            for (Eigen::Index u = 0; u < k; ++u) {
                const double grid = static_cast<double>(u) - bmu;
                const double h = std::exp(-(grid * grid) / (2.0 * sigma * sigma));
                if (h > 1e-300) {
                    codebooks.row(u) += (alpha * h) * (x.transpose() - codebooks.row(u));
                }
            }
        }
    }
}

}  // namespace

void SomConfig::validate() const {
    if (k < 1) {
        throw Error(ErrorCode::InvalidConfig, "SOM needs k >= 1");
    }
    if (!(initial_learning_rate > 0.0 && initial_learning_rate < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "SOM learning rate must lie in (0,1)");
    }
    if (epochs < 1) {
        throw Error(ErrorCode::InvalidConfig, "SOM needs at least one epoch");
    }
    if (!(start_radius() > 0.0) || !(final_radius > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "SOM radii must be positive");
    }
}

SomModel train_som(const Eigen::MatrixXd& features, const SomConfig& config) {
    config.validate();
    const auto n = static_cast<std::size_t>(features.rows());
    if (n < config.k) {
        throw Error(ErrorCode::TooFewRecords, "SOM with k=" + std::to_string(config.k) + " needs at least k records, got " +
                                                  std::to_string(n));
    }
    if (!features.allFinite()) {
        throw Error(ErrorCode::InvalidConfig, "SOM features must be finite");
    }

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> picks(n);
    std::iota(picks.begin(), picks.end(), 0);
    std::shuffle(picks.begin(), picks.end(), rng);

    SomModel model;
    model.config = config;
    model.codebooks.resize(static_cast<Eigen::Index>(config.k), features.cols());
    for (std::size_t u = 0; u < config.k; ++u) {
        model.codebooks.row(static_cast<Eigen::Index>(u)) = features.row(static_cast<Eigen::Index>(picks[u]));
    }

    run_epochs(model.codebooks, features, config.epochs,
               {config.initial_learning_rate, config.start_radius(), config.final_radius}, rng);
    model.training_epochs_run = config.epochs;

    const std::size_t extra = std::max<std::size_t>(1, (config.epochs + 9) / 10);
    for (std::size_t attempt = 0; attempt < config.k; ++attempt) {
        std::vector<std::size_t> labels(n);
        std::vector<double> distance(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = nearest_unit(model.codebooks, features.row(static_cast<Eigen::Index>(i)).transpose(), &distance[i]);
        }
        auto sizes = cluster_sizes(labels, config.k);
        auto empty = std::find(sizes.begin(), sizes.end(), 0u);
        if (empty == sizes.end()) {
            break;
        }
        const auto unit = static_cast<Eigen::Index>(empty - sizes.begin());
        const auto far = static_cast<Eigen::Index>(std::max_element(distance.begin(), distance.end()) - distance.begin());
        spdlog::debug("SOM unit {} is empty; re-seeding at record {}", unit, far);
        model.codebooks.row(unit) = features.row(far);
        run_epochs(model.codebooks, features, extra,
                   {config.initial_learning_rate, config.final_radius, config.final_radius}, rng);
        model.training_epochs_run += extra;
        ++model.repairs;
    }
    return model;
}

std::size_t assign(const SomModel& model, const Eigen::VectorXd& row) {
    if (row.size() != model.codebooks.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "row dimension " + std::to_string(row.size()) +
                                                      " does not match codebooks (" +
                                                      std::to_string(model.codebooks.cols()) + ")");
    }
    return nearest_unit(model.codebooks, row);
}

std::vector<std::size_t> assign_all(const SomModel& model, const Eigen::MatrixXd& features) {
    std::vector<std::size_t> labels(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        labels[static_cast<std::size_t>(i)] = assign(model, features.row(i).transpose());
    }
    return labels;
}

std::vector<std::size_t> cluster_sizes(const std::vector<std::size_t>& assignments, std::size_t k) {
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : assignments) {
        if (a >= k) {
            throw Error(ErrorCode::IndexOutOfRange, "cluster label " + std::to_string(a) + " >= k");
        }
        ++sizes[a];
    }
    return sizes;
}

double quantization_error(const SomModel& model, const Eigen::MatrixXd& features) {
    if (features.rows() == 0) {
        return 0.0;
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        double d = 0.0;
        nearest_unit(model.codebooks, features.row(i).transpose(), &d);
        total += d;
    }
    return total / static_cast<double>(features.rows());
}

}  // namespace modea
