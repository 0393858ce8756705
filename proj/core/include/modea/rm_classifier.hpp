#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace modea {

enum class RmVariant { RM, RMprime, FullMP };

std::string_view to_string(RmVariant variant);
RmVariant parse_variant(const std::string& text);

inline constexpr int kTermOrderVersion = 1;
inline constexpr std::size_t kMaxFullMpTerms = 10000;

struct RmConfig {
    std::size_t order = 2;
    double ridge = 1e-4;
    RmVariant variant = RmVariant::RM;

    void validate() const;
};

// Term layouts (frozen, kTermOrderVersion 1). With s = x_1 + ... + x_l:
//   RM:      1 | x_j^k (k = 1..r, j = 1..l, k-major) | s^1..s^r | x_j s^(k-1) (k = 2..r, j = 1..l)
//   RMprime: 1 | x_1..x_l | s^1..s^r | x_j s^(k-1) (k = 2..r, j = 1..l)
//   FullMP:  monomials of total degree <= r, graded, lexicographic within a degree

std::size_t rm_term_count(std::size_t l, std::size_t r);        // 1 + r + l(2r-1)
std::size_t rm_prime_term_count(std::size_t l, std::size_t r);  // 1 + r(l+1)
std::size_t full_mp_term_count(std::size_t l, std::size_t r);   // C(l+r, r)
std::size_t term_count(RmVariant variant, std::size_t l, std::size_t r);

Eigen::VectorXd expand_rm(const Eigen::VectorXd& x, std::size_t r);
Eigen::VectorXd expand_rm_prime(const Eigen::VectorXd& x, std::size_t r);

/// Exponent vectors of the full multivariate polynomial, in output order.
std::vector<std::vector<std::size_t>> full_mp_exponents(std::size_t l, std::size_t r);
Eigen::VectorXd expand_full_mp(const Eigen::VectorXd& x, std::size_t r);

Eigen::VectorXd expand(RmVariant variant, const Eigen::VectorXd& x, std::size_t r);

/// n x K regressor matrix, one expanded row per sample.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x, const RmConfig& config);

/// Reduced polynomial classifier: one ridge regression per class on one-hot
/// targets, winner-take-all at prediction time.
struct RmModel {
    Eigen::MatrixXd alpha;  // K x C
    RmConfig config;
    std::size_t input_dimension = 0;
    std::vector<int> class_labels;

    /// Per-class regression outputs for one sample.
    Eigen::VectorXd scores(const Eigen::VectorXd& x) const;
};

/// Fits alpha_c = argmin ||y_c - P alpha||^2 + b ||alpha||^2 for every class.
/// `classes` fixes the output columns; by default the sorted distinct labels
/// are used. At least two classes are required.
RmModel fit(const Eigen::MatrixXd& x, const std::vector<int>& labels, const RmConfig& config,
            std::optional<std::vector<int>> classes = std::nullopt);

/// Core ridge solve on an explicit design matrix and target matrix.
Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets, double ridge);

int predict(const RmModel& model, const Eigen::VectorXd& x);
std::vector<int> predict_all(const RmModel& model, const Eigen::MatrixXd& x);

}  // namespace modea
