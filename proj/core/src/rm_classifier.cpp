#include "modea/rm_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "modea/error.hpp"

namespace modea {

namespace {

void exponents_of_degree(std::size_t remaining_vars, std::size_t degree, std::vector<std::size_t>& prefix,
                         std::vector<std::vector<std::size_t>>& out) {
    if (remaining_vars == 1) {
        prefix.push_back(degree);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (std::size_t e = degree + 1; e-- > 0;) {
        prefix.push_back(e);
        exponents_of_degree(remaining_vars - 1, degree - e, prefix, out);
        prefix.pop_back();
    }
}

void require_order(std::size_t r) {
    if (r < 1) {
        throw Error(ErrorCode::InvalidConfig, "polynomial order must be >= 1");
    }
}

}  // namespace

std::string_view to_string(RmVariant variant) {
    switch (variant) {
    case RmVariant::RM: return "RM";
    case RmVariant::RMprime: return "RMprime";
    case RmVariant::FullMP: return "FullMP";
    }
    return "unknown";
}

RmVariant parse_variant(const std::string& text) {
    if (text == "RM" || text == "rm") return RmVariant::RM;
    if (text == "RMprime" || text == "rmprime" || text == "RM'") return RmVariant::RMprime;
    if (text == "FullMP" || text == "fullmp" || text == "MP") return RmVariant::FullMP;
    throw Error(ErrorCode::InvalidConfig, "unknown model variant '" + text + "'");
}

void RmConfig::validate() const {
    require_order(order);
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw Error(ErrorCode::InvalidConfig, "ridge constant must be finite and >= 0");
    }
}

std::size_t rm_term_count(std::size_t l, std::size_t r) { return 1 + r + l * (2 * r - 1); }

std::size_t rm_prime_term_count(std::size_t l, std::size_t r) { return 1 + r * (l + 1); }

std::size_t full_mp_term_count(std::size_t l, std::size_t r) {
    // C(l+r, r), saturating well above the FullMP limit.
    double c = 1.0;
    for (std::size_t i = 1; i <= r; ++i) {
        c = c * static_cast<double>(l + i) / static_cast<double>(i);
        if (c > 1e15) {
            return static_cast<std::size_t>(1e15);
        }
    }
    return static_cast<std::size_t>(std::llround(c));
}

std::size_t term_count(RmVariant variant, std::size_t l, std::size_t r) {
    switch (variant) {
    case RmVariant::RM: return rm_term_count(l, r);
    case RmVariant::RMprime: return rm_prime_term_count(l, r);
    case RmVariant::FullMP: return full_mp_term_count(l, r);
    }
    return 0;
}

Eigen::VectorXd expand_rm(const Eigen::VectorXd& x, std::size_t r) {
    require_order(r);
    const auto l = static_cast<std::size_t>(x.size());
    Eigen::VectorXd p(static_cast<Eigen::Index>(rm_term_count(l, r)));
    const double s = x.sum();
    Eigen::Index t = 0;
    p(t++) = 1.0;
    Eigen::VectorXd power = x;
    for (std::size_t k = 1; k <= r; ++k) {
        p.segment(t, x.size()) = power;
        t += x.size();
        power = power.cwiseProduct(x);
    }
    for (std::size_t k = 1; k <= r; ++k) {
        p(t++) = std::pow(s, static_cast<double>(k));
    }
    for (std::size_t k = 2; k <= r; ++k) {
        p.segment(t, x.size()) = x * std::pow(s, static_cast<double>(k - 1));
        t += x.size();
    }
    return p;
}

Eigen::VectorXd expand_rm_prime(const Eigen::VectorXd& x, std::size_t r) {
    require_order(r);
    const auto l = static_cast<std::size_t>(x.size());
    Eigen::VectorXd p(static_cast<Eigen::Index>(rm_prime_term_count(l, r)));
    const double s = x.sum();
    Eigen::Index t = 0;
    p(t++) = 1.0;
    p.segment(t, x.size()) = x;
    t += x.size();
    for (std::size_t k = 1; k <= r; ++k) {
        p(t++) = std::pow(s, static_cast<double>(k));
    }
    for (std::size_t k = 2; k <= r; ++k) {
        p.segment(t, x.size()) = x * std::pow(s, static_cast<double>(k - 1));
        t += x.size();
    }
    return p;
}

std::vector<std::vector<std::size_t>> full_mp_exponents(std::size_t l, std::size_t r) {
    if (l < 1) {
        throw Error(ErrorCode::DimensionMismatch, "need at least one input");
    }
    const auto count = full_mp_term_count(l, r);
    if (count > kMaxFullMpTerms) {
        throw Error(ErrorCode::TooManyTerms, "full polynomial would have " + std::to_string(count) + " terms");
    }
    std::vector<std::vector<std::size_t>> out;
    out.reserve(count);
    std::vector<std::size_t> prefix;
    for (std::size_t d = 0; d <= r; ++d) {
        exponents_of_degree(l, d, prefix, out);
    }
    return out;
}

Eigen::VectorXd expand_full_mp(const Eigen::VectorXd& x, std::size_t r) {
    const auto exps = full_mp_exponents(static_cast<std::size_t>(x.size()), r);
    Eigen::VectorXd p(static_cast<Eigen::Index>(exps.size()));
    for (std::size_t t = 0; t < exps.size(); ++t) {
        double v = 1.0;
        for (std::size_t j = 0; j < exps[t].size(); ++j) {
            for (std::size_t e = 0; e < exps[t][j]; ++e) {
                v *= x(static_cast<Eigen::Index>(j));
            }
        }
        p(static_cast<Eigen::Index>(t)) = v;
    }
    return p;
}

Eigen::VectorXd expand(RmVariant variant, const Eigen::VectorXd& x, std::size_t r) {
    switch (variant) {
    case RmVariant::RM: return expand_rm(x, r);
    case RmVariant::RMprime: return expand_rm_prime(x, r);
    case RmVariant::FullMP: return expand_full_mp(x, r);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown variant");
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x, const RmConfig& config) {
    config.validate();
    const auto l = static_cast<std::size_t>(x.cols());
    const auto k = term_count(config.variant, l, config.order);
    if (config.variant == RmVariant::FullMP && k > kMaxFullMpTerms) {
        throw Error(ErrorCode::TooManyTerms, "full polynomial would have " + std::to_string(k) + " terms");
    }
    Eigen::MatrixXd p(x.rows(), static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        p.row(i) = expand(config.variant, x.row(i).transpose(), config.order).transpose();
    }
    return p;
}

Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets, double ridge) {
    if (design.rows() != targets.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "design and targets disagree on sample count");
    }
    const auto k = design.cols();
    if (ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < k) {
            throw Error(ErrorCode::SingularSystem, "P^T P is rank deficient (rank " + std::to_string(qr.rank()) +
                                                       " < " + std::to_string(k) + ") and ridge is 0");
        }
        Eigen::MatrixXd alpha = qr.solve(targets);
        return alpha;
    }
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += ridge;
    const Eigen::MatrixXd rhs = design.transpose() * targets;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularSystem, "ridge system factorization failed");
    }
    Eigen::MatrixXd alpha = ldlt.solve(rhs);
    // One round of iterative refinement tightens the normal-equation residual.
    alpha += ldlt.solve(rhs - gram * alpha);
    return alpha;
}

Eigen::VectorXd RmModel::scores(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != input_dimension) {
        throw Error(ErrorCode::DimensionMismatch, "sample has " + std::to_string(x.size()) + " features, model expects " +
                                                      std::to_string(input_dimension));
    }
    return alpha.transpose() * expand(config.variant, x, config.order);
}

RmModel fit(const Eigen::MatrixXd& x, const std::vector<int>& labels, const RmConfig& config,
            std::optional<std::vector<int>> classes) {
    config.validate();
    if (x.rows() < 1) {
        throw Error(ErrorCode::TooFewRows, "fit needs at least one sample");
    }
    if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "one label per sample required");
    }
    std::vector<int> class_labels;
    if (classes) {
        class_labels = *classes;
        std::sort(class_labels.begin(), class_labels.end());
        class_labels.erase(std::unique(class_labels.begin(), class_labels.end()), class_labels.end());
    } else {
        std::set<int> distinct(labels.begin(), labels.end());
        class_labels.assign(distinct.begin(), distinct.end());
    }
    if (class_labels.size() < 2) {
        throw Error(ErrorCode::InvalidConfig, "classification needs at least two classes");
    }

    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(class_labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::lower_bound(class_labels.begin(), class_labels.end(), labels[i]);
        if (it == class_labels.end() || *it != labels[i]) {
            throw Error(ErrorCode::InvalidConfig, "label " + std::to_string(labels[i]) + " not in class set");
        }
        targets(static_cast<Eigen::Index>(i), it - class_labels.begin()) = 1.0;
    }

    RmModel model;
    model.config = config;
    model.input_dimension = static_cast<std::size_t>(x.cols());
    model.class_labels = std::move(class_labels);
    model.alpha = ridge_solve(design_matrix(x, config), targets, config.ridge);
    if (!model.alpha.allFinite()) {
        throw Error(ErrorCode::SingularSystem, "fitted coefficients are not finite");
    }
    return model;
}

int predict(const RmModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd s = model.scores(x);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < s.size(); ++c) {
        if (s(c) > s(best)) {
            best = c;
        }
    }
    return model.class_labels[static_cast<std::size_t>(best)];
}

std::vector<int> predict_all(const RmModel& model, const Eigen::MatrixXd& x) {
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = predict(model, x.row(i).transpose());
    }
    return out;
}

}  // namespace modea
