#include "modea/dea.hpp"

#include <algorithm>
#include <sstream>

#include "modea/error.hpp"

namespace modea {

LinearProgram ccr_input_program(const Dataset& data, std::size_t j) {
    if (j >= data.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "DMU index " + std::to_string(j) + " out of range");
    }
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto m = static_cast<Eigen::Index>(data.input_count());
    const auto s = static_cast<Eigen::Index>(data.output_count());
    const auto& self = data[j];

    LinearProgram lp;
    lp.sense = Sense::Minimize;
    lp.objective = Eigen::VectorXd::Zero(n + 1);
    lp.objective(0) = 1.0;
    lp.constraints = Eigen::MatrixXd::Zero(m + s, n + 1);
    lp.rhs = Eigen::VectorXd::Zero(m + s);
    lp.relations.resize(static_cast<std::size_t>(m + s));

    // sum_k lambda_k x_ik / x_ij - theta <= 0
    for (Eigen::Index i = 0; i < m; ++i) {
        const double own = self.inputs[static_cast<std::size_t>(i)];
        lp.constraints(i, 0) = -1.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            lp.constraints(i, k + 1) = data[static_cast<std::size_t>(k)].inputs[static_cast<std::size_t>(i)] / own;
        }
        lp.relations[static_cast<std::size_t>(i)] = Relation::LessEqual;
    }
    // sum_k lambda_k y_rk / y_rj >= 1 (>= 0 when the DMU produces none of output r)
    for (Eigen::Index r = 0; r < s; ++r) {
        const auto row = m + r;
        const double own = self.outputs[static_cast<std::size_t>(r)];
        double scale = own;
        if (own <= 0.0) {
            scale = 0.0;
            for (const auto& rec : data.records()) {
                scale = std::max(scale, rec.outputs[static_cast<std::size_t>(r)]);
            }
            scale = scale > 0.0 ? scale : 1.0;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            lp.constraints(row, k + 1) = data[static_cast<std::size_t>(k)].outputs[static_cast<std::size_t>(r)] / scale;
        }
        lp.rhs(row) = own > 0.0 ? 1.0 : 0.0;
        lp.relations[static_cast<std::size_t>(row)] = Relation::GreaterEqual;
    }
    return lp;
}

EfficiencyScore ccr_input_efficiency(const Dataset& data, std::size_t j, const DeaOptions& options) {
    auto lp = ccr_input_program(data, j);
    auto sol = solve_lp(lp, options.simplex);
    if (sol.status != LpStatus::Optimal) {
        // lambda = e_j, theta = 1 is always feasible, so anything else is numerical trouble.
        throw Error(ErrorCode::SolverFailure, "envelopment LP for DMU '" + data[j].id +
                                                  "' did not reach optimality");
    }
    EfficiencyScore score;
    score.dmu_id = data[j].id;
    score.theta = sol.values(0);
    score.lambdas.resize(data.size());
    for (std::size_t k = 0; k < data.size(); ++k) {
        double lambda = sol.values(static_cast<Eigen::Index>(k + 1));
        score.lambdas[k] = lambda;
        if (lambda > options.lambda_tolerance) {
            score.reference_set.push_back(data[k].id);
        }
    }
    score.is_efficient = score.theta >= 1.0 - options.efficiency_tolerance;
    return score;
}

std::vector<EfficiencyScore> evaluate_all(const Dataset& data, const DeaOptions& options) {
    std::vector<EfficiencyScore> scores;
    scores.reserve(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        try {
            scores.push_back(ccr_input_efficiency(data, j, options));
        } catch (const Error& e) {
            throw Error(e.code(), "DMU '" + data[j].id + "': " + e.what());
        }
    }
    return scores;
}

std::string_view to_string(PerformanceClass c) {
    switch (c) {
    case PerformanceClass::Weak: return "Weak";
    case PerformanceClass::Average: return "Average";
    case PerformanceClass::High: return "High";
    }
    return "Unknown";
}

PerformanceBins::PerformanceBins() : PerformanceBins({0.55, 0.7}) {}

PerformanceBins::PerformanceBins(std::vector<double> cuts, std::vector<std::string> names)
    : cuts_(std::move(cuts)), names_(std::move(names)) {
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
        if (!(cuts_[i] > 0.0 && cuts_[i] < 1.0)) {
            throw Error(ErrorCode::InvalidConfig, "bin cut points must lie strictly inside (0,1)");
        }
        if (i > 0 && !(cuts_[i] > cuts_[i - 1])) {
            throw Error(ErrorCode::InvalidConfig, "bin cut points must be strictly increasing");
        }
    }
    if (names_.empty()) {
        if (cuts_.size() == 2) {
            names_ = {"Weak", "Average", "High"};
        } else {
            for (std::size_t i = 0; i <= cuts_.size(); ++i) {
                names_.push_back("Band" + std::to_string(i));
            }
        }
    }
    if (names_.size() != cuts_.size() + 1) {
        throw Error(ErrorCode::InvalidConfig, "need one band name per interval");
    }
}

PerformanceBins PerformanceBins::parse(const std::string& text) {
    std::vector<double> cuts;
    std::stringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) {
        try {
            std::size_t used = 0;
            cuts.push_back(std::stod(field, &used));
            if (field.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument(field);
            }
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidConfig, "bad bin cut point '" + field + "'");
        }
    }
    return PerformanceBins(std::move(cuts));
}

std::size_t PerformanceBins::assign(double theta) const {
    if (!(theta >= 0.0 && theta <= 1.0 + 1e-9)) {
        throw Error(ErrorCode::ThetaOutOfRange, "theta " + std::to_string(theta) + " outside [0,1]");
    }
    return static_cast<std::size_t>(std::upper_bound(cuts_.begin(), cuts_.end(), theta) - cuts_.begin());
}

PerformanceClass assign_class(double theta, const PerformanceBins& bins) {
    if (bins.class_count() != 3) {
        throw Error(ErrorCode::InvalidConfig, "three performance bands required");
    }
    return static_cast<PerformanceClass>(bins.assign(theta));
}

}  // namespace modea
