#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "modea/dataset.hpp"
#include "modea/lp.hpp"

namespace modea {

struct DeaOptions {
    double efficiency_tolerance = 1e-6;  // theta >= 1 - tol counts as efficient
    double lambda_tolerance = 1e-9;      // lambda above this joins the reference set
    SimplexOptions simplex{};
};

/// Input-oriented CCR result for one DMU.
struct EfficiencyScore {
    std::string dmu_id;
    double theta = 0.0;
    std::vector<double> lambdas;               // one per DMU in dataset order
    std::vector<std::string> reference_set;    // ids with lambda > tolerance, dataset order
    bool is_efficient = false;
};

/// Envelopment LP for DMU `j`: variables (theta, lambda_1..lambda_n).
/// Each row is divided by the evaluated DMU's own value, which keeps the
/// program independent of measurement units.
LinearProgram ccr_input_program(const Dataset& data, std::size_t j);

EfficiencyScore ccr_input_efficiency(const Dataset& data, std::size_t j,
                                     const DeaOptions& options = {});

std::vector<EfficiencyScore> evaluate_all(const Dataset& data, const DeaOptions& options = {});

enum class PerformanceClass { Weak = 0, Average = 1, High = 2 };

std::string_view to_string(PerformanceClass c);

/// Right-open efficiency bands over [0,1] defined by interior cut points;
/// the last band is closed at 1.
class PerformanceBins {
public:
    PerformanceBins();  // cut points 0.55, 0.7
    explicit PerformanceBins(std::vector<double> cuts, std::vector<std::string> names = {});

    /// Parses "0.55,0.7".
    static PerformanceBins parse(const std::string& text);

    const std::vector<double>& cuts() const noexcept { return cuts_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t class_count() const noexcept { return cuts_.size() + 1; }

    /// Band index containing theta. Boundaries belong to the upper band and
    /// 1.0 to the last. Values within 1e-9 above 1 are treated as 1.
    std::size_t assign(double theta) const;

private:
    std::vector<double> cuts_;
    std::vector<std::string> names_;
};

/// Three-band form of PerformanceBins::assign.
PerformanceClass assign_class(double theta, const PerformanceBins& bins = {});

}  // namespace modea
