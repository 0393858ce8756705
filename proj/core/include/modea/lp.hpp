#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace modea {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, GreaterEqual, Equal };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Dense linear program. Every variable is >= 0 unless flagged free.
struct LinearProgram {
    Sense sense = Sense::Minimize;
    Eigen::VectorXd objective;
    Eigen::MatrixXd constraints;  // rows x variables
    std::vector<Relation> relations;
    Eigen::VectorXd rhs;
    std::vector<bool> free_variables;  // empty means none are free
};

enum class PivotRule {
    // Most negative reduced cost; switches to Bland after a run of
    // degenerate pivots so cycling cannot persist.
    DantzigWithBlandFallback,
    Bland,
};

struct SimplexOptions {
    PivotRule rule = PivotRule::DantzigWithBlandFallback;
    double feasibility_tolerance = 1e-7;
    double optimality_tolerance = 1e-9;
    double pivot_tolerance = 1e-11;
    std::size_t max_iterations = 100000;
    std::size_t degenerate_switch = 50;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    Eigen::VectorXd values;  // one per original variable
    std::size_t iterations = 0;
};

/// Two-phase primal simplex on a dense tableau.
///
/// Throws DimensionMismatch for inconsistent shapes and SolverFailure when
/// the iteration limit is hit; infeasible and unbounded programs are
/// reported through LpSolution::status.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace modea
