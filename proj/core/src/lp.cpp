#include "modea/lp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "modea/error.hpp"

namespace modea {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense tableau in canonical form. The last column holds the right-hand
// side; `cost` holds reduced costs with -objective in its last entry.
class Tableau {
public:
    Tableau(RowMatrix body, std::vector<Eigen::Index> basis, Eigen::Index artificial_begin,
            const SimplexOptions& options)
        : t_(std::move(body)),
          basis_(std::move(basis)),
          artificial_begin_(artificial_begin),
          options_(options) {}

    Eigen::Index rows() const { return t_.rows(); }
    Eigen::Index columns() const { return t_.cols() - 1; }
    const std::vector<Eigen::Index>& basis() const { return basis_; }
    double rhs(Eigen::Index row) const { return t_(row, columns()); }
    double entry(Eigen::Index row, Eigen::Index col) const { return t_(row, col); }
    double objective() const { return -cost_(columns()); }
    std::size_t iterations() const { return iterations_; }

    // Installs a phase objective and prices out the current basis.
    void set_costs(const Eigen::VectorXd& costs) {
        cost_ = Eigen::RowVectorXd::Zero(t_.cols());
        cost_.head(columns()) = costs.transpose();
        for (Eigen::Index r = 0; r < rows(); ++r) {
            double cb = costs(basis_[static_cast<std::size_t>(r)]);
            if (cb != 0.0) {
                cost_ -= cb * t_.row(r);
            }
        }
    }

    // Runs simplex iterations; returns false when the phase is unbounded.
    bool optimize(Eigen::Index entering_limit) {
        bool bland = options_.rule == PivotRule::Bland;
        std::size_t degenerate_run = 0;
        while (true) {
            if (iterations_ >= options_.max_iterations) {
                throw Error(ErrorCode::SolverFailure, "simplex iteration limit reached");
            }
            Eigen::Index enter = -1;
            double best = -options_.optimality_tolerance;
            for (Eigen::Index j = 0; j < entering_limit; ++j) {
                if (cost_(j) < best) {
                    enter = j;
                    if (bland) {
                        break;
                    }
                    best = cost_(j);
                }
            }
            if (enter < 0) {
                return true;
            }

            Eigen::Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index r = 0; r < rows(); ++r) {
                double a = t_(r, enter);
                if (a <= options_.pivot_tolerance) {
                    continue;
                }
                double ratio = std::max(rhs(r), 0.0) / a;
                if (leave < 0 || ratio < best_ratio - 1e-12) {
                    leave = r;
                    best_ratio = ratio;
                } else if (ratio <= best_ratio + 1e-12) {
                    bool prefer = bland ? basis_[static_cast<std::size_t>(r)] <
                                              basis_[static_cast<std::size_t>(leave)]
                                        : a > t_(leave, enter);
                    if (prefer) {
                        leave = r;
                        best_ratio = std::min(best_ratio, ratio);
                    }
                }
            }
            if (leave < 0) {
                return false;
            }
            if (best_ratio <= 1e-12) {
                if (++degenerate_run >= options_.degenerate_switch) {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            pivot(leave, enter);
        }
    }

    void pivot(Eigen::Index row, Eigen::Index col) {
        ++iterations_;
        t_.row(row) /= t_(row, col);
        for (Eigen::Index r = 0; r < rows(); ++r) {
            if (r != row) {
                double f = t_(r, col);
                if (f != 0.0) {
                    t_.row(r) -= f * t_.row(row);
                }
            }
        }
        double f = cost_(col);
        if (f != 0.0) {
            cost_ -= f * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // Pivots zero-level artificials out of the basis where possible; rows
    // with no usable structural entry are redundant and keep their artificial.
    void expel_artificials() {
        for (Eigen::Index r = 0; r < rows(); ++r) {
            if (basis_[static_cast<std::size_t>(r)] < artificial_begin_) {
                continue;
            }
            Eigen::Index best = -1;
            double best_abs = options_.pivot_tolerance * 1e3;
            for (Eigen::Index j = 0; j < artificial_begin_; ++j) {
                double a = std::abs(t_(r, j));
                if (a > best_abs) {
                    best = j;
                    best_abs = a;
                }
            }
            if (best >= 0) {
                pivot(r, best);
            }
        }
    }

private:
    RowMatrix t_;
    Eigen::RowVectorXd cost_;
    std::vector<Eigen::Index> basis_;
    Eigen::Index artificial_begin_;
    SimplexOptions options_;
    std::size_t iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
    const Eigen::Index n_vars = lp.objective.size();
    const Eigen::Index n_rows = lp.constraints.rows();
    if (lp.constraints.cols() != n_vars || lp.rhs.size() != n_rows ||
        static_cast<Eigen::Index>(lp.relations.size()) != n_rows ||
        (!lp.free_variables.empty() &&
         static_cast<Eigen::Index>(lp.free_variables.size()) != n_vars)) {
        throw Error(ErrorCode::DimensionMismatch, "linear program shapes are inconsistent");
    }
    auto is_free = [&](Eigen::Index j) {
        return !lp.free_variables.empty() && lp.free_variables[static_cast<std::size_t>(j)];
    };

    // Structural columns: one per variable, plus a negative part for free ones.
    std::vector<Eigen::Index> negative_column(static_cast<std::size_t>(n_vars), -1);
    Eigen::Index n_struct = n_vars;
    for (Eigen::Index j = 0; j < n_vars; ++j) {
        if (is_free(j)) {
            negative_column[static_cast<std::size_t>(j)] = n_struct++;
        }
    }

    // Flip rows with negative rhs so the initial basis is feasible.
    std::vector<Relation> relation = lp.relations;
    std::vector<double> sign(static_cast<std::size_t>(n_rows), 1.0);
    Eigen::Index n_slack = 0;
    Eigen::Index n_art = 0;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        auto& rel = relation[static_cast<std::size_t>(r)];
        if (lp.rhs(r) < 0.0) {
            sign[static_cast<std::size_t>(r)] = -1.0;
            if (rel == Relation::LessEqual) {
                rel = Relation::GreaterEqual;
            } else if (rel == Relation::GreaterEqual) {
                rel = Relation::LessEqual;
            }
        }
        if (rel != Relation::Equal) {
            ++n_slack;
        }
        if (rel != Relation::LessEqual) {
            ++n_art;
        }
    }

    const Eigen::Index art_begin = n_struct + n_slack;
    const Eigen::Index n_cols = art_begin + n_art;
    RowMatrix body = RowMatrix::Zero(n_rows, n_cols + 1);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(n_rows));
    Eigen::Index slack = n_struct;
    Eigen::Index art = art_begin;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        const double sg = sign[static_cast<std::size_t>(r)];
        for (Eigen::Index j = 0; j < n_vars; ++j) {
            double a = sg * lp.constraints(r, j);
            body(r, j) = a;
            if (auto neg = negative_column[static_cast<std::size_t>(j)]; neg >= 0) {
                body(r, neg) = -a;
            }
        }
        body(r, n_cols) = sg * lp.rhs(r);
        switch (relation[static_cast<std::size_t>(r)]) {
        case Relation::LessEqual:
            body(r, slack) = 1.0;
            basis[static_cast<std::size_t>(r)] = slack++;
            break;
        case Relation::GreaterEqual:
            body(r, slack++) = -1.0;
            body(r, art) = 1.0;
            basis[static_cast<std::size_t>(r)] = art++;
            break;
        case Relation::Equal:
            body(r, art) = 1.0;
            basis[static_cast<std::size_t>(r)] = art++;
            break;
        }
    }

    Tableau tableau(std::move(body), std::move(basis), art_begin, options);
    const double rhs_scale = std::max(1.0, lp.rhs.size() ? lp.rhs.cwiseAbs().maxCoeff() : 0.0);

    LpSolution solution;
    if (n_art > 0) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_cols);
        phase1.tail(n_art).setOnes();
        tableau.set_costs(phase1);
        tableau.optimize(n_cols);
        if (tableau.objective() > options.feasibility_tolerance * rhs_scale) {
            solution.status = LpStatus::Infeasible;
            solution.iterations = tableau.iterations();
            return solution;
        }
        tableau.expel_artificials();
    }

    const double dir = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n_cols);
    for (Eigen::Index j = 0; j < n_vars; ++j) {
        phase2(j) = dir * lp.objective(j);
        if (auto neg = negative_column[static_cast<std::size_t>(j)]; neg >= 0) {
            phase2(neg) = -dir * lp.objective(j);
        }
    }
    tableau.set_costs(phase2);
    bool bounded = tableau.optimize(art_begin);
    solution.iterations = tableau.iterations();
    if (!bounded) {
        solution.status = LpStatus::Unbounded;
        return solution;
    }

    Eigen::VectorXd columns = Eigen::VectorXd::Zero(n_cols);
    for (Eigen::Index r = 0; r < tableau.rows(); ++r) {
        columns(tableau.basis()[static_cast<std::size_t>(r)]) = std::max(tableau.rhs(r), 0.0);
    }
    solution.values.resize(n_vars);
    for (Eigen::Index j = 0; j < n_vars; ++j) {
        double v = columns(j);
        if (auto neg = negative_column[static_cast<std::size_t>(j)]; neg >= 0) {
            v -= columns(neg);
        }
        solution.values(j) = v;
    }
    solution.objective = lp.objective.dot(solution.values);
    solution.status = LpStatus::Optimal;
    return solution;
}

}  // namespace modea
