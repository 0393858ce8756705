#pragma once

// Slow reference implementations. None of these call into the library's
// solvers; they exist only to cross-check it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "modea/lp.hpp"

namespace oracle {

using LMat = std::vector<std::vector<long double>>;
using LVec = std::vector<long double>;

// Gauss-Jordan with partial pivoting in long double. Returns nullopt when a
// pivot falls below `eps`.
inline std::optional<LVec> gauss_solve(LMat a, LVec b, long double eps = 1e-14L) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        }
        if (std::fabs(a[piv][col]) < eps) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const long double f = a[r][col] / a[col][col];
            if (f == 0.0L) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

// Best objective over every basic feasible solution of the LP after adding
// slack/surplus columns. Free variables are not supported. Returns nullopt
// when no basic feasible solution exists.
inline std::optional<double> enumerate_vertices(const modea::LinearProgram& lp, double tol = 1e-9) {
    const auto rows = static_cast<std::size_t>(lp.constraints.rows());
    const auto vars = static_cast<std::size_t>(lp.constraints.cols());
    std::size_t slacks = 0;
    for (auto rel : lp.relations) slacks += rel == modea::Relation::Equal ? 0 : 1;
    const std::size_t cols = vars + slacks;

    LMat a(rows, LVec(cols, 0.0L));
    std::size_t next = vars;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < vars; ++c) a[r][c] = lp.constraints(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (lp.relations[r] == modea::Relation::LessEqual) a[r][next++] = 1.0L;
        else if (lp.relations[r] == modea::Relation::GreaterEqual) a[r][next++] = -1.0L;
    }

    std::optional<double> best;
    std::vector<bool> pick(cols, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(std::min(rows, cols)), true);
    if (rows > cols) return std::nullopt;
    do {
        std::vector<std::size_t> basis;
        for (std::size_t c = 0; c < cols; ++c) if (pick[c]) basis.push_back(c);
        LMat sub(rows, LVec(rows));
        LVec rhs(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t i = 0; i < rows; ++i) sub[r][i] = a[r][basis[i]];
            rhs[r] = lp.rhs(static_cast<Eigen::Index>(r));
        }
        auto x = gauss_solve(sub, rhs, 1e-12L);
        if (!x) continue;
        bool feasible = true;
        for (auto v : *x) feasible = feasible && v >= -tol;
        if (!feasible) continue;
        long double obj = 0.0L;
        for (std::size_t i = 0; i < rows; ++i) {
            if (basis[i] < vars) obj += lp.objective(static_cast<Eigen::Index>(basis[i])) * (*x)[i];
        }
        const double o = static_cast<double>(obj);
        if (!best || (lp.sense == modea::Sense::Minimize ? o < *best : o > *best)) best = o;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

// Input-oriented CCR theta for one input and one output.
inline double ratio_theta(const std::vector<double>& x, const std::vector<double>& y, std::size_t j) {
    double best = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) best = std::max(best, y[k] / x[k]);
    return (y[j] / x[j]) / best;
}

// Input-oriented CCR theta for one input and two outputs. The envelopment LP
// has two output rows, so some optimum uses at most two reference units;
// enumerate every single unit and every pair with both rows binding.
inline double pair_theta(const std::vector<double>& x, const std::vector<std::array<double, 2>>& y, std::size_t j) {
    const std::size_t n = x.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
        double lam = 0.0;
        for (int r = 0; r < 2; ++r) {
            if (y[j][r] > 0.0) lam = std::max(lam, y[j][r] / y[a][r]);
        }
        if (std::isfinite(lam)) best = std::min(best, lam * x[a]);
        for (std::size_t b = a + 1; b < n; ++b) {
            const double det = y[a][0] * y[b][1] - y[b][0] * y[a][1];
            if (std::fabs(det) < 1e-14) continue;
            const double la = (y[j][0] * y[b][1] - y[b][0] * y[j][1]) / det;
            const double lb = (y[a][0] * y[j][1] - y[j][0] * y[a][1]) / det;
            if (la < -1e-12 || lb < -1e-12) continue;
            best = std::min(best, std::max(la, 0.0) * x[a] + std::max(lb, 0.0) * x[b]);
        }
    }
    return best / x[j];
}

struct NaiveMerge {
    std::size_t a, b;
    double height;
};

enum class NaiveLinkage { Average, Complete, Single };

// Agglomerative clustering that recomputes every cluster distance from the
// leaf distances at every step. Node numbering: leaves 0..p-1, merge i makes p+i.
inline std::vector<NaiveMerge> naive_agglomerate(const Eigen::MatrixXd& corr, NaiveLinkage linkage) {
    const auto p = static_cast<std::size_t>(corr.rows());
    auto leaf_dist = [&](std::size_t i, std::size_t j) {
        const double r = corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        return 1.0 - r * r;
    };
    std::map<std::size_t, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < p; ++i) clusters[i] = {i};

    auto cluster_dist = [&](const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
        long double sum = 0.0L;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (auto i : u) {
            for (auto j : v) {
                const double d = leaf_dist(i, j);
                sum += d;
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        }
        switch (linkage) {
        case NaiveLinkage::Complete: return hi;
        case NaiveLinkage::Single: return lo;
        default: return static_cast<double>(sum / static_cast<long double>(u.size() * v.size()));
        }
    };

    std::vector<NaiveMerge> merges;
    for (std::size_t step = 0; step + 1 < p; ++step) {
        double lowest = std::numeric_limits<double>::infinity();
        for (auto it = clusters.begin(); it != clusters.end(); ++it) {
            for (auto jt = std::next(it); jt != clusters.end(); ++jt) {
                lowest = std::min(lowest, cluster_dist(it->second, jt->second));
            }
        }
        std::optional<NaiveMerge> pick;
        for (auto it = clusters.begin(); it != clusters.end() && !pick; ++it) {
            for (auto jt = std::next(it); jt != clusters.end(); ++jt) {
                const double d = cluster_dist(it->second, jt->second);
                if (d <= lowest + 1e-12) {
                    pick = NaiveMerge{it->first, jt->first, d};
                    break;
                }
            }
        }
        auto members = clusters[pick->a];
        members.insert(members.end(), clusters[pick->b].begin(), clusters[pick->b].end());
        clusters.erase(pick->a);
        clusters.erase(pick->b);
        clusters[p + step] = members;
        merges.push_back(*pick);
    }
    return merges;
}

// Ridge coefficients from explicit normal equations in long double.
inline Eigen::MatrixXd normal_equations(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y, double b) {
    const auto n = static_cast<std::size_t>(p.rows());
    const auto k = static_cast<std::size_t>(p.cols());
    LMat a(k, LVec(k, 0.0L));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            long double s = 0.0L;
            for (std::size_t r = 0; r < n; ++r) {
                s += static_cast<long double>(p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i))) *
                     p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
            }
            a[i][j] = s + (i == j ? b : 0.0L);
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(k), y.cols());
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        LVec rhs(k, 0.0L);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t r = 0; r < n; ++r) {
                rhs[i] += static_cast<long double>(p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i))) *
                          y(static_cast<Eigen::Index>(r), c);
            }
        }
        auto sol = gauss_solve(a, rhs, 0.0L);
        for (std::size_t i = 0; i < k; ++i) out(static_cast<Eigen::Index>(i), c) = static_cast<double>((*sol)[i]);
    }
    return out;
}

// Sparse polynomial: exponent vector -> coefficient.
using Poly = std::map<std::vector<std::size_t>, double>;

inline Poly poly_mul(const Poly& u, const Poly& v) {
    Poly out;
    for (const auto& [eu, cu] : u) {
        for (const auto& [ev, cv] : v) {
            auto e = eu;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += ev[i];
            out[e] += cu * cv;
        }
    }
    return out;
}

inline Poly poly_var(std::size_t l, std::size_t j) {
    std::vector<std::size_t> e(l, 0);
    e[j] = 1;
    return {{e, 1.0}};
}

inline Poly poly_one(std::size_t l) { return {{std::vector<std::size_t>(l, 0), 1.0}}; }

inline Poly poly_pow(const Poly& u, std::size_t k, std::size_t l) {
    Poly out = poly_one(l);
    for (std::size_t i = 0; i < k; ++i) out = poly_mul(out, u);
    return out;
}

// The reduced model's terms written symbolically, in the documented order.
inline std::vector<Poly> rm_terms_symbolic(std::size_t l, std::size_t r) {
    Poly s;
    for (std::size_t j = 0; j < l; ++j) s[poly_var(l, j).begin()->first] = 1.0;
    std::vector<Poly> terms{poly_one(l)};
    for (std::size_t k = 1; k <= r; ++k) {
        for (std::size_t j = 0; j < l; ++j) terms.push_back(poly_pow(poly_var(l, j), k, l));
    }
    for (std::size_t k = 1; k <= r; ++k) terms.push_back(poly_pow(s, k, l));
    for (std::size_t k = 2; k <= r; ++k) {
        for (std::size_t j = 0; j < l; ++j) terms.push_back(poly_mul(poly_var(l, j), poly_pow(s, k - 1, l)));
    }
    return terms;
}

}  // namespace oracle
