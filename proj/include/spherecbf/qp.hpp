#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spherecbf/safety.hpp"
#include "spherecbf/so3.hpp"

namespace spherecbf {

/**
 * @brief minimize ||omega - omega_nom||^2 subject to a_i^T omega >= b_i and,
 * optionally, ||omega|| <= omega_max.
 */
struct QpProblem {
    Vec3 omega_nom = Vec3::Zero();
    std::vector<ConstraintRow> rows;
    std::optional<double> omega_max;
};

enum class QpStatus { optimal, infeasible };

/**
 * Multipliers are those of the scaled objective (1/2)||omega - omega_nom||^2,
 * so at the optimum
 *   (1 + ball_multiplier) omega - omega_nom = sum_i multipliers[i] a_i.
 */
struct QpSolution {
    Vec3 omega = Vec3::Zero();
    std::vector<int> active_set;      // ascending row indices
    std::vector<double> multipliers;  // one per input row, zero when inactive
    double ball_multiplier = 0.0;
    QpStatus status = QpStatus::optimal;

    bool optimal() const { return status == QpStatus::optimal; }
};

inline constexpr double kQpFeasibilityTol = 1e-9;

namespace detail {

inline constexpr double kDegenerateRowNorm = 1e-12;

struct DualActiveSetResult {
    bool feasible = true;
    Vec3 x = Vec3::Zero();
    std::vector<int> active;  // indices into the row list it was given
    std::vector<double> u;    // multipliers matching `active`
};

// Projection data for the current active normals N (3 x q, q <= 3):
//   z = (I - N (N^T N)^-1 N^T) a,  r = (N^T N)^-1 N^T a.
inline void project_onto_active(const std::vector<Vec3>& normals, const std::vector<int>& active,
                                const Vec3& a, Vec3& z, Eigen::VectorXd& r) {
    const auto q = static_cast<Eigen::Index>(active.size());
    if (q == 0) {
        z = a;
        r.resize(0);
        return;
    }
    Eigen::Matrix<double, 3, Eigen::Dynamic> n(3, q);
    for (Eigen::Index k = 0; k < q; ++k) {
        n.col(k) = normals[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])];
    }
    const Eigen::MatrixXd gram = n.transpose() * n;
    r = gram.ldlt().solve(n.transpose() * a);
    z = a - n * r;
}

/**
 * Goldfarb-Idnani dual active-set iteration for min (1/2)||x - x0||^2 with
 * rows n_i^T x >= b_i. Starts at the unconstrained optimum and adds the most
 * violated row until none remain; detects infeasibility when a violated row
 * is linearly dependent on the active set with no droppable multiplier.
 */
inline DualActiveSetResult dual_active_set(const Vec3& x0, const std::vector<Vec3>& normals,
                                           const std::vector<double>& rhs) {
    DualActiveSetResult res;
    res.x = x0;
    const std::size_t m = normals.size();
    const int max_iter = 50 + 20 * static_cast<int>(m);

    Vec3 z;
    Eigen::VectorXd r;
    for (int iter = 0; iter < max_iter; ++iter) {
        // Most violated row, scaled by its norm; ties resolve to the lowest index.
        int p = -1;
        double worst = -kQpFeasibilityTol;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::find(res.active.begin(), res.active.end(), static_cast<int>(i)) != res.active.end()) {
                continue;
            }
            const double s = (normals[i].dot(res.x) - rhs[i]) / normals[i].norm();
            if (s < worst) {
                worst = s;
                p = static_cast<int>(i);
            }
        }
        if (p < 0) {
            return res;
        }

        const Vec3& np = normals[static_cast<std::size_t>(p)];
        double u_p = 0.0;
        for (;;) {
            project_onto_active(normals, res.active, np, z, r);
            const double slack = np.dot(res.x) - rhs[static_cast<std::size_t>(p)];

            // Partial step limit: first active multiplier driven to zero.
            double t_dual = std::numeric_limits<double>::infinity();
            int drop = -1;
            for (Eigen::Index k = 0; k < r.size(); ++k) {
                if (r[k] > 0.0) {
                    const double t = res.u[static_cast<std::size_t>(k)] / r[k];
                    if (t < t_dual) {
                        t_dual = t;
                        drop = static_cast<int>(k);
                    }
                }
            }
            const bool dependent = z.norm() <= 1e-12 * np.norm();
            const double t_full = dependent ? std::numeric_limits<double>::infinity()
                                            : -slack / z.dot(np);

            if (dependent && drop < 0) {
                res.feasible = false;
                return res;
            }
            const double t = std::min(t_dual, t_full);
            if (!dependent) {
                res.x += t * z;
            }
            for (Eigen::Index k = 0; k < r.size(); ++k) {
                res.u[static_cast<std::size_t>(k)] -= t * r[k];
            }
            u_p += t;

            if (t == t_full) {
                res.active.push_back(p);
                res.u.push_back(u_p);
                break;
            }
            res.active.erase(res.active.begin() + drop);
            res.u.erase(res.u.begin() + drop);
        }
    }
    // Finite termination is guaranteed in exact arithmetic; reaching here means cycling on round-off.
    res.feasible = false;
    return res;
}

struct PreparedRows {
    bool infeasible = false;
    std::vector<Vec3> normals;
    std::vector<double> rhs;
    std::vector<int> source;  // original row index for each kept row
};

// Degenerate rows (a ~ 0) are vacuous when b <= 0 and infeasible when b > 0.
inline PreparedRows prepare_rows(std::span<const ConstraintRow> rows) {
    PreparedRows out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].a.norm() <= kDegenerateRowNorm) {
            if (rows[i].b > kQpFeasibilityTol) {
                out.infeasible = true;
            }
            continue;
        }
        out.normals.push_back(rows[i].a);
        out.rhs.push_back(rows[i].b);
        out.source.push_back(static_cast<int>(i));
    }
    return out;
}

inline QpSolution package(const DualActiveSetResult& r, const PreparedRows& prep, std::size_t n_rows,
                          double scale) {
    QpSolution sol;
    sol.omega = r.x;
    sol.multipliers.assign(n_rows, 0.0);
    for (std::size_t k = 0; k < r.active.size(); ++k) {
        const int src = prep.source[static_cast<std::size_t>(r.active[k])];
        sol.multipliers[static_cast<std::size_t>(src)] = r.u[k] * scale;
        sol.active_set.push_back(src);
    }
    std::sort(sol.active_set.begin(), sol.active_set.end());
    return sol;
}

inline QpSolution infeasible_solution(std::size_t n_rows) {
    QpSolution sol;
    sol.status = QpStatus::infeasible;
    sol.multipliers.assign(n_rows, 0.0);
    return sol;
}

}  // namespace detail

/**
 * Exact solve of the 3-variable QP. Linear rows go through a dual active-set
 * method. If the result leaves the norm ball, the ball multiplier mu is found
 * by searching t = 1/(1+mu) in [0, 1]: for fixed mu the optimum is the
 * polyhedral projection of t * omega_nom, and its norm is nondecreasing in t.
 * The final t is then solved in closed form on the converged active set.
 */
inline QpSolution solve(const QpProblem& p) {
    const std::size_t n_rows = p.rows.size();
    if (p.omega_max && !(*p.omega_max > 0.0)) {
        throw std::invalid_argument("solve: omega_max must be positive");
    }
    const detail::PreparedRows prep = detail::prepare_rows(p.rows);
    if (prep.infeasible) {
        return detail::infeasible_solution(n_rows);
    }

    const auto full = detail::dual_active_set(p.omega_nom, prep.normals, prep.rhs);
    if (!full.feasible) {
        return detail::infeasible_solution(n_rows);
    }
    if (!p.omega_max || full.x.norm() <= *p.omega_max) {
        return detail::package(full, prep, n_rows, 1.0);
    }

    const double radius = *p.omega_max;
    const auto at_zero = detail::dual_active_set(Vec3::Zero(), prep.normals, prep.rhs);
    if (!at_zero.feasible || at_zero.x.norm() > radius * (1.0 + 1e-12)) {
        return detail::infeasible_solution(n_rows);
    }

    double lo = 0.0, hi = 1.0;
    detail::DualActiveSetResult best = at_zero;
    detail::DualActiveSetResult upper = full;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto r = detail::dual_active_set(mid * p.omega_nom, prep.normals, prep.rhs);
        if (r.feasible && r.x.norm() <= radius) {
            lo = mid;
            best = std::move(r);
        } else {
            hi = mid;
            upper = std::move(r);
        }
    }

    // Closed-form t on the active set: omega(t) = t * Pi * omega_nom + c with
    // Pi * omega_nom orthogonal to c, so ||omega(t)|| = radius is explicit.
    double t_star = lo;
    {
        const auto& act = best.active;
        const auto q = static_cast<Eigen::Index>(act.size());
        Vec3 c = Vec3::Zero();
        Vec3 proj = p.omega_nom;
        if (q > 0) {
            Eigen::Matrix<double, 3, Eigen::Dynamic> n(3, q);
            Eigen::VectorXd b(q);
            for (Eigen::Index k = 0; k < q; ++k) {
                n.col(k) = prep.normals[static_cast<std::size_t>(act[static_cast<std::size_t>(k)])];
                b[k] = prep.rhs[static_cast<std::size_t>(act[static_cast<std::size_t>(k)])];
            }
            const Eigen::MatrixXd gram = n.transpose() * n;
            const auto ldlt = gram.ldlt();
            c = n * ldlt.solve(b);
            proj = p.omega_nom - n * ldlt.solve(n.transpose() * p.omega_nom);
        }
        const double pn2 = proj.squaredNorm();
        const double room = radius * radius - c.squaredNorm();
        if (pn2 > 0.0 && room >= 0.0) {
            const double t = std::sqrt(room / pn2);
            if (t >= lo - 1e-12 && t <= hi + 1e-12 && t > 0.0) {
                auto r = detail::dual_active_set(t * p.omega_nom, prep.normals, prep.rhs);
                if (r.feasible && r.active == best.active) {
                    // Same active set: evaluate the affine form directly.
                    r.x = t * proj + c;
                    best = std::move(r);
                    t_star = t;
                }
            }
        }
    }

    if (t_star <= 0.0) {
        // mu is unbounded: the answer is the minimum-norm feasible point on the sphere of radius.
        QpSolution sol = detail::package(best, prep, n_rows, 1.0);
        sol.ball_multiplier = std::numeric_limits<double>::infinity();
        return sol;
    }
    // Multipliers of the scaled problem are u; the original ones are u / t.
    QpSolution sol = detail::package(best, prep, n_rows, 1.0 / t_star);
    sol.ball_multiplier = 1.0 / t_star - 1.0;
    return sol;
}

/// Residuals of the KKT system for a claimed optimum.
struct KktResiduals {
    double primal = 0.0;          // worst constraint violation
    double dual = 0.0;            // most negative multiplier
    double complementarity = 0.0; // max |lambda_i * slack_i|
    double stationarity = 0.0;    // ||(1 + mu) omega - omega_nom - sum lambda_i a_i||

    double worst() const { return std::max({primal, dual, complementarity, stationarity}); }
};

inline KktResiduals kkt_residuals(const QpProblem& p, const QpSolution& s) {
    KktResiduals k;
    Vec3 grad = (1.0 + s.ball_multiplier) * s.omega - p.omega_nom;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const double slack = p.rows[i].slack(s.omega);
        const double lam = s.multipliers[i];
        k.primal = std::max(k.primal, -slack);
        k.dual = std::max(k.dual, -lam);
        k.complementarity = std::max(k.complementarity, std::abs(lam * slack));
        grad -= lam * p.rows[i].a;
    }
    if (p.omega_max) {
        const double slack = *p.omega_max - s.omega.norm();
        k.primal = std::max(k.primal, -slack);
        k.dual = std::max(k.dual, -s.ball_multiplier);
        k.complementarity = std::max(k.complementarity, std::abs(s.ball_multiplier * slack));
    }
    k.stationarity = grad.norm();
    return k;
}

// ---------------------------------------------------------------------------
// Brute-force reference solver. Test-only; shares nothing with solve().

struct OracleOptions {
    /// Half-width of the search cube around omega_nom; 0 picks one from the data.
    double half_width = 0.0;
    /// Replace the grid incumbent by the best feasible candidate over every
    /// active set (each subset of rows, with and without the ball).
    bool polish = false;
};

namespace detail {

// Closest point to `nom` on {a_k^T w = b_k, k in subset} (optionally also on
// the sphere |w| = radius), or nullopt when the rows are dependent or the
// sets do not meet.
inline std::optional<Vec3> project_onto_face(const QpProblem& p, const std::vector<int>& subset, const Vec3& nom,
                                             std::optional<double> radius) {
    const auto m = static_cast<Eigen::Index>(subset.size());
    Eigen::Matrix<double, Eigen::Dynamic, 3> a(m, 3);
    Eigen::VectorXd b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        a.row(k) = p.rows[static_cast<std::size_t>(subset[static_cast<std::size_t>(k)])].a.transpose();
        b(k) = p.rows[static_cast<std::size_t>(subset[static_cast<std::size_t>(k)])].b;
    }
    Vec3 c = nom, q = Vec3::Zero();
    Mat3 null_proj = Mat3::Identity();
    if (m > 0) {
        const Eigen::MatrixXd gram = a * a.transpose();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        lu.setThreshold(1e-10);
        if (lu.rank() < m) return std::nullopt;
        q = a.transpose() * lu.solve(b);
        c = nom + a.transpose() * lu.solve(b - a * nom);
        null_proj -= a.transpose() * lu.solve(Eigen::MatrixXd(a));
    }
    if (!radius) return c;
    const double r2 = *radius * *radius - q.squaredNorm();
    if (r2 < 0.0) return std::nullopt;
    const Vec3 d = c - q;
    if (d.norm() > 1e-14) return Vec3(q + std::sqrt(r2) * d.normalized());
    if (r2 == 0.0) return q;
    // nom projects onto the centre of the circle: every point on it is optimal.
    for (int axis = 0; axis < 3; ++axis) {
        const Vec3 t = null_proj * Vec3::Unit(axis);
        if (t.norm() > 1e-8) return Vec3(q + std::sqrt(r2) * t.normalized());
    }
    return std::nullopt;
}

}  // namespace detail

/**
 * Exhaustive grid search over a cube around omega_nom (or the ball's
 * bounding cube). With `polish`, the answer is instead the cheapest feasible
 * point among the exact minimizers of every active-set face, which makes the
 * result exact up to rounding for the small row counts this is meant for.
 */
inline std::optional<Vec3> oracle_solve(const QpProblem& p, double grid_step, const OracleOptions& opt = {}) {
    if (!(grid_step > 0.0)) {
        throw std::invalid_argument("oracle_solve: grid_step must be positive");
    }
    auto feasible = [&](const Vec3& w, double tol) {
        for (const auto& row : p.rows) {
            if (row.a.dot(w) < row.b - tol * (1.0 + std::abs(row.b))) {
                return false;
            }
        }
        return !p.omega_max || w.norm() <= *p.omega_max * (1.0 + tol) + tol;
    };
    auto cost = [&](const Vec3& w) { return (w - p.omega_nom).squaredNorm(); };

    Vec3 center = p.omega_nom;
    double half = opt.half_width;
    if (half <= 0.0) {
        if (p.omega_max) {
            center = Vec3::Zero();
            half = *p.omega_max;
        } else {
            half = 1.0 + p.omega_nom.norm();
            for (const auto& row : p.rows) {
                const double an = row.a.norm();
                if (an > 0.0) {
                    half += std::max(0.0, row.b - row.a.dot(p.omega_nom)) / an;
                }
            }
        }
    }

    constexpr int kCoarseCells = 96;
    const double step = std::max(grid_step, 2.0 * half / kCoarseCells);
    const int cells = static_cast<int>(std::ceil(2.0 * half / step));
    std::optional<Vec3> best;
    double best_cost = std::numeric_limits<double>::infinity();
    const Vec3 lo = center - Vec3::Constant(half);
    for (int ix = 0; ix <= cells; ++ix) {
        for (int iy = 0; iy <= cells; ++iy) {
            for (int iz = 0; iz <= cells; ++iz) {
                const Vec3 w = lo + step * Vec3(ix, iy, iz);
                if (feasible(w, 0.0)) {
                    const double c = cost(w);
                    if (c < best_cost) {
                        best_cost = c;
                        best = w;
                    }
                }
            }
        }
    }
    if (!opt.polish) {
        return best;
    }

    std::optional<Vec3> exact;
    double exact_cost = std::numeric_limits<double>::infinity();
    const std::size_t n = p.rows.size();
    if (n > 20) {
        throw std::invalid_argument("oracle_solve: too many rows to enumerate");
    }
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> subset;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask & (1u << k)) subset.push_back(static_cast<int>(k));
        }
        if (subset.size() > 3) continue;
        for (int with_ball = 0; with_ball <= (p.omega_max ? 1 : 0); ++with_ball) {
            const auto w = detail::project_onto_face(
                p, subset, p.omega_nom, with_ball ? p.omega_max : std::optional<double>{});
            if (w && feasible(*w, 1e-10) && cost(*w) < exact_cost) {
                exact_cost = cost(*w);
                exact = w;
            }
        }
    }
    return exact;
}

}  // namespace spherecbf
