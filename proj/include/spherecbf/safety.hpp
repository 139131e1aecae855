#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spherecbf/dynamics.hpp"
#include "spherecbf/so3.hpp"

namespace spherecbf {

// Every barrier condition is expressed as one linear row a^T omega >= b in
// the agent's body angular velocity. Class-K functions are linear: alpha(h) = c h.

struct ConstraintRow {
    Vec3 a = Vec3::Zero();
    double b = 0.0;
    std::string tag;
    double barrier = std::numeric_limits<double>::quiet_NaN();  // h at assembly, when known

    double slack(const Vec3& omega) const { return a.dot(omega) - b; }
    bool satisfied_by(const Vec3& omega, double tol = 1e-9) const { return slack(omega) >= -tol; }
};

struct ConicParams {
    double theta_c = kPi / 6.0;

    void validate() const {
        if (!(theta_c > 0.0 && theta_c < kPi / 2.0)) {
            throw std::invalid_argument("ConicParams: theta_c must lie in (0, pi/2)");
        }
    }
};

/// Sharing weights w_ij for ordered pairs; w_ij + w_ji = 1, default 1/2.
class PairWeights {
public:
    /// Sets w_ij = w and w_ji = 1 - w.
    void set(int i, int j, double w) {
        if (i == j) {
            throw std::invalid_argument("PairWeights: i == j");
        }
        if (!(w > 0.0 && w < 1.0)) {
            throw std::invalid_argument("PairWeights: weight must lie in (0, 1)");
        }
        table_[{i, j}] = w;
        table_[{j, i}] = 1.0 - w;
    }

    double operator()(int i, int j) const {
        const auto it = table_.find({i, j});
        return it == table_.end() ? 0.5 : it->second;
    }

    void validate() const {
        for (const auto& [key, w] : table_) {
            const auto other = table_.find({key.second, key.first});
            if (!(w > 0.0 && w < 1.0) || other == table_.end() ||
                std::abs(w + other->second - 1.0) > 1e-12) {
                throw std::invalid_argument("PairWeights: w_ij + w_ji must equal 1");
            }
        }
    }

    const std::map<std::pair<int, int>, double>& entries() const { return table_; }
    bool empty() const { return table_.empty(); }

private:
    std::map<std::pair<int, int>, double> table_;
};

struct CollisionParams {
    double collision = 0.0;  // D_c, arc length
    double rho = 1.0;
    double k = 1.0;
    PairWeights weights;
    // A pair with h in [-boundary_tolerance, 0) counts as touching the
    // boundary when a QP has to be relaxed (see safe_input_network). For
    // small D_c/rho the distance deficit is about boundary_tolerance / sin(D_c/rho).
    double boundary_tolerance = 1e-8;

    double cos_limit() const { return std::cos(collision / rho); }

    void validate() const {
        if (!(rho > 0.0)) {
            throw std::invalid_argument("CollisionParams: rho must be positive");
        }
        if (!(collision > 0.0 && collision < rho * kPi / 2.0)) {
            throw std::invalid_argument("CollisionParams: require 0 < D_c < rho*pi/2");
        }
        if (!(k > 0.0)) {
            throw std::invalid_argument("CollisionParams: k must be positive");
        }
        if (!(boundary_tolerance >= 0.0)) {
            throw std::invalid_argument("CollisionParams: boundary_tolerance must be nonnegative");
        }
        weights.validate();
    }
};

/// e3^T R hat(e3), as a column vector.
inline Vec3 e3_row_hat_e3(const Mat3& r) { return Vec3(r(2, 1), -r(2, 0), 0.0); }

// ---------------------------------------------------------------------------
// Single body, cone about the world z-axis.

/// e3^T R e3 - cos(theta_c); positive strictly inside the cone.
inline double conic_h(const Rotation& r, const ConicParams& p) { return r(2, 2) - std::cos(p.theta_c); }

/// Keeps R e3 inside the cone: -e3^T R hat(e3) omega >= -alpha h.
inline ConstraintRow conic_containment_row(const Rotation& r, const ConicParams& p, double alpha_gain) {
    if (!(alpha_gain > 0.0)) {
        throw std::invalid_argument("conic_containment_row: alpha_gain must be positive");
    }
    return {-e3_row_hat_e3(r.matrix()), -alpha_gain * conic_h(r, p), "conic_containment"};
}

/// Keeps R e3 outside the cone: e3^T R hat(e3) omega >= alpha (e3^T R e3 - cos theta_c).
inline ConstraintRow conic_exclusion_row(const Rotation& r, const ConicParams& p, double alpha_gain) {
    if (!(alpha_gain > 0.0)) {
        throw std::invalid_argument("conic_exclusion_row: alpha_gain must be positive");
    }
    return {e3_row_hat_e3(r.matrix()), alpha_gain * conic_h(r, p), "conic_exclusion"};
}

// ---------------------------------------------------------------------------
// Pairwise collision barrier on relative attitudes.

/// cos(D_c / rho) - e3^T R_ij e3; nonnegative iff the pair is at least D_c apart.
inline double pairwise_h(const Rotation& r_ij, const CollisionParams& p) {
    return -r_ij(2, 2) + p.cos_limit();
}

/**
 * Agent i's share of the coupled pair condition
 *   e3^T R_ij^T hat(e3) w_i + e3^T R_ij hat(e3) w_j >= 2k (e3^T R_ij e3 - cos(D_c/rho)).
 * With weight 1/2 this is exactly the distributed per-agent condition; the
 * row depends only on the relative attitude R_ij.
 */
inline ConstraintRow collision_row(const Rotation& r_ij, const CollisionParams& p, double weight) {
    if (!(weight > 0.0 && weight < 1.0)) {
        throw std::invalid_argument("collision_row: weight must lie in (0, 1)");
    }
    const Mat3& m = r_ij.matrix();
    // e3^T R^T hat(e3) = [R_12, -R_02, 0]
    const Vec3 a(m(1, 2), -m(0, 2), 0.0);
    const double b = 2.0 * weight * p.k * (m(2, 2) - p.cos_limit());
    return {a, b, {}};
}

/// One collision row per distance neighbor j, built from R_i^T R_j.
inline std::vector<ConstraintRow> assemble_agent_constraints(const NetworkState& state, int i,
                                                             std::span<const int> distance_nbrs,
                                                             const CollisionParams& p) {
    std::vector<ConstraintRow> rows;
    rows.reserve(distance_nbrs.size());
    const Rotation& ri = state.attitude(static_cast<std::size_t>(i));
    for (int j : distance_nbrs) {
        const Rotation r_ij = relative(ri, state.attitude(static_cast<std::size_t>(j)));
        ConstraintRow row = collision_row(r_ij, p, p.weights(i, j));
        row.barrier = pairwise_h(r_ij, p);
        row.tag = "pair(" + std::to_string(i) + "," + std::to_string(j) + ")";
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace spherecbf
