#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spherecbf/dynamics.hpp"
#include "spherecbf/qp.hpp"
#include "spherecbf/safety.hpp"
#include "spherecbf/so3.hpp"
#include "spherecbf/topology.hpp"

namespace spherecbf {

struct SyncGains {
    double k_c = 5.0;

    void validate() const {
        if (!(k_c > 0.0)) {
            throw std::invalid_argument("SyncGains: k_c must be positive");
        }
    }
};

/// Attitude synchronization: k_c * sum over in-neighbors of sk(R_i^T R_j)^vee.
inline Vec3 sync_nominal(const NetworkState& state, const DirectedGraph& g, int i, const SyncGains& gains) {
    Vec3 sum = Vec3::Zero();
    const Rotation& ri = state.attitude(static_cast<std::size_t>(i));
    for (int j : g.neighbors(i)) {
        sum += sk_vee(relative(ri, state.attitude(static_cast<std::size_t>(j))));
    }
    return gains.k_c * sum;
}

/// Time-parameterized reference attitude with a proportional tracking gain.
struct TrackingReference {
    std::function<Rotation(double)> attitude;
    double gain = 1.0;
    double fd_step = 1e-6;  // central difference for the feedforward rate
};

/// Reference whose body z-axis swings along the y-z great circle: R_d(t) = Rx(A sin(2 pi f t)).
inline TrackingReference great_circle_sweep(double amplitude, double frequency, double gain) {
    TrackingReference ref;
    ref.attitude = [amplitude, frequency](double t) {
        return Rotation::about_x(amplitude * std::sin(2.0 * kPi * frequency * t));
    };
    ref.gain = gain;
    return ref;
}

/**
 * k_t sk(R^T R_d)^vee plus the reference body rate transported into the
 * current body frame. The reference rate comes from a central difference of
 * R_d, so no matrix logarithm is needed.
 */
inline Vec3 tracking_nominal(const Rotation& r, const TrackingReference& ref, double t) {
    const Rotation rd = ref.attitude(t);
    const Rotation err = relative(r, rd);
    const double h = ref.fd_step;
    const Vec3 rate = sk_vee(relative(ref.attitude(t - h), ref.attitude(t + h))) / (2.0 * h);
    return ref.gain * sk_vee(err) + err * rate;
}

struct SafeInput {
    Vec3 omega = Vec3::Zero();
    Vec3 nominal = Vec3::Zero();
    QpSolution qp;
    bool relaxed = false;  // near-contact rows were clamped to b = 0 to recover feasibility

    bool feasible() const { return qp.optimal(); }
};

/// Minimal modification of `nominal` that keeps R e3 inside the cone.
inline SafeInput safe_input_single(const Rotation& r, const Vec3& nominal, const ConicParams& p,
                                   double alpha_gain, std::optional<double> omega_max = std::nullopt) {
    QpProblem qp;
    qp.omega_nom = nominal;
    qp.rows.push_back(conic_containment_row(r, p, alpha_gain));
    qp.omega_max = omega_max;
    SafeInput out;
    out.nominal = nominal;
    out.qp = solve(qp);
    out.omega = out.qp.omega;
    return out;
}

/// Rewrites a^T (omega + offset) >= b as a constraint on omega alone.
inline void shift_rows(std::vector<ConstraintRow>& rows, const Vec3& offset) {
    for (auto& r : rows) r.b -= r.a.dot(offset);
}

/**
 * Per-agent collision-avoiding QP around the synchronization law, given
 * N_{d,i}. `offset` is a velocity the caller adds to the result before
 * applying it; the rows then constrain the applied sum.
 *
 * With inputs held over a step, bodies travelling side by side still drift
 * together at second order (great circles converge), so a pair in contact
 * can sit slightly inside the boundary. If the agent is boxed in by such
 * pairs its rows conflict; when the QP is infeasible and every row with
 * b > 0 belongs to a pair within params.boundary_tolerance of contact, those
 * rows are re-posed with b = 0 (hold the distance instead of recovering it)
 * and the result is flagged `relaxed`. Anything deeper stays infeasible.
 */
inline SafeInput safe_input_network(const NetworkState& state, const DirectedGraph& g,
                                    const CollisionParams& params, const SyncGains& gains, int i,
                                    std::span<const int> distance_nbrs,
                                    std::optional<double> omega_max = std::nullopt,
                                    const Vec3& offset = Vec3::Zero()) {
    std::vector<ConstraintRow> rows = assemble_agent_constraints(state, i, distance_nbrs, params);
    QpProblem qp;
    qp.omega_nom = sync_nominal(state, g, i, gains);
    qp.rows = rows;
    shift_rows(qp.rows, offset);
    qp.omega_max = omega_max;
    SafeInput out;
    out.nominal = qp.omega_nom;
    out.qp = solve(qp);

    if (!out.qp.optimal()) {
        const bool near_contact = std::all_of(rows.begin(), rows.end(), [&](const ConstraintRow& r) {
            return r.b <= 0.0 || r.barrier >= -params.boundary_tolerance;
        });
        if (near_contact) {
            for (auto& r : rows) r.b = std::min(r.b, 0.0);
            qp.rows = rows;
            shift_rows(qp.rows, offset);
            out.qp = solve(qp);
            out.relaxed = true;
        }
    }
    out.omega = out.qp.omega;
    return out;
}

/// Same as above, computing N_{d,i} from the awareness distance.
inline SafeInput safe_input_network(const NetworkState& state, const DirectedGraph& g,
                                    const CollisionParams& params, double awareness,
                                    const SyncGains& gains, int i,
                                    std::optional<double> omega_max = std::nullopt) {
    const DistanceGraphParams dg{awareness, params.collision, params.rho};
    const auto nbrs = distance_neighbors(state, dg, i);
    return safe_input_network(state, g, params, gains, i, nbrs, omega_max);
}

}  // namespace spherecbf
