#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spherecbf/so3.hpp"

namespace spherecbf {

struct AgentState {
    int id = 0;
    Rotation attitude;
    Vec3 position = Vec3::Zero();  // cached rho * attitude * e3
    Vec3 last_omega = Vec3::Zero();
};

/// Rigid bodies on a sphere of radius rho. Agent ids equal their index.
struct NetworkState {
    std::vector<AgentState> agents;
    double time = 0.0;
    double rho = 1.0;

    std::size_t size() const { return agents.size(); }
    const Rotation& attitude(std::size_t i) const { return agents[i].attitude; }
};

inline NetworkState make_network(std::span<const Rotation> attitudes, double rho, double time = 0.0) {
    detail::require_radius(rho, "make_network");
    NetworkState s;
    s.rho = rho;
    s.time = time;
    s.agents.reserve(attitudes.size());
    for (std::size_t i = 0; i < attitudes.size(); ++i) {
        AgentState a;
        a.id = static_cast<int>(i);
        a.attitude = attitudes[i];
        a.position = embed_position(attitudes[i], rho);
        s.agents.push_back(a);
    }
    return s;
}

/// R exp(hat(omega) dt); exact for omega held constant over the step.
inline Rotation step_attitude(const Rotation& r, const Vec3& omega, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step_attitude: dt must be positive");
    }
    if (!omega.allFinite()) {
        throw std::invalid_argument("step_attitude: omega must be finite");
    }
    return r * exp_map(omega * dt);
}

/// Advances every attitude and re-derives positions from the sphere constraint.
inline NetworkState step_network(const NetworkState& state, std::span<const Vec3> inputs, double dt) {
    if (inputs.size() != state.agents.size()) {
        throw std::invalid_argument("step_network: expected one input per agent");
    }
    NetworkState next = state;
    for (std::size_t i = 0; i < next.agents.size(); ++i) {
        AgentState& a = next.agents[i];
        a.attitude = step_attitude(a.attitude, inputs[i], dt);
        a.position = embed_position(a.attitude, state.rho);
        a.last_omega = inputs[i];
    }
    next.time = state.time + dt;
    return next;
}

/**
 * Unconstrained rigid-body step, p_dot = R v and R_dot = R hat(omega), with
 * the body twist (v, omega) held constant. Uses the closed-form SE(3)
 * exponential so it is exact for constant twists; only used to cross-check
 * step_network with v = -rho hat(e3) omega.
 */
inline std::pair<Vec3, Rotation> step_free(const Vec3& p, const Rotation& r, const Vec3& v,
                                           const Vec3& omega, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step_free: dt must be positive");
    }
    const Vec3 phi = omega * dt;
    const double theta = phi.norm();
    const Mat3 k = hat(phi);
    Mat3 jac = Mat3::Identity();
    if (theta > 1e-8) {
        const double t2 = theta * theta;
        jac += (1.0 - std::cos(theta)) / t2 * k + (theta - std::sin(theta)) / (t2 * theta) * (k * k);
    } else {
        jac += 0.5 * k + (1.0 / 6.0) * (k * k);
    }
    const Vec3 p_next = p + r.matrix() * (jac * v) * dt;
    return {p_next, r * exp_map(phi)};
}

}  // namespace spherecbf
