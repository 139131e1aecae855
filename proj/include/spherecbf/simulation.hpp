#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spherecbf/config.hpp"
#include "spherecbf/controllers.hpp"
#include "spherecbf/dynamics.hpp"
#include "spherecbf/errors.hpp"
#include "spherecbf/metrics.hpp"
#include "spherecbf/safety.hpp"
#include "spherecbf/scenario.hpp"
#include "spherecbf/topology.hpp"
#include "spherecbf/trajectory.hpp"

namespace spherecbf {

inline CollisionParams collision_params(const ScenarioConfig& cfg) {
    CollisionParams p;
    p.collision = cfg.collision_distance;
    p.rho = cfg.rho;
    p.k = cfg.k;
    for (const auto& w : cfg.weights) p.weights.set(w.i, w.j, w.w);
    return p;
}

namespace detail {

struct StepControl {
    std::vector<Vec3> applied;
    std::vector<Vec3> nominal;
};

inline std::vector<Rotation> attitudes_of(const NetworkState& s) {
    std::vector<Rotation> out;
    out.reserve(s.size());
    for (const auto& a : s.agents) out.push_back(a.attitude);
    return out;
}

// N_{d,i} for every agent from one pass over unordered pairs.
inline std::vector<std::vector<int>> all_distance_neighbors(const NetworkState& s, double awareness) {
    const std::size_t n = s.size();
    std::vector<std::vector<int>> nd(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (geodesic_distance(relative(s.attitude(i), s.attitude(j)), s.rho) <= awareness) {
                nd[i].push_back(static_cast<int>(j));
                nd[j].push_back(static_cast<int>(i));
            }
        }
    }
    for (auto& v : nd) std::sort(v.begin(), v.end());
    return nd;
}

inline StepControl network_control(const ScenarioConfig& cfg, const Scenario& sc, const NetworkState& s,
                                   const CollisionParams& cp, long step) {
    const std::size_t n = s.size();
    StepControl out;
    out.applied.resize(n);
    out.nominal.resize(n);
    const SyncGains gains{cfg.k_c};
    std::vector<std::vector<int>> nd;
    if (cfg.mode == Mode::flock) nd = all_distance_neighbors(s, cfg.awareness_distance);

    for (std::size_t i = 0; i < n; ++i) {
        const int id = static_cast<int>(i);
        if (cfg.mode == Mode::flock) {
            const Vec3 offset = cfg.omega_c_in_constraints ? cfg.omega_c : Vec3::Zero();
            const SafeInput u = safe_input_network(s, sc.graph, cp, gains, id, nd[i], cfg.omega_max, offset);
            if (!u.feasible()) {
                throw SafetyAbort("collision QP infeasible for agent " + std::to_string(i) + " at step " +
                                      std::to_string(step),
                                  step, id);
            }
            out.nominal[i] = u.nominal;
            out.applied[i] = u.omega + cfg.omega_c;
        } else {
            out.nominal[i] = sync_nominal(s, sc.graph, id, gains);
            out.applied[i] = out.nominal[i];
            if (cfg.mode == Mode::nominal_only) out.applied[i] += cfg.omega_c;
        }
    }
    return out;
}

inline StepControl conic_control(const ScenarioConfig& cfg, const NetworkState& s, const TrackingReference& ref,
                                 long step) {
    StepControl out;
    const Vec3 nominal = tracking_nominal(s.attitude(0), ref, s.time);
    out.nominal = {nominal};
    if (cfg.conic.filter) {
        const SafeInput u = safe_input_single(s.attitude(0), nominal, ConicParams{cfg.conic.theta_c},
                                              cfg.conic.alpha, cfg.omega_max);
        if (!u.feasible()) {
            throw SafetyAbort("conic QP infeasible at step " + std::to_string(step), step, 0);
        }
        out.applied = {u.omega};
    } else {
        out.applied = {nominal};
    }
    return out;
}

inline LogRow make_row(const ScenarioConfig& cfg, const NetworkState& s, const StepControl& u,
                       const CollisionParams& cp) {
    LogRow row;
    row.t = s.time;
    row.agents.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        row.agents[i].attitude = s.attitude(i).matrix();
        row.agents[i].position = s.agents[i].position;
        row.agents[i].omega = u.applied[i];
        row.agents[i].nominal = u.nominal[i];
    }
    if (cfg.mode == Mode::single_conic) {
        row.min_barrier = conic_h(s.attitude(0), ConicParams{cfg.conic.theta_c});
    } else {
        const auto att = attitudes_of(s);
        row.min_geodesic = min_geodesic_distance(att, s.rho);
        row.max_frobenius = max_disagreement(att);
        row.min_barrier = min_pairwise_h(att, cp);
    }
    return row;
}

}  // namespace detail

/**
 * Runs a scenario to its horizon. Each step freezes the state, builds every
 * agent's nominal input and safety QP from that snapshot, adds the common
 * body velocity omega_c after the QP (flock and nominal-only modes; by
 * default the flock rows already account for it), then
 * advances all attitudes with the exact exponential. Rows are logged at
 * t = 0, dt, ..., horizon; the inputs in a row are the ones applied over the
 * following step (the last row's inputs are evaluated but not applied).
 *
 * Throws SafetyAbort if a QP is infeasible.
 */
inline TrajectoryLog run(const ScenarioConfig& cfg, const Scenario& scenario) {
    cfg.validate();
    const long steps = cfg.steps();
    const CollisionParams cp = cfg.mode == Mode::single_conic ? CollisionParams{} : collision_params(cfg);
    const TrackingReference ref =
        great_circle_sweep(cfg.conic.sweep_amplitude, cfg.conic.sweep_frequency, cfg.conic.tracking_gain);

    TrajectoryLog log;
    log.n_agents = cfg.n;
    log.rows.reserve(static_cast<std::size_t>(steps + 1));

    NetworkState state = scenario.state;
    for (long step = 0;; ++step) {
        state.time = static_cast<double>(step) * cfg.dt;
        const detail::StepControl u = cfg.mode == Mode::single_conic
                                          ? detail::conic_control(cfg, state, ref, step)
                                          : detail::network_control(cfg, scenario, state, cp, step);
        log.rows.push_back(detail::make_row(cfg, state, u, cp));
        if (step == steps) break;
        state = step_network(state, u.applied, cfg.dt);
    }
    return log;
}

inline TrajectoryLog run(const ScenarioConfig& cfg) { return run(cfg, build_scenario(cfg)); }

}  // namespace spherecbf
