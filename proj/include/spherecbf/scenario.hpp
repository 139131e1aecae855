#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "spherecbf/config.hpp"
#include "spherecbf/dynamics.hpp"
#include "spherecbf/errors.hpp"
#include "spherecbf/so3.hpp"
#include "spherecbf/topology.hpp"

namespace spherecbf {

struct Scenario {
    NetworkState state;
    DirectedGraph graph;
};

/// Attitude whose z-axis is `up` (unit), reached by the shortest tilt from e3, then yawed.
inline Rotation attitude_with_axis(const Vec3& up, double yaw) {
    const Vec3 axis = e3().cross(up);
    const double s = axis.norm();
    const double angle = std::atan2(s, up.z());
    const Rotation tilt = s > 0.0 ? exp_so3(axis / s, angle)
                                  : (up.z() > 0.0 ? Rotation::identity() : Rotation::about_x(kPi));
    return tilt * Rotation::about_z(yaw);
}

/// Rotation angle of R in [0, pi], from the trace.
inline double rotation_angle(const Rotation& r) {
    const double c = std::clamp(0.5 * (r.matrix().trace() - 1.0), -1.0, 1.0);
    return std::acos(c);
}

namespace detail {

inline bool compatible(const Rotation& candidate, const std::vector<Rotation>& placed, const ScenarioConfig& cfg,
                       bool need_separation) {
    for (const auto& other : placed) {
        const Rotation rel = relative(candidate, other);
        if (need_separation && geodesic_distance(rel, cfg.rho) < cfg.collision_distance) {
            return false;
        }
        // |theta_ij(0)| < pi, with a margin away from the antipodal rotation.
        if (rotation_angle(rel) > kPi - 1e-6) {
            return false;
        }
    }
    return true;
}

inline DirectedGraph build_graph(const ScenarioConfig& cfg) {
    switch (cfg.graph.kind) {
        case GraphKind::cycle: return DirectedGraph::cycle(cfg.n);
        case GraphKind::complete: return DirectedGraph::complete(cfg.n);
        case GraphKind::random:
            // Separate stream from the attitude sampler.
            return DirectedGraph::random_strongly_connected(cfg.n, cfg.graph.extra_edge_probability,
                                                            cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    }
    throw ConfigError("unknown graph kind");
}

}  // namespace detail

/**
 * Seeded initial network. Hemisphere starts draw each body axis uniformly
 * (by area) on the cap z > min_height with a heading in [-yaw_spread,
 * yaw_spread], rejecting candidates that start closer than D_c to an
 * already placed body (network modes) or whose relative rotation is within
 * 1e-6 of a half turn.
 */
inline Scenario build_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const bool network = cfg.mode != Mode::single_conic;
    const bool need_separation = cfg.mode == Mode::flock;

    std::vector<Rotation> attitudes;
    attitudes.reserve(static_cast<std::size_t>(cfg.n));
    if (cfg.init.explicit_attitudes) {
        for (const auto& e : cfg.init.euler) {
            const Rotation r = euler_to_rotation(e);
            if (network && !detail::compatible(r, attitudes, cfg, need_separation)) {
                throw ConfigError("explicit initial attitudes start outside the safe set");
            }
            attitudes.push_back(r);
        }
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> height(cfg.init.min_height, 1.0);
        std::uniform_real_distribution<double> azimuth(-kPi, kPi);
        std::uniform_real_distribution<double> yaw(-cfg.init.yaw_spread, cfg.init.yaw_spread);
        int attempts = 0;
        while (static_cast<int>(attitudes.size()) < cfg.n) {
            if (++attempts > cfg.init.max_attempts) {
                throw ConfigError("could not place " + std::to_string(cfg.n) + " bodies after " +
                                  std::to_string(cfg.init.max_attempts) + " attempts (sphere too crowded)");
            }
            const double z = height(rng);
            const double az = azimuth(rng);
            const double yw = yaw(rng);
            if (z <= cfg.init.min_height) {
                continue;  // strictly the open upper half
            }
            const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
            const Vec3 up(rxy * std::cos(az), rxy * std::sin(az), z);
            const Rotation r = attitude_with_axis(up, yw);
            if (!network || detail::compatible(r, attitudes, cfg, need_separation)) {
                attitudes.push_back(r);
            }
        }
    }

    Scenario s;
    s.state = make_network(attitudes, cfg.rho);
    if (network) {
        s.graph = detail::build_graph(cfg);
        if (!is_strongly_connected(s.graph)) {
            throw ConfigError("coordination graph is not strongly connected");
        }
    } else {
        s.graph = DirectedGraph(cfg.n, {});
    }
    return s;
}

}  // namespace spherecbf
