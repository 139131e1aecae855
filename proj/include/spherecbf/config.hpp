#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spherecbf/errors.hpp"
#include "spherecbf/so3.hpp"

namespace spherecbf {

enum class Mode { single_conic, flock, sync_only, nominal_only };

inline std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::single_conic: return "single-conic";
        case Mode::flock: return "flock";
        case Mode::sync_only: return "sync-only";
        case Mode::nominal_only: return "nominal-only";
    }
    return "?";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "single-conic") return Mode::single_conic;
    if (s == "flock") return Mode::flock;
    if (s == "sync-only") return Mode::sync_only;
    if (s == "nominal-only") return Mode::nominal_only;
    throw ConfigError("unknown mode '" + std::string(s) + "'");
}

enum class GraphKind { cycle, complete, random };

struct GraphSpec {
    GraphKind kind = GraphKind::random;
    double extra_edge_probability = 0.3;  // random only, on top of the directed cycle
};

struct InitSpec {
    // hemisphere: body z-axes uniform on the upper half sphere, heading within +-yaw_spread.
    // explicit: one XYZ Euler triple per agent.
    bool explicit_attitudes = false;
    double yaw_spread = kPi / 4.0;
    double min_height = 0.0;  // z-component of R e3 must exceed this
    int max_attempts = 100000;
    std::vector<EulerXYZ> euler;
};

struct PairWeightSpec {
    int i = 0;
    int j = 0;
    double w = 0.5;
};

/// Single-body cone demo: track a reference that leaves the cone.
struct ConicSpec {
    double theta_c = kPi / 6.0;
    double alpha = 1.0;
    double tracking_gain = 2.0;
    double sweep_amplitude = kPi / 3.0;
    double sweep_frequency = 0.1;
    bool filter = true;
};

/**
 * @brief Everything needed to reproduce one simulation run.
 *
 * Flock defaults describe the reference 20-body scenario: rho = 1,
 * D_c = pi/150, D_a = 2 D_c, k = 1, k_c = 5, omega_c = [0.1, 0.2, -0.4].
 */
struct ScenarioConfig {
    Mode mode = Mode::flock;
    int n = 20;
    double rho = 1.0;
    double collision_distance = kPi / 150.0;
    double awareness_distance = 2.0 * kPi / 150.0;
    double k = 1.0;
    double k_c = 5.0;
    double dt = 1e-3;
    double horizon = 20.0;
    std::uint64_t seed = 0;
    GraphSpec graph;
    Vec3 omega_c = Vec3(0.1, 0.2, -0.4);
    // When true the flock QP constrains (omega + omega_c), the input actually
    // applied; when false omega_c bypasses the barrier rows entirely.
    bool omega_c_in_constraints = true;
    InitSpec init;
    std::optional<double> omega_max;
    std::vector<PairWeightSpec> weights;
    ConicSpec conic;

    long steps() const { return std::lround(horizon / dt); }

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
        if (!(rho > 0.0)) throw ConfigError("rho must be positive");
        if (std::abs(steps() * dt - horizon) > 1e-9 * std::max(1.0, horizon)) {
            throw ConfigError("horizon must be an integer multiple of dt");
        }
        if (omega_max && !(*omega_max > 0.0)) throw ConfigError("omega_max must be positive");

        if (mode == Mode::single_conic) {
            if (n != 1) throw ConfigError("single-conic mode simulates exactly one body (n = 1)");
            if (!(conic.theta_c > 0.0 && conic.theta_c < kPi / 2.0))
                throw ConfigError("conic.theta_c must lie in (0, pi/2)");
            if (!(conic.alpha > 0.0)) throw ConfigError("conic.alpha must be positive");
            if (!(conic.tracking_gain > 0.0)) throw ConfigError("conic.tracking_gain must be positive");
        } else {
            if (n < 2) throw ConfigError("network modes need at least two agents");
            if (!(collision_distance > 0.0 && collision_distance < awareness_distance &&
                  awareness_distance < rho * kPi / 2.0)) {
                throw ConfigError("require 0 < D_c < D_a < rho*pi/2");
            }
            if (!(k > 0.0)) throw ConfigError("k must be positive");
            if (!(k_c > 0.0)) throw ConfigError("k_c must be positive");
        }
        if (init.explicit_attitudes && static_cast<int>(init.euler.size()) != n) {
            throw ConfigError("init.euler must list one attitude per agent");
        }
        if (init.max_attempts <= 0) throw ConfigError("init.max_attempts must be positive");
        if (!(init.min_height >= 0.0 && init.min_height < 1.0))
            throw ConfigError("init.min_height must lie in [0, 1)");
        if (!(graph.extra_edge_probability >= 0.0 && graph.extra_edge_probability <= 1.0))
            throw ConfigError("graph.extra_edge_probability must lie in [0, 1]");
        std::set<std::pair<int, int>> seen;
        for (const auto& w : weights) {
            if (w.i < 0 || w.i >= n || w.j < 0 || w.j >= n || w.i == w.j)
                throw ConfigError("weights: pair indices out of range");
            if (!(w.w > 0.0 && w.w < 1.0)) throw ConfigError("weights: w must lie in (0, 1)");
            if (!seen.insert({std::min(w.i, w.j), std::max(w.i, w.j)}).second)
                throw ConfigError("weights: pair listed twice");
        }
    }
};

/// Twenty-body flock: D_c = pi/150 on the unit sphere, D_a = 2 D_c, k = 1, k_c = 5.
inline ScenarioConfig reference_flock_config(std::uint64_t seed = 0) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    return cfg;
}

/// Cone-constrained single body tracking a sweep that exits the cone.
inline ScenarioConfig conic_demo_config() {
    ScenarioConfig cfg;
    cfg.mode = Mode::single_conic;
    cfg.n = 1;
    cfg.horizon = 20.0;
    cfg.omega_c = Vec3::Zero();
    cfg.init.explicit_attitudes = true;
    cfg.init.euler = {EulerXYZ{0.0, 0.0, 0.0}};
    return cfg;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const char* where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

inline Vec3 read_vec3(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(key) + " must be a 3-element array");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace detail

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
    using detail::read_opt;
    if (!j.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown(j,
                           {"mode", "n", "rho", "collision_distance", "theta_c", "awareness_distance", "k",
                            "k_c", "dt", "horizon", "seed", "graph", "omega_c", "omega_c_in_constraints", "init", "omega_max",
                            "weights", "conic"},
                           "config");
    ScenarioConfig cfg;
    try {
        if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
        if (cfg.mode == Mode::single_conic) cfg = conic_demo_config();
        read_opt(j, "n", cfg.n);
        read_opt(j, "rho", cfg.rho);
        // theta_c names the cone half-angle in single-conic mode and the collision angle otherwise.
        if (cfg.mode == Mode::single_conic) {
            read_opt(j, "theta_c", cfg.conic.theta_c);
        } else if (j.contains("theta_c")) {
            cfg.collision_distance = cfg.rho * j.at("theta_c").get<double>();
            cfg.awareness_distance = 2.0 * cfg.collision_distance;
        }
        read_opt(j, "collision_distance", cfg.collision_distance);
        if ((j.contains("collision_distance") || j.contains("theta_c")) && !j.contains("awareness_distance")) {
            cfg.awareness_distance = 2.0 * cfg.collision_distance;
        }
        read_opt(j, "awareness_distance", cfg.awareness_distance);
        read_opt(j, "k", cfg.k);
        read_opt(j, "k_c", cfg.k_c);
        read_opt(j, "dt", cfg.dt);
        read_opt(j, "horizon", cfg.horizon);
        read_opt(j, "seed", cfg.seed);
        if (j.contains("omega_c")) cfg.omega_c = detail::read_vec3(j.at("omega_c"), "omega_c");
        read_opt(j, "omega_c_in_constraints", cfg.omega_c_in_constraints);
        if (j.contains("omega_max") && !j.at("omega_max").is_null())
            cfg.omega_max = j.at("omega_max").get<double>();

        if (j.contains("graph")) {
            const auto& g = j.at("graph");
            detail::reject_unknown(g, {"type", "extra_edge_probability"}, "graph");
            if (g.contains("type")) {
                const auto t = g.at("type").get<std::string>();
                if (t == "cycle") cfg.graph.kind = GraphKind::cycle;
                else if (t == "complete") cfg.graph.kind = GraphKind::complete;
                else if (t == "random") cfg.graph.kind = GraphKind::random;
                else throw ConfigError("unknown graph type '" + t + "'");
            }
            read_opt(g, "extra_edge_probability", cfg.graph.extra_edge_probability);
        }
        if (j.contains("init")) {
            const auto& in = j.at("init");
            detail::reject_unknown(in, {"type", "yaw_spread", "min_height", "max_attempts", "euler"}, "init");
            if (in.contains("type")) {
                const auto t = in.at("type").get<std::string>();
                if (t == "hemisphere") cfg.init.explicit_attitudes = false;
                else if (t == "explicit") cfg.init.explicit_attitudes = true;
                else throw ConfigError("unknown init type '" + t + "'");
            }
            read_opt(in, "yaw_spread", cfg.init.yaw_spread);
            read_opt(in, "min_height", cfg.init.min_height);
            read_opt(in, "max_attempts", cfg.init.max_attempts);
            if (in.contains("euler")) {
                cfg.init.euler.clear();
                for (const auto& e : in.at("euler")) {
                    const Vec3 v = detail::read_vec3(e, "init.euler entry");
                    cfg.init.euler.push_back({v.x(), v.y(), v.z()});
                }
            }
        }
        if (j.contains("weights")) {
            for (const auto& w : j.at("weights")) {
                detail::reject_unknown(w, {"i", "j", "w"}, "weights entry");
                cfg.weights.push_back({w.at("i").get<int>(), w.at("j").get<int>(), w.at("w").get<double>()});
            }
        }
        if (j.contains("conic")) {
            const auto& c = j.at("conic");
            detail::reject_unknown(
                c, {"theta_c", "alpha", "tracking_gain", "sweep_amplitude", "sweep_frequency", "filter"}, "conic");
            read_opt(c, "theta_c", cfg.conic.theta_c);
            read_opt(c, "alpha", cfg.conic.alpha);
            read_opt(c, "tracking_gain", cfg.conic.tracking_gain);
            read_opt(c, "sweep_amplitude", cfg.conic.sweep_amplitude);
            read_opt(c, "sweep_frequency", cfg.conic.sweep_frequency);
            read_opt(c, "filter", cfg.conic.filter);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["mode"] = std::string(to_string(cfg.mode));
    j["n"] = cfg.n;
    j["rho"] = cfg.rho;
    j["collision_distance"] = cfg.collision_distance;
    j["awareness_distance"] = cfg.awareness_distance;
    j["k"] = cfg.k;
    j["k_c"] = cfg.k_c;
    j["dt"] = cfg.dt;
    j["horizon"] = cfg.horizon;
    j["seed"] = cfg.seed;
    const char* kinds[] = {"cycle", "complete", "random"};
    j["graph"] = {{"type", kinds[static_cast<int>(cfg.graph.kind)]},
                  {"extra_edge_probability", cfg.graph.extra_edge_probability}};
    j["omega_c"] = {cfg.omega_c.x(), cfg.omega_c.y(), cfg.omega_c.z()};
    j["omega_c_in_constraints"] = cfg.omega_c_in_constraints;
    nlohmann::json init = {{"type", cfg.init.explicit_attitudes ? "explicit" : "hemisphere"},
                           {"yaw_spread", cfg.init.yaw_spread},
                           {"min_height", cfg.init.min_height},
                           {"max_attempts", cfg.init.max_attempts}};
    if (cfg.init.explicit_attitudes) {
        init["euler"] = nlohmann::json::array();
        for (const auto& e : cfg.init.euler) init["euler"].push_back({e.phi, e.psi, e.eta});
    }
    j["init"] = init;
    j["omega_max"] = cfg.omega_max ? nlohmann::json(*cfg.omega_max) : nlohmann::json(nullptr);
    j["weights"] = nlohmann::json::array();
    for (const auto& w : cfg.weights) j["weights"].push_back({{"i", w.i}, {"j", w.j}, {"w", w.w}});
    if (cfg.mode == Mode::single_conic) {
        j.erase("collision_distance");
        j.erase("awareness_distance");
        j["conic"] = {{"theta_c", cfg.conic.theta_c},
                      {"alpha", cfg.conic.alpha},
                      {"tracking_gain", cfg.conic.tracking_gain},
                      {"sweep_amplitude", cfg.conic.sweep_amplitude},
                      {"sweep_frequency", cfg.conic.sweep_frequency},
                      {"filter", cfg.conic.filter}};
    }
    return j;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace spherecbf
