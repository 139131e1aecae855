#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spherecbf/spherecbf.hpp"

using namespace spherecbf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSafety = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> horizon;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Override the scenario seed");
        cmd->add_option("--dt", dt, "Override the time step [s]");
        cmd->add_option("--horizon", horizon, "Override the horizon [s]");
    }

    void apply(ScenarioConfig& cfg) const {
        if (seed) cfg.seed = *seed;
        if (dt) cfg.dt = *dt;
        if (horizon) cfg.horizon = *horizon;
        cfg.validate();
    }
};

void summarize(const ScenarioConfig& cfg, const TrajectoryLog& log) {
    const LogRow& first = log.rows.front();
    const LogRow& last = log.rows.back();
    std::fprintf(stderr, "mode=%s n=%d steps=%zu t_end=%.6g\n", std::string(to_string(cfg.mode)).c_str(), cfg.n,
                 log.rows.size() - 1, last.t);
    if (cfg.mode == Mode::single_conic) {
        double h = first.min_barrier;
        for (const auto& r : log.rows) h = std::min(h, r.min_barrier);
        std::fprintf(stderr, "min h = %.6e\n", h);
        return;
    }
    double d = first.min_geodesic;
    for (const auto& r : log.rows) d = std::min(d, r.min_geodesic);
    std::fprintf(stderr, "min geodesic distance = %.9g (D_c = %.9g)\n", d, cfg.collision_distance);
    std::fprintf(stderr, "max Frobenius disagreement: %.6g -> %.6g\n", first.max_frobenius, last.max_frobenius);
}

int simulate_and_export(const ScenarioConfig& cfg, const std::string& out, const std::string& format) {
    const LogFormat fmt = parse_log_format(format);
    const TrajectoryLog log = run(cfg);
    export_log(log, out, fmt);
    summarize(cfg, log);
    return kExitOk;
}

// Writes t, h of the filtered run and h of the nominal-only run side by side.
void write_barrier_series(const TrajectoryLog& filtered, const TrajectoryLog& nominal, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << "t,h_filtered,h_nominal\n";
    char buf[128];
    for (std::size_t k = 0; k < filtered.rows.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", filtered.rows[k].t, filtered.rows[k].min_barrier,
                      nominal.rows[k].min_barrier);
        os << buf;
    }
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

// Short run of the configured scenario followed by the invariant suite.
int validate(ScenarioConfig cfg, double max_horizon) {
    if (cfg.horizon > max_horizon) cfg.horizon = std::max(cfg.dt, std::round(max_horizon / cfg.dt) * cfg.dt);
    cfg.validate();
    const TrajectoryLog a = run(cfg);
    const TrajectoryLog b = run(cfg);

    std::vector<Check> checks;
    char buf[160];

    checks.push_back({"row count", a.rows.size() == static_cast<std::size_t>(cfg.steps() + 1),
                      std::to_string(a.rows.size()) + " rows"});

    bool monotone = true;
    for (std::size_t k = 1; k < a.rows.size(); ++k) monotone = monotone && a.rows[k].t > a.rows[k - 1].t;
    checks.push_back({"monotone time", monotone, ""});

    double ortho = 0.0, radius = 0.0;
    for (const auto& r : a.rows) {
        for (const auto& ag : r.agents) {
            ortho = std::max(ortho, (ag.attitude.transpose() * ag.attitude - Mat3::Identity()).norm());
            radius = std::max(radius, std::abs(ag.position.norm() - cfg.rho));
        }
    }
    std::snprintf(buf, sizeof buf, "max |R^T R - I|_F = %.3e", ortho);
    checks.push_back({"orthonormality", ortho <= 1e-9, buf});
    std::snprintf(buf, sizeof buf, "max | |p| - rho | = %.3e", radius);
    checks.push_back({"sphere residence", radius <= 1e-9, buf});

    bool same = a.rows.size() == b.rows.size();
    for (std::size_t k = 0; same && k < a.rows.size(); ++k) {
        const auto x = flatten(a.rows[k]), y = flatten(b.rows[k]);
        same = x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
    }
    checks.push_back({"determinism", same, "two identical runs"});

    if (cfg.mode == Mode::flock) {
        double d = a.rows.front().min_geodesic;
        for (const auto& r : a.rows) d = std::min(d, r.min_geodesic);
        std::snprintf(buf, sizeof buf, "min distance - D_c = %.3e", d - cfg.collision_distance);
        checks.push_back({"collision avoidance", d >= cfg.collision_distance - 1e-6, buf});
    } else if (cfg.mode == Mode::single_conic && cfg.conic.filter) {
        double h = a.rows.front().min_barrier;
        for (const auto& r : a.rows) h = std::min(h, r.min_barrier);
        std::snprintf(buf, sizeof buf, "min h = %.3e", h);
        checks.push_back({"cone invariance", h >= -1e-6, buf});
    }

    bool ok = true;
    for (const auto& c : checks) {
        std::printf("%-20s %s  %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());
        ok = ok && c.pass;
    }
    return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collision-free coordination of rigid bodies on a sphere"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", h_out;
    double validate_horizon = 1.0;

    Overrides run_ov, conic_ov, flock_ov, validate_ov;

    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario from a config file");
    run_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
    run_cmd->add_option("--out", out_path, "Trajectory output path")->required();
    run_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run_ov.attach(run_cmd);

    auto* conic_cmd = app.add_subcommand("demo-conic", "Single body kept inside a cone while tracking a sweep");
    conic_cmd->add_option("--out", out_path, "Trajectory output path (default conic.<format>)");
    conic_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    conic_cmd->add_option("--h-out", h_out, "Barrier time series, filtered vs nominal (default conic_h.csv)");
    conic_ov.attach(conic_cmd);

    auto* flock_cmd = app.add_subcommand("demo-flock", "Twenty-body flock with the reference parameters");
    flock_cmd->add_option("--out", out_path, "Trajectory output path (default flock.<format>)");
    flock_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    flock_ov.attach(flock_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "Check a config and run the invariant suite on a short run");
    validate_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
    validate_cmd->add_option("--max-horizon", validate_horizon, "Horizon cap for the check run [s]")
        ->check(CLI::PositiveNumber);
    validate_ov.attach(validate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run_cmd) {
            ScenarioConfig cfg = load_config(config_path);
            run_ov.apply(cfg);
            return simulate_and_export(cfg, out_path, format);
        }
        if (*flock_cmd) {
            ScenarioConfig cfg = reference_flock_config();
            flock_ov.apply(cfg);
            if (out_path.empty()) out_path = "flock." + format;
            return simulate_and_export(cfg, out_path, format);
        }
        if (*conic_cmd) {
            ScenarioConfig cfg = conic_demo_config();
            conic_ov.apply(cfg);
            if (out_path.empty()) out_path = "conic." + format;
            if (h_out.empty()) h_out = "conic_h.csv";
            const TrajectoryLog filtered = run(cfg);
            ScenarioConfig nominal_cfg = cfg;
            nominal_cfg.conic.filter = false;
            const TrajectoryLog nominal = run(nominal_cfg);
            export_log(filtered, out_path, parse_log_format(format));
            write_barrier_series(filtered, nominal, h_out);
            summarize(cfg, filtered);
            double h = nominal.rows.front().min_barrier;
            for (const auto& r : nominal.rows) h = std::min(h, r.min_barrier);
            std::fprintf(stderr, "nominal-only min h = %.6e\n", h);
            return kExitOk;
        }
        if (*validate_cmd) {
            ScenarioConfig cfg = load_config(config_path);
            validate_ov.apply(cfg);
            return validate(cfg, validate_horizon);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const SafetyAbort& e) {
        std::fprintf(stderr, "safety abort: %s\n", e.what());
        return kExitSafety;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailed;
    }
    return kExitOk;
}
