#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spherecbf/so3.hpp"

namespace spherecbf {

struct AgentRecord {
    Mat3 attitude = Mat3::Identity();
    Vec3 position = Vec3::Zero();
    Vec3 omega = Vec3::Zero();    // applied over [t, t + dt)
    Vec3 nominal = Vec3::Zero();  // nominal controller output at t
};

/**
 * One logged instant. Pair metrics are NaN for single-body runs; in
 * single-conic mode min_barrier holds the cone barrier instead of min h_ij.
 */
struct LogRow {
    double t = 0.0;
    std::vector<AgentRecord> agents;
    double min_geodesic = std::numeric_limits<double>::quiet_NaN();
    double max_frobenius = std::numeric_limits<double>::quiet_NaN();
    double min_barrier = std::numeric_limits<double>::quiet_NaN();
};

struct TrajectoryLog {
    int n_agents = 0;
    std::vector<LogRow> rows;

    static constexpr int kPerAgentColumns = 18;
    int column_count() const { return 1 + kPerAgentColumns * n_agents + 3; }
};

// ---------------------------------------------------------------------------
// Flat column layout shared by CSV and JSON.

inline std::vector<std::string> log_columns(int n_agents) {
    std::vector<std::string> cols{"t"};
    for (int i = 0; i < n_agents; ++i) {
        const std::string a = "agent" + std::to_string(i) + "_";
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) cols.push_back(a + "R" + std::to_string(r) + std::to_string(c));
        for (const char* s : {"px", "py", "pz", "wx", "wy", "wz", "wnomx", "wnomy", "wnomz"}) cols.push_back(a + s);
    }
    cols.insert(cols.end(), {"min_geo_dist", "max_frob", "min_hij"});
    return cols;
}

inline std::vector<double> flatten(const LogRow& row) {
    std::vector<double> v;
    v.reserve(1 + TrajectoryLog::kPerAgentColumns * row.agents.size() + 3);
    v.push_back(row.t);
    for (const auto& a : row.agents) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) v.push_back(a.attitude(r, c));
        for (const Vec3* x : {&a.position, &a.omega, &a.nominal})
            for (int k = 0; k < 3; ++k) v.push_back((*x)[k]);
    }
    v.insert(v.end(), {row.min_geodesic, row.max_frobenius, row.min_barrier});
    return v;
}

inline LogRow unflatten(const std::vector<double>& v, int n_agents) {
    if (static_cast<int>(v.size()) != 1 + TrajectoryLog::kPerAgentColumns * n_agents + 3) {
        throw std::runtime_error("trajectory row has the wrong number of columns");
    }
    LogRow row;
    std::size_t k = 0;
    row.t = v[k++];
    row.agents.resize(static_cast<std::size_t>(n_agents));
    for (auto& a : row.agents) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) a.attitude(r, c) = v[k++];
        for (Vec3* x : {&a.position, &a.omega, &a.nominal})
            for (int i = 0; i < 3; ++i) (*x)[i] = v[k++];
    }
    row.min_geodesic = v[k++];
    row.max_frobenius = v[k++];
    row.min_barrier = v[k++];
    return row;
}

inline int agents_from_columns(std::size_t columns) {
    const long body = static_cast<long>(columns) - 4;
    if (body < 0 || body % TrajectoryLog::kPerAgentColumns != 0) {
        throw std::runtime_error("column count does not match the trajectory layout");
    }
    return static_cast<int>(body / TrajectoryLog::kPerAgentColumns);
}

// ---------------------------------------------------------------------------
// CSV: header row, then one row per instant; 17 significant digits.

inline void write_csv(const TrajectoryLog& log, std::ostream& out) {
    const auto cols = log_columns(log.n_agents);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    char buf[32];
    for (const auto& row : log.rows) {
        const auto v = flatten(row);
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            out << (i ? "," : "") << buf;
        }
        out << '\n';
    }
}

inline TrajectoryLog read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV trajectory");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    TrajectoryLog log;
    log.n_agents = agents_from_columns(header.size());
    if (header != log_columns(log.n_agents)) throw std::runtime_error("unexpected CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            errno = 0;
            char* end = nullptr;
            const double x = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
                throw std::runtime_error("bad number '" + cell + "' in CSV trajectory");
            }
            v.push_back(x);
        }
        log.rows.push_back(unflatten(v, log.n_agents));
    }
    return log;
}

// ---------------------------------------------------------------------------
// JSON: {"format", "version", "n_agents", "columns", "rows"}; NaN is null.

inline nlohmann::json to_json(const TrajectoryLog& log) {
    nlohmann::json j;
    j["format"] = "spherecbf-trajectory";
    j["version"] = 1;
    j["n_agents"] = log.n_agents;
    j["columns"] = log_columns(log.n_agents);
    j["rows"] = nlohmann::json::array();
    for (const auto& row : log.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (double x : flatten(row)) r.push_back(std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x));
        j["rows"].push_back(std::move(r));
    }
    return j;
}

inline TrajectoryLog from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "spherecbf-trajectory") throw std::runtime_error("not a spherecbf trajectory");
    TrajectoryLog log;
    log.n_agents = j.at("n_agents").get<int>();
    for (const auto& r : j.at("rows")) {
        std::vector<double> v;
        v.reserve(r.size());
        for (const auto& x : r) v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
        log.rows.push_back(unflatten(v, log.n_agents));
    }
    return log;
}

enum class LogFormat { csv, json };

inline LogFormat parse_log_format(const std::string& s) {
    if (s == "csv") return LogFormat::csv;
    if (s == "json") return LogFormat::json;
    throw std::invalid_argument("unknown format '" + s + "' (expected csv or json)");
}

inline void export_log(const TrajectoryLog& log, const std::string& path, LogFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    if (format == LogFormat::csv) {
        write_csv(log, out);
    } else {
        out << to_json(log).dump() << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline TrajectoryLog load_log(const std::string& path, LogFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    if (format == LogFormat::csv) return read_csv(in);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace spherecbf
