#pragma once

#include <stdexcept>
#include <string>

namespace spherecbf {

/// Raised when the Euler chart is evaluated too close to its gimbal boundary.
class SingularChartError : public std::domain_error {
public:
    explicit SingularChartError(const std::string& what) : std::domain_error(what) {}
};

/// Scenario or config file rejected before a run starts.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A per-agent QP came back infeasible during a simulation step.
class SafetyAbort : public std::runtime_error {
public:
    SafetyAbort(const std::string& what, long step, int agent)
        : std::runtime_error(what), step_(step), agent_(agent) {}

    long step() const noexcept { return step_; }
    int agent() const noexcept { return agent_; }

private:
    long step_;
    int agent_;
};

}  // namespace spherecbf
