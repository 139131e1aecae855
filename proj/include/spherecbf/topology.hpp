#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spherecbf/dynamics.hpp"
#include "spherecbf/so3.hpp"

namespace spherecbf {

/// Fixed directed coordination graph. An edge (j, i) means i observes j.
class DirectedGraph {
public:
    DirectedGraph() = default;

    DirectedGraph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n), in_(n) {
        if (n < 0) {
            throw std::invalid_argument("DirectedGraph: negative node count");
        }
        for (const auto& [from, to] : edges) {
            if (from < 0 || from >= n || to < 0 || to >= n) {
                throw std::invalid_argument("DirectedGraph: edge endpoint out of range");
            }
            if (from == to) {
                throw std::invalid_argument("DirectedGraph: self-loop " + std::to_string(from));
            }
            edges_.insert({from, to});
        }
        for (const auto& [from, to] : edges_) {
            in_[to].push_back(from);
        }
    }

    static DirectedGraph cycle(int n) {
        std::vector<std::pair<int, int>> e;
        if (n > 1) {
            for (int i = 0; i < n; ++i) {
                e.emplace_back(i, (i + 1) % n);
            }
        }
        return DirectedGraph(n, e);
    }

    static DirectedGraph complete(int n) {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j) {
                    e.emplace_back(i, j);
                }
            }
        }
        return DirectedGraph(n, e);
    }

    /// Directed cycle plus each remaining ordered pair with probability extra_p.
    static DirectedGraph random_strongly_connected(int n, double extra_p, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::bernoulli_distribution coin(std::clamp(extra_p, 0.0, 1.0));
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    continue;
                }
                const bool on_cycle = (n > 1) && (j == (i + 1) % n);
                if (coin(rng) || on_cycle) {
                    e.emplace_back(i, j);
                }
            }
        }
        return DirectedGraph(n, e);
    }

    int size() const { return n_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    /// In-neighbors {j | (j, i) in E}, ascending.
    const std::vector<int>& neighbors(int i) const {
        if (i < 0 || i >= n_) {
            throw std::out_of_range("neighbors: node " + std::to_string(i) + " out of range");
        }
        return in_[i];
    }

private:
    int n_ = 0;
    std::set<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> in_;  // sorted because edges_ is ordered
};

namespace detail {
inline std::vector<bool> reachable_from(int start, int n, const std::vector<std::vector<int>>& adj) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}
}  // namespace detail

/// Forward and reverse reachability from node 0.
inline bool is_strongly_connected(const DirectedGraph& g) {
    const int n = g.size();
    if (n <= 1) {
        return true;
    }
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (const auto& [from, to] : g.edges()) {
        fwd[from].push_back(to);
        rev[to].push_back(from);
    }
    const auto a = detail::reachable_from(0, n, fwd);
    const auto b = detail::reachable_from(0, n, rev);
    return std::all_of(a.begin(), a.end(), [](bool x) { return x; }) &&
           std::all_of(b.begin(), b.end(), [](bool x) { return x; });
}

struct DistanceGraphParams {
    double awareness = 0.0;  // D_a
    double collision = 0.0;  // D_c
    double rho = 1.0;

    void validate() const {
        if (!(rho > 0.0)) {
            throw std::invalid_argument("DistanceGraphParams: rho must be positive");
        }
        if (!(collision > 0.0 && collision < awareness && awareness < rho * kPi / 2.0)) {
            throw std::invalid_argument(
                "DistanceGraphParams: require 0 < D_c < D_a < rho*pi/2");
        }
    }
};

/// Agents within awareness distance of i (boundary inclusive), ascending.
inline std::vector<int> distance_neighbors(const NetworkState& state, const DistanceGraphParams& params,
                                           int i) {
    params.validate();
    const int n = static_cast<int>(state.size());
    if (i < 0 || i >= n) {
        throw std::out_of_range("distance_neighbors: node out of range");
    }
    std::vector<int> out;
    const Rotation& ri = state.attitude(i);
    for (int j = 0; j < n; ++j) {
        if (j == i) {
            continue;
        }
        if (geodesic_distance(relative(ri, state.attitude(j)), params.rho) <= params.awareness) {
            out.push_back(j);
        }
    }
    return out;
}

}  // namespace spherecbf
