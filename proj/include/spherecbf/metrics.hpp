#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "spherecbf/safety.hpp"
#include "spherecbf/so3.hpp"

namespace spherecbf {

namespace detail {
inline void require_pairs(std::size_t n, const char* who) {
    if (n < 2) {
        throw std::invalid_argument(std::string(who) + ": needs at least two agents");
    }
}
}  // namespace detail

/// Smallest arc length over unordered pairs.
inline double min_geodesic_distance(std::span<const Rotation> attitudes, double rho) {
    detail::require_pairs(attitudes.size(), "min_geodesic_distance");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < attitudes.size(); ++i) {
        for (std::size_t j = i + 1; j < attitudes.size(); ++j) {
            best = std::min(best, geodesic_distance(relative(attitudes[i], attitudes[j]), rho));
        }
    }
    return best;
}

/// max ||R_i - R_j||_F over pairs.
inline double max_disagreement(std::span<const Rotation> attitudes) {
    detail::require_pairs(attitudes.size(), "max_disagreement");
    double worst = 0.0;
    for (std::size_t i = 0; i < attitudes.size(); ++i) {
        for (std::size_t j = i + 1; j < attitudes.size(); ++j) {
            worst = std::max(worst, frobenius_distance(attitudes[i], attitudes[j]));
        }
    }
    return worst;
}

inline double max_position_gap(std::span<const Rotation> attitudes, double rho) {
    detail::require_pairs(attitudes.size(), "max_position_gap");
    double worst = 0.0;
    for (std::size_t i = 0; i < attitudes.size(); ++i) {
        for (std::size_t j = i + 1; j < attitudes.size(); ++j) {
            worst = std::max(worst, (embed_position(attitudes[i], rho) - embed_position(attitudes[j], rho)).norm());
        }
    }
    return worst;
}

/// min over pairs of the collision barrier h_ij.
inline double min_pairwise_h(std::span<const Rotation> attitudes, const CollisionParams& p) {
    detail::require_pairs(attitudes.size(), "min_pairwise_h");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < attitudes.size(); ++i) {
        for (std::size_t j = i + 1; j < attitudes.size(); ++j) {
            best = std::min(best, pairwise_h(relative(attitudes[i], attitudes[j]), p));
        }
    }
    return best;
}

}  // namespace spherecbf
