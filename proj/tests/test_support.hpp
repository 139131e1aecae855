#pragma once

#include <cmath>
#include <random>

#include "spherecbf/so3.hpp"

namespace spherecbf::testutil {

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return Vec3(u(rng), u(rng), u(rng));
}

inline Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v(g(rng), g(rng), g(rng));
    return v.normalized();
}

/// Haar-uniform rotation from a normalized Gaussian quaternion.
inline Rotation random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    return Rotation::from_matrix(q.toRotationMatrix());
}

/// R with body axis R e3 at angle `tilt` from e3, random azimuth and yaw.
inline Rotation rotation_with_tilt(std::mt19937_64& rng, double tilt) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const double az = u(rng);
    return Rotation::about_z(az) * Rotation::about_x(tilt) * Rotation::about_z(u(rng));
}

inline double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace spherecbf::testutil
