#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "spherecbf/errors.hpp"

namespace spherecbf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

/// Unit basis axis e3; the body z-axis points along the sphere radius.
inline Vec3 e3() { return Vec3::UnitZ(); }

/**
 * @brief Element of SO(3).
 *
 * Construction through from_matrix() checks orthonormality and the
 * determinant; everything produced by the exponential map or by products of
 * valid rotations is trusted without re-checking.
 */
class Rotation {
public:
    static constexpr double kTolerance = 1e-9;

    Rotation() : m_(Mat3::Identity()) {}

    static Rotation identity() { return Rotation(); }

    static Rotation from_matrix(const Mat3& m, double tol = kTolerance) {
        if (!m.allFinite()) {
            throw std::invalid_argument("rotation matrix has non-finite entries");
        }
        const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
        const double det = m.determinant();
        if (ortho > tol || std::abs(det - 1.0) > tol) {
            throw std::invalid_argument("matrix is not in SO(3): |R^T R - I|_F = " +
                                        std::to_string(ortho) +
                                        ", det = " + std::to_string(det));
        }
        return Rotation(m);
    }

    /// No validation. For matrices that are rotations by construction.
    static Rotation unchecked(const Mat3& m) { return Rotation(m); }

    static Rotation about_x(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        Mat3 m;
        m << 1, 0, 0,
             0, c, -s,
             0, s, c;
        return Rotation(m);
    }

    static Rotation about_y(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        Mat3 m;
        m << c, 0, s,
             0, 1, 0,
             -s, 0, c;
        return Rotation(m);
    }

    static Rotation about_z(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        Mat3 m;
        m << c, -s, 0,
             s, c, 0,
             0, 0, 1;
        return Rotation(m);
    }

    const Mat3& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }

    Rotation transpose() const { return Rotation(m_.transpose()); }
    Rotation inverse() const { return transpose(); }

    Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }
    Vec3 operator*(const Vec3& v) const { return m_ * v; }

    bool operator==(const Rotation& rhs) const { return m_ == rhs.m_; }

private:
    explicit Rotation(const Mat3& m) : m_(m) {}

    Mat3 m_;
};

/// Relative attitude of j seen from i: R_i^T R_j.
inline Rotation relative(const Rotation& ri, const Rotation& rj) { return ri.transpose() * rj; }

/// ||R^T R - I||_F
inline double orthonormality_error(const Rotation& r) {
    return (r.matrix().transpose() * r.matrix() - Mat3::Identity()).norm();
}

inline double frobenius_distance(const Rotation& a, const Rotation& b) {
    return (a.matrix() - b.matrix()).norm();
}

/// Cross-product matrix: hat(a) * b == a.cross(b).
inline Mat3 hat(const Vec3& a) {
    Mat3 s;
    s << 0, -a.z(), a.y(),
         a.z(), 0, -a.x(),
         -a.y(), a.x(), 0;
    return s;
}

inline Vec3 vee(const Mat3& s) {
    if ((s + s.transpose()).norm() > 1e-9) {
        throw std::invalid_argument("vee: matrix is not skew-symmetric");
    }
    return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

/// Rodrigues formula I + sin(t) K + (1 - cos(t)) K^2 for a unit axis.
inline Rotation exp_so3(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (!(std::abs(n - 1.0) <= 1e-9)) {
        throw std::invalid_argument("exp_so3: axis must be unit length");
    }
    const Mat3 k = hat(axis);
    return Rotation::unchecked(Mat3::Identity() + std::sin(angle) * k +
                               (1.0 - std::cos(angle)) * (k * k));
}

/// Exponential of a rotation vector (axis scaled by angle).
inline Rotation exp_map(const Vec3& rotvec) {
    const double angle = rotvec.norm();
    if (angle == 0.0) {
        return Rotation::identity();
    }
    return exp_so3(rotvec / angle, angle);
}

/// vee((R - R^T) / 2), which equals axis * sin(angle).
inline Vec3 sk_vee(const Rotation& r) {
    const Mat3& m = r.matrix();
    return Vec3(0.5 * (m(2, 1) - m(1, 2)),
                0.5 * (m(0, 2) - m(2, 0)),
                0.5 * (m(1, 0) - m(0, 1)));
}

namespace detail {
inline void require_radius(double rho, const char* who) {
    if (!(rho > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": rho must be positive");
    }
}
}  // namespace detail

/// Arc length between the two sphere points whose relative attitude is r_ij.
inline double geodesic_distance(const Rotation& r_ij, double rho) {
    detail::require_radius(rho, "geodesic_distance");
    const double c = std::clamp(r_ij(2, 2), -1.0, 1.0);
    return rho * std::acos(c);
}

/// p = rho R e3
inline Vec3 embed_position(const Rotation& r, double rho) {
    detail::require_radius(rho, "embed_position");
    return rho * r.matrix().col(2);
}

/// Translational body velocity -rho hat(e3) omega = [rho w_y, -rho w_x, 0].
inline Vec3 body_velocity(const Vec3& omega, double rho) {
    detail::require_radius(rho, "body_velocity");
    return Vec3(rho * omega.y(), -rho * omega.x(), 0.0);
}

// ---------------------------------------------------------------------------
// XYZ (roll-pitch-yaw) chart: R = Rx(phi) Ry(psi) Rz(eta).

struct EulerXYZ {
    double phi = 0.0;
    double psi = 0.0;
    double eta = 0.0;

    Vec3 as_vector() const { return Vec3(phi, psi, eta); }
};

inline constexpr double kGimbalMargin = 1e-6;

inline Rotation euler_to_rotation(const EulerXYZ& z) {
    return Rotation::about_x(z.phi) * Rotation::about_y(z.psi) * Rotation::about_z(z.eta);
}

inline EulerXYZ rotation_to_euler(const Rotation& r) {
    const Mat3& m = r.matrix();
    const double cos_psi = std::hypot(m(1, 2), m(2, 2));
    if (cos_psi < kGimbalMargin) {
        throw SingularChartError("rotation_to_euler: |cos psi| below gimbal margin");
    }
    EulerXYZ z;
    z.psi = std::atan2(m(0, 2), cos_psi);
    z.phi = std::atan2(-m(1, 2), m(2, 2));
    z.eta = std::atan2(-m(0, 1), m(0, 0));
    if (z.eta >= kPi) {
        z.eta -= 2.0 * kPi;
    }
    return z;
}

/// g(zeta) with zeta_dot = g(zeta) omega for body angular velocity omega.
inline Mat3 euler_rate_matrix(const EulerXYZ& z) {
    const double cp = std::cos(z.psi);
    if (std::abs(cp) < kGimbalMargin) {
        throw SingularChartError("euler_rate_matrix: |cos psi| below gimbal margin");
    }
    const double tp = std::tan(z.psi);
    const double ce = std::cos(z.eta), se = std::sin(z.eta);
    Mat3 g;
    g << ce / cp, -se / cp, 0,
         se, ce, 0,
         -ce * tp, se * tp, 1;
    return g;
}

}  // namespace spherecbf
