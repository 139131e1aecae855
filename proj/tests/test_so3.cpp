#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spherecbf/so3.hpp"
#include "test_support.hpp"

using namespace spherecbf;
using namespace spherecbf::testutil;

TEST(Hat, MatchesCrossProductMatrix) {
    Mat3 expected;
    expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
    EXPECT_EQ(hat(Vec3(1, 2, 3)), expected);
    EXPECT_EQ(hat(Vec3::Zero()), Mat3::Zero());
    const Vec3 a(0.3, -1.2, 0.5);
    EXPECT_LT((hat(a) * a).norm(), 1e-15);
}

TEST(Vee, InvertsHat) {
    Mat3 s;
    s << 0, -3, 2, 3, 0, -1, -2, 1, 0;
    EXPECT_EQ(vee(s), Vec3(1, 2, 3));
    EXPECT_EQ(vee(Mat3::Zero()), Vec3::Zero());
    EXPECT_THROW(vee(Mat3::Identity()), std::invalid_argument);
}

TEST(Vee, RoundTripProperty) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 a = random_vec(rng, 5.0);
        EXPECT_EQ(vee(hat(a)), a);
        const Vec3 b = random_vec(rng);
        EXPECT_LT((hat(a) * b - a.cross(b)).norm(), 1e-14);
    }
}

TEST(ExpSo3, BasisCases) {
    Mat3 rz;
    rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    EXPECT_LT(max_abs(exp_so3(Vec3::UnitZ(), kPi / 2).matrix() - rz), 1e-15);
    EXPECT_EQ(exp_so3(Vec3(0.6, 0.0, 0.8), 0.0).matrix(), Mat3::Identity());
    EXPECT_LT(max_abs(exp_so3(Vec3::UnitX(), kPi).matrix() - Vec3(1, -1, -1).asDiagonal().toDenseMatrix()), 1e-15);
    EXPECT_THROW(exp_so3(Vec3(1, 1, 0), 0.2), std::invalid_argument);
}

TEST(ExpSo3, ProducesRotationsAgreeingWithAngleAxis) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ang(-2 * kPi, 2 * kPi);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 axis = random_unit(rng);
        const double th = ang(rng);
        const Rotation r = exp_so3(axis, th);
        EXPECT_LT(orthonormality_error(r), 1e-14);
        EXPECT_NEAR(r.matrix().determinant(), 1.0, 1e-14);
        EXPECT_LT(max_abs(r.matrix() - Eigen::AngleAxisd(th, axis).toRotationMatrix()), 1e-14);
        EXPECT_LT((r * axis - axis).norm(), 1e-14);
    }
}

TEST(Rotation, FromMatrixRejectsNonRotations) {
    EXPECT_THROW(Rotation::from_matrix(2.0 * Mat3::Identity()), std::invalid_argument);
    EXPECT_THROW(Rotation::from_matrix(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()), std::invalid_argument);
    EXPECT_NO_THROW(Rotation::from_matrix(Rotation::about_y(0.4).matrix()));
}

TEST(SkVee, Examples) {
    EXPECT_EQ(sk_vee(Rotation::identity()), Vec3::Zero());
    EXPECT_LT((sk_vee(Rotation::about_z(kPi / 2)) - Vec3(0, 0, 1)).norm(), 1e-15);
    // sin(0.3), evaluated independently
    EXPECT_NEAR(sk_vee(Rotation::about_x(0.3)).x(), 0.29552020666133955, 1e-16);
    EXPECT_EQ(sk_vee(Rotation::about_x(0.3)).tail<2>(), Eigen::Vector2d::Zero());
}

TEST(SkVee, EqualsAxisTimesSineProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 axis = random_unit(rng);
        const double th = ang(rng);
        EXPECT_LT((sk_vee(exp_so3(axis, th)) - std::sin(th) * axis).norm(), 1e-14);
    }
}

TEST(Geodesic, Examples) {
    EXPECT_EQ(geodesic_distance(Rotation::identity(), 1.0), 0.0);
    EXPECT_NEAR(geodesic_distance(Rotation::about_x(kPi / 2), 1.0), kPi / 2, 1e-15);
    EXPECT_NEAR(geodesic_distance(Rotation::about_x(kPi), 2.0), 2 * kPi, 1e-15);
    EXPECT_THROW(geodesic_distance(Rotation::identity(), 0.0), std::invalid_argument);
}

TEST(Geodesic, SymmetricAndBounded) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 1000; ++k) {
        const Rotation a = random_rotation(rng), b = random_rotation(rng);
        const double d = geodesic_distance(relative(a, b), 1.5);
        EXPECT_NEAR(d, geodesic_distance(relative(b, a), 1.5), 1e-12);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.5 * kPi);
        // equals the great-circle angle between the embedded points
        const Vec3 pa = embed_position(a, 1.0), pb = embed_position(b, 1.0);
        EXPECT_NEAR(d, 1.5 * std::atan2(pa.cross(pb).norm(), pa.dot(pb)), 1e-7);
    }
}

TEST(Embed, Examples) {
    EXPECT_EQ(embed_position(Rotation::identity(), 1.0), Vec3(0, 0, 1));
    EXPECT_LT((embed_position(Rotation::about_x(kPi / 2), 1.0) - Vec3(0, -1, 0)).norm(), 1e-15);
    EXPECT_EQ(embed_position(Rotation::identity(), 2.5), Vec3(0, 0, 2.5));
    EXPECT_THROW(embed_position(Rotation::identity(), -1.0), std::invalid_argument);
}

TEST(BodyVelocity, Examples) {
    EXPECT_EQ(body_velocity(Vec3(1, 2, 3), 2.0), Vec3(4, -2, 0));
    EXPECT_EQ(body_velocity(Vec3(0, 0, 5), 0.7), Vec3::Zero());
    EXPECT_EQ(body_velocity(Vec3::Zero(), 1.0), Vec3::Zero());
}

TEST(BodyVelocity, MatchesMinusRhoHatE3Omega) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 w = random_vec(rng, 3.0);
        EXPECT_LT((body_velocity(w, 1.7) - (-1.7 * hat(e3()) * w)).norm(), 1e-14);
    }
}

TEST(EulerChart, Examples) {
    EXPECT_EQ(euler_to_rotation({0, 0, 0}).matrix(), Mat3::Identity());
    EXPECT_LT(max_abs(euler_to_rotation({0.3, 0, 0}).matrix() - Rotation::about_x(0.3).matrix()), 1e-16);
    EXPECT_LT(max_abs(euler_to_rotation({0, 0, kPi / 2}).matrix() - Rotation::about_z(kPi / 2).matrix()), 1e-16);

    const EulerXYZ z0 = rotation_to_euler(Rotation::identity());
    EXPECT_EQ(z0.as_vector(), Vec3::Zero());
    EXPECT_LT((rotation_to_euler(Rotation::about_x(0.3)).as_vector() - Vec3(0.3, 0, 0)).norm(), 1e-15);
    EXPECT_THROW(rotation_to_euler(Rotation::about_y(kPi / 2)), SingularChartError);
}

TEST(EulerChart, RoundTripInChartInterior) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> a(-kPi + 1e-3, kPi - 1e-3), b(-kPi / 2 + 1e-2, kPi / 2 - 1e-2);
    for (int k = 0; k < 1000; ++k) {
        const EulerXYZ z{a(rng), b(rng), a(rng)};
        const EulerXYZ back = rotation_to_euler(euler_to_rotation(z));
        EXPECT_LT((back.as_vector() - z.as_vector()).norm(), 1e-9);
    }
}

TEST(EulerRateMatrix, Examples) {
    EXPECT_LT(max_abs(euler_rate_matrix({1.234, 0, 0}) - Mat3::Identity()), 1e-16);
    Mat3 expected;
    expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    EXPECT_LT(max_abs(euler_rate_matrix({0, 0, kPi / 2}) - expected), 1e-15);
    EXPECT_THROW(euler_rate_matrix({0, kPi / 2, 0}), SingularChartError);
}

TEST(EulerRateMatrix, MatchesFiniteDifferenceOfChart) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> a(-3.0, 3.0), b(-1.4, 1.4);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const EulerXYZ z{a(rng), b(rng), a(rng)};
        const Rotation r = euler_to_rotation(z);
        const Vec3 w = random_vec(rng);
        const Vec3 zp = rotation_to_euler(r * exp_map(w * h)).as_vector();
        const Vec3 zm = rotation_to_euler(r * exp_map(-w * h)).as_vector();
        const Vec3 fd = (zp - zm) / (2 * h);
        const Vec3 an = euler_rate_matrix(z) * w;
        EXPECT_LT((fd - an).norm(), 1e-4 * std::max(1.0, an.norm()));
    }
}
