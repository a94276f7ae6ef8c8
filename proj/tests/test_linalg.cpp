#include "doctest.h"

#include "qlc/linalg.hpp"
#include "test_util.hpp"

using namespace qlc;
using testutil::near;

TEST_CASE("canonical form and rotations") {
    const Mat j = canonical_j(2);
    CHECK(j.rows() == 4);
    CHECK(near(j * j, -Mat::Identity(4, 4)));
    CHECK(near(j.transpose(), (-j).eval()));

    const Eigen::Matrix2d r = rotation2(0.3);
    CHECK(near(r * r.transpose(), Mat::Identity(2, 2)));
    CHECK(near(rotation2(0.0), Mat::Identity(2, 2)));
}

TEST_CASE("spectral abscissa and Hurwitz test") {
    Mat a(2, 2);
    a << -1.0, 5.0, 0.0, -0.25;
    CHECK(spectral_abscissa(a) == doctest::Approx(-0.25));
    CHECK(is_hurwitz(a));
    a(1, 1) = 1e-12;
    CHECK(!is_hurwitz(a));
}

TEST_CASE("lyapunov solver on closed forms") {
    // scalar: -2x + w = 0
    Mat a(1, 1), w(1, 1);
    a << -1.0;
    w << 3.0;
    CHECK(lyapunov_solve(a, w)(0, 0) == doctest::Approx(1.5));

    // isotropic decay: A = -(k/2) I, W = k(1+2kn) I -> sigma = (1+2kn) I
    const double k = 0.03, kn = 4.0;
    const Mat a2 = -(k / 2.0) * Mat::Identity(2, 2);
    const Mat w2 = k * (1.0 + 2.0 * kn) * Mat::Identity(2, 2);
    CHECK(near(lyapunov_solve(a2, w2), (1.0 + 2.0 * kn) * Mat::Identity(2, 2),
               1e-11));
}

TEST_CASE("lyapunov solver property: random stable systems") {
    testutil::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + (trial % 5);
        Mat a = rng.gaussian(n, n);
        a -= (spectral_abscissa(a) + 0.5) * Mat::Identity(n, n);
        const Mat g = rng.gaussian(n, n);
        const Mat w = g * g.transpose();
        const Mat x = lyapunov_solve(a, w);
        CHECK((a * x + x * a.transpose() + w).norm() <=
              1e-10 * std::max(1.0, w.norm()));
        CHECK(near(x, x.transpose().eval(), 1e-12));
    }
}

TEST_CASE("riccati solver on closed forms") {
    Mat a(1, 1), b(1, 1), q(1, 1), r(1, 1);
    a << 0.0;
    b << 1.0;
    q << 1.0;
    r << 1.0;
    CHECK(care_solve(a, b, q, r)(0, 0) == doctest::Approx(1.0));

    a << -1.0;
    q << 0.0;
    CHECK(care_solve(a, b, q, r)(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("riccati solver property: residual and stabilization") {
    testutil::Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = 2 + (trial % 3);
        const Mat a = rng.gaussian(n, n);
        const Mat b = rng.gaussian(n, 1 + (trial % 2));
        const Mat gq = rng.gaussian(n, n);
        const Mat q = gq * gq.transpose() + 0.1 * Mat::Identity(n, n);
        const Mat r = Mat::Identity(b.cols(), b.cols());
        const Mat x = care_solve(a, b, q, r);
        const Mat gain = b * r.inverse() * b.transpose() * x;
        const Mat resid = a.transpose() * x + x * a + q - x * gain;
        const double scale = std::max({1.0, q.norm(), (x * gain).norm()});
        CHECK(resid.norm() <= 1e-9 * scale);
        CHECK(is_hurwitz(a - gain, 0.0));
    }
}

TEST_CASE("riccati solver rejects unstabilizable problems") {
    Mat a(1, 1), b(1, 1), q(1, 1), r(1, 1);
    a << 1.0;
    b << 0.0;
    q << 1.0;
    r << 1.0;
    CHECK_THROWS_AS(care_solve(a, b, q, r), NoStabilizingSolution);
}
