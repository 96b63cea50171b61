#include "geodist/surface.hpp"

#include <doctest.h>

#include <cmath>

using namespace geodist;

namespace {

double hyperbolic_distance(std::complex<double> z1, std::complex<double> z2) {
    const double num = std::norm(z1 - z2);
    const double ch = 1.0 + num / (2.0 * z1.imag() * z2.imag());
    return std::acosh(ch);
}

Mat2 random_frame(Rng& rng) {
    const double x = rng.uniform(-3.0, 3.0);
    const double y = std::exp(rng.uniform(-1.5, 2.0));
    const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    return frame_from({x, y}, theta);
}

} // namespace

TEST_CASE("fold moves z into the fundamental domain") {
    // pure translation
    const SurfacePoint p1 = fold(frame_from({5.0, 1.0}, 1.0));
    CHECK(p1.z.real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p1.z.imag() == doctest::Approx(1.0).epsilon(1e-12));
    // 0.5 + 0.5i folds to i (translate, invert, translate)
    const SurfacePoint p2 = fold(frame_from({0.5, 0.5}, 0.5));
    CHECK(p2.z.real() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p2.z.imag() == doctest::Approx(1.0).epsilon(1e-9));

    Rng rng(1);
    for (int trial = 0; trial < 500; ++trial) {
        const SurfacePoint p = fold(random_frame(rng));
        CHECK(p.z.real() >= -0.5 - 1e-9);
        CHECK(p.z.real() <= 0.5 + 1e-9);
        CHECK(std::norm(p.z) >= 1.0 - 1e-9);
        CHECK(std::abs(p.frame.det() - 1.0) <= 1e-12);
        // z and theta are recomputable from the frame
        const std::complex<double> z = p.frame.act_on_i();
        CHECK(std::abs(z - p.z) <= 1e-9);
    }
}

TEST_CASE("fold is idempotent") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const SurfacePoint p = fold(random_frame(rng));
        const SurfacePoint q = fold(p.frame);
        CHECK(p.frame.m00 == q.frame.m00);
        CHECK(p.frame.m01 == q.frame.m01);
        CHECK(p.frame.m10 == q.frame.m10);
        CHECK(p.frame.m11 == q.frame.m11);
    }
}

TEST_CASE("fold tracks the folding word") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Mat2 g = random_frame(rng);
        Mat2 gamma;
        SurfacePoint p = fold(g, &gamma);
        // gamma * g = canonical frame (up to the det rescale)
        const Mat2 gg = gamma * g;
        CHECK(std::abs(gg.m00 - p.frame.m00) <= 1e-9);
        CHECK(std::abs(gg.m11 - p.frame.m11) <= 1e-9);
        // integer entries
        CHECK(gamma.m00 == std::round(gamma.m00));
        CHECK(gamma.m01 == std::round(gamma.m01));
        CHECK(gamma.m10 == std::round(gamma.m10));
        CHECK(gamma.m11 == std::round(gamma.m11));
        CHECK(std::abs(gamma.det() - 1.0) <= 1e-9);
    }
}

TEST_CASE("flow identity and group law") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const SurfacePoint p = fold(random_frame(rng));
        const SurfacePoint p0 = flow(p, 0.0);
        CHECK(p0.frame.m00 == p.frame.m00);
        const double s = rng.uniform(-2.0, 2.0);
        const double t = rng.uniform(-2.0, 2.0);
        const SurfacePoint a = flow(flow(p, s), t);
        const SurfacePoint b = flow(p, s + t);
        CHECK(std::abs(a.frame.m00 - b.frame.m00) <= 1e-8);
        CHECK(std::abs(a.frame.m01 - b.frame.m01) <= 1e-8);
        CHECK(std::abs(a.frame.m10 - b.frame.m10) <= 1e-8);
        CHECK(std::abs(a.frame.m11 - b.frame.m11) <= 1e-8);
    }
}

TEST_CASE("distance basics") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const SurfacePoint p = fold(random_frame(rng));
        CHECK(distance(p, p).value == doctest::Approx(0.0).epsilon(1e-12));
        // Gamma-invariance through a T-translate
        Mat2 moved = translation_matrix(1.0) * p.frame;
        const SurfacePoint q = fold(moved);
        CHECK(distance(p, q).value <= 1e-9);
        // symmetry to machine precision
        const SurfacePoint r = fold(random_frame(rng));
        const FrameDistance pq = distance(p, r);
        const FrameDistance qp = distance(r, p);
        CHECK(std::abs(pq.value - qp.value) <= 1e-12);
        CHECK(pq.within_trust == (pq.value <= kDistanceTrustRadius));
    }
}

TEST_CASE("frame displacement controls base displacement (pruning constant)") {
    // d_H(i, A.i) <= 3 ||A - I||_F for ||A - I||_F <= 0.6; the pruning in
    // distance_to_orbit relies on this with constant 3.
    Rng rng(6);
    double worst = 0.0;
    for (int trial = 0; trial < 20000; ++trial) {
        Mat2 a = Mat2::identity();
        a = a * upper_unipotent(rng.uniform(-0.3, 0.3));
        a = a * lower_unipotent(rng.uniform(-0.3, 0.3));
        a = a * diag_flow(rng.uniform(-0.3, 0.3));
        const double phi = rng.uniform(-0.2, 0.2);
        a = a * Mat2{std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi)};
        const double e = std::sqrt(a.dist_to_identity_sq());
        if (e > 0.6 || e < 1e-9) continue;
        const double dh = hyperbolic_distance(a.act_on_i(), {0.0, 1.0});
        worst = std::max(worst, dh / e);
    }
    CHECK(worst > 0.5);
    CHECK(worst < 3.0);
}

TEST_CASE("haar sampler matches exact cusp integrals") {
    Rng rng(20240901);
    const std::size_t n = 200000;
    for (double y_cut : {1.0, 1.5, 2.0, 4.0}) {
        Rng local = rng.derive("haar_test", static_cast<std::uint64_t>(y_cut * 16));
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (haar_sample(local).z.imag() > y_cut) ++hits;
        }
        const double est = static_cast<double>(hits) / static_cast<double>(n);
        const double expect = 3.0 / (3.14159265358979323846 * y_cut);
        const double se = std::sqrt(expect * (1.0 - expect) / static_cast<double>(n));
        CHECK(std::abs(est - expect) <= 3.0 * se);
    }
}

TEST_CASE("haar sampler acceptance rate is the area ratio") {
    // strip area 2/sqrt(3), domain area pi/3
    const double expect = (3.14159265358979323846 / 3.0) / (2.0 / std::sqrt(3.0));
    for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
        Rng rng(seed);
        std::size_t accepted = 0, proposals = 0;
        constexpr double y0 = 0.8660254037844386;
        for (std::size_t i = 0; i < 200000; ++i) {
            const double x = rng.uniform(-0.5, 0.5);
            const double y = y0 / (1.0 - rng.uniform01());
            ++proposals;
            if (x * x + y * y >= 1.0) ++accepted;
        }
        const double rate = static_cast<double>(accepted) / static_cast<double>(proposals);
        CHECK(rate == doctest::Approx(expect).epsilon(0.01));
    }
}

TEST_CASE("degenerate folds throw") {
    // det far from 1 is rejected outright
    CHECK_THROWS_AS(fold(Mat2{2.0, 0.0, 0.0, 1.0}), std::invalid_argument);
    // y underflows once the lower row overflows: a point past float range
    CHECK_THROWS_AS(fold(Mat2{1e-200, 0.0, 0.0, 1e200}), NumericalDegeneracyError);
    // a merely enormous cusp height is still representable and folds fine
    const SurfacePoint p = fold(frame_from({0.3, 1e120}, 0.5));
    CHECK(p.z.imag() == doctest::Approx(1e120));
    CHECK(std::abs(p.z.real()) <= 0.5 + 1e-9);
}
