#include "geodist/geodesic.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace geodist;

namespace {

ClosedGeodesic lift_class(i64 d, int cls = 0) {
    const ClassGroup g = class_group(Discriminant::of(d));
    return lift_geodesic(g.cycles[static_cast<std::size_t>(cls)], regulator(Discriminant::of(d)));
}

} // namespace

TEST_CASE("lift endpoints and periods") {
    const ClosedGeodesic g5 = lift_class(5);
    CHECK(g5.w == doctest::Approx((-1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    CHECK(g5.w_conj == doctest::Approx((-1.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    CHECK(g5.w > g5.w_conj);
    CHECK(g5.period == doctest::Approx(1.9248473002).epsilon(1e-8));

    // Galois conjugation swaps the endpoints: w(sqrt d -> -sqrt d) = w_conj
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 5000);
        const ClosedGeodesic g = lift_class(d);
        const double sq = std::sqrt(static_cast<double>(d));
        const double a = g.cycle.forms.front().a.convert_to<double>();
        const double b = g.cycle.forms.front().b.convert_to<double>();
        CHECK(g.w == doctest::Approx((-b + sq) / (2 * a)));
        CHECK(g.w_conj == doctest::Approx((-b - sq) / (2 * a)));
        CHECK(g.w > g.w_conj);
    }

    // both classes of d = 40 share the period
    const ClosedGeodesic a40 = lift_class(40, 0);
    const ClosedGeodesic b40 = lift_class(40, 1);
    CHECK(a40.period == doctest::Approx(7.2737858369).epsilon(1e-9));
    CHECK(a40.period == b40.period);
}

TEST_CASE("segment times partition the period") {
    Rng rng(18);
    for (int trial = 0; trial < 25; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 10000);
        const ClassGroup g = class_group(Discriminant::of(d));
        const RegulatorData reg = regulator(Discriminant::of(d));
        for (const auto& cyc : g.cycles) {
            const ClosedGeodesic geo = lift_geodesic(cyc, reg);
            double acc = 0.0;
            for (const auto& seg : geo.segments) {
                CHECK(seg.tau > 0.0);
                CHECK(seg.t_start == doctest::Approx(acc).epsilon(1e-12));
                acc += seg.tau;
            }
            CHECK(acc == doctest::Approx(geo.period).epsilon(1e-12));
        }
    }
}

TEST_CASE("conjugation to the diagonal flow") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 5000);
        const ClassGroup g = class_group(Discriminant::of(d));
        const PellSolution pell = fundamental_pell(Discriminant::of(d));
        const RegulatorData reg = regulator_from(pell, Discriminant::of(d));
        for (const auto& cyc : g.cycles) {
            const ClosedGeodesic geo = lift_geodesic(cyc, reg);
            CHECK(conjugation_defect(geo, pell) <= 1e-8);
        }
    }
}

TEST_CASE("closure after one period") {
    // the d = 5 orbit returns to its base point
    const ClosedGeodesic g5 = lift_class(5);
    const PellSolution p5 = fundamental_pell(Discriminant::of(5));
    CHECK(closure_defect(g5, p5) <= 1e-6);

    Rng rng(20);
    for (int trial = 0; trial < 12; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 10000);
        const ClassGroup g = class_group(Discriminant::of(d));
        const PellSolution pell = fundamental_pell(Discriminant::of(d));
        const RegulatorData reg = regulator_from(pell, Discriminant::of(d));
        const std::size_t cls = rng.below(static_cast<std::uint64_t>(g.order()));
        const ClosedGeodesic geo = lift_geodesic(g.cycles[cls], reg);
        CHECK(closure_defect(geo, pell) <= 1e-6);
    }
}

TEST_CASE("double-precision flow closes up for a short orbit") {
    const ClosedGeodesic g5 = lift_class(5);
    const SurfacePoint base = g5.base_point();
    const SurfacePoint back = flow(base, g5.period);
    CHECK(distance(base, back).value <= 1e-6);
}

TEST_CASE("integrate_along basics") {
    const ClosedGeodesic g5 = lift_class(5);
    auto one = [](const SurfacePoint&) { return 1.0; };
    CHECK(integrate_along(g5, one, 1e-2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(integrate_along(g5, one, g5.period), StepTooCoarseError);

    // quadrature self-convergence on an indicator
    auto f = [](const SurfacePoint& p) { return p.z.imag() > 1.0 ? 1.0 : 0.0; };
    const double coarse = integrate_along(g5, f, 1e-2);
    const double dense = integrate_along(g5, f, 1e-5);
    CHECK(std::abs(coarse - dense) <= 1e-3);

    // deterministic across calls
    CHECK(integrate_along(g5, f, 1e-3) == integrate_along(g5, f, 1e-3));
}

TEST_CASE("walker points lie on the orbit (flow cross-check)") {
    const ClosedGeodesic g40 = lift_class(40, 1);
    OrbitWalker walker(g40, 0.05);
    const SurfacePoint base = g40.base_point();
    SurfacePoint p;
    std::size_t k = 0;
    while (walker.next(p)) {
        if (k % 17 == 0) {
            const double t = (static_cast<double>(k) + 0.5) * walker.step_size();
            if (t < 12.0) { // double-precision flow is reliable on this horizon
                const SurfacePoint q = flow(base, t);
                CHECK(distance(q, p).value <= 1e-7);
            }
        }
        ++k;
    }
    CHECK(k == walker.size());
}

TEST_CASE("orbit tubes") {
    const ClosedGeodesic g5 = lift_class(5);
    const OrbitTube tube = make_tube(g5, 0.05);
    CHECK(tube.delta <= 0.05 / 10.0 + 1e-15);
    CHECK(tube.samples.size() >= 300);
    CHECK(!tube.arcs.empty());
    // every sample is on the orbit: distance_to_orbit of a sample is ~ 0
    for (std::size_t i = 0; i < tube.samples.size(); i += 37) {
        CHECK(distance_to_orbit(tube.samples[i], tube) <= tube.delta);
    }
    // flowing the base point lands on the orbit too
    const SurfacePoint moved = flow(g5.base_point(), 0.37 * g5.period);
    CHECK(distance_to_orbit(moved, tube) <= tube.delta);
}

TEST_CASE("distance_to_orbit equals the unpruned polyline scan") {
    const ClosedGeodesic g5 = lift_class(5);
    const OrbitTube tube = make_tube(g5, 0.08);
    Rng rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        SurfacePoint p;
        if (trial % 3 == 0) {
            // points near the orbit
            const SurfacePoint s = tube.samples[rng.below(tube.samples.size())];
            Mat2 g = (s.frame * upper_unipotent(rng.uniform(-0.1, 0.1))) *
                     lower_unipotent(rng.uniform(-0.1, 0.1));
            g.rescale_det();
            p = fold(g);
        } else {
            const double x = rng.uniform(-0.5, 0.5);
            const double y = std::exp(rng.uniform(-0.05, 1.0));
            if (x * x + y * y < 1.0) continue;
            p = fold(frame_from({x, y}, rng.uniform(0.0, 6.28)));
        }
        double brute = 1e300;
        for (const auto& s : tube.samples) brute = std::min(brute, distance(p, s).value);
        brute = std::max(0.0, brute - tube.delta / 2.0);
        const double fast = distance_to_orbit(p, tube);
        CHECK(fast == doctest::Approx(brute).epsilon(1e-12));
        // early-exit path still returns a valid lower bound
        const double early = distance_to_orbit(p, tube, 0.02);
        CHECK(early <= brute + 1e-12);
        if (early < 0.02) CHECK(early == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("distance_to_orbit far from the orbit") {
    const ClosedGeodesic g5 = lift_class(5);
    const OrbitTube tube = make_tube(g5, 0.05);
    const SurfacePoint cusp_point = fold(frame_from({0.1, 50.0}, 1.0));
    const double lb = distance_to_orbit(cusp_point, tube);
    CHECK(lb > kDistanceTrustRadius);
}
