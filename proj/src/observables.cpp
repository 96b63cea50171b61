#include "geodist/observables.hpp"

#include <cmath>
#include <cstdio>

namespace geodist {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double bump_profile(double x, double w) {
    const double xx = x * x;
    const double ww = w * w;
    if (xx >= ww) return 0.0;
    return std::exp(1.0 - ww / (ww - xx));
}

} // namespace

TestFunction constant_function(double c) {
    TestFunction f;
    f.id = "const:" + fmt(c);
    f.eval = [c](const SurfacePoint&) { return c; };
    f.exact_integral = c;
    return f;
}

TestFunction cusp_indicator(double Y, double smoothing) {
    if (Y < 1.0) throw std::invalid_argument("cusp_indicator: Y must be >= 1");
    if (smoothing < 0.0) throw std::invalid_argument("cusp_indicator: smoothing must be >= 0");
    TestFunction f;
    if (smoothing == 0.0) {
        f.id = "cusp:" + fmt(Y);
        f.eval = [Y](const SurfacePoint& p) { return p.z.imag() > Y ? 1.0 : 0.0; };
        f.exact_integral = 3.0 / (kPi * Y);
    } else {
        f.id = "cusp:" + fmt(Y) + ":s" + fmt(smoothing);
        const double s = smoothing;
        f.eval = [Y, s](const SurfacePoint& p) {
            const double y = p.z.imag();
            if (y <= Y) return 0.0;
            if (y >= Y + s) return 1.0;
            return (y - Y) / s;
        };
        // (3/pi) [ (log(1 + s/Y) + Y/(Y+s) - 1)/s + 1/(Y+s) ]
        f.exact_integral =
            (3.0 / kPi) * ((std::log1p(s / Y) + Y / (Y + s) - 1.0) / s + 1.0 / (Y + s));
    }
    return f;
}

TestFunction tube_bump(std::shared_ptr<const OrbitTube> tube, double r) {
    if (!(r > 0)) throw std::invalid_argument("tube_bump: radius must be positive");
    if (r > std::min(1.0, kDistanceTrustRadius)) {
        throw RadiusTooLargeError("tube_bump: radius exceeds the trust radius");
    }
    if (tube->radius + 1e-12 < r) {
        throw std::invalid_argument("tube_bump: tube polyline narrower than the bump radius");
    }
    TestFunction f;
    f.id = "bump:d" + std::to_string(tube->orbit.d.value) + ":r" + fmt(r);
    f.support_radius = r;
    const double width = r / 2.0;
    f.eval = [tube, r, width](const SurfacePoint& p) {
        OrbitProbe probe;
        const double lb = distance_to_orbit(p, *tube, r, &probe);
        if (lb >= r || !probe.exact_path) return 0.0;
        // Factor the displacement h = orbit_point^{-1} p as
        // a_tau u+(s1) u-(s2); the flow component tau is tangential and the
        // bump only sees the transverse coordinates.
        Mat2 h = probe.displacement.inv_unimodular();
        if (h.trace() < 0) h = -h;
        if (!(h.m11 > 0)) return 0.0;
        const double s2 = h.m10 / h.m11;
        const double s1 = h.m01 * h.m11;
        return bump_profile(s1, width) * bump_profile(s2, width);
    };
    // Probes concentrated on and near the tube for derivative estimation.
    f.probe_hint = [tube, r](Rng& rng) {
        const auto& samples = tube->samples;
        const SurfacePoint& base = samples[rng.below(samples.size())];
        const double s1 = rng.uniform(-r, r);
        const double s2 = rng.uniform(-r, r);
        Mat2 g = (base.frame * upper_unipotent(s1)) * lower_unipotent(s2);
        g.rescale_det();
        return fold(g);
    };
    return f;
}

TestFunction tube_bump(const ClosedGeodesic& P, double r) {
    if (r > std::min(1.0, kDistanceTrustRadius)) {
        throw RadiusTooLargeError("tube_bump: radius exceeds the trust radius");
    }
    return tube_bump(std::make_shared<OrbitTube>(make_tube(P, r)), r);
}

double smoothness_estimate(const TestFunction& f) {
    // Fixed probe budget and seed; estimates are comparable across calls.
    constexpr std::size_t kHaarProbes = 256;
    constexpr std::size_t kHintProbes = 256;
    Rng rng(0x5e1fc0de);
    double h = 1e-3;
    if (f.support_radius) h = std::min(h, *f.support_radius / 20.0);

    double sup = 0.0;
    auto probe_at = [&](const SurfacePoint& p) {
        const double f0 = f.eval(p);
        const Mat2 dirs[3] = {diag_flow(h), upper_unipotent(h), lower_unipotent(h)};
        const Mat2 dirs_m[3] = {diag_flow(-h), upper_unipotent(-h), lower_unipotent(-h)};
        for (int k = 0; k < 3; ++k) {
            Mat2 gp = p.frame * dirs[k];
            Mat2 gm = p.frame * dirs_m[k];
            gp.rescale_det();
            gm.rescale_det();
            const double fp = f.eval(fold(gp));
            const double fm = f.eval(fold(gm));
            const double d1 = std::abs(fp - fm) / (2.0 * h);
            const double d2 = std::abs(fp - 2.0 * f0 + fm) / (h * h);
            sup = std::max(sup, std::max(d1, d2));
        }
    };
    for (std::size_t i = 0; i < kHaarProbes; ++i) probe_at(haar_sample(rng));
    if (f.probe_hint) {
        for (std::size_t i = 0; i < kHintProbes; ++i) probe_at(f.probe_hint(rng));
    }
    return sup;
}

MonteCarloValue haar_integral_via_sampling(const std::function<double(const SurfacePoint&)>& f,
                                           std::size_t n_samples, const Rng& rng) {
    if (n_samples < 2) throw std::invalid_argument("haar_integral: need at least 2 samples");
    constexpr std::size_t kBatch = 65536;
    const std::size_t n_batches = (n_samples + kBatch - 1) / kBatch;
    std::vector<double> sums(n_batches, 0.0), sqsums(n_batches, 0.0);
    run_indexed(n_batches, [&](std::size_t bi) {
        Rng local = rng.derive("haar_integral", bi);
        const std::size_t lo = bi * kBatch;
        const std::size_t hi = std::min(n_samples, lo + kBatch);
        KahanSum s, s2;
        for (std::size_t i = lo; i < hi; ++i) {
            const double v = f(haar_sample(local));
            s.add(v);
            s2.add(v * v);
        }
        sums[bi] = s.value();
        sqsums[bi] = s2.value();
    });
    KahanSum s, s2;
    for (std::size_t bi = 0; bi < n_batches; ++bi) { s.add(sums[bi]); s2.add(sqsums[bi]); }
    MonteCarloValue out;
    out.n_samples = n_samples;
    const double n = static_cast<double>(n_samples);
    out.value = s.value() / n;
    const double var = std::max(0.0, (s2.value() - n * out.value * out.value) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
    return out;
}

MonteCarloValue haar_integral(const TestFunction& f, std::size_t n_samples, const Rng& rng) {
    if (f.exact_integral) {
        MonteCarloValue out;
        out.value = *f.exact_integral;
        out.std_error = 0.0;
        out.n_samples = 0;
        out.exact = true;
        return out;
    }
    return haar_integral_via_sampling(f.eval, n_samples, rng);
}

} // namespace geodist
