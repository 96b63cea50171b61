#include "geodist/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace geodist {
namespace {

constexpr double kPi = 3.14159265358979323846;

// The frame of a point (z, theta) is determined up to a global sign; pin it
// so canonical representatives are unique and fold is exactly idempotent.
void normalize_frame_sign(Mat2& g, Mat2* gamma) {
    if (g.m11 < 0 || (g.m11 == 0 && g.m10 < 0)) {
        g = -g;
        if (gamma) *gamma = -*gamma;
    }
}

SurfacePoint point_from_canonical_frame(Mat2 g) {
    if (std::abs(g.det() - 1.0) > 1e-14) g.rescale_det();
    SurfacePoint p;
    p.frame = g;
    p.z = g.act_on_i();
    // Flow direction: velocity of t -> g a_t . i at t = 0 is i/(ci+d)^2.
    const double c = g.m10, d = g.m11;
    double theta = std::atan2(d * d - c * c, 2.0 * c * d);
    if (theta < 0) theta += 2.0 * kPi;
    p.theta = theta;
    return p;
}

} // namespace

SurfacePoint fold(Mat2 g, Mat2* gamma_out) {
    if (std::abs(g.det() - 1.0) > 1e-9) {
        throw std::invalid_argument("fold: frame determinant must be 1");
    }
    fold_core<double>(g, gamma_out, 1e-280);
    normalize_frame_sign(g, gamma_out);
    return point_from_canonical_frame(g);
}

SurfacePoint flow(const SurfacePoint& p, double t) {
    if (t == 0.0) return p;
    // Walk in bounded increments; folding between steps keeps entries tame.
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t) / 0.5)));
    const double h = t / n;
    Mat2 g = p.frame;
    for (int i = 0; i < n; ++i) {
        g.flow_right(h);
        fold_core<double>(g, static_cast<Mat2*>(nullptr), 1e-280);
        g.rescale_det();
    }
    normalize_frame_sign(g, nullptr);
    return point_from_canonical_frame(g);
}

Mat2 frame_from(std::complex<double> z, double theta) {
    const double x = z.real(), y = z.imag();
    if (!(y > 0)) throw std::invalid_argument("frame_from: z must be in the upper half plane");
    const double phi = (kPi / 2 - theta) / 2;
    const double sy = std::sqrt(y);
    const Mat2 na{sy, x / sy, 0.0, 1.0 / sy};
    const Mat2 k{std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi)};
    return na * k;
}

const std::vector<Mat2>& gamma_word_set() {
    static const std::vector<Mat2> words = [] {
        const Mat2 gens[3] = {inversion_matrix(), translation_matrix(1.0), translation_matrix(-1.0)};
        std::map<std::array<double, 4>, Mat2> uniq;
        auto insert_with_sign = [&uniq](const Mat2& m) {
            uniq.emplace(std::array<double, 4>{m.m00, m.m01, m.m10, m.m11}, m);
            const Mat2 n = -m;
            uniq.emplace(std::array<double, 4>{n.m00, n.m01, n.m10, n.m11}, n);
        };
        std::vector<Mat2> level{Mat2::identity()};
        insert_with_sign(Mat2::identity());
        for (int len = 1; len <= 3; ++len) {
            std::vector<Mat2> next;
            for (const Mat2& w : level) {
                for (const Mat2& g : gens) {
                    const Mat2 m = w * g;
                    next.push_back(m);
                    insert_with_sign(m);
                }
            }
            level = std::move(next);
        }
        std::vector<Mat2> out;
        out.reserve(uniq.size());
        for (auto& [key, m] : uniq) out.push_back(m);
        return out;
    }();
    return words;
}

FrameDistance distance(const SurfacePoint& p, const SurfacePoint& q) {
    const Mat2 p_inv = p.frame.inv_unimodular();
    double best_sq = std::numeric_limits<double>::infinity();
    for (const Mat2& gamma : gamma_word_set()) {
        const Mat2 a = (p_inv * gamma) * q.frame;
        best_sq = std::min(best_sq, a.dist_to_identity_sq());
    }
    const double v = std::sqrt(best_sq);
    return {v, v <= kDistanceTrustRadius};
}

SurfacePoint haar_sample(Rng& rng) {
    // Base point from the normalized hyperbolic area (3/pi) dx dy / y^2 on
    // the fundamental domain: x uniform, y by inverse CDF of y^-2 truncated
    // at sqrt(3)/2, rejection on |z| >= 1. Direction uniform.
    constexpr double y0 = 0.8660254037844386; // sqrt(3)/2
    double x, y;
    for (;;) {
        x = rng.uniform(-0.5, 0.5);
        y = y0 / (1.0 - rng.uniform01());
        if (x * x + y * y >= 1.0) break;
    }
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    SurfacePoint p;
    p.frame = frame_from({x, y}, theta);
    p.z = {x, y};
    p.theta = theta;
    return p;
}

} // namespace geodist
