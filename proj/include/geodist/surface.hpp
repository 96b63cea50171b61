#pragma once

#include "geodist/errors.hpp"
#include "geodist/mat2.hpp"
#include "geodist/rng.hpp"
#include "geodist/util.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace geodist {

// Point of X = SL2(Z) \ SL2(R): a det-1 frame folded to the canonical
// fundamental-domain representative, with its base point z = g.i and the
// flow direction theta in [0, 2pi).
struct SurfacePoint {
    Mat2 frame;
    std::complex<double> z;
    double theta = 0.0;
};

// Canonical representative: x in [-1/2, 1/2), |z| >= 1, and x >= 0 on the
// unit-circle boundary arc. Throws NumericalDegeneracyError if the point
// escapes past float range up the cusp.
SurfacePoint fold(Mat2 g, Mat2* gamma_out = nullptr);

// Geodesic flow: fold(p.frame * a_t), stepped so frame entries stay bounded.
SurfacePoint flow(const SurfacePoint& p, double t);

Mat2 frame_from(std::complex<double> z, double theta);

// Frame distance proxy: min over a fixed set of short SL2(Z) words gamma of
// ||p^{-1} gamma q - I||_F. Valid as a metric below the trust radius; the
// flag marks values beyond it.
inline constexpr double kDistanceTrustRadius = 0.3;

struct FrameDistance {
    double value = 0.0;
    bool within_trust = false;
};

FrameDistance distance(const SurfacePoint& p, const SurfacePoint& q);

// The word set used by distance (identity, S, T^{+-1}, all words of length
// <= 3, closed under sign and inversion).
const std::vector<Mat2>& gamma_word_set();

SurfacePoint haar_sample(Rng& rng);

struct MonteCarloValue {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    bool exact = false;
};

// Templated fold core shared by the double path and the high-precision
// closure verification.
template <class R>
int fold_core(TMat2<R>& g, TMat2<R>* gamma, const R& y_floor) {
    using std::floor;
    if (gamma) *gamma = TMat2<R>::identity();
    int moves = 0;
    for (int iter = 0; iter < 100000; ++iter) {
        const R den = g.m10 * g.m10 + g.m11 * g.m11;
        const R y = g.det() / den;
        if (y < y_floor) throw NumericalDegeneracyError("fold: point escaped past float range");
        R x = (g.m01 * g.m11 + g.m00 * g.m10) / den;
        const R k = floor(x + R(1) / R(2)); // x - k lands in [-1/2, 1/2)
        if (k != 0) {
            g.m00 -= k * g.m10;
            g.m01 -= k * g.m11;
            if (gamma) { gamma->m00 -= k * gamma->m10; gamma->m01 -= k * gamma->m11; }
            x -= k;
            ++moves;
        }
        if (x * x + y * y < R(1)) {
            const TMat2<R> s{R(0), R(-1), R(1), R(0)};
            g = s * g;
            if (gamma) *gamma = s * *gamma;
            ++moves;
            continue;
        }
        // boundary arc preference: x >= 0 when |z| = 1 exactly (the corner
        // x = -1/2 stays put to preserve the x-range)
        if (x < 0 && R(2) * x != R(-1) && x * x + y * y == R(1)) {
            const TMat2<R> s{R(0), R(-1), R(1), R(0)};
            g = s * g;
            if (gamma) *gamma = s * *gamma;
            ++moves;
        }
        return moves;
    }
    throw NumericalDegeneracyError("fold: did not stabilize");
}

} // namespace geodist
