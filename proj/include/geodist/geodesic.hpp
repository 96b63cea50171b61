#pragma once

#include "geodist/bqf.hpp"
#include "geodist/pell.hpp"
#include "geodist/surface.hpp"

#include <functional>
#include <limits>

namespace geodist {

// One reduced form's stretch of the closed geodesic. frame is the det-1
// eigenframe of that form's automorph, rebuilt from exact integers, and tau
// is the flow time to the next form's anchor. Quadrature walks reseed at
// every anchor, so floating error never rides the full hyperbolic expansion
// of the orbit.
struct GeodesicSegment {
    Mat2 frame;
    double tau = 0.0;
    double t_start = 0.0;
};

struct ClosedGeodesic {
    Discriminant d;
    ReductionCycle cycle;      // starts at a member with a > 0
    double w = 0.0;            // (-b + sqrt d) / (2a) of the first form
    double w_conj = 0.0;       // Galois conjugate, w > w_conj
    Mat2 base_frame;           // eigenframe of the automorph, det 1
    double period = 0.0;       // 2 * regulator
    std::vector<GeodesicSegment> segments;

    SurfacePoint base_point() const { return fold(base_frame); }
};

ClosedGeodesic lift_geodesic(const ReductionCycle& cycle, const RegulatorData& reg);

// Midpoint-rule sites along the closed orbit: t_k = (k + 1/2) * h where
// h = period / n and n = max(10, ceil(period / step)).
class OrbitWalker {
public:
    OrbitWalker(const ClosedGeodesic& geo, double step);

    std::size_t size() const { return n_; }
    double step_size() const { return h_; }

    // Returns false once all sites are exhausted. gamma_out receives the
    // accumulated fold word since the last segment reseed.
    bool next(SurfacePoint& out, int* segment_out = nullptr, Mat2* gamma_out = nullptr);

private:
    const ClosedGeodesic* geo_;
    double h_;
    std::size_t n_;
    std::size_t k_ = 0;
    std::size_t seg_ = 0;
    double last_t_ = 0.0;
    bool fresh_ = true;
    Mat2 g_;
    Mat2 gamma_acc_;
};

// Normalized line integral (1/period) * int f along the orbit, composite
// midpoint rule. Throws StepTooCoarseError if step > period / 10.
double integrate_along(const ClosedGeodesic& geo,
                       const std::function<double(const SurfacePoint&)>& f,
                       double step);

// Same walk, but also reports |mu_h - mu_2h| as a quadrature error proxy.
struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};
QuadratureResult integrate_along_with_error(const ClosedGeodesic& geo,
                                            const std::function<double(const SurfacePoint&)>& f,
                                            double step);

// Defect of returning to the base point after one full period, measured by
// walking the flow in software floats with enough digits for the orbit's
// Lyapunov growth. Pure verification path; production flow stays double.
double closure_defect(const ClosedGeodesic& geo, const PellSolution& pell);

// Residual of base_frame^{-1} automorph base_frame = +-diag(e^{p/2}, e^{-p/2}),
// evaluated in log scale so large units do not overflow.
double conjugation_defect(const ClosedGeodesic& geo, const PellSolution& pell);

// The full geodesic line in H carrying a stretch of tube samples; either a
// semicircle |z - m| = rho or a vertical line x = x0.
struct BoundaryArc {
    bool vertical = false;
    double m = 0.0, rho = 0.0;
    double x0 = 0.0;
};

// Polyline discretization of a closed orbit plus the arc decomposition used
// to prune distance queries.
struct OrbitTube {
    ClosedGeodesic orbit;
    double radius = 0.0;
    double delta = 0.0;
    std::vector<SurfacePoint> samples;
    std::vector<int> sample_arc;
    std::vector<BoundaryArc> arcs;
    std::vector<std::vector<int>> arc_samples;
};

OrbitTube make_tube(const ClosedGeodesic& geo, double radius);

struct OrbitProbe {
    double lower_bound = std::numeric_limits<double>::infinity();
    bool exact_path = false; // polyline minimum was actually evaluated
    int sample_index = -1;
    Mat2 displacement;       // p^{-1} gamma s at the argmin, when exact_path
};

// Certified lower bound on the distance from p to the orbit: min over tube
// samples of the frame distance, minus the delta/2 polyline slack. Queries
// that are certainly farther than early_exit_above return early with a
// cheaper (still valid) bound.
double distance_to_orbit(const SurfacePoint& p, const OrbitTube& tube,
                         double early_exit_above = std::numeric_limits<double>::infinity(),
                         OrbitProbe* probe = nullptr);

// Hyperbolic distance from z to a complete geodesic line in H.
double distance_to_boundary_arc(std::complex<double> z, const BoundaryArc& arc);

} // namespace geodist
