#pragma once

#include "geodist/geodesic.hpp"
#include "geodist/surface.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace geodist {

// Observable on the unit tangent bundle. Catalog indicators and bumps take
// values in [0, 1]; exact_integral is the Haar integral when known in
// closed form.
struct TestFunction {
    std::string id;
    std::function<double(const SurfacePoint&)> eval;
    std::optional<double> exact_integral;
    std::optional<double> support_radius;
    // Extra probe points for derivative estimation when the support is a
    // thin set a Haar cloud would miss.
    std::function<SurfacePoint(Rng&)> probe_hint;
};

TestFunction constant_function(double c);

// Indicator of {y > Y} (sharp) or a linear ramp over [Y, Y + smoothing].
// Exact integral 3/(pi Y) in the sharp case, closed form for the ramp.
TestFunction cusp_indicator(double Y, double smoothing = 0.0);

// Bump supported in the radius-r tube around P: Theta(s1) Theta(s2) in the
// unstable/stable displacement coordinates of the nearest orbit point, with
// Theta(x) = exp(1 - w^2/(w^2 - x^2)) on (-w, w). The coordinate width is
// w = r/2 so the Frobenius-metric support stays inside U_r.
TestFunction tube_bump(std::shared_ptr<const OrbitTube> tube, double r);
TestFunction tube_bump(const ClosedGeodesic& P, double r);

// Sup over a seeded point cloud of first and second symmetric finite
// differences along the flow and the two horocyclic directions.
double smoothness_estimate(const TestFunction& f);

// Haar integral: exact when the catalog provides it, Monte-Carlo otherwise.
MonteCarloValue haar_integral(const TestFunction& f, std::size_t n_samples, const Rng& rng);

// Always Monte-Carlo (ignores exact_integral); the sampler-vs-catalog oracle.
MonteCarloValue haar_integral_via_sampling(const std::function<double(const SurfacePoint&)>& f,
                                           std::size_t n_samples, const Rng& rng);

} // namespace geodist
