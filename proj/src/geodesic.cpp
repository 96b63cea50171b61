#include "geodist/geodesic.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace geodist {
namespace {

// Eigenframe of the automorph of f: columns span the expanding and
// contracting directions (w, 1) and (w_conj, 1), rescaled to det 1. For
// a < 0 the second column is negated to keep the determinant positive.
template <class R>
TMat2<R> eigenframe(const QuadForm& f, const R& sqrt_d) {
    const R a = static_cast<R>(f.a.convert_to<double>());
    const R b = static_cast<R>(f.b.convert_to<double>());
    using std::abs;
    using std::sqrt;
    const R w = (-b + sqrt_d) / (2 * a);
    const R wc = (-b - sqrt_d) / (2 * a);
    const R sigma = a > 0 ? R(1) : R(-1);
    const R scale = sqrt(sqrt_d / abs(a));
    return TMat2<R>{w / scale, sigma * wc / scale, R(1) / scale, sigma / scale};
}

// Flow time between consecutive eigenframe anchors: g^{-1} B_i equals
// B_{i+1} diag(s, 1/s) and the step time is -2 log |s|.
double segment_time(const Mat2& b_cur, const Mat2& b_next, const BigInt& m_step) {
    const double m = m_step.convert_to<double>();
    const Mat2 g{0.0, -1.0, 1.0, m};
    const Mat2 c = g.inv_unimodular() * b_cur;
    const double denom = b_next.m00 * b_next.m00 + b_next.m10 * b_next.m10;
    const double s1 = (c.m00 * b_next.m00 + c.m10 * b_next.m10) / denom;
    // both columns must be parallel to the next frame's columns
    const double r0 = std::abs(c.m00 - s1 * b_next.m00) + std::abs(c.m10 - s1 * b_next.m10);
    if (r0 > 1e-8 * (1.0 + std::abs(s1))) {
        throw std::logic_error("segment_time: eigenframes are not rho-compatible");
    }
    const double tau = -2.0 * std::log(std::abs(s1));
    if (!(tau > 0)) throw std::logic_error("segment_time: nonpositive step time");
    return tau;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

ClosedGeodesic lift_geodesic(const ReductionCycle& cycle, const RegulatorData& reg) {
    if (cycle.forms.empty()) throw std::invalid_argument("lift_geodesic: empty cycle");
    ClosedGeodesic geo;
    // Anchor the lift at a member with positive leading coefficient so that
    // the expanding root is the larger one.
    std::size_t start = 0;
    while (start < cycle.forms.size() && cycle.forms[start].a <= 0) ++start;
    if (start == cycle.forms.size()) throw std::logic_error("lift_geodesic: no positive leading coefficient");
    geo.cycle.forms.reserve(cycle.forms.size());
    for (std::size_t i = 0; i < cycle.forms.size(); ++i) {
        geo.cycle.forms.push_back(cycle.forms[(start + i) % cycle.forms.size()]);
    }
    const QuadForm& f0 = geo.cycle.forms.front();
    const BigInt dbig = f0.discriminant();
    geo.d = Discriminant::of(dbig.convert_to<i64>());
    const double sqrt_d = std::sqrt(static_cast<double>(geo.d.value));
    const double a0 = f0.a.convert_to<double>();
    const double b0 = f0.b.convert_to<double>();
    geo.w = (-b0 + sqrt_d) / (2.0 * a0);
    geo.w_conj = (-b0 - sqrt_d) / (2.0 * a0);
    geo.period = reg.period;

    const std::size_t n = geo.cycle.forms.size();
    std::vector<Mat2> frames(n);
    for (std::size_t i = 0; i < n; ++i) frames[i] = eigenframe<double>(geo.cycle.forms[i], sqrt_d);
    geo.base_frame = frames[0];

    const std::vector<BigInt> steps = rho_step_coefficients(geo.cycle);
    geo.segments.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        geo.segments[i].frame = frames[i];
        geo.segments[i].t_start = acc;
        geo.segments[i].tau = segment_time(frames[i], frames[(i + 1) % n], steps[i]);
        acc += geo.segments[i].tau;
    }
    // One full traversal of the cycle is one period of the flow.
    if (std::abs(acc - geo.period) > 1e-7 * std::max(1.0, geo.period)) {
        throw std::logic_error("lift_geodesic: segment times do not sum to the period");
    }
    // Absorb the rounding residue so walkers treat segment times as exact.
    const double fix = geo.period / acc;
    acc = 0.0;
    for (auto& seg : geo.segments) {
        seg.tau *= fix;
        seg.t_start = acc;
        acc += seg.tau;
    }
    return geo;
}

OrbitWalker::OrbitWalker(const ClosedGeodesic& geo, double step) : geo_(&geo) {
    if (!(step > 0)) throw std::invalid_argument("OrbitWalker: step must be positive");
    n_ = static_cast<std::size_t>(std::max<double>(10.0, std::ceil(geo.period / step)));
    h_ = geo.period / static_cast<double>(n_);
}

bool OrbitWalker::next(SurfacePoint& out, int* segment_out, Mat2* gamma_out) {
    if (k_ >= n_) return false;
    const double t = (static_cast<double>(k_) + 0.5) * h_;
    // advance to the segment containing t
    while (seg_ + 1 < geo_->segments.size() &&
           t >= geo_->segments[seg_ + 1].t_start) {
        ++seg_;
        fresh_ = true;
    }
    const GeodesicSegment& seg = geo_->segments[seg_];
    Mat2 word;
    if (fresh_) {
        g_ = seg.frame;
        g_.flow_right(t - seg.t_start);
        fold_core<double>(g_, &gamma_acc_, 1e-280);
        g_.rescale_det();
        fresh_ = false;
        last_t_ = t;
    } else {
        g_.flow_right(t - last_t_);
        fold_core<double>(g_, &word, 1e-280);
        g_.rescale_det();
        gamma_acc_ = word * gamma_acc_;
        last_t_ = t;
    }
    out.frame = g_;
    if (out.frame.m11 < 0 || (out.frame.m11 == 0 && out.frame.m10 < 0)) out.frame = -out.frame;
    out.z = g_.act_on_i();
    const double c = g_.m10, dd = g_.m11;
    double theta = std::atan2(dd * dd - c * c, 2.0 * c * dd);
    if (theta < 0) theta += 2.0 * 3.14159265358979323846;
    out.theta = theta;
    if (segment_out) *segment_out = static_cast<int>(seg_);
    if (gamma_out) *gamma_out = gamma_acc_;
    ++k_;
    return true;
}

double integrate_along(const ClosedGeodesic& geo,
                       const std::function<double(const SurfacePoint&)>& f,
                       double step) {
    if (step > geo.period / 10.0) {
        throw StepTooCoarseError("integrate_along: step exceeds period/10");
    }
    OrbitWalker walker(geo, step);
    KahanSum sum;
    SurfacePoint p;
    while (walker.next(p)) sum.add(f(p));
    return sum.value() / static_cast<double>(walker.size());
}

QuadratureResult integrate_along_with_error(const ClosedGeodesic& geo,
                                            const std::function<double(const SurfacePoint&)>& f,
                                            double step) {
    if (step > geo.period / 10.0) {
        throw StepTooCoarseError("integrate_along: step exceeds period/10");
    }
    OrbitWalker walker(geo, step);
    KahanSum all, even;
    SurfacePoint p;
    std::size_t k = 0, n_even = 0;
    while (walker.next(p)) {
        const double v = f(p);
        all.add(v);
        if (k % 2 == 0) { even.add(v); ++n_even; }
        ++k;
    }
    QuadratureResult out;
    out.value = all.value() / static_cast<double>(walker.size());
    const double coarse = even.value() / static_cast<double>(n_even);
    out.error_estimate = std::abs(out.value - coarse);
    return out;
}

// ---------------------------------------------------------------------------
// closure verification in extended precision

namespace {

template <class R>
double closure_walk(const ClosedGeodesic& geo, const PellSolution& pell) {
    using std::log;
    using std::sqrt;
    const R d = R(geo.d.value);
    const R sqrt_d = sqrt(d);
    TMat2<R> start = eigenframe<R>(geo.cycle.forms.front(), sqrt_d);
    const R t_big(pell.t.str());
    const R u_big(pell.u.str());
    const R period = 2 * log((t_big + u_big * sqrt_d) / 2);

    fold_core<R>(start, static_cast<TMat2<R>*>(nullptr), R(0));
    start.rescale_det();
    TMat2<R> g = start;
    const long steps = static_cast<long>(std::ceil(geo.period / 0.4));
    const R h = period / R(steps);
    for (long i = 0; i < steps; ++i) {
        g.flow_right(h);
        fold_core<R>(g, static_cast<TMat2<R>*>(nullptr), R(0));
        g.rescale_det();
    }
    // Compare against the start frame across short words (the canonical
    // representative of a boundary point can legitimately flip).
    R best = R(1e300);
    for (const Mat2& wd : gamma_word_set()) {
        TMat2<R> w{R(wd.m00), R(wd.m01), R(wd.m10), R(wd.m11)};
        const TMat2<R> diff = g - w * start;
        const R fs = diff.frobenius_sq();
        if (fs < best) best = fs;
    }
    return std::sqrt(best.template convert_to<double>());
}

} // namespace

double closure_defect(const ClosedGeodesic& geo, const PellSolution& pell) {
    const double digits_needed = geo.period * 0.4342944819 + 24.0;
    using boost::multiprecision::cpp_bin_float_quad;
    using f60 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<60>>;
    using f120 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;
    using f240 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<240>>;
    using f440 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<440>>;
    if (digits_needed <= 32.0) return closure_walk<cpp_bin_float_quad>(geo, pell);
    if (digits_needed <= 59.0) return closure_walk<f60>(geo, pell);
    if (digits_needed <= 119.0) return closure_walk<f120>(geo, pell);
    if (digits_needed <= 239.0) return closure_walk<f240>(geo, pell);
    if (digits_needed <= 439.0) return closure_walk<f440>(geo, pell);
    throw NumericalDegeneracyError("closure_defect: period too long for the precision ladder");
}

double conjugation_defect(const ClosedGeodesic& geo, const PellSolution& pell) {
    const auto m = automorph(geo.cycle.forms.front(), pell);
    // Scale the automorph by its largest entry so huge units stay finite.
    BigInt scale_big = 0;
    for (const auto& e : m) {
        const BigInt ae = boost::multiprecision::abs(e);
        if (ae > scale_big) scale_big = ae;
    }
    const double log_scale = log_big(scale_big);
    auto scaled = [&](const BigInt& e) {
        if (e == 0) return 0.0;
        const double mag = std::exp(log_big(boost::multiprecision::abs(e)) - log_scale);
        return e < 0 ? -mag : mag;
    };
    const Mat2 ms{scaled(m[0]), scaled(m[1]), scaled(m[2]), scaled(m[3])};
    const Mat2 b = geo.base_frame;
    const Mat2 dmat = (b.inv_unimodular() * ms) * b; // ~ diag(eps, 1/eps) / scale
    const double diag_mag = std::max(std::abs(dmat.m00), std::abs(dmat.m11));
    double defect = (std::abs(dmat.m01) + std::abs(dmat.m10)) / diag_mag;
    // log of the leading eigenvalue must match period/2
    const double log_eps = std::log(std::abs(dmat.m00)) + log_scale;
    defect += std::abs(log_eps - geo.period / 2.0) / std::max(1.0, geo.period / 2.0);
    return defect;
}

// ---------------------------------------------------------------------------
// tubes and orbit distance

double distance_to_boundary_arc(std::complex<double> z, const BoundaryArc& arc) {
    const double y = z.imag();
    if (arc.vertical) {
        return std::asinh(std::abs(z.real() - arc.x0) / y);
    }
    const double dx = z.real() - arc.m;
    const double q = std::abs(dx * dx + y * y - arc.rho * arc.rho) / (2.0 * arc.rho * y);
    return std::asinh(q);
}

OrbitTube make_tube(const ClosedGeodesic& geo, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("make_tube: radius must be positive");
    OrbitTube tube;
    tube.orbit = geo;
    tube.radius = radius;
    tube.delta = std::min(radius / 10.0, geo.period / 20.0);

    const double sqrt_d = std::sqrt(static_cast<double>(geo.d.value));
    std::map<std::array<long long, 3>, int> arc_ids;
    auto arc_key = [](const BoundaryArc& a) {
        auto q = [](double v) { return static_cast<long long>(std::llround(v * 1e9)); };
        return std::array<long long, 3>{a.vertical ? 1LL : 0LL,
                                        a.vertical ? q(a.x0) : q(a.m),
                                        a.vertical ? 0LL : q(a.rho)};
    };

    OrbitWalker walker(geo, tube.delta);
    tube.delta = walker.step_size();
    SurfacePoint p;
    int seg = 0;
    Mat2 gamma;
    while (walker.next(p, &seg, &gamma)) {
        const QuadForm& f = geo.cycle.forms[static_cast<std::size_t>(seg)];
        const double a = f.a.convert_to<double>();
        const double b = f.b.convert_to<double>();
        const double w1 = (-b + sqrt_d) / (2.0 * a);
        const double w2 = (-b - sqrt_d) / (2.0 * a);
        BoundaryArc arc;
        const double den1 = gamma.m10 * w1 + gamma.m11;
        const double den2 = gamma.m10 * w2 + gamma.m11;
        if (std::abs(den1) < 1e-12 || std::abs(den2) < 1e-12) {
            arc.vertical = true;
            arc.x0 = std::abs(den1) < std::abs(den2) ? gamma.act_on_real(w2)
                                                     : gamma.act_on_real(w1);
        } else {
            const double e1 = gamma.act_on_real(w1);
            const double e2 = gamma.act_on_real(w2);
            arc.vertical = false;
            arc.m = (e1 + e2) / 2.0;
            arc.rho = std::abs(e1 - e2) / 2.0;
        }
        auto [it, inserted] = arc_ids.emplace(arc_key(arc), static_cast<int>(tube.arcs.size()));
        if (inserted) {
            tube.arcs.push_back(arc);
            tube.arc_samples.emplace_back();
        }
        const int id = it->second;
        tube.arc_samples[static_cast<std::size_t>(id)].push_back(static_cast<int>(tube.samples.size()));
        tube.sample_arc.push_back(id);
        tube.samples.push_back(p);
    }
    return tube;
}

namespace {

// d_H(i, A.i) <= kFrameToBase * ||A - I||_F whenever ||A - I||_F <= 0.6;
// property-tested. Used contrapositively to prune distance queries.
constexpr double kFrameToBase = 3.0;
constexpr double kBoundValidity = 0.6;

} // namespace

double distance_to_orbit(const SurfacePoint& p, const OrbitTube& tube,
                         double early_exit_above, OrbitProbe* probe) {
    const auto& words = gamma_word_set();
    const std::size_t n_arcs = tube.arcs.size();

    struct Pair {
        double bound;
        int word;
        int arc;
    };
    std::vector<Pair> pairs;
    pairs.reserve(words.size() * n_arcs);
    double min_bound = kInf;
    for (int wi = 0; wi < static_cast<int>(words.size()); ++wi) {
        const Mat2 ginv = words[static_cast<std::size_t>(wi)].inv_unimodular();
        // gamma^{-1} z by Moebius action
        const std::complex<double> num{ginv.m00 * p.z.real() + ginv.m01, ginv.m00 * p.z.imag()};
        const std::complex<double> den{ginv.m10 * p.z.real() + ginv.m11, ginv.m10 * p.z.imag()};
        const std::complex<double> zw = num / den;
        if (!(zw.imag() > 0)) continue;
        for (int ai = 0; ai < static_cast<int>(n_arcs); ++ai) {
            const double dh = distance_to_boundary_arc(zw, tube.arcs[static_cast<std::size_t>(ai)]);
            const double bound = std::min(dh / kFrameToBase, kBoundValidity);
            min_bound = std::min(min_bound, bound);
            pairs.push_back({bound, wi, ai});
        }
    }
    if (probe) *probe = OrbitProbe{};
    const double slack = tube.delta / 2.0;
    if (min_bound - slack > early_exit_above) {
        const double lb = std::max(0.0, min_bound - slack);
        if (probe) probe->lower_bound = lb;
        return lb;
    }

    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.bound != b.bound) return a.bound < b.bound;
        if (a.word != b.word) return a.word < b.word;
        return a.arc < b.arc;
    });

    const Mat2 p_inv = p.frame.inv_unimodular();
    double best = kInf;
    int best_sample = -1;
    Mat2 best_disp;
    const double stop_at = std::isfinite(early_exit_above)
                               ? early_exit_above + slack + tube.delta
                               : kInf;
    for (const Pair& pr : pairs) {
        // Remaining pairs carry frame distances >= pr.bound, so the current
        // minimum is already the exact polyline minimum.
        if (pr.bound >= best) break;
        if (best == kInf && pr.bound > stop_at) {
            // Certified farther than the caller cares about.
            const double lb = std::max(0.0, pr.bound - slack);
            if (probe) probe->lower_bound = lb;
            return lb;
        }
        const Mat2 pg = p_inv * words[static_cast<std::size_t>(pr.word)];
        for (int si : tube.arc_samples[static_cast<std::size_t>(pr.arc)]) {
            const Mat2 a = pg * tube.samples[static_cast<std::size_t>(si)].frame;
            const double e = std::sqrt(a.dist_to_identity_sq());
            if (e < best) {
                best = e;
                best_sample = si;
                best_disp = a;
            }
        }
    }
    const double lb = std::max(0.0, best - slack);
    if (probe) {
        probe->lower_bound = lb;
        probe->exact_path = true;
        probe->sample_index = best_sample;
        probe->displacement = best_disp;
    }
    return lb;
}

} // namespace geodist
