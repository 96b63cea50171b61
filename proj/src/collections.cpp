#include "geodist/collections.hpp"

#include <algorithm>
#include <cmath>

namespace geodist {

std::string to_string(CollectionKind k) {
    switch (k) {
        case CollectionKind::full: return "full";
        case CollectionKind::random_fraction: return "random_fraction";
        case CollectionKind::tube: return "tube";
        case CollectionKind::explicit_list: return "explicit";
    }
    return "?";
}

GeodesicCollection build_full(const ClassGroup& group, const RegulatorData& reg) {
    GeodesicCollection coll;
    coll.d = group.d;
    coll.kind = CollectionKind::full;
    coll.members.reserve(group.cycles.size());
    for (int i = 0; i < group.order(); ++i) {
        coll.members.push_back(lift_geodesic(group.cycles[static_cast<std::size_t>(i)], reg));
        coll.class_indices.push_back(i);
    }
    coll.total_length = reg.period * static_cast<double>(coll.members.size());
    return coll;
}

GeodesicCollection build_full(const Discriminant& d) {
    const ClassGroup group = class_group(d);
    return build_full(group, regulator(d));
}

namespace {

bool orbit_enters_tube(const ClosedGeodesic& geo, const OrbitTube& tube, double r) {
    OrbitWalker walker(geo, r / 4.0);
    SurfacePoint p;
    std::size_t skip = 0;
    while (walker.next(p)) {
        if (skip > 0) { --skip; continue; }
        const double lb = distance_to_orbit(p, tube, r);
        if (lb < r) return true;
        // the frame distance moves at most ~0.71 per unit flow time
        const double margin = lb - r;
        skip = static_cast<std::size_t>(std::floor(margin / (0.75 * walker.step_size())));
    }
    return false;
}

} // namespace

GeodesicCollection subcollection(const GeodesicCollection& full, const SubcollectionSpec& spec) {
    if (full.kind != CollectionKind::full) {
        throw std::invalid_argument("subcollection: base collection must be the full G_d");
    }
    GeodesicCollection out;
    out.d = full.d;
    out.seed = spec.seed;
    const std::size_t h = full.members.size();

    if (const auto* rule = std::get_if<RandomFractionRule>(&spec.rule)) {
        if (!(rule->q > 0.0) || rule->q > 1.0) {
            throw std::invalid_argument("subcollection: q must lie in (0, 1]");
        }
        out.kind = CollectionKind::random_fraction;
        out.q_or_r = rule->q;
        std::vector<std::size_t> order(h);
        for (std::size_t i = 0; i < h; ++i) order[i] = i;
        Rng rng = Rng(spec.seed).derive("subcollection_shuffle", static_cast<std::uint64_t>(full.d.value));
        for (std::size_t i = h; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.below(i));
            std::swap(order[i - 1], order[j]);
        }
        const double target = rule->q * full.total_length;
        double acc = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
            out.members.push_back(full.members[order[i]]);
            out.class_indices.push_back(full.class_indices[order[i]]);
            acc += full.members[order[i]].period;
            if (acc >= target) break;
        }
    } else if (const auto* trule = std::get_if<TubeRule>(&spec.rule)) {
        if (!(trule->r > 0) || trule->r > kDistanceTrustRadius) {
            throw RadiusTooLargeError("subcollection: tube radius outside (0, trust]");
        }
        out.kind = CollectionKind::tube;
        out.q_or_r = trule->r;
        for (std::size_t i = 0; i < h; ++i) {
            if (orbit_enters_tube(full.members[i], *trule->tube, trule->r)) {
                out.members.push_back(full.members[i]);
                out.class_indices.push_back(full.class_indices[i]);
            }
        }
    } else {
        const auto& erule = std::get<ExplicitRule>(spec.rule);
        out.kind = CollectionKind::explicit_list;
        for (int idx : erule.class_indices) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= h) {
                throw std::invalid_argument("subcollection: class index out of range");
            }
            out.members.push_back(full.members[static_cast<std::size_t>(idx)]);
            out.class_indices.push_back(idx);
        }
    }
    double acc = 0.0;
    for (const auto& m : out.members) acc += m.period;
    out.total_length = acc;
    return out;
}

double measure(const GeodesicCollection& coll, const TestFunction& f, double step) {
    if (coll.members.empty()) throw EmptySubcollectionError("measure: empty collection");
    std::vector<double> per_member(coll.members.size(), 0.0);
    run_indexed(coll.members.size(), [&](std::size_t i) {
        per_member[i] = integrate_along(coll.members[i], f.eval, step);
    });
    KahanSum sum;
    for (double v : per_member) sum.add(v);
    return sum.value() / static_cast<double>(coll.members.size());
}

MeasureWithError measure_with_error(const GeodesicCollection& coll, const TestFunction& f,
                                    double step) {
    if (coll.members.empty()) throw EmptySubcollectionError("measure: empty collection");
    std::vector<QuadratureResult> per_member(coll.members.size());
    run_indexed(coll.members.size(), [&](std::size_t i) {
        per_member[i] = integrate_along_with_error(coll.members[i], f.eval, step);
    });
    KahanSum sum, err;
    for (const auto& q : per_member) { sum.add(q.value); err.add(q.error_estimate); }
    MeasureWithError out;
    out.value = sum.value() / static_cast<double>(coll.members.size());
    out.quadrature_error = err.value() / static_cast<double>(coll.members.size());
    return out;
}

LengthRatios ratios(const GeodesicCollection& sub, const GeodesicCollection& full) {
    if (sub.d.value != full.d.value) {
        throw MixedDiscriminantsError("ratios: collections have different discriminants");
    }
    if (sub.members.empty()) throw EmptySubcollectionError("ratios: empty subcollection");
    LengthRatios r;
    r.phi = full.total_length / sub.total_length;
    r.psi = r.phi / std::log(static_cast<double>(full.d.value));
    return r;
}

} // namespace geodist
