#pragma once

#include "geodist/geodesic.hpp"
#include "geodist/observables.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace geodist {

enum class CollectionKind { full, random_fraction, tube, explicit_list };

std::string to_string(CollectionKind k);

// G_d or a subcollection of it. All members of one collection share the
// period 2 Reg(O_d), so total_length = |members| * period.
struct GeodesicCollection {
    Discriminant d;
    CollectionKind kind = CollectionKind::full;
    std::vector<ClosedGeodesic> members;
    std::vector<int> class_indices; // indices into the full collection
    double total_length = 0.0;
    double q_or_r = 0.0; // the defining parameter, 0 for full/explicit
    std::uint64_t seed = 0;
};

struct RandomFractionRule {
    double q = 1.0; // target total-length fraction in (0, 1]
};
struct TubeRule {
    std::shared_ptr<const OrbitTube> tube; // around the fixed orbit P
    double r = 0.0;
};
struct ExplicitRule {
    std::vector<int> class_indices;
};

struct SubcollectionSpec {
    std::variant<RandomFractionRule, TubeRule, ExplicitRule> rule;
    std::uint64_t seed = 0;
};

GeodesicCollection build_full(const ClassGroup& group, const RegulatorData& reg);
GeodesicCollection build_full(const Discriminant& d);

// random_fraction: seeded shuffle, shortest prefix with total length
// >= q * l(G_d), never empty. tube: members whose orbit enters U_r(P) under
// the two-radius test (certain below r/2, possible up to r), sampled at
// step r/4. explicit: the listed classes. A tube rule may legitimately
// produce an empty collection; measure/ratios on it throw.
GeodesicCollection subcollection(const GeodesicCollection& full, const SubcollectionSpec& spec);

// mu_I(f): equal-weight average over members of the normalized line
// integrals (all periods within one d agree).
double measure(const GeodesicCollection& coll, const TestFunction& f, double step);

struct MeasureWithError {
    double value = 0.0;
    double quadrature_error = 0.0;
};
MeasureWithError measure_with_error(const GeodesicCollection& coll, const TestFunction& f,
                                    double step);

struct LengthRatios {
    double phi = 0.0; // l(G_d) / l(I_d)
    double psi = 0.0; // phi / log d
};
LengthRatios ratios(const GeodesicCollection& sub, const GeodesicCollection& full);

} // namespace geodist
