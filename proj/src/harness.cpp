#include "geodist/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace geodist {
namespace {

constexpr std::size_t kMcBatch = 65536;

double mu_x_of(const TestFunction& f, std::uint64_t seed, std::size_t mc_samples) {
    if (f.exact_integral) return *f.exact_integral;
    Rng rng(seed);
    return haar_integral_via_sampling(f.eval, mc_samples, rng.derive("mu_x", Rng::fnv1a(f.id))).value;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

CollectionProvider direct_provider() {
    return [](i64 d) { return build_full(Discriminant::of(d)); };
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::FAIL: return "FAIL";
        case Verdict::NOT_APPLICABLE: return "NOT_APPLICABLE";
    }
    return "?";
}

DiscrepancyReport discrepancy(const GeodesicCollection& coll, const GeodesicCollection& full,
                              const TestFunction& f, double step, std::uint64_t seed,
                              std::size_t mc_samples) {
    if (coll.members.empty()) throw EmptySubcollectionError("discrepancy: empty collection");
    DiscrepancyReport rep;
    rep.d = coll.d.value;
    rep.f_id = f.id;
    rep.kind = to_string(coll.kind);
    rep.q_or_r = coll.q_or_r;
    rep.n_members = static_cast<int>(coll.members.size());
    rep.total_length = coll.total_length;
    const LengthRatios lr = ratios(coll, full);
    rep.phi = lr.phi;
    rep.psi = lr.psi;
    const MeasureWithError m = measure_with_error(coll, f, step);
    rep.mu_I = m.value;
    rep.quad_error = m.quadrature_error;
    rep.mu_X = mu_x_of(f, seed, mc_samples);
    rep.discrepancy = std::abs(rep.mu_I - rep.mu_X);
    rep.step = step;
    rep.seed = seed;
    return rep;
}

namespace {

DecayFit fit_decay(std::vector<DiscrepancyReport>& reports,
                   const std::function<double(const DiscrepancyReport&)>& abscissa) {
    DecayFit fit;
    for (auto& rep : reports) {
        rep.censored = rep.discrepancy < 10.0 * rep.quad_error || rep.discrepancy <= 0.0;
        if (rep.censored) {
            ++fit.n_censored;
            continue;
        }
        fit.log_x.push_back(std::log(abscissa(rep)));
        fit.log_y.push_back(std::log(rep.discrepancy));
    }
    fit.n_used = fit.log_x.size();
    if (fit.n_used < 2) throw DegenerateFitError("decay fit: fewer than two usable points");
    const LineFit lf = fit_line(fit.log_x, fit.log_y);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    return fit;
}

} // namespace

SweepResult duke_sweep(const std::vector<i64>& d_list, const TestFunction& f, double step,
                       const CollectionProvider& provider, std::uint64_t seed) {
    if (d_list.size() < 8) throw std::invalid_argument("duke_sweep: need at least 8 discriminants");
    SweepResult out;
    out.reports.resize(d_list.size());
    run_indexed(d_list.size(), [&](std::size_t i) {
        const GeodesicCollection full = provider(d_list[i]);
        out.reports[i] = discrepancy(full, full, f, step, seed);
    });
    out.fit = fit_decay(out.reports, [](const DiscrepancyReport& r) {
        return static_cast<double>(r.d);
    });
    return out;
}

Theorem12Result theorem12_experiment(const std::vector<i64>& d_list,
                                     const std::vector<double>& q_schedule,
                                     const TestFunction& f, std::uint64_t seed, double step,
                                     const CollectionProvider& provider) {
    if (d_list.size() != q_schedule.size()) {
        throw std::invalid_argument("theorem12: d list and q schedule sizes differ");
    }
    if (d_list.size() < 4) throw std::invalid_argument("theorem12: need at least 4 points");
    Theorem12Result out;

    // Hypothesis guard on the scheduled psi (the realized one fluctuates by
    // an atomic geodesic). A flat schedule does not tend to zero.
    for (std::size_t k = 1; k < d_list.size(); ++k) {
        const double prev = (1.0 / q_schedule[k - 1]) / std::log(static_cast<double>(d_list[k - 1]));
        const double cur = (1.0 / q_schedule[k]) / std::log(static_cast<double>(d_list[k]));
        if (cur >= prev - 1e-12) {
            out.verdict = Verdict::NOT_APPLICABLE;
            return out;
        }
    }

    out.reports.resize(d_list.size());
    run_indexed(d_list.size(), [&](std::size_t k) {
        const GeodesicCollection full = provider(d_list[k]);
        SubcollectionSpec spec;
        spec.rule = RandomFractionRule{q_schedule[k]};
        spec.seed = Rng(seed).derive("theorem12", static_cast<std::uint64_t>(d_list[k])).root_seed();
        const GeodesicCollection sub = subcollection(full, spec);
        out.reports[k] = discrepancy(sub, full, f, step, seed);
    });

    out.n_fit = d_list.size() / 2;
    double c_fit = 0.0;
    for (std::size_t k = 0; k < out.n_fit; ++k) {
        c_fit = std::max(c_fit, out.reports[k].discrepancy / std::sqrt(out.reports[k].psi));
    }
    out.C = c_fit;
    bool pass = true;
    for (std::size_t k = out.n_fit; k < d_list.size(); ++k) {
        if (out.reports[k].discrepancy > c_fit * std::sqrt(out.reports[k].psi)) pass = false;
    }
    out.verdict = pass ? Verdict::PASS : Verdict::FAIL;
    return out;
}

ChainCheckResult chain_check(const GeodesicCollection& coll, const GeodesicCollection& full,
                             const TestFunction& f, double T_window, double step) {
    if (coll.members.empty()) throw EmptySubcollectionError("chain_check: empty collection");
    if (!(T_window > 0)) throw std::invalid_argument("chain_check: T must be positive");
    if (!f.exact_integral) {
        throw std::invalid_argument("chain_check: f needs a known Haar integral");
    }
    const double c = *f.exact_integral;

    // Per member: sliding circular window of the mean-zero values on that
    // member's own quadrature grid. The windowed average wraps, which is the
    // honest evaluation of a time average along a closed orbit.
    struct Moments { double m1 = 0.0, m2 = 0.0; };
    std::vector<Moments> mom(full.members.size());
    run_indexed(full.members.size(), [&](std::size_t i) {
        const ClosedGeodesic& geo = full.members[i];
        OrbitWalker walker(geo, step);
        const std::size_t n = walker.size();
        std::vector<double> v(n);
        SurfacePoint p;
        std::size_t k = 0;
        while (walker.next(p)) v[k++] = f.eval(p) - c;
        const std::size_t w = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(T_window / walker.step_size())));
        // circular prefix sums
        std::vector<double> prefix(n + 1, 0.0);
        KahanSum acc;
        for (std::size_t j = 0; j < n; ++j) {
            acc.add(v[j]);
            prefix[j + 1] = acc.value();
        }
        const double total = prefix[n];
        KahanSum m1, m2;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t hi = j + w;
            double s;
            if (hi <= n) {
                s = prefix[hi] - prefix[j];
            } else {
                const std::size_t wrap = hi - n;
                const std::size_t laps = wrap / n;
                const std::size_t rem = wrap % n;
                s = (total - prefix[j]) + static_cast<double>(laps) * total + prefix[rem];
            }
            const double g = s / static_cast<double>(w);
            m1.add(g);
            m2.add(g * g);
        }
        mom[i].m1 = m1.value() / static_cast<double>(n);
        mom[i].m2 = m2.value() / static_cast<double>(n);
    });

    auto member_pos = [&](int class_index) {
        for (std::size_t i = 0; i < full.class_indices.size(); ++i) {
            if (full.class_indices[i] == class_index) return i;
        }
        throw std::invalid_argument("chain_check: subcollection member not in full collection");
    };

    KahanSum sub1, sub2;
    for (int ci : coll.class_indices) {
        const Moments& m = mom[member_pos(ci)];
        sub1.add(m.m1);
        sub2.add(m.m2);
    }
    const double n_i = static_cast<double>(coll.members.size());
    const double mu_i_g = sub1.value() / n_i;
    const double mu_i_g2 = sub2.value() / n_i;
    KahanSum all2;
    for (const Moments& m : mom) all2.add(m.m2);
    const double mu_g_g2 = all2.value() / static_cast<double>(full.members.size());

    const double ratio = coll.total_length / full.total_length;
    ChainCheckResult out;
    out.T_window = T_window;
    out.lhs1 = (ratio * mu_i_g) * (ratio * mu_i_g);
    out.rhs1 = ratio * ratio * mu_i_g2;
    out.lhs2 = ratio * mu_i_g2;
    out.rhs2 = mu_g_g2;
    const double scale = std::max({1.0, std::abs(out.rhs1), std::abs(out.rhs2)});
    out.tolerance = 1e-9 * scale;
    out.holds1 = out.lhs1 <= out.rhs1 + out.tolerance;
    out.holds2 = out.lhs2 <= out.rhs2 + out.tolerance;
    return out;
}

MixingSeries mixing_correlation(const TestFunction& f, const std::vector<double>& t_list,
                                std::size_t n_samples, std::uint64_t seed) {
    if (t_list.empty()) throw std::invalid_argument("mixing_correlation: empty t list");
    for (double t : t_list) {
        if (t < 0) throw std::invalid_argument("mixing_correlation: t must be >= 0");
    }
    MixingSeries out;
    out.mu_f = mu_x_of(f, seed, 1u << 20);
    const double c = out.mu_f;
    std::vector<double> ts = t_list;
    std::sort(ts.begin(), ts.end());

    const std::size_t n_batches = (n_samples + kMcBatch - 1) / kMcBatch;
    const std::size_t nt = ts.size();
    std::vector<std::vector<double>> sums(n_batches, std::vector<double>(nt, 0.0));
    std::vector<std::vector<double>> sqs(n_batches, std::vector<double>(nt, 0.0));
    Rng base(seed);
    run_indexed(n_batches, [&](std::size_t bi) {
        Rng local = base.derive("mixing_corr", bi);
        const std::size_t lo = bi * kMcBatch;
        const std::size_t hi = std::min(n_samples, lo + kMcBatch);
        std::vector<KahanSum> s(nt), s2(nt);
        for (std::size_t i = lo; i < hi; ++i) {
            const SurfacePoint p0 = haar_sample(local);
            const double f0 = f.eval(p0) - c;
            SurfacePoint p = p0;
            double t_done = 0.0;
            for (std::size_t j = 0; j < nt; ++j) {
                if (ts[j] > t_done) {
                    p = flow(p, ts[j] - t_done);
                    t_done = ts[j];
                }
                const double v = f0 * (f.eval(p) - c);
                s[j].add(v);
                s2[j].add(v * v);
            }
        }
        for (std::size_t j = 0; j < nt; ++j) {
            sums[bi][j] = s[j].value();
            sqs[bi][j] = s2[j].value();
        }
    });

    for (std::size_t j = 0; j < nt; ++j) {
        KahanSum s, s2;
        for (std::size_t bi = 0; bi < n_batches; ++bi) { s.add(sums[bi][j]); s2.add(sqs[bi][j]); }
        MixingEstimate est;
        est.f_id = f.id;
        est.t = ts[j];
        est.n_samples = n_samples;
        const double n = static_cast<double>(n_samples);
        est.value = s.value() / n;
        const double var = std::max(0.0, (s2.value() - n * est.value * est.value) / (n - 1.0));
        est.std_error = std::sqrt(var / n);
        out.points.push_back(est);
    }

    std::vector<double> ex, ey;
    for (const auto& est : out.points) {
        if (std::abs(est.value) > 3.0 * est.std_error && est.value != 0.0) {
            ex.push_back(est.t);
            ey.push_back(std::log(std::abs(est.value)));
        }
    }
    if (ex.size() >= 2) out.envelope = fit_line(ex, ey);
    return out;
}

VarianceSeries ergodic_variance(const TestFunction& f, const std::vector<double>& T_list,
                                std::size_t n_samples, std::uint64_t seed, double quad_step) {
    if (T_list.empty()) throw std::invalid_argument("ergodic_variance: empty T list");
    VarianceSeries out;
    out.mu_f = mu_x_of(f, seed, 1u << 20);
    const double c = out.mu_f;
    std::vector<double> ts = T_list;
    std::sort(ts.begin(), ts.end());
    const double h = quad_step;
    std::vector<std::size_t> marks(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const double m = ts[j] / h;
        marks[j] = static_cast<std::size_t>(std::llround(m));
        if (std::abs(m - static_cast<double>(marks[j])) > 1e-9 || marks[j] == 0) {
            throw std::invalid_argument("ergodic_variance: T values must be multiples of the step");
        }
    }
    const std::size_t n_steps = marks.back();
    const std::size_t nt = ts.size();

    const std::size_t n_batches = (n_samples + kMcBatch - 1) / kMcBatch;
    std::vector<std::vector<double>> sums(n_batches, std::vector<double>(nt, 0.0));
    std::vector<std::vector<double>> sqs(n_batches, std::vector<double>(nt, 0.0));
    Rng base(seed);
    run_indexed(n_batches, [&](std::size_t bi) {
        Rng local = base.derive("ergodic_var", bi);
        const std::size_t lo = bi * kMcBatch;
        const std::size_t hi = std::min(n_samples, lo + kMcBatch);
        std::vector<KahanSum> s(nt), s2(nt);
        for (std::size_t i = lo; i < hi; ++i) {
            const SurfacePoint p0 = haar_sample(local);
            // midpoint prefix integral of f0 along one trajectory
            Mat2 g = p0.frame;
            g.flow_right(h / 2.0);
            fold_core<double>(g, static_cast<Mat2*>(nullptr), 1e-280);
            g.rescale_det();
            KahanSum acc;
            std::size_t mark = 0;
            for (std::size_t k = 1; k <= n_steps; ++k) {
                SurfacePoint p;
                p.frame = g;
                p.z = g.act_on_i();
                const double cc = g.m10, dd = g.m11;
                p.theta = std::atan2(dd * dd - cc * cc, 2.0 * cc * dd);
                if (p.theta < 0) p.theta += 2.0 * 3.14159265358979323846;
                acc.add(f.eval(p) - c);
                while (mark < nt && marks[mark] == k) {
                    const double ft = acc.value() / static_cast<double>(k);
                    s[mark].add(ft * ft);
                    s2[mark].add(ft * ft * ft * ft);
                    ++mark;
                }
                if (k < n_steps) {
                    g.flow_right(h);
                    fold_core<double>(g, static_cast<Mat2*>(nullptr), 1e-280);
                    g.rescale_det();
                }
            }
        }
        for (std::size_t j = 0; j < nt; ++j) {
            sums[bi][j] = s[j].value();
            sqs[bi][j] = s2[j].value();
        }
    });

    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < nt; ++j) {
        KahanSum s, s2;
        for (std::size_t bi = 0; bi < n_batches; ++bi) { s.add(sums[bi][j]); s2.add(sqs[bi][j]); }
        MixingEstimate est;
        est.f_id = f.id;
        est.t = ts[j];
        est.n_samples = n_samples;
        const double n = static_cast<double>(n_samples);
        est.value = s.value() / n;
        const double var = std::max(0.0, (s2.value() - n * est.value * est.value) / (n - 1.0));
        est.std_error = std::sqrt(var / n);
        out.points.push_back(est);
        if (est.value > 0.0) {
            lx.push_back(std::log(ts[j]));
            ly.push_back(std::log(est.value));
        }
    }
    if (lx.size() < 2) throw DegenerateFitError("ergodic_variance: all estimates vanish");
    out.fit = fit_line(lx, ly);
    return out;
}

namespace {

// Fraction of the orbit's time spent within r0 of the probe tube's orbit.
double dwell_fraction(const ClosedGeodesic& geo, const OrbitTube& probe, double r0) {
    OrbitWalker walker(geo, r0 / 4.0);
    SurfacePoint p;
    std::size_t inside = 0;
    while (walker.next(p)) {
        if (distance_to_orbit(p, probe, r0) < r0) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(walker.size());
}

} // namespace

AdversarialReport adversarial_experiment(const std::vector<i64>& n_list, const ClosedGeodesic& P,
                                         double r, double a, double probe_r0,
                                         std::size_t n_mc_samples, std::uint64_t seed,
                                         const CollectionProvider& provider) {
    if (!(r > 0) || r > kDistanceTrustRadius) {
        throw RadiusTooLargeError("adversarial_experiment: r outside (0, trust]");
    }
    AdversarialReport out;
    out.r = r;
    out.probe_r0 = probe_r0;
    out.a_target = a;
    auto tube = std::make_shared<const OrbitTube>(make_tube(P, r));
    auto probe = std::make_shared<const OrbitTube>(make_tube(P, probe_r0));

    Rng rng(seed);
    out.mu_x_probe = haar_integral_via_sampling(
        [&](const SurfacePoint& p) {
            return distance_to_orbit(p, *probe, probe_r0) < probe_r0 ? 1.0 : 0.0;
        },
        n_mc_samples, rng.derive("adversarial_mu_x"));

    out.rows.resize(n_list.size());
    run_indexed(n_list.size(), [&](std::size_t i) {
        const i64 n = n_list[i];
        AdversarialRow row;
        row.n = n;
        row.d = n * n + 4;
        if (!is_discriminant(row.d)) throw InvalidDiscriminantError("adversarial: n^2+4 not a discriminant");
        const GeodesicCollection full = provider(row.d);
        row.h = static_cast<int>(full.members.size());
        row.l_full = full.total_length;
        SubcollectionSpec spec;
        spec.rule = TubeRule{tube, r};
        const GeodesicCollection sub = subcollection(full, spec);
        row.members_in_tube = static_cast<int>(sub.members.size());
        if (sub.members.empty()) {
            row.empty = true;
        } else {
            row.l_tube = sub.total_length;
            row.exponent = std::log(sub.total_length) / std::log(static_cast<double>(row.d));
            const LengthRatios lr = ratios(sub, full);
            row.phi = lr.phi;
            row.psi = lr.psi;
            std::vector<double> dwells(sub.members.size());
            for (std::size_t m = 0; m < sub.members.size(); ++m) {
                dwells[m] = dwell_fraction(sub.members[m], *probe, probe_r0);
            }
            KahanSum acc;
            double mn = 1.0;
            for (double v : dwells) { acc.add(v); mn = std::min(mn, v); }
            row.tube_mass = acc.value() / static_cast<double>(dwells.size());
            row.min_member_dwell = mn;
        }
        out.rows[i] = row;
    });

    double inf_mass = std::numeric_limits<double>::infinity();
    for (const auto& row : out.rows) {
        if (row.empty) { ++out.n_empty; continue; }
        inf_mass = std::min(inf_mass, row.tube_mass);
    }
    out.inf_tube_mass = std::isfinite(inf_mass) ? inf_mass : 0.0;
    return out;
}

ShadowingReport shadowing_experiment(const ClosedGeodesic& P, const std::vector<double>& r_list,
                                     double step) {
    ShadowingReport out;
    const SurfacePoint base = P.base_point();
    for (double r : r_list) {
        if (!(r > 0) || std::sqrt(r) > kDistanceTrustRadius) {
            throw RadiusTooLargeError("shadowing_experiment: sqrt(r) outside trust radius");
        }
        const double rad = std::sqrt(r);
        const OrbitTube tube = make_tube(P, rad);
        ShadowingRow row;
        row.r = r;
        const double t_cap = 10.0 * (-std::log(r)) + 20.0;
        // 8 fixed directions mixing stable and unstable displacement
        for (int k = 0; k < 8; ++k) {
            const double alpha = (0.5 + static_cast<double>(k)) * (2.0 * 3.14159265358979323846 / 8.0);
            const double s1 = r * std::cos(alpha);
            const double s2 = r * std::sin(alpha);
            Mat2 g = (base.frame * upper_unipotent(s1)) * lower_unipotent(s2);
            g.rescale_det();
            const SurfacePoint start = fold(g);
            double interval = 0.0;
            for (const double dir : {1.0, -1.0}) {
                SurfacePoint p = start;
                double t = 0.0;
                while (t < t_cap) {
                    if (distance_to_orbit(p, tube, rad) >= rad) break;
                    p = flow(p, dir * step);
                    t += step;
                }
                interval += t;
            }
            row.per_direction.push_back(interval);
        }
        KahanSum acc;
        for (double v : row.per_direction) acc.add(v);
        row.mean_interval = acc.value() / static_cast<double>(row.per_direction.size());
        out.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        const double dl = -std::log(out.rows[i + 1].r) + std::log(out.rows[i].r);
        out.pairwise_slopes.push_back((out.rows[i + 1].mean_interval - out.rows[i].mean_interval) / dl);
    }
    return out;
}

std::string csv_header() {
    return "d,f_id,kind,q_or_r,n_members,total_length,phi,psi,mu_I,mu_X,discrepancy,step,seed";
}

std::string csv_row(const DiscrepancyReport& r) {
    std::string out;
    out += std::to_string(r.d);
    out += ',';
    out += r.f_id;
    out += ',';
    out += r.kind;
    out += ',';
    out += fmt17(r.q_or_r);
    out += ',';
    out += std::to_string(r.n_members);
    out += ',';
    out += fmt17(r.total_length);
    out += ',';
    out += fmt17(r.phi);
    out += ',';
    out += fmt17(r.psi);
    out += ',';
    out += fmt17(r.mu_I);
    out += ',';
    out += fmt17(r.mu_X);
    out += ',';
    out += fmt17(r.discrepancy);
    out += ',';
    out += fmt17(r.step);
    out += ',';
    out += std::to_string(r.seed);
    return out;
}

} // namespace geodist
