// geodist: closed geodesics on the modular surface, their collections, and
// equidistribution experiments.
//
// Subcommands: classgroup, geodesics, observables, equidist, mixing,
// shadowing. All randomness flows from --seed; reports are byte-identical
// across reruns with the same flags, warm or cold cache.

#include "geodist/cache.hpp"
#include "geodist/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace geodist;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::uint64_t seed = 20240901;
    double step = 1e-2;
    std::size_t samples = 100000;
    std::string cache_dir;
    std::string out;
    std::string format = "csv";
    unsigned threads = 0;
};

std::string default_cache_dir() {
    if (const char* env = std::getenv("GEODIST_CACHE_DIR")) return env;
    return "cache";
}

void add_common(CLI::App* cmd, CommonOpts& opt) {
    cmd->add_option("--seed", opt.seed, "master RNG seed");
    cmd->add_option("--step", opt.step, "quadrature step along orbits")->check(CLI::PositiveNumber);
    cmd->add_option("--samples", opt.samples, "Monte-Carlo sample count");
    cmd->add_option("--cache-dir", opt.cache_dir, "per-discriminant cache directory");
    cmd->add_option("--out", opt.out, "output file (default stdout)");
    cmd->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", opt.threads, "worker threads (default: hardware)");
}

void emit(const CommonOpts& opt, const std::string& text) {
    if (opt.out.empty() || opt.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(opt.out, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + opt.out);
    f << text;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "cusp:2", "cusp:2:0.25", "const:1", "bump:P5:0.05", "bump:P40.1:0.05"
TestFunction parse_observable(const std::string& spec, DiscCache& cache) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw CLI::ValidationError("--f", "empty observable spec");
    if (parts[0] == "const") {
        return constant_function(parts.size() > 1 ? std::stod(parts[1]) : 1.0);
    }
    if (parts[0] == "cusp") {
        if (parts.size() < 2) throw CLI::ValidationError("--f", "cusp:Y[:smoothing]");
        const double y = std::stod(parts[1]);
        const double s = parts.size() > 2 ? std::stod(parts[2]) : 0.0;
        return cusp_indicator(y, s);
    }
    if (parts[0] == "bump") {
        if (parts.size() < 3) throw CLI::ValidationError("--f", "bump:P<d>[.<class>]:r");
        if (parts[1].empty() || parts[1][0] != 'P') throw CLI::ValidationError("--f", "orbit spec must start with P");
        std::string body = parts[1].substr(1);
        int cls = 0;
        if (auto dot = body.find('.'); dot != std::string::npos) {
            cls = std::stoi(body.substr(dot + 1));
            body = body.substr(0, dot);
        }
        const i64 d = std::stoll(body);
        const DiscriminantData data = cache.get(d);
        if (cls < 0 || cls >= data.group.order()) throw CLI::ValidationError("--f", "class index out of range");
        const ClosedGeodesic P = lift_geodesic(data.group.cycles[static_cast<std::size_t>(cls)], data.reg);
        return tube_bump(P, std::stod(parts[2]));
    }
    throw CLI::ValidationError("--f", "unknown observable: " + parts[0]);
}

ClosedGeodesic parse_orbit(const std::string& spec, DiscCache& cache) {
    if (spec.empty() || spec[0] != 'P') throw CLI::ValidationError("orbit", "orbit spec must start with P");
    std::string body = spec.substr(1);
    int cls = 0;
    if (auto dot = body.find('.'); dot != std::string::npos) {
        cls = std::stoi(body.substr(dot + 1));
        body = body.substr(0, dot);
    }
    const i64 d = std::stoll(body);
    const DiscriminantData data = cache.get(d);
    if (cls < 0 || cls >= data.group.order()) throw CLI::ValidationError("orbit", "class index out of range");
    return lift_geodesic(data.group.cycles[static_cast<std::size_t>(cls)], data.reg);
}

// "1e4:1e6:log32" or "1000:2000:lin8"
std::vector<i64> parse_d_range(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw CLI::ValidationError("--d-range", "expected lo:hi:logN or lo:hi:linN");
    const i64 lo = static_cast<i64>(std::llround(std::stod(parts[0])));
    const i64 hi = static_cast<i64>(std::llround(std::stod(parts[1])));
    const std::string& mode = parts[2];
    if (mode.rfind("log", 0) == 0) {
        return log_spaced_fundamental(lo, hi, std::stoi(mode.substr(3)));
    }
    if (mode.rfind("lin", 0) == 0) {
        const int count = std::stoi(mode.substr(3));
        std::vector<i64> out;
        for (int i = 0; i < count; ++i) {
            i64 target = lo + static_cast<i64>((static_cast<double>(hi - lo) * i) / std::max(1, count - 1));
            while (!is_discriminant(target)) ++target;
            while (!out.empty() && target <= out.back()) {
                ++target;
                while (!is_discriminant(target)) ++target;
            }
            out.push_back(target);
        }
        return out;
    }
    throw CLI::ValidationError("--d-range", "mode must be logN or linN");
}

// "31:199:odd" -> odd n values; "31:199:4" -> stride 4
std::vector<i64> parse_n_range(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw CLI::ValidationError("--n", "expected lo:hi:odd or lo:hi:<stride>");
    const i64 lo = std::stoll(parts[0]);
    const i64 hi = std::stoll(parts[1]);
    std::vector<i64> out;
    if (parts[2] == "odd") {
        for (i64 n = (lo % 2 == 0) ? lo + 1 : lo; n <= hi; n += 2) out.push_back(n);
    } else {
        const i64 stride = std::stoll(parts[2]);
        for (i64 n = lo; n <= hi; n += stride) out.push_back(n);
    }
    return out;
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw CLI::ValidationError("list", "empty list");
    return out;
}

ordered_json report_json(const DiscrepancyReport& r) {
    ordered_json j;
    j["d"] = r.d;
    j["f_id"] = r.f_id;
    j["kind"] = r.kind;
    j["q_or_r"] = r.q_or_r;
    j["n_members"] = r.n_members;
    j["total_length"] = r.total_length;
    j["phi"] = r.phi;
    j["psi"] = r.psi;
    j["mu_I"] = r.mu_I;
    j["mu_X"] = r.mu_X;
    j["discrepancy"] = r.discrepancy;
    j["step"] = r.step;
    j["seed"] = r.seed;
    j["quad_error"] = r.quad_error;
    j["censored"] = r.censored;
    return j;
}

ordered_json fit_json(const DecayFit& fit) {
    ordered_json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["gamma_hat"] = fit.gamma_hat();
    j["n_used"] = fit.n_used;
    j["n_censored"] = fit.n_censored;
    return j;
}

std::string reports_csv(const std::vector<DiscrepancyReport>& reports) {
    std::string text = csv_header() + "\n";
    for (const auto& r : reports) text += csv_row(r) + "\n";
    return text;
}

int cmd_classgroup(const CommonOpts& opt, i64 d) {
    DiscCache cache(opt.cache_dir);
    const DiscriminantData data = cache.get(d);
    if (opt.format == "json") {
        ordered_json j;
        j["d"] = d;
        j["is_fundamental"] = data.d.is_fundamental;
        j["conductor"] = data.d.conductor;
        j["h"] = data.group.order();
        j["pell_t"] = data.pell.t.str();
        j["pell_u"] = data.pell.u.str();
        j["regulator"] = data.reg.regulator;
        j["period"] = data.reg.period;
        j["has_norm_minus_one_unit"] = data.reg.has_norm_minus_one_unit;
        ordered_json cycles = ordered_json::array();
        for (const auto& cyc : data.group.cycles) {
            ordered_json jc = ordered_json::array();
            for (const auto& f : cyc.forms) {
                jc.push_back({f.a.convert_to<i64>(), f.b.convert_to<i64>(), f.c.convert_to<i64>()});
            }
            cycles.push_back(std::move(jc));
        }
        j["cycles"] = std::move(cycles);
        j["composition_table"] = data.group.table;
        emit(opt, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << "d = " << d << (data.d.is_fundamental ? " (fundamental)" : " (conductor " + std::to_string(data.d.conductor) + ")")
       << "\n";
    os << "h(d) = " << data.group.order() << "\n";
    os << "pell (t, u) = (" << data.pell.t.str() << ", " << data.pell.u.str() << ")\n";
    os << "regulator = " << fmt17(data.reg.regulator) << "\n";
    os << "period = " << fmt17(data.reg.period) << "\n";
    os << "norm -1 unit: " << (data.reg.has_norm_minus_one_unit ? "yes" : "no") << "\n";
    for (int i = 0; i < data.group.order(); ++i) {
        os << "cycle " << i << " (length " << data.group.cycles[static_cast<std::size_t>(i)].length() << "):";
        for (const auto& f : data.group.cycles[static_cast<std::size_t>(i)].forms) os << " " << f.str();
        os << "\n";
    }
    emit(opt, os.str());
    return 0;
}

int cmd_geodesics(const CommonOpts& opt, i64 d, const std::string& dump_path) {
    DiscCache cache(opt.cache_dir);
    const DiscriminantData data = cache.get(d);
    const GeodesicCollection full = build_full(data.group, data.reg);
    if (!dump_path.empty()) {
        // polyline of every member: index, t, x, y, theta
        std::ofstream f(dump_path, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open dump file");
        f << "member,t,x,y,theta\n";
        for (std::size_t i = 0; i < full.members.size(); ++i) {
            OrbitWalker walker(full.members[i], opt.step);
            SurfacePoint p;
            std::size_t k = 0;
            while (walker.next(p)) {
                const double t = (static_cast<double>(k) + 0.5) * walker.step_size();
                f << i << ',' << fmt17(t) << ',' << fmt17(p.z.real()) << ',' << fmt17(p.z.imag())
                  << ',' << fmt17(p.theta) << "\n";
                ++k;
            }
        }
    }
    std::ostringstream os;
    if (opt.format == "json") {
        ordered_json j;
        j["d"] = d;
        j["h"] = full.members.size();
        j["period"] = data.reg.period;
        j["total_length"] = full.total_length;
        ordered_json members = ordered_json::array();
        for (const auto& m : full.members) {
            ordered_json jm;
            jm["form"] = {m.cycle.forms.front().a.convert_to<i64>(),
                          m.cycle.forms.front().b.convert_to<i64>(),
                          m.cycle.forms.front().c.convert_to<i64>()};
            jm["w"] = m.w;
            jm["w_conj"] = m.w_conj;
            jm["period"] = m.period;
            members.push_back(std::move(jm));
        }
        j["members"] = std::move(members);
        os << j.dump(2) << "\n";
    } else {
        os << "d = " << d << ", h = " << full.members.size() << ", period = " << fmt17(data.reg.period)
           << ", total length = " << fmt17(full.total_length) << "\n";
        for (std::size_t i = 0; i < full.members.size(); ++i) {
            const auto& m = full.members[i];
            os << "member " << i << ": form " << m.cycle.forms.front().str() << ", endpoints ("
               << fmt17(m.w) << ", " << fmt17(m.w_conj) << ")\n";
        }
    }
    emit(opt, os.str());
    return 0;
}

int cmd_observables(const CommonOpts& opt) {
    std::ostringstream os;
    os << "id pattern          parameters                exact Haar integral\n";
    os << "const:c             value c                   c\n";
    os << "cusp:Y              sharp indicator of y > Y  3/(pi Y), Y >= 1\n";
    os << "cusp:Y:s            linear ramp on [Y, Y+s]   closed form\n";
    os << "bump:P<d>[.k]:r     tube bump around orbit    Monte-Carlo\n";
    emit(opt, os.str());
    return 0;
}

int cmd_equidist(CommonOpts& opt, const std::string& d_opt, const std::string& d_range,
                 const std::string& family, const std::string& n_range, const std::string& f_spec,
                 bool full_flag, double q, const std::string& tube_spec, double probe,
                 bool t12, bool fit_flag, double adv_a) {
    DiscCache cache(opt.cache_dir);
    CollectionProvider provider = cache.provider();
    TestFunction f = f_spec.empty() ? cusp_indicator(2.0) : parse_observable(f_spec, cache);

    if (family == "n2plus4") {
        if (tube_spec.empty()) throw CLI::ValidationError("--tube", "family runs need a tube rule");
        auto colon = tube_spec.find(':');
        if (colon == std::string::npos) throw CLI::ValidationError("--tube", "expected P<d>:r");
        const ClosedGeodesic P = parse_orbit(tube_spec.substr(0, colon), cache);
        const double r = std::stod(tube_spec.substr(colon + 1));
        const std::vector<i64> ns = parse_n_range(n_range.empty() ? "31:199:odd" : n_range);
        const AdversarialReport rep =
            adversarial_experiment(ns, P, r, adv_a, probe > 0 ? probe : 0.1, opt.samples, opt.seed, provider);
        ordered_json j;
        j["experiment"] = "adversarial";
        j["r"] = rep.r;
        j["probe_r0"] = rep.probe_r0;
        j["a_target"] = rep.a_target;
        j["seed"] = opt.seed;
        j["mu_X_probe"] = {{"value", rep.mu_x_probe.value},
                           {"std_error", rep.mu_x_probe.std_error},
                           {"n_samples", rep.mu_x_probe.n_samples}};
        j["inf_tube_mass"] = rep.inf_tube_mass;
        j["n_empty"] = rep.n_empty;
        ordered_json rows = ordered_json::array();
        for (const auto& row : rep.rows) {
            ordered_json jr;
            jr["n"] = row.n;
            jr["d"] = row.d;
            jr["h"] = row.h;
            jr["members_in_tube"] = row.members_in_tube;
            jr["empty"] = row.empty;
            jr["l_full"] = row.l_full;
            jr["l_tube"] = row.l_tube;
            jr["exponent"] = row.exponent;
            jr["target_exponent"] = 0.5 - rep.a_target;
            jr["tube_mass"] = row.tube_mass;
            jr["min_member_dwell"] = row.min_member_dwell;
            jr["phi"] = row.phi;
            jr["psi"] = row.psi;
            rows.push_back(std::move(jr));
        }
        j["rows"] = std::move(rows);
        emit(opt, j.dump(2) + "\n");
        return 0;
    }

    std::vector<i64> ds;
    if (!d_opt.empty()) {
        ds.push_back(std::stoll(d_opt));
    } else if (!d_range.empty()) {
        ds = parse_d_range(d_range);
    } else {
        throw CLI::ValidationError("--d", "need --d, --d-range, or --family");
    }

    if (t12) {
        std::vector<double> qs;
        qs.reserve(ds.size());
        for (i64 d : ds) qs.push_back(1.0 / std::sqrt(std::log(static_cast<double>(d))));
        const Theorem12Result res = theorem12_experiment(ds, qs, f, opt.seed, opt.step, provider);
        ordered_json j;
        j["experiment"] = "theorem12";
        j["verdict"] = to_string(res.verdict);
        j["C"] = res.C;
        j["n_fit"] = res.n_fit;
        j["seed"] = opt.seed;
        ordered_json rows = ordered_json::array();
        for (const auto& r : res.reports) rows.push_back(report_json(r));
        j["rows"] = std::move(rows);
        emit(opt, j.dump(2) + "\n");
        return 0;
    }

    std::vector<DiscrepancyReport> reports;
    std::optional<DecayFit> fit;
    if (full_flag || q >= 1.0) {
        if (fit_flag) {
            const SweepResult res = duke_sweep(ds, f, opt.step, provider, opt.seed);
            reports = res.reports;
            fit = res.fit;
        } else {
            for (i64 d : ds) {
                const GeodesicCollection coll = provider(d);
                reports.push_back(discrepancy(coll, coll, f, opt.step, opt.seed));
            }
        }
    } else if (q > 0.0) {
        for (i64 d : ds) {
            const GeodesicCollection coll = provider(d);
            SubcollectionSpec spec;
            spec.rule = RandomFractionRule{q};
            spec.seed = Rng(opt.seed).derive("equidist_q", static_cast<std::uint64_t>(d)).root_seed();
            const GeodesicCollection sub = subcollection(coll, spec);
            reports.push_back(discrepancy(sub, coll, f, opt.step, opt.seed));
        }
    } else if (!tube_spec.empty()) {
        auto colon = tube_spec.find(':');
        if (colon == std::string::npos) throw CLI::ValidationError("--tube", "expected P<d>:r");
        const ClosedGeodesic P = parse_orbit(tube_spec.substr(0, colon), cache);
        const double r = std::stod(tube_spec.substr(colon + 1));
        auto tube = std::make_shared<const OrbitTube>(make_tube(P, r));
        for (i64 d : ds) {
            const GeodesicCollection coll = provider(d);
            SubcollectionSpec spec;
            spec.rule = TubeRule{tube, r};
            const GeodesicCollection sub = subcollection(coll, spec);
            if (sub.members.empty()) continue; // legal outcome; nothing to report
            reports.push_back(discrepancy(sub, coll, f, opt.step, opt.seed));
        }
    } else {
        throw CLI::ValidationError("--full", "need --full, --q, or --tube");
    }

    if (opt.format == "json" || fit) {
        ordered_json j;
        j["experiment"] = fit ? "duke_sweep" : "equidist";
        j["seed"] = opt.seed;
        j["step"] = opt.step;
        if (fit) j["fit"] = fit_json(*fit);
        ordered_json rows = ordered_json::array();
        for (const auto& r : reports) rows.push_back(report_json(r));
        j["rows"] = std::move(rows);
        emit(opt, j.dump(2) + "\n");
    } else {
        emit(opt, reports_csv(reports));
    }
    return 0;
}

int cmd_mixing(CommonOpts& opt, const std::string& f_spec, bool corr, bool variance,
               const std::string& t_list, const std::string& T_list) {
    DiscCache cache(opt.cache_dir);
    TestFunction f = f_spec.empty() ? cusp_indicator(2.0) : parse_observable(f_spec, cache);
    std::ostringstream os;
    if (corr) {
        const std::vector<double> ts = parse_list(t_list.empty() ? "0,2,4,8" : t_list);
        const MixingSeries series = mixing_correlation(f, ts, opt.samples, opt.seed);
        os << "f_id,t,value,std_error,n_samples\n";
        for (const auto& e : series.points) {
            os << e.f_id << ',' << fmt17(e.t) << ',' << fmt17(e.value) << ',' << fmt17(e.std_error)
               << ',' << e.n_samples << "\n";
        }
        if (series.envelope) {
            os << "# envelope slope " << fmt17(series.envelope->slope) << " r2 "
               << fmt17(series.envelope->r_squared) << "\n";
        }
    }
    if (variance) {
        const std::vector<double> Ts = parse_list(T_list.empty() ? "1,2,4,8,16,32,64,128" : T_list);
        const VarianceSeries series = ergodic_variance(f, Ts, opt.samples, opt.seed, opt.step);
        os << "f_id,T,value,std_error,n_samples\n";
        for (const auto& e : series.points) {
            os << e.f_id << ',' << fmt17(e.t) << ',' << fmt17(e.value) << ',' << fmt17(e.std_error)
               << ',' << e.n_samples << "\n";
        }
        os << "# variance slope " << fmt17(series.fit.slope) << " r2 " << fmt17(series.fit.r_squared)
           << "\n";
    }
    if (!corr && !variance) throw CLI::ValidationError("--corr", "need --corr and/or --variance");
    emit(opt, os.str());
    return 0;
}

int cmd_shadowing(CommonOpts& opt, const std::string& orbit_spec, const std::string& r_list) {
    DiscCache cache(opt.cache_dir);
    const ClosedGeodesic P = parse_orbit(orbit_spec.empty() ? "P5" : orbit_spec, cache);
    const std::vector<double> rs = parse_list(r_list.empty() ? "1e-2,1e-3,1e-4" : r_list);
    const ShadowingReport rep = shadowing_experiment(P, rs, opt.step);
    ordered_json j;
    j["experiment"] = "shadowing";
    j["orbit_d"] = P.d.value;
    ordered_json rows = ordered_json::array();
    for (const auto& row : rep.rows) {
        ordered_json jr;
        jr["r"] = row.r;
        jr["mean_interval"] = row.mean_interval;
        jr["per_direction"] = row.per_direction;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    j["pairwise_slopes"] = rep.pairwise_slopes;
    emit(opt, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed geodesics on the modular surface: collections, measures, experiments"};
    app.require_subcommand(1);

    CommonOpts opt;
    opt.cache_dir = default_cache_dir();

    auto* cg = app.add_subcommand("classgroup", "class group, Pell solution, regulator for one d");
    std::string cg_d;
    cg->add_option("d", cg_d, "discriminant")->required();
    add_common(cg, opt);

    auto* ge = app.add_subcommand("geodesics", "list G_d members; optionally dump polylines");
    std::string ge_d, ge_dump;
    ge->add_option("d", ge_d, "discriminant")->required();
    ge->add_option("--dump", ge_dump, "CSV polyline output path");
    add_common(ge, opt);

    auto* ob = app.add_subcommand("observables", "list the observable catalog");
    ob->add_subcommand("list", "list catalog entries");
    add_common(ob, opt);

    auto* eq = app.add_subcommand("equidist", "discrepancy reports, decay fits, tube experiments");
    std::string eq_d, eq_range, eq_family, eq_n, eq_f, eq_tube;
    bool eq_full = false, eq_t12 = false, eq_fit = false;
    double eq_q = 0.0, eq_probe = 0.0, eq_a = 0.1;
    eq->add_option("--d", eq_d, "single discriminant");
    eq->add_option("--d-range", eq_range, "lo:hi:logN or lo:hi:linN over fundamental d");
    eq->add_option("--family", eq_family, "n2plus4");
    eq->add_option("--n", eq_n, "n range for the family, e.g. 31:199:odd");
    eq->add_option("--f", eq_f, "observable spec (default cusp:2)");
    eq->add_flag("--full", eq_full, "use the full collection G_d");
    eq->add_option("--q", eq_q, "random subcollection with total-length fraction q");
    eq->add_option("--tube", eq_tube, "tube subcollection P<d>:r");
    eq->add_option("--probe", eq_probe, "probe radius r0 for tube mass accounting");
    eq->add_flag("--t12", eq_t12, "subcollection-bound experiment with the default q schedule");
    eq->add_flag("--fit", eq_fit, "fit log discrepancy vs log d");
    eq->add_option("--a", eq_a, "target exponent parameter for the family run");
    add_common(eq, opt);

    auto* mx = app.add_subcommand("mixing", "correlation decay and ergodic-average variance");
    std::string mx_f, mx_t, mx_T;
    bool mx_corr = false, mx_var = false;
    mx->add_option("--f", mx_f, "observable spec (default cusp:2)");
    mx->add_flag("--corr", mx_corr, "correlation <f0, f0 o a_t>");
    mx->add_flag("--variance", mx_var, "mu_X(|f_T|^2) decay");
    mx->add_option("--t", mx_t, "comma list of correlation times");
    mx->add_option("--T", mx_T, "comma list of averaging windows");
    add_common(mx, opt);

    auto* sh = app.add_subcommand("shadowing", "dwell time near a fixed orbit vs -log r");
    std::string sh_p, sh_r;
    sh->add_option("--P", sh_p, "orbit spec, default P5");
    sh->add_option("--r", sh_r, "comma list of perturbation radii");
    add_common(sh, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt.threads > 0) {
            // run_indexed reads this env knob on every call site
            setenv("GEODIST_THREADS", std::to_string(opt.threads).c_str(), 1);
        }
        if (cg->parsed()) return cmd_classgroup(opt, std::stoll(cg_d));
        if (ge->parsed()) return cmd_geodesics(opt, std::stoll(ge_d), ge_dump);
        if (ob->parsed()) return cmd_observables(opt);
        if (eq->parsed())
            return cmd_equidist(opt, eq_d, eq_range, eq_family, eq_n, eq_f, eq_full, eq_q, eq_tube,
                                eq_probe, eq_t12, eq_fit, eq_a);
        if (mx->parsed()) return cmd_mixing(opt, mx_f, mx_corr, mx_var, mx_t, mx_T);
        if (sh->parsed()) return cmd_shadowing(opt, sh_p, sh_r);
    } catch (const InvalidDiscriminantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalDegeneracyError& e) {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
