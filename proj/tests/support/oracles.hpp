#pragma once

// Independent oracles used by the unit and acceptance suites. Everything in
// here recomputes quantities by a route that shares no code with the
// implementation it checks.

#include "geodist/bqf.hpp"
#include "geodist/pell.hpp"
#include "geodist/rng.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <optional>

namespace geodist::oracles {

// Literal scan over u. Feasible only while the fundamental u is small; the
// certificate below covers the rest.
inline std::optional<PellSolution> pell_bruteforce(i64 d, i64 u_cap) {
    for (i64 u = 1; u <= u_cap; ++u) {
        const i64 v = d * u * u + 4;
        const i64 t = isqrt64(v);
        if (t * t == v) return PellSolution{BigInt(t), BigInt(u)};
    }
    return std::nullopt;
}

// True iff (t, u) is not a proper power of a smaller norm-one unit: for each
// k >= 2 the k-th root of the unit is computed in 100-digit floats, the
// candidate trace is verified exactly, and the power recurrence is replayed
// in exact integers.
inline bool pell_minimality_certificate(i64 d, const BigInt& t, const BigInt& u) {
    using F = boost::multiprecision::cpp_bin_float_100;
    using boost::multiprecision::round;
    const F tf(t.str());
    const F uf(u.str());
    const F eps = (tf + uf * sqrt(F(d))) / 2;
    const F reg = log(eps);
    const int kmax = static_cast<int>(std::ceil(reg.convert_to<double>() / 0.9624)) + 1;
    for (int k = 2; k <= kmax; ++k) {
        const F root = exp(reg / k);
        const F trace = root + 1 / root;
        const BigInt tp = round(trace).convert_to<BigInt>();
        if (tp < 3) continue;
        if (abs(trace - F(tp.str())) > 0.3) continue;
        const BigInt num = tp * tp - 4;
        if (num % d != 0) continue;
        const BigInt usq = num / d;
        if (!is_square_big(usq)) continue;
        const BigInt up = isqrt_big(usq);
        if (up <= 0 || up >= u) continue;
        BigInt tk = tp, uk = up;
        for (int j = 1; j < k && tk <= t; ++j) {
            const BigInt nt = (tk * tp + d * uk * up) / 2;
            const BigInt nu = (tk * up + uk * tp) / 2;
            tk = nt;
            uk = nu;
        }
        if (tk == t && uk == u) return false;
    }
    return true;
}

// rho by exhaustive search of the residue window.
inline QuadForm rho_exhaustive(const QuadForm& f) {
    const BigInt d = f.discriminant();
    const BigInt sqrt_floor = isqrt_big(d);
    const BigInt two_c = 2 * boost::multiprecision::abs(f.c);
    std::optional<BigInt> found;
    for (BigInt r = sqrt_floor + 1 - two_c; r <= sqrt_floor; ++r) {
        BigInt rem = (r + f.b) % two_c;
        if (rem < 0) rem += two_c;
        if (rem == 0) {
            if (found) throw std::logic_error("rho_exhaustive: window not unique");
            found = r;
        }
    }
    if (!found) throw std::logic_error("rho_exhaustive: empty window");
    QuadForm g;
    g.a = f.c;
    g.b = *found;
    g.c = (*found * *found - d) / (4 * f.c);
    return g;
}

// Regulator as the floating product of the per-step cycle matrices with
// rescaling; shares no arithmetic with the Pell-based route.
inline double regulator_via_cycle_product(const Discriminant& d) {
    const ReductionCycle cyc = reduced_cycle(principal_form(d));
    const std::vector<BigInt> steps = rho_step_coefficients(cyc);
    double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    double log_scale = 0.0;
    for (const BigInt& mb : steps) {
        const double m = mb.convert_to<double>();
        const double n00 = m01, n01 = -m00 + m01 * m;
        const double n10 = m11, n11 = -m10 + m11 * m;
        m00 = n00; m01 = n01; m10 = n10; m11 = n11;
        const double s = std::max({std::abs(m00), std::abs(m01), std::abs(m10), std::abs(m11)});
        m00 /= s; m01 /= s; m10 /= s; m11 /= s;
        log_scale += std::log(s);
    }
    const double tr = std::abs(m00 + m11);
    const double det = m00 * m11 - m01 * m10; // = +-exp(-2 log_scale), tiny
    const double lam = (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det))) / 2.0;
    return log_scale + std::log(lam);
}

// A random SL2(Z)-equivalent representative of the same class.
inline QuadForm random_equivalent(const QuadForm& f, Rng& rng, int n_moves = 10) {
    BigInt p = 1, q = 0, r = 0, s = 1;
    for (int i = 0; i < n_moves; ++i) {
        if (rng.below(2) == 0) {
            const i64 k = static_cast<i64>(rng.below(7)) - 3;
            // right-multiply by T^k
            q += p * k;
            s += r * k;
        } else {
            // right-multiply by S = [[0,-1],[1,0]]
            const BigInt np = q, nq = -p, nr = s, ns = -r;
            p = np; q = nq; r = nr; s = ns;
        }
    }
    return f.transformed(p, q, r, s);
}

// Random valid discriminant in [lo, hi].
inline i64 random_discriminant(Rng& rng, i64 lo, i64 hi) {
    for (;;) {
        const i64 d = lo + static_cast<i64>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
        if (is_discriminant(d)) return d;
    }
}

} // namespace geodist::oracles
