#include "geodist/pell.hpp"

#include <cmath>

namespace geodist {

std::vector<BigInt> rho_step_coefficients(const ReductionCycle& cycle) {
    const std::size_t n = cycle.length();
    std::vector<BigInt> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const QuadForm& f = cycle.forms[i];
        const QuadForm& g = cycle.forms[(i + 1) % n];
        const BigInt num = f.b + g.b;
        if (num % (2 * f.c) != 0) throw std::logic_error("rho_step_coefficients: non-integral step");
        out.push_back(num / (2 * f.c));
    }
    return out;
}

PellSolution fundamental_pell(const Discriminant& d) {
    const ReductionCycle cyc = reduced_cycle(principal_form(d));
    const std::vector<BigInt> steps = rho_step_coefficients(cyc);
    // M = prod_i [[0, -1], [1, m_i]] stabilizes the cycle's first form, which
    // has leading coefficient +-1, so u can be read off the lower-left entry.
    BigInt m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    for (const BigInt& m : steps) {
        const BigInt n00 = m01, n01 = -m00 + m01 * m;
        const BigInt n10 = m11, n11 = -m10 + m11 * m;
        m00 = n00; m01 = n01; m10 = n10; m11 = n11;
    }
    const BigInt a0 = cyc.forms.front().a;
    if (a0 != 1 && a0 != -1) throw std::logic_error("fundamental_pell: principal cycle anchor not unimodular");
    PellSolution p;
    p.t = boost::multiprecision::abs(m00 + m11);
    p.u = boost::multiprecision::abs(m10 / a0);
    if (p.t * p.t - d.value * p.u * p.u != 4) {
        throw std::logic_error("fundamental_pell: cycle automorph is not a Pell solution");
    }
    if (p.u <= 0) throw std::logic_error("fundamental_pell: trivial automorph");
    return p;
}

RegulatorData regulator_from(const PellSolution& p, const Discriminant& d) {
    // log((t + u sqrt d)/2) = log t - log 2 + log1p(u sqrt d / t); the ratio
    // is evaluated through logs so arbitrarily large t, u never overflow.
    const double log_t = log_big(p.t);
    const double log_ratio = log_big(p.u) + 0.5 * std::log(static_cast<double>(d.value)) - log_t;
    RegulatorData reg;
    reg.regulator = log_t - 0.6931471805599453 + std::log1p(std::exp(log_ratio));
    reg.period = 2.0 * reg.regulator;
    // A norm -1 unit eta with eta^2 = epsilon exists iff t - 2 is a perfect
    // square s^2 with u divisible by s and d (u/s)^2 = t + 2.
    const BigInt tm2 = p.t - 2;
    if (tm2 >= 0 && is_square_big(tm2)) {
        const BigInt s = isqrt_big(tm2);
        if (s > 0 && p.u % s == 0) {
            const BigInt y = p.u / s;
            reg.has_norm_minus_one_unit = (d.value * y * y == p.t + 2);
        }
    }
    return reg;
}

RegulatorData regulator(const Discriminant& d) {
    return regulator_from(fundamental_pell(d), d);
}

std::array<BigInt, 4> automorph(const QuadForm& f, const PellSolution& p) {
    const BigInt tb = p.t - f.b * p.u;
    if (tb % 2 != 0) throw ParityViolationError("automorph: t - b u is odd");
    std::array<BigInt, 4> m{tb / 2, -f.c * p.u, f.a * p.u, (p.t + f.b * p.u) / 2};
    if (m[0] * m[3] - m[1] * m[2] != 1) throw std::logic_error("automorph: determinant is not 1");
    return m;
}

} // namespace geodist
