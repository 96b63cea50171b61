#include "geodist/bqf.hpp"
#include "geodist/rng.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace geodist {
namespace {

using boost::multiprecision::abs;
using boost::multiprecision::gcd;

// d = f^2 * d0 with d0 fundamental.
std::pair<i64, i64> conductor_split(i64 d) {
    i64 m = d; // squarefree kernel after the loop
    i64 f = 1;
    for (i64 p = 2; p * p <= m; ++p) {
        while (m % (p * p) == 0) { m /= p * p; f *= p; }
    }
    i64 d0;
    if (m % 4 == 1) {
        d0 = m;
    } else {
        // kernel = 2 or 3 mod 4 forces d = 0 mod 4 and an even conductor
        if (f % 2 != 0) throw std::logic_error("conductor_split: parity inconsistency");
        d0 = 4 * m;
        f /= 2;
    }
    if (f * f * d0 != d) throw std::logic_error("conductor_split: not a square split");
    return {f, d0};
}

// Unique r = -b (mod 2|c|) in the window sqrt(d) - 2|c| < r < sqrt(d),
// i.e. the integer range [floor(sqrt d) + 1 - 2|c|, floor(sqrt d)].
BigInt rho_residue(const BigInt& b, const BigInt& c, const BigInt& sqrt_floor) {
    const BigInt m = 2 * abs(c);
    BigInt x = (sqrt_floor + b) % m;
    if (x < 0) x += m;
    return sqrt_floor - x;
}

// x*s + y*t = 1 for coprime machine ints.
void ext_gcd_unit(i64 x, i64 y, i64& s, i64& t) {
    i64 old_r = x, r = y, old_s = 1, s1 = 0, old_t = 0, t1 = 1;
    while (r != 0) {
        const i64 q = old_r / r;
        i64 tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s1; old_s = s1; s1 = tmp;
        tmp = old_t - q * t1; old_t = t1; t1 = tmp;
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    if (old_r != 1) throw std::logic_error("ext_gcd_unit: inputs not coprime");
    s = old_s;
    t = old_t;
}

// Inverse of a modulo m > 0 (gcd(a, m) = 1).
BigInt mod_inverse(BigInt a, const BigInt& m) {
    a %= m;
    if (a < 0) a += m;
    BigInt old_r = a, r = m, old_s = 1, s = 0;
    while (r != 0) {
        const BigInt q = old_r / r;
        BigInt tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
    }
    if (old_r != 1) throw std::logic_error("mod_inverse: not invertible");
    old_s %= m;
    if (old_s < 0) old_s += m;
    return old_s;
}

} // namespace

bool is_discriminant(i64 n) {
    if (n <= 0) return false;
    const i64 r = n % 4;
    if (r != 0 && r != 1) return false;
    return !is_square64(n);
}

Discriminant Discriminant::of(i64 d) {
    if (!is_discriminant(d)) {
        throw InvalidDiscriminantError("not a positive non-square discriminant: " + std::to_string(d));
    }
    Discriminant out;
    out.value = d;
    auto [f, d0] = conductor_split(d);
    out.conductor = f;
    out.is_fundamental = (f == 1);
    return out;
}

bool QuadForm::is_primitive() const {
    return gcd(gcd(a, b), c) == 1;
}

QuadForm QuadForm::transformed(const BigInt& p, const BigInt& q,
                               const BigInt& r, const BigInt& s) const {
    QuadForm g;
    g.a = a * p * p + b * p * r + c * r * r;
    g.b = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
    g.c = a * q * q + b * q * s + c * s * s;
    return g;
}

std::string QuadForm::str() const {
    std::ostringstream os;
    os << "(" << a << "," << b << "," << c << ")";
    return os.str();
}

QuadForm principal_form(const Discriminant& d) {
    QuadForm f;
    f.a = 1;
    f.b = d.value % 2;
    f.c = (f.b * f.b - d.value) / 4;
    return f;
}

// Reduced iff |sqrt(d) - 2|a|| < b < sqrt(d), checked on squares so no
// floating point can misclassify a boundary case.
bool is_reduced(const QuadForm& f) {
    const BigInt d = f.discriminant();
    if (d <= 0) return false;
    if (f.b <= 0) return false;
    if (f.b * f.b >= d) return false;
    const BigInt two_a = 2 * abs(f.a);
    if ((two_a + f.b) * (two_a + f.b) <= d) return false;     // need sqrt(d) < 2|a| + b
    if (two_a > f.b && (two_a - f.b) * (two_a - f.b) >= d) return false; // need 2|a| - b < sqrt(d)
    return true;
}

QuadForm rho(const QuadForm& f) {
    if (!is_reduced(f)) throw NotReducedError("rho: form is not reduced: " + f.str());
    const BigInt d = f.discriminant();
    const BigInt sqrt_floor = isqrt_big(d);
    const BigInt r = rho_residue(f.b, f.c, sqrt_floor);
    QuadForm g;
    g.a = f.c;
    g.b = r;
    const BigInt num = r * r - d;
    if (num % (4 * f.c) != 0) throw std::logic_error("rho: non-integral continuation");
    g.c = num / (4 * f.c);
    return g;
}

QuadForm reduce(QuadForm f) {
    const BigInt d = f.discriminant();
    if (d <= 0 || is_square_big(d)) {
        throw InvalidDiscriminantError("reduce: form is not indefinite non-square");
    }
    if (f.a == 0 || f.c == 0) throw std::invalid_argument("reduce: degenerate form");
    const BigInt sqrt_floor = isqrt_big(d);
    for (int iter = 0; iter < 100000; ++iter) {
        if (is_reduced(f)) return f;
        BigInt r;
        if (f.c * f.c > d) {
            // |c| >= sqrt(d): normalize with r = -b (mod 2|c|) in (-|c|, |c|]
            const BigInt m = 2 * abs(f.c);
            BigInt x = (-f.b) % m;
            if (x < 0) x += m;
            r = (x <= abs(f.c)) ? x : x - m;
        } else {
            r = rho_residue(f.b, f.c, sqrt_floor);
        }
        QuadForm g;
        g.a = f.c;
        g.b = r;
        g.c = (r * r - d) / (4 * f.c);
        f = g;
    }
    throw std::logic_error("reduce: did not terminate");
}

ReductionCycle reduced_cycle(const QuadForm& f) {
    ReductionCycle cyc;
    const QuadForm start = reduce(f);
    QuadForm g = start;
    do {
        cyc.forms.push_back(g);
        g = rho(g);
        if (cyc.forms.size() > 2000000) throw std::logic_error("reduced_cycle: runaway cycle");
    } while (g != start);
    if (cyc.forms.size() % 2 != 0) throw std::logic_error("reduced_cycle: odd cycle length");
    return cyc;
}

std::vector<QuadForm> enumerate_reduced(const Discriminant& dd) {
    const i64 d = dd.value;
    if (d > 2000000000000LL) throw std::invalid_argument("enumerate_reduced: d too large");
    const i64 sqrt_floor = isqrt64(d);
    std::vector<QuadForm> forms;
    for (i64 b = (d % 2 == 0) ? 2 : 1; b <= sqrt_floor; b += 2) {
        const i64 n = (d - b * b) / 4; // = -a c > 0
        const i64 amax = (sqrt_floor + b) / 2 + 1;
        for (i64 aa = 1; aa <= amax; ++aa) {
            if (n % aa != 0) continue;
            const i64 two_a = 2 * aa;
            if ((two_a + b) * (two_a + b) <= d) continue;
            if (two_a > b && (two_a - b) * (two_a - b) >= d) continue;
            const i64 cc = n / aa;
            if (std::gcd(std::gcd(aa, b), cc) != 1) continue;
            forms.push_back(QuadForm{aa, b, -cc});
            forms.push_back(QuadForm{-aa, b, cc});
        }
    }
    std::sort(forms.begin(), forms.end());
    return forms;
}

// Dirichlet composition. f2 is first moved inside its class so that the
// leading coefficients are coprime; the forms are then concordant and the
// composite is (a1 a2, B, (B^2 - d)/(4 a1 a2)).
QuadForm compose(const QuadForm& f1, const QuadForm& f2) {
    const BigInt d = f1.discriminant();
    if (d != f2.discriminant()) {
        throw MixedDiscriminantsError("compose: mixed discriminants " + f1.str() + " vs " + f2.str());
    }
    if (!f1.is_primitive() || !f2.is_primitive()) {
        throw std::invalid_argument("compose: forms must be primitive");
    }
    QuadForm g2 = f2;
    if (gcd(f1.a, g2.a) != 1) {
        // A primitive form represents integers coprime to any fixed modulus;
        // scan small coprime (x, y) and change variables so that the value
        // f2(x, y) becomes the leading coefficient.
        bool found = false;
        for (i64 box = 1; box <= 256 && !found; ++box) {
            for (i64 x = -box; x <= box && !found; ++x) {
                for (i64 y = -box; y <= box && !found; ++y) {
                    if (std::max(std::llabs(x), std::llabs(y)) != box) continue;
                    if (std::gcd(x, y) != 1) continue;
                    const BigInt v = f2.eval(x, y);
                    if (v == 0 || gcd(v, f1.a) != 1) continue;
                    i64 s = 0, t = 0;
                    ext_gcd_unit(x, y, s, t); // x s + y t = 1
                    g2 = f2.transformed(x, -t, y, s); // det [[x,-t],[y,s]] = 1
                    found = true;
                }
            }
        }
        if (!found) throw std::logic_error("compose: no coprime representative found");
    }
    const BigInt a1 = f1.a, a2 = g2.a;
    // CRT: B = b1 (mod 2 a1), B = b2 (mod 2 a2); the b's share parity with d.
    const BigInt delta = (g2.b - f1.b) / 2;
    const BigInt mod_a2 = abs(a2);
    BigInt k = 0;
    if (mod_a2 > 1) {
        const BigInt inv = mod_inverse(a1, mod_a2);
        k = (delta % mod_a2) * inv % mod_a2;
        if (k < 0) k += mod_a2;
    }
    BigInt B = f1.b + 2 * a1 * k;
    const BigInt big_mod = 2 * abs(a1 * a2);
    B %= big_mod;
    if (B < 0) B += big_mod;

    QuadForm out;
    out.a = a1 * a2;
    out.b = B;
    const BigInt num = B * B - d;
    if (num % (4 * out.a) != 0) throw std::logic_error("compose: non-integral composite");
    out.c = num / (4 * out.a);
    if (out.discriminant() != d) throw std::logic_error("compose: discriminant drift");
    if (!out.is_primitive()) throw std::logic_error("compose: imprimitive composite");
    return out;
}

void ClassGroup::build_index() const {
    if (!index_.empty() || cycles.empty()) return;
    for (int i = 0; i < static_cast<int>(cycles.size()); ++i) {
        for (const QuadForm& f : cycles[i].forms) {
            index_[{f.a.convert_to<i64>(), f.b.convert_to<i64>(), f.c.convert_to<i64>()}] = i;
        }
    }
}

int ClassGroup::cycle_index_of(const QuadForm& f) const {
    build_index();
    auto it = index_.find({f.a.convert_to<i64>(), f.b.convert_to<i64>(), f.c.convert_to<i64>()});
    return it == index_.end() ? -1 : it->second;
}

int ClassGroup::inverse_class(int i) const {
    for (int j = 0; j < order(); ++j) {
        if (table[i][j] == 0) return j;
    }
    throw std::logic_error("ClassGroup: class without inverse");
}

ClassGroup class_group(const Discriminant& d) {
    ClassGroup cg;
    cg.d = d;
    std::vector<QuadForm> forms = enumerate_reduced(d);
    std::map<std::array<i64, 3>, int> seen; // form -> cycle id
    auto key = [](const QuadForm& f) {
        return std::array<i64, 3>{f.a.convert_to<i64>(), f.b.convert_to<i64>(), f.c.convert_to<i64>()};
    };
    for (const QuadForm& f : forms) {
        if (seen.count(key(f))) continue;
        // Store each cycle starting at its smallest member with a > 0, so the
        // lift to a geodesic gets the root ordering w > w_conj.
        ReductionCycle raw = reduced_cycle(f);
        std::size_t start = 0;
        bool have = false;
        for (std::size_t i = 0; i < raw.forms.size(); ++i) {
            if (raw.forms[i].a <= 0) continue;
            if (!have || raw.forms[i] < raw.forms[start]) { start = i; have = true; }
        }
        if (!have) throw std::logic_error("class_group: cycle without positive leading coefficient");
        ReductionCycle cyc;
        cyc.forms.reserve(raw.forms.size());
        for (std::size_t i = 0; i < raw.forms.size(); ++i) {
            cyc.forms.push_back(raw.forms[(start + i) % raw.forms.size()]);
        }
        const int id = static_cast<int>(cg.cycles.size());
        for (const QuadForm& g : cyc.forms) {
            auto [it, inserted] = seen.emplace(key(g), id);
            if (!inserted) throw std::logic_error("class_group: cycles overlap");
        }
        cg.cycles.push_back(std::move(cyc));
    }
    {
        std::size_t total = 0;
        for (const auto& c : cg.cycles) total += c.length();
        if (total != forms.size()) {
            throw std::logic_error("class_group: cycles do not partition the reduced forms");
        }
    }

    // Principal cycle first.
    const QuadForm p = reduce(principal_form(d));
    auto it = seen.find(key(p));
    if (it == seen.end()) throw std::logic_error("class_group: principal form missing");
    if (it->second != 0) std::swap(cg.cycles[0], cg.cycles[it->second]);

    // Composition table on cycle representatives.
    cg.index_.clear();
    cg.build_index();
    const int h = cg.order();
    cg.table.assign(h, std::vector<int>(h, -1));
    for (int i = 0; i < h; ++i) {
        for (int j = i; j < h; ++j) {
            const QuadForm comp = reduce(compose(cg.representative(i), cg.representative(j)));
            const int k = cg.cycle_index_of(comp);
            if (k < 0) throw std::logic_error("class_group: composite lands outside enumerated cycles");
            cg.table[i][j] = k;
            cg.table[j][i] = k;
        }
    }

    // Group axioms. Identity and inverses are cheap; associativity is cubic,
    // so sample it for large groups.
    for (int j = 0; j < h; ++j) {
        if (cg.table[0][j] != j) throw std::logic_error("class_group: identity law fails");
    }
    for (int i = 0; i < h; ++i) cg.inverse_class(i);
    auto check_assoc = [&](int i, int j, int k) {
        if (cg.table[cg.table[i][j]][k] != cg.table[i][cg.table[j][k]]) {
            throw std::logic_error("class_group: associativity fails");
        }
    };
    if (static_cast<long long>(h) * h * h <= 2000000LL) {
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < h; ++j)
                for (int k = 0; k < h; ++k) check_assoc(i, j, k);
    } else {
        std::uint64_t state = static_cast<std::uint64_t>(d.value);
        for (int n = 0; n < 1000000; ++n) {
            const int r1 = static_cast<int>(Rng::splitmix64(state) % h);
            const int r2 = static_cast<int>(Rng::splitmix64(state) % h);
            const int r3 = static_cast<int>(Rng::splitmix64(state) % h);
            check_assoc(r1, r2, r3);
        }
    }

    return cg;
}

} // namespace geodist
