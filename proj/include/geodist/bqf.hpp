#pragma once

#include "geodist/errors.hpp"
#include "geodist/util.hpp"

#include <array>
#include <compare>
#include <map>
#include <string>
#include <vector>

namespace geodist {

// Positive non-square discriminant d = b^2 - 4ac, together with its
// factorization d = conductor^2 * d0, d0 fundamental.
struct Discriminant {
    i64 value = 0;
    bool is_fundamental = false;
    i64 conductor = 1;

    static Discriminant of(i64 d); // throws InvalidDiscriminantError
};

bool is_discriminant(i64 n);

// Integral indefinite binary quadratic form a x^2 + b xy + c y^2.
struct QuadForm {
    BigInt a, b, c;

    BigInt discriminant() const { return b * b - 4 * a * c; }
    bool is_primitive() const;
    BigInt eval(const BigInt& x, const BigInt& y) const {
        return a * x * x + b * x * y + c * y * y;
    }
    // f(M (x,y)) for M = [[p, q], [r, s]].
    QuadForm transformed(const BigInt& p, const BigInt& q,
                         const BigInt& r, const BigInt& s) const;

    friend bool operator==(const QuadForm&, const QuadForm&) = default;
    friend std::strong_ordering operator<=>(const QuadForm& f, const QuadForm& g) {
        if (auto cmp = f.a.compare(g.a); cmp != 0)
            return cmp < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        if (auto cmp = f.b.compare(g.b); cmp != 0)
            return cmp < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        auto cmp = f.c.compare(g.c);
        if (cmp < 0) return std::strong_ordering::less;
        if (cmp > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const;
};

// One rho-orbit of reduced forms; cycles have even length and biject with
// the ideal classes of O_d.
struct ReductionCycle {
    std::vector<QuadForm> forms;

    std::size_t length() const { return forms.size(); }
};

QuadForm principal_form(const Discriminant& d);
bool is_reduced(const QuadForm& f);
QuadForm rho(const QuadForm& f);         // throws NotReducedError
QuadForm reduce(QuadForm f);
ReductionCycle reduced_cycle(const QuadForm& f);
std::vector<QuadForm> enumerate_reduced(const Discriminant& d);
QuadForm compose(const QuadForm& f1, const QuadForm& f2); // throws MixedDiscriminantsError

// Pic(O_d) presented on the rho-cycles of reduced forms. Cycle 0 is the
// principal class; table[i][j] is the cycle index of the composite class.
struct ClassGroup {
    Discriminant d;
    std::vector<ReductionCycle> cycles;
    std::vector<std::vector<int>> table;

    int order() const { return static_cast<int>(cycles.size()); }
    int cycle_index_of(const QuadForm& reduced_form) const; // -1 if absent
    const QuadForm& representative(int i) const { return cycles.at(i).forms.front(); }
    int compose_classes(int i, int j) const { return table.at(i).at(j); }
    int inverse_class(int i) const;

private:
    friend ClassGroup class_group(const Discriminant&);
    mutable std::map<std::array<i64, 3>, int> index_; // reduced form -> cycle
    void build_index() const;
};

ClassGroup class_group(const Discriminant& d);

} // namespace geodist
