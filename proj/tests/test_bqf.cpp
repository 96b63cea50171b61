#include "geodist/bqf.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <set>

using namespace geodist;

TEST_CASE("discriminant recognition") {
    CHECK(is_discriminant(5));
    CHECK_FALSE(is_discriminant(9));  // perfect square
    CHECK_FALSE(is_discriminant(7));  // 3 mod 4
    CHECK(is_discriminant(8));
    CHECK(is_discriminant(40));
    CHECK_FALSE(is_discriminant(0));
    CHECK_FALSE(is_discriminant(-4));
    CHECK_FALSE(is_discriminant(16));
    CHECK_THROWS_AS(Discriminant::of(7), InvalidDiscriminantError);
}

TEST_CASE("conductor split") {
    CHECK(Discriminant::of(5).is_fundamental);
    CHECK(Discriminant::of(8).is_fundamental);
    CHECK(Discriminant::of(12).is_fundamental);
    CHECK(Discriminant::of(40).is_fundamental);
    const Discriminant d45 = Discriminant::of(45);
    CHECK_FALSE(d45.is_fundamental);
    CHECK(d45.conductor == 3);
    const Discriminant d20 = Discriminant::of(20);
    CHECK_FALSE(d20.is_fundamental);
    CHECK(d20.conductor == 2);
    // conductor^2 divides d and d / conductor^2 is fundamental
    for (i64 d = 5; d < 500; ++d) {
        if (!is_discriminant(d)) continue;
        const Discriminant dd = Discriminant::of(d);
        CHECK(d % (dd.conductor * dd.conductor) == 0);
        const i64 d0 = d / (dd.conductor * dd.conductor);
        CHECK(is_discriminant(d0));
        CHECK(Discriminant::of(d0).is_fundamental);
    }
}

TEST_CASE("principal form") {
    CHECK(principal_form(Discriminant::of(5)) == QuadForm{1, 1, -1});
    CHECK(principal_form(Discriminant::of(8)) == QuadForm{1, 0, -2});
    CHECK(principal_form(Discriminant::of(13)) == QuadForm{1, 1, -3});
    for (i64 d : {5LL, 8LL, 13LL, 40LL, 229LL, 1000004LL}) {
        CHECK(principal_form(Discriminant::of(d)).discriminant() == d);
    }
}

TEST_CASE("reduction predicate") {
    CHECK(is_reduced(QuadForm{1, 1, -1}));   // d = 5
    CHECK(is_reduced(QuadForm{1, 6, -1}));   // d = 40
    CHECK_FALSE(is_reduced(QuadForm{1, 0, -2})); // d = 8, b = 0
    CHECK_FALSE(is_reduced(QuadForm{5, 1, -1})); // d = 21, |sqrt d - 2a| > b
}

TEST_CASE("rho against exhaustive window search") {
    CHECK(rho(QuadForm{1, 1, -1}) == QuadForm{-1, 1, 1});
    CHECK(rho(QuadForm{-1, 1, 1}) == QuadForm{1, 1, -1});
    CHECK(rho(QuadForm{3, 2, -3}) == QuadForm{-3, 4, 2});
    CHECK_THROWS_AS(rho(QuadForm{1, 0, -2}), NotReducedError);

    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 5000);
        const auto forms = enumerate_reduced(Discriminant::of(d));
        const QuadForm& f = forms[rng.below(forms.size())];
        const QuadForm expect = oracles::rho_exhaustive(f);
        CHECK(rho(f) == expect);
        CHECK(is_reduced(rho(f)));
    }
}

TEST_CASE("reduce reaches the cycle") {
    CHECK(reduce(QuadForm{1, 0, -2}) == QuadForm{1, 2, -1});
    // an already reduced form stays within its own cycle
    const QuadForm f{3, 2, -3};
    const QuadForm r = reduce(f);
    const ReductionCycle cyc = reduced_cycle(f);
    CHECK(std::find(cyc.forms.begin(), cyc.forms.end(), r) != cyc.forms.end());

    // random valid forms of d = 40 land in one of the two cycles
    Rng rng(7);
    const ClassGroup g40 = class_group(Discriminant::of(40));
    for (int trial = 0; trial < 100; ++trial) {
        QuadForm start = g40.cycles[rng.below(2)].forms.front();
        const QuadForm moved = oracles::random_equivalent(start, rng);
        CHECK(moved.discriminant() == 40);
        const QuadForm red = reduce(moved);
        CHECK(is_reduced(red));
        CHECK(g40.cycle_index_of(red) >= 0);
    }
}

TEST_CASE("reduced cycles") {
    const ReductionCycle c5 = reduced_cycle(QuadForm{1, 1, -1});
    CHECK(c5.length() == 2);
    CHECK(c5.forms[0] == QuadForm{1, 1, -1});
    CHECK(c5.forms[1] == QuadForm{-1, 1, 1});

    CHECK(reduced_cycle(QuadForm{1, 6, -1}).length() == 2);
    CHECK(reduced_cycle(QuadForm{3, 2, -3}).length() == 6);
}

TEST_CASE("enumerate_reduced") {
    CHECK(enumerate_reduced(Discriminant::of(5)).size() == 2);
    CHECK(enumerate_reduced(Discriminant::of(40)).size() == 8);
    const auto f8 = enumerate_reduced(Discriminant::of(8));
    REQUIRE(f8.size() == 2);
    CHECK(f8[0] == QuadForm{-1, 2, 1});
    CHECK(f8[1] == QuadForm{1, 2, -1});
    for (i64 d : {13LL, 60LL, 229LL, 1024LL + 1}) {
        if (!is_discriminant(d)) continue;
        for (const auto& f : enumerate_reduced(Discriminant::of(d))) {
            CHECK(is_reduced(f));
            CHECK(f.is_primitive());
            CHECK(f.discriminant() == d);
        }
    }
}

TEST_CASE("rho is a bijection and cycles partition, lengths even") {
    Rng rng(90210);
    for (int trial = 0; trial < 40; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 10000);
        const auto forms = enumerate_reduced(Discriminant::of(d));
        std::set<std::string> images;
        for (const auto& f : forms) images.insert(rho(f).str());
        CHECK(images.size() == forms.size()); // injective on a finite set = bijective
        const ClassGroup cg = class_group(Discriminant::of(d));
        std::size_t total = 0;
        for (const auto& cyc : cg.cycles) {
            CHECK(cyc.length() % 2 == 0);
            total += cyc.length();
        }
        CHECK(total == forms.size());
    }
}

TEST_CASE("composition basics") {
    const Discriminant d40 = Discriminant::of(40);
    const ClassGroup g = class_group(d40);
    REQUIRE(g.order() == 2);

    // identity law
    const QuadForm p = reduce(principal_form(d40));
    for (int i = 0; i < g.order(); ++i) {
        const QuadForm comp = reduce(compose(p, g.representative(i)));
        CHECK(g.cycle_index_of(comp) == i);
    }
    // inverse law: (a, b, c) * (a, -b, c) ~ principal
    for (int i = 0; i < g.order(); ++i) {
        const QuadForm f = g.representative(i);
        const QuadForm finv{f.a, -f.b, f.c};
        CHECK(g.cycle_index_of(reduce(compose(f, reduce(finv)))) == 0);
    }
    // h(40) = 2 forces the non-principal class to square to the identity
    CHECK(g.cycle_index_of(reduce(compose(QuadForm{3, 2, -3}, QuadForm{3, 2, -3}))) == 0);

    CHECK_THROWS_AS(compose(QuadForm{1, 1, -1}, QuadForm{1, 2, -1}), MixedDiscriminantsError);
}

TEST_CASE("composition is well-defined on classes") {
    Rng rng(5150);
    for (int trial = 0; trial < 60; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 3000);
        const ClassGroup g = class_group(Discriminant::of(d));
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.order())));
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.order())));
        const QuadForm f1 = g.representative(i);
        const QuadForm f2 = g.representative(j);
        const int expect = g.cycle_index_of(reduce(compose(f1, f2)));
        const QuadForm f1r = oracles::random_equivalent(f1, rng);
        const QuadForm f2r = oracles::random_equivalent(f2, rng);
        CHECK(g.cycle_index_of(reduce(compose(f1r, f2r))) == expect);
    }
}

TEST_CASE("class groups: orders and axioms") {
    CHECK(class_group(Discriminant::of(5)).order() == 1);
    CHECK(class_group(Discriminant::of(40)).order() == 2);
    // d = 229: order consistency is checked inside class_group; the cycle
    // count is the class number
    const ClassGroup g229 = class_group(Discriminant::of(229));
    CHECK(g229.order() == 3);

    Rng rng(777);
    for (int trial = 0; trial < 25; ++trial) {
        const i64 d = oracles::random_discriminant(rng, 5, 100000);
        const ClassGroup g = class_group(Discriminant::of(d));
        const int h = g.order();
        // commutativity and the latin-square property
        for (int i = 0; i < h; ++i) {
            std::set<int> row(g.table[static_cast<std::size_t>(i)].begin(),
                              g.table[static_cast<std::size_t>(i)].end());
            CHECK(static_cast<int>(row.size()) == h);
            for (int j = 0; j < h; ++j) CHECK(g.table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                                              g.table[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        }
    }
}
