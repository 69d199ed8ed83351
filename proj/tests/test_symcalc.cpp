#include <catch_amalgamated.hpp>

#include "modcurv/symcalc.hpp"

using namespace modcurv;

namespace {

SymbolSum atom(AtomKind k, int power = 1, std::vector<int> labels = {}) {
    return SymbolSum(SymbolTerm{GaussRational(1), {Factor(k, power, std::move(labels))}});
}

} // namespace

TEST_CASE("p-symbols") {
    const PSymbols ps = build_p_symbols();
    SECTION("subprincipal coefficients") {
        REQUIRE(ps.p0.size() == 1);
        CHECK(ps.p0.terms()[0].coeff == GaussRational(BigRational(1, 4)));
        REQUIRE(ps.p1.size() == 1);
        CHECK(ps.p1.terms()[0].coeff == -GaussRational::i());
    }
    SECTION("grading") {
        CHECK(ps.p2.terms()[0].xi_degree() == 2);
        CHECK(ps.p1.terms()[0].xi_degree() == 1);
        CHECK(ps.p0.terms()[0].xi_degree() == 0);
        CHECK(ps.b0.terms()[0].xi_degree() == -2);
    }
    SECTION("b0 p2 collapses to the identity") {
        CHECK(widom_product(0, ps.b0, ps.p2) == SymbolSum::one());
    }
}

TEST_CASE("vertical differential") {
    SECTION("resolvent factor") {
        const SymbolSum d = vertical_diff(atom(AtomKind::B0), 0);
        const SymbolSum expect = -SymbolSum(SymbolTerm{
            GaussRational(1),
            {Factor(AtomKind::K, 2), Factor(AtomKind::B0, 2), Factor(AtomKind::DXi2, 1, {0})}});
        CHECK(d == expect);
    }
    SECTION("second derivative of the resolvent factor") {
        const SymbolSum d2 = vertical_diff(vertical_diff(atom(AtomKind::B0), 0), 1);
        const SymbolSum expect =
            GaussRational(2) * SymbolSum(SymbolTerm{GaussRational(1),
                                                    {Factor(AtomKind::K, 4), Factor(AtomKind::B0, 3),
                                                     Factor(AtomKind::DXi2, 1, {0}),
                                                     Factor(AtomKind::DXi2, 1, {1})}}) -
            SymbolSum(SymbolTerm{GaussRational(1),
                                 {Factor(AtomKind::K, 2), Factor(AtomKind::B0, 2),
                                  Factor(AtomKind::D2Xi2, 1, {0, 1})}});
        CHECK(d2 == expect);
    }
    SECTION("constants") {
        CHECK(vertical_diff(atom(AtomKind::K) * atom(AtomKind::Scal), 0).is_zero());
    }
}

TEST_CASE("horizontal differential") {
    SECTION("Leibniz on K^2") {
        const SymbolSum g = horizontal_diff(atom(AtomKind::K, 2), 0);
        const SymbolSum expect =
            SymbolSum(SymbolTerm{GaussRational(1),
                                 {Factor(AtomKind::GradK, 1, {0}), Factor(AtomKind::K)}}) +
            SymbolSum(SymbolTerm{GaussRational(1),
                                 {Factor(AtomKind::K), Factor(AtomKind::GradK, 1, {0})}});
        CHECK(g == expect);
    }
    SECTION("Dirac symbol is horizontally flat") {
        CHECK(horizontal_diff(atom(AtomKind::SigmaD), 0).is_zero());
        CHECK(horizontal_diff(atom(AtomKind::DSigmaD, 1, {3}), 0).is_zero());
    }
    SECTION("second derivative of p2 contains the curvature of |xi|^2") {
        const PSymbols ps = build_p_symbols();
        const SymbolSum g2 = horizontal_diff2(ps.p2, 0, 1);
        bool found = false;
        for (const auto& t : g2.terms()) {
            bool has_grad2xi2 = false, has_xi2 = false;
            for (const auto& f : t.word) {
                if (f.kind == AtomKind::Grad2Xi2) has_grad2xi2 = true;
                if (f.kind == AtomKind::Xi2) has_xi2 = true;
            }
            if (has_grad2xi2) {
                CHECK_FALSE(has_xi2);
                REQUIRE(t.word.size() == 2);
                CHECK(t.word[1].kind == AtomKind::K);
                CHECK(t.word[1].power == 2);
                CHECK(t.coeff == GaussRational(1));
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("product terms on the Dirac symbol") {
    SymbolSum sigma_d = atom(AtomKind::SigmaD);
    SECTION("a1 vanishes") {
        CHECK(widom_product(1, sigma_d, sigma_d).is_zero());
    }
    SECTION("orders above two are rejected") {
        CHECK_THROWS_AS(widom_product(3, sigma_d, sigma_d), UnsupportedOrder);
    }
    SECTION("full Lichnerowicz cross-check") {
        const SymbolSum expect = atom(AtomKind::Xi2) +
            GaussRational(BigRational(1, 4)) * atom(AtomKind::Scal);
        CHECK(dirac_square_symbol() == expect);
    }
}

TEST_CASE("a0 is associative") {
    const PSymbols ps = build_p_symbols();
    const SymbolSum p = ps.p1, q = ps.b0, r = ps.p0 + ps.p1;
    CHECK(widom_product(0, widom_product(0, p, q), r) == widom_product(0, p, widom_product(0, q, r)));
}

TEST_CASE("b1 matches the transcribed reference term-by-term") {
    const SymbolSum b1 = resolvent_b1(); // throws on mismatch
    REQUIRE(b1.size() == 3);
    for (const auto& t : b1.terms()) {
        CHECK(t.xi_degree() == -3);
        CHECK(t.coeff.re() == 0); // purely imaginary at this order
    }
}

TEST_CASE("b2 expansion") {
    const SymbolSum b2 = resolvent_b2(); // grading and reality enforced inside
    SECTION("term count is of the expected size") {
        CHECK(b2.size() >= 20);
        CHECK(b2.size() <= 40);
    }
    SECTION("scalar-curvature head term") {
        // a0(b0,p0)(-b0) = -1/4 K^2 B0^2 Scal.
        bool found = false;
        for (const auto& t : b2.terms()) {
            if (t.word.size() == 3 && t.word[0].kind == AtomKind::Scal &&
                t.word[1].kind == AtomKind::K && t.word[1].power == 2 &&
                t.word[2].kind == AtomKind::B0 && t.word[2].power == 2) {
                CHECK(t.coeff == GaussRational(BigRational(-1, 4)));
                found = true;
            }
        }
        CHECK(found);
    }
    SECTION("every index label occurs exactly twice") {
        for (const auto& t : b2.terms()) {
            std::map<int, int> counts;
            for (const auto& f : t.word)
                for (int l : f.labels) counts[l]++;
            for (const auto& [label, n] : counts) CHECK(n == 2);
        }
    }
}

TEST_CASE("reconstruction: the recursion inverts the full symbol") {
    const PSymbols ps = build_p_symbols();
    const SymbolSum b1 = resolvent_b1();
    const SymbolSum b2 = resolvent_b2();
    const std::vector<const SymbolSum*> b = {&ps.b0, &b1, &b2};
    const std::vector<const SymbolSum*> p = {&ps.p2, &ps.p1, &ps.p0};
    SymbolSum total;
    for (int i = 0; i < 3; ++i)       // resolvent order: deg(b_i) = -2-i
        for (int k = 0; k < 3; ++k)   // symbol order: deg(p[k]) = 2-k
            for (int j = 0; j < 3; ++j) {
                if (-i - k - j >= -2) total = total + widom_product(j, *b[i], *p[k]);
            }
    total = total.filter([](const SymbolTerm& t) { return t.xi_degree() >= -2; });
    CHECK(total == SymbolSum::one());
}

TEST_CASE("merging is canonical under reordering of commuting factors") {
    // K and B0 commute; Xi2 is central: all these spellings must merge.
    SymbolTerm a{GaussRational(1),
                 {Factor(AtomKind::K), Factor(AtomKind::B0), Factor(AtomKind::Xi2)}};
    SymbolTerm b{GaussRational(1),
                 {Factor(AtomKind::B0), Factor(AtomKind::Xi2), Factor(AtomKind::K)}};
    SymbolTerm c{GaussRational(-2), {Factor(AtomKind::Xi2), Factor(AtomKind::K), Factor(AtomKind::B0)}};
    CHECK(SymbolSum(std::vector<SymbolTerm>{a, b, c}).is_zero());
    // But K must not move across GradK.
    SymbolTerm d{GaussRational(1), {Factor(AtomKind::K), Factor(AtomKind::GradK, 1, {0}),
                                    Factor(AtomKind::DSigmaD, 1, {0})}};
    SymbolTerm e{GaussRational(-1), {Factor(AtomKind::GradK, 1, {0}), Factor(AtomKind::K),
                                     Factor(AtomKind::DSigmaD, 1, {0})}};
    CHECK(SymbolSum(std::vector<SymbolTerm>{d, e}).size() == 2);
}
