#include <catch_amalgamated.hpp>

#include "modcurv/cosphere.hpp"

using namespace modcurv;

namespace {

SymbolSum term(GaussRational c, std::vector<Factor> word) {
    return SymbolSum(SymbolTerm{std::move(c), std::move(word)});
}

RationalFunction q(long a, long b = 1) {
    return RationalFunction(GaussRational(BigRational(a, b)));
}

const RationalFunction mvar = RationalFunction::var(Var::m);

} // namespace

TEST_CASE("gamma matrices") {
    for (int m : {2, 4, 6, 8}) {
        const auto g = clifford_gammas(m);
        REQUIRE(static_cast<int>(g.size()) == m);
        CHECK(g[0].size() == (1 << (m / 2)));
        const GMat id = GMat::identity(g[0].size());
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                GMat anti = g[a] * g[b] + g[b] * g[a];
                if (a == b) CHECK(anti == GaussRational(-2) * id);
                else CHECK(anti.is_zero());
            }
    }
    CHECK_THROWS_AS(clifford_gammas(5), Error);
    CHECK_THROWS_AS(clifford_gammas(14), Error);
}

TEST_CASE("sphere rule verification from first principles") {
    for (int m : {4, 6, 8}) {
        const VerificationReport rep = verify_sphere_rules(m, /*seed=*/7 + m);
        for (const auto& c : rep.checks) {
            INFO(rep.suite << ": " << c.name);
            CHECK(c.pass);
        }
        CHECK(rep.checks.size() >= 9);
    }
}

TEST_CASE("single-rule averages") {
    SECTION("Dsigma pair transfers a plain delta") {
        // K B0 GradK(0) K B0 GradK(1) B0 DSigmaD(0) DSigmaD(1)
        const SymbolSum s = term(GaussRational(1),
                                 {Factor(AtomKind::K), Factor(AtomKind::B0),
                                  Factor(AtomKind::GradK, 1, {0}), Factor(AtomKind::K),
                                  Factor(AtomKind::B0), Factor(AtomKind::GradK, 1, {1}),
                                  Factor(AtomKind::B0), Factor(AtomKind::DSigmaD, 1, {0}),
                                  Factor(AtomKind::DSigmaD, 1, {1})});
        const auto out = integrate_sphere(s);
        REQUIRE(out.size() == 1);
        CHECK(equals(out[0].coeff, q(1)));
        CHECK(out[0].xi_power == 0);
        CHECK(out[0].scal_power == 0);
        // Both gradient slots now carry the same contraction index.
        std::vector<int> labels;
        for (const auto& f : out[0].word)
            for (int l : f.labels) labels.push_back(l);
        CHECK(labels == std::vector<int>{0, 0});
    }
    SECTION("Clifford square of (Dsigma)sigma") {
        const SymbolSum s = term(GaussRational(1),
                                 {Factor(AtomKind::GradK, 1, {0}), Factor(AtomKind::B0),
                                  Factor(AtomKind::GradK, 1, {1}),
                                  Factor(AtomKind::DSigmaD, 1, {0}), Factor(AtomKind::SigmaD),
                                  Factor(AtomKind::DSigmaD, 1, {1}), Factor(AtomKind::SigmaD)});
        const auto out = integrate_sphere(s);
        REQUIRE(out.size() == 1);
        CHECK(equals(out[0].coeff, (q(2) - mvar) / mvar));
        CHECK(out[0].xi_power == 2);
    }
    SECTION("curvature row with the third phase jet") {
        const SymbolSum s = term(
            GaussRational(1),
            {Factor(AtomKind::DXi2, 1, {0}), Factor(AtomKind::D2Xi2, 1, {1, 2}),
             Factor(AtomKind::Grad3Ell, 1, {0, 1, 2}), Factor(AtomKind::K, 4),
             Factor(AtomKind::B0, 3)});
        const auto out = integrate_sphere(s);
        REQUIRE(out.size() == 1);
        CHECK(equals(out[0].coeff, q(-8, 3) / mvar));
        CHECK(out[0].scal_power == 1);
        CHECK(out[0].xi_power == 2);
        REQUIRE(out[0].word.size() == 2);
        CHECK(out[0].word[0].kind == AtomKind::K);
        CHECK(out[0].word[1].kind == AtomKind::B0);
    }
    SECTION("vanishing rows are dropped") {
        const SymbolSum s = term(GaussRational(1),
                                 {Factor(AtomKind::DXi2, 1, {0}), Factor(AtomKind::DXi2, 1, {1}),
                                  Factor(AtomKind::Grad2Xi2, 1, {0, 1}), Factor(AtomKind::K, 6),
                                  Factor(AtomKind::B0, 4)}) +
                             term(GaussRational(1),
                                  {Factor(AtomKind::DXi2, 1, {0}), Factor(AtomKind::DXi2, 1, {1}),
                                   Factor(AtomKind::Grad2Tau, 1, {0, 1}), Factor(AtomKind::K, 4),
                                   Factor(AtomKind::B0, 3)});
        CHECK(integrate_sphere(s).empty());
    }
    SECTION("unknown pattern is rejected") {
        const SymbolSum s = term(GaussRational(1), {Factor(AtomKind::Grad3Ell, 1, {0, 0}),
                                                    Factor(AtomKind::DXi2, 1, {1}),
                                                    Factor(AtomKind::DXi2, 1, {1})});
        CHECK_THROWS_AS(integrate_sphere(s), UnknownPattern);
    }
}

TEST_CASE("sphere average of the full b2 expansion") {
    const auto terms = integrate_sphere(resolvent_b2());
    REQUIRE(!terms.empty());

    int hess = 0, gradgrad = 0, scal = 0;
    for (const auto& kt : terms) {
        int n_grad2k = 0, n_gradk = 0;
        for (const auto& f : kt.word) {
            if (f.kind == AtomKind::Grad2K) ++n_grad2k;
            if (f.kind == AtomKind::GradK) ++n_gradk;
        }
        if (n_grad2k == 1 && n_gradk == 0) ++hess;
        else if (n_grad2k == 0 && n_gradk == 2) ++gradgrad;
        else if (n_grad2k == 0 && n_gradk == 0) ++scal;
        else FAIL("unexpected kinetic insertion structure: " + kt.str());
        if (n_grad2k + n_gradk == 0) CHECK(kt.scal_power == 1);
        else CHECK(kt.scal_power == 0);
    }
    CHECK(hess >= 1);
    CHECK(gradgrad >= 1);
    CHECK(scal >= 1);

    SECTION("scalar-curvature sector matches the hand computation") {
        // Expected: -1/4 K^2 B0^2 Scal + (2/3m) K^4 B0^3 Scal |xi|^2.
        for (const auto& kt : terms) {
            if (kt.scal_power != 1) continue;
            REQUIRE(kt.word.size() == 2);
            REQUIRE(kt.word[0].kind == AtomKind::K);
            REQUIRE(kt.word[1].kind == AtomKind::B0);
            if (kt.word[0].power == 2) {
                CHECK(kt.word[1].power == 2);
                CHECK(kt.xi_power == 0);
                CHECK(equals(kt.coeff, q(-1, 4)));
            } else {
                CHECK(kt.word[0].power == 4);
                CHECK(kt.word[1].power == 3);
                CHECK(kt.xi_power == 2);
                CHECK(equals(kt.coeff, q(2, 3) / mvar));
            }
        }
    }
}
