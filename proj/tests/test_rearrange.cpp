#include <catch_amalgamated.hpp>

#include <random>

#include "modcurv/fixtures.hpp"
#include "modcurv/rearrange.hpp"

using namespace modcurv;

namespace {

KineticTerm make_kinetic(long c, int xi, int scal, std::vector<Factor> word) {
    KineticTerm kt;
    kt.coeff = RationalFunction(c);
    kt.xi_power = xi;
    kt.scal_power = scal;
    kt.word = std::move(word);
    return kt;
}

} // namespace

TEST_CASE("normal ordering of averaged kinetic words") {
    SECTION("separated gradients pick up modular half-weights") {
        // -|xi|^2 K B0 GradK B0 GradK K B0
        const KineticTerm kt = make_kinetic(
            -1, 2, 0,
            {Factor(AtomKind::K), Factor(AtomKind::B0), Factor(AtomKind::GradK, 1, {0}),
             Factor(AtomKind::B0), Factor(AtomKind::GradK, 1, {0}), Factor(AtomKind::K),
             Factor(AtomKind::B0)});
        const CanonicalTerm ct = normal_order(kt);
        CHECK(ct.kind == InsertionKind::GradGrad);
        CHECK(ct.b0_exponents == std::vector<int>{1, 1, 1});
        CHECK(ct.halfweights == std::vector<int>{1, 1});
        CHECK(ct.k_power == 2);
        const SpectralFunction sf = to_spectral(ct);
        CHECK(sf.basis == BasisKind::H);
        // prefactor -sqrt(s) sqrt(t) = -s4^2 t4^2
        CHECK(equals(sf.prefactor, -RationalFunction::var(Var::s4, 2) *
                                       RationalFunction::var(Var::t4, 2)));
    }
    SECTION("Hessian insertion") {
        // -|xi|^2 K^3 B0^2 Grad2K B0
        const KineticTerm kt = make_kinetic(
            -1, 2, 0,
            {Factor(AtomKind::K, 3), Factor(AtomKind::B0, 2), Factor(AtomKind::Grad2K, 1, {0, 0}),
             Factor(AtomKind::B0)});
        const CanonicalTerm ct = normal_order(kt);
        CHECK(ct.kind == InsertionKind::Hess);
        CHECK(ct.b0_exponents == std::vector<int>{2, 1});
        CHECK(ct.halfweights == std::vector<int>{0});
        const SpectralFunction sf = to_spectral(ct);
        CHECK(sf.basis == BasisKind::K);
        CHECK(sf.exponents == std::vector<int>{2, 1});
        CHECK(equals(sf.prefactor, RationalFunction(-1)));
    }
    SECTION("scalar term") {
        KineticTerm kt = make_kinetic(1, 0, 1, {Factor(AtomKind::K, 2), Factor(AtomKind::B0, 2)});
        kt.coeff = RationalFunction(Polynomial::term(GaussRational(BigRational(-1, 4)), Monomial::one()));
        const CanonicalTerm ct = normal_order(kt);
        CHECK(ct.kind == InsertionKind::ScalTerm);
        CHECK(ct.b0_exponents == std::vector<int>{2});
        const SpectralFunction sf = to_spectral(ct);
        CHECK(sf.basis == BasisKind::C);
        CHECK(sf.exponents == std::vector<int>{2});
    }
    SECTION("adjacent gradients become a one-variable insertion") {
        // 2 |xi|^4 K^4 B0^3 GradK GradK B0
        const KineticTerm kt = make_kinetic(
            2, 4, 0,
            {Factor(AtomKind::K, 4), Factor(AtomKind::B0, 3), Factor(AtomKind::GradK, 1, {0}),
             Factor(AtomKind::GradK, 1, {0}), Factor(AtomKind::B0)});
        const CanonicalTerm ct = normal_order(kt);
        CHECK(ct.kind == InsertionKind::GradSq);
        CHECK(ct.b0_exponents == std::vector<int>{3, 1});
        CHECK(ct.halfweights == std::vector<int>{0, 0});
    }
    SECTION("homogeneity violations are rejected") {
        // wrong |xi| power
        const KineticTerm kt = make_kinetic(
            1, 6, 0,
            {Factor(AtomKind::K, 3), Factor(AtomKind::B0, 2), Factor(AtomKind::Grad2K, 1, {0, 0}),
             Factor(AtomKind::B0)});
        CHECK_THROWS_AS(to_spectral(normal_order(kt)), HomogeneityViolation);
    }
}

TEST_CASE("master functions match the transcribed references exactly") {
    const MasterFunctions mf = assemble_master();
    SECTION("one-variable master") {
        CHECK(equals(mf.F, fixtures::master_one_variable()));
    }
    SECTION("two-variable master") {
        CHECK(equals(mf.G, fixtures::master_two_variable()));
    }
    SECTION("scalar sector") {
        const RationalFunction u = RationalFunction::var(Var::u);
        const RationalFunction one(1);
        const RationalFunction mv = RationalFunction::var(Var::m);
        const RationalFunction expect =
            RationalFunction(Polynomial::term(GaussRational(BigRational(-1, 4)), Monomial::one())) *
                (one - u).pow(-2) +
            (RationalFunction(2) / (RationalFunction(3) * mv)) * (one - u).pow(-3);
        CHECK(equals(mf.C, expect));
    }
}

TEST_CASE("scalar-curvature constant") {
    SECTION("degenerate basis values") {
        CHECK(constant_c(2, 4) == BigRational(1));
        CHECK(constant_c(3, 4) == BigRational(1));
        CHECK(constant_c(2, 6) == BigRational(2));
    }
    SECTION("coefficient identity for all tabulated dimensions") {
        for (int m = 4; m <= 12; m += 2) {
            const BigRational lhs = BigRational(-1, 4) * constant_c(2, m) +
                                    BigRational(2) * constant_c(3, m) / (3 * m);
            const BigRational gamma_half = BigRational(factorial(m / 2 - 1));
            CHECK(lhs == -gamma_half / 12);
            CHECK(scalar_constant(m) == -gamma_half / 12);
        }
    }
    SECTION("normalization accessor") {
        const Normalization n = normalization_constant(4);
        CHECK(n.four_pi_exponent == -2);
        CHECK(n.gamma_inverse == BigRational(1));
        // assembled normalization: (4 pi)^{-m/2} * (-1/12)
        for (int m = 4; m <= 12; m += 2) {
            const Normalization nm = normalization_constant(m);
            CHECK(nm.gamma_inverse * scalar_constant(m) == BigRational(-1, 12));
        }
    }
    SECTION("degenerate consistency c = K(1) = H(1,1)") {
        for (int m : {4, 6, 8}) {
            CHECK_THAT(basis_value(1, 1, 0, m, 1.0, 1.0),
                       Catch::Matchers::WithinAbs(to_double(constant_c(2, m)), 1e-12));
            CHECK_THAT(basis_value(1, 1, 1, m, 1.0, 1.0),
                       Catch::Matchers::WithinAbs(to_double(constant_c(3, m)), 1e-12));
        }
    }
}

TEST_CASE("quadrature oracle agrees with the closed forms") {
    SECTION("worked examples") {
        CHECK_THAT(quadrature_oracle(1, 1, 0, 4, 1.0, 1.0), Catch::Matchers::WithinAbs(0.5, 1e-9));
        CHECK_THAT(quadrature_oracle(1, 1, 0, 4, 4.0, 1.0),
                   Catch::Matchers::WithinAbs(0.125, 1e-9));
        CHECK_THAT(quadrature_oracle(1, 1, 1, 4, 1.0, 1.0), Catch::Matchers::WithinAbs(0.5, 1e-9));
    }
    SECTION("random resolvent-power families") {
        std::mt19937 rng(20260823);
        std::uniform_int_distribution<int> pick_p(1, 3), pick_m(2, 6), coin(0, 1);
        std::uniform_real_distribution<double> pick_s(0.1, 10.0);
        for (int c = 0; c < 50; ++c) {
            const int p = pick_p(rng), q = pick_p(rng);
            const int l = coin(rng) ? pick_p(rng) : 0;
            const int m = 2 * pick_m(rng); // 4..12
            const double s = pick_s(rng), t = l > 0 ? pick_s(rng) : 1.0;
            const double quad = quadrature_oracle(p, q, l, m, s, t);
            const double closed = 0.5 * basis_value(p, q, l, m, s, t);
            INFO("p=" << p << " q=" << q << " l=" << l << " m=" << m << " s=" << s << " t=" << t);
            CHECK_THAT(quad, Catch::Matchers::WithinAbs(closed, 1e-8));
        }
    }
}
