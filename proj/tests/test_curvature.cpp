#include <catch_amalgamated.hpp>

#include <random>

#include "modcurv/curvature.hpp"
#include "modcurv/fixtures.hpp"

using namespace modcurv;

namespace {

double rel(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Dimension-four closed forms used as independent references.
double K4_closed(double u) { return -2.0 * std::exp(-u / 2.0) * std::sinh(u / 4.0) / u; }
double H4_closed(double u, double v) {
    return 4.0 * std::exp(-0.75 * (u + v)) *
           (-u * std::exp(v / 2.0) + (std::exp(u / 2.0) - 1.0) * std::exp(v / 2.0) * v + u) /
           (u * v * (u + v));
}

} // namespace

TEST_CASE("dimension extraction matches the published listings") {
    for (int m : {4, 6, 8}) {
        const CurvatureSet set = extract_dimension(m);
        INFO("m = " << m);
        CHECK(equals(set.K_delta, fixtures::curvature_one_variable(m)));
        CHECK(equals(set.H_delta, fixtures::curvature_two_variable(m)));
        // Dirac-operator companions differ by the extra modular quarter-powers.
        CHECK(equals(set.K_dirac, RationalFunction::var(Var::s4) * set.K_delta));
        CHECK(equals(set.H_dirac,
                     RationalFunction::var(Var::s4) * RationalFunction::var(Var::t4) * set.H_delta));
        // All coefficients are real.
        for (const Polynomial* p : {&set.K_delta.num(), &set.K_delta.den(), &set.H_delta.num(),
                                    &set.H_delta.den()})
            for (const auto& [mono, c] : p->terms()) CHECK(c.is_real());
        CHECK(set.c_scal == -BigRational(factorial(m / 2 - 1)) / 12);
        CHECK(set.normalization.four_pi_exponent == -m / 2);
    }
    CHECK_THROWS_AS(extract_dimension(5), Error);
    CHECK_THROWS_AS(extract_dimension(2), Error);
}

TEST_CASE("series evaluators") {
    CHECK_THAT(f1(0.0), Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK_THAT(g2(0.0, 0.0), Catch::Matchers::WithinAbs(0.5, 1e-14));
    // Series branch agrees with the direct formula at the same argument.
    CHECK_THAT(f1(9.9e-4), Catch::Matchers::WithinRel(std::expm1(9.9e-4) / 9.9e-4, 1e-13));
    CHECK_THAT(g2(0.3, 9.9e-4),
               Catch::Matchers::WithinRel((f1(0.3 + 9.9e-4) - f1(0.3)) / 9.9e-4, 1e-9));
    for (double s : {-2.0, -0.49, 0.3, 1.7}) {
        // Derivative consistency: central difference of f1^(j-1).
        for (int j : {1, 2, 3}) {
            const double h = 1e-5;
            const double cd = (f1_deriv(j - 1, s + h) - f1_deriv(j - 1, s - h)) / (2 * h);
            CHECK_THAT(f1_deriv(j, s), Catch::Matchers::WithinAbs(cd, 1e-8));
        }
        // Divided-difference definition of g2 away from t = 0.
        CHECK_THAT(g2(s, 0.7), Catch::Matchers::WithinRel((f1(s + 0.7) - f1(s)) / 0.7, 1e-13));
    }
}

TEST_CASE("log form in dimension four matches the closed expressions") {
    const LogForm lf = log_form(extract_dimension(4));
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> pick(-3.0, 3.0);
    double maxK = 0.0, maxH = 0.0, maxD = 0.0;
    for (int i = 0; i < 100; ++i) {
        double u = pick(rng), v = pick(rng);
        if (std::abs(u) < 0.1 || std::abs(v) < 0.1 || std::abs(u + v) < 0.1) {
            --i;
            continue;
        }
        maxK = std::max(maxK, rel(lf.K.raw(u), K4_closed(u)));
        maxH = std::max(maxH, rel(lf.H.raw(u, v), H4_closed(u, v)));
        // The one-variable diagonal entering T.
        maxD = std::max(maxD,
                        rel(lf.H.raw(u, -u), -(-2.0 * u - 4.0 * std::exp(-u / 2.0) + 4.0) / (u * u)));
    }
    CHECK(maxK < 1e-12);
    CHECK(maxH < 1e-12);
    CHECK(maxD < 1e-12);
}

TEST_CASE("Einstein-Hilbert relation functions") {
    SECTION("dimension-four closed form of relation one") {
        const EHFunctions eh = eh_functions(extract_dimension(4));
        CHECK_THAT(eh.kappa0, Catch::Matchers::WithinAbs(-0.5, 1e-13));
        double maxdev = 0.0;
        for (double u : {-2.5, -1.0, -0.3, 0.2, 0.9, 1.8, 2.9}) {
            // T + T~ simplifies to -4 e^{-u} u^{-2} (e^{u/2}-1)^2; both sides
            // of relation one are its negative.
            const double closed = -4.0 * std::exp(-u) / (u * u) * std::pow(std::exp(u / 2.0) - 1.0, 2);
            maxdev = std::max(maxdev, rel(eh.T(u) + eh.T_tilde(u), closed));
            maxdev = std::max(maxdev, rel(eh.K_EH(u), -closed));
            maxdev = std::max(maxdev, rel(-(eh.T(u) + eh.T_tilde(u)), -closed));
        }
        CHECK(maxdev < 1e-12);
    }
    SECTION("relations hold at one hundred admissible points per dimension") {
        for (int m : {4, 6, 8, 10}) {
            const VerificationReport rep = verify_relations(m, 100, 1e-10, 20260823u + m);
            for (const auto& c : rep.checks) {
                INFO(rep.suite << ": " << c.name << " max_error=" << c.max_error);
                CHECK(c.pass);
            }
        }
    }
    SECTION("guard radius around the singular loci") {
        const EHFunctions eh = eh_functions(extract_dimension(4));
        CHECK_THROWS_AS(eh.K_EH(0.01), SingularLocus);
        CHECK_THROWS_AS(eh.M(1.0, -0.99), SingularLocus);
        CHECK_THROWS_AS(eh.P(0.02, 1.0), SingularLocus);
        CHECK_NOTHROW(eh.M(1.0, 1.0));
    }
}

TEST_CASE("limit evaluation at removable singularities") {
    SECTION("divided-difference node") {
        ModularExpr node;
        node.sing_s = true;
        node.fn = [](double s, double) { return std::expm1(s) / s; };
        CHECK_THAT(limit_eval(node, 0.0, 0.0, 1.0, 0.0), Catch::Matchers::WithinAbs(1.0, 1e-6));
    }
    SECTION("one-variable curvature function at zero") {
        ModularExpr node;
        node.sing_s = true;
        node.fn = [](double s, double) { return K4_closed(s); };
        CHECK_THAT(limit_eval(node, 0.0, 0.0, 1.0, 0.0), Catch::Matchers::WithinAbs(-0.5, 1e-6));
    }
    SECTION("two-variable curvature function at the origin") {
        ModularExpr node;
        node.sing_s = node.sing_t = node.sing_sum = true;
        node.fn = [](double s, double t) { return H4_closed(s, t); };
        CHECK_THAT(limit_eval(node, 0.0, 0.0, 1.0, 1.0), Catch::Matchers::WithinAbs(0.5, 1e-5));
        // Constructive form agrees with the extrapolated limit.
        const LogForm lf = log_form(extract_dimension(4));
        CHECK_THAT(lf.H.raw(0.0, 0.0), Catch::Matchers::WithinAbs(0.5, 1e-12));
    }
    SECTION("a genuine pole diverges") {
        ModularExpr node;
        node.sing_s = true;
        node.fn = [](double s, double) { return 1.0 / s; };
        CHECK_THROWS_AS(limit_eval(node, 0.0, 0.0, 1.0, 0.0), ExtrapolationDiverged);
    }
}
