#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "fixtures.hpp"
#include "rearrange.hpp"
#include "report.hpp"

namespace modcurv {

// ---------------------------------------------------------------------------
// Per-dimension curvature functions.
// ---------------------------------------------------------------------------

/// The local curvature data of one even dimension m: the one- and two-variable
/// functions for the rescaled Laplacian, their Dirac-operator companions, the
/// scalar-curvature constant, and the overall normalization.
struct CurvatureSet {
    int m = 0;
    RationalFunction K_delta; ///< function of sqrt(s) via s4
    RationalFunction H_delta; ///< function of sqrt(s), sqrt(t) via s4, t4
    RationalFunction K_dirac; ///< = s4 * K_delta
    RationalFunction H_dirac; ///< = s4 * t4 * H_delta
    BigRational c_scal;       ///< coefficient of the scalar-curvature term
    Normalization normalization;
};

namespace detail {

inline const MasterFunctions& master_cache() {
    static const MasterFunctions mf = assemble_master();
    return mf;
}

} // namespace detail

/// Extract the dimension-m curvature functions as the (m/2-2)-th u-derivative
/// of the master functions at u = 0.  The derivative is the plain one — no
/// extra factorial prefactor — which is what reproduces the higher-dimension
/// listings; the m = 8 one-variable listing is asserted as a guard against
/// regressions of that convention.
inline CurvatureSet extract_dimension(int m) {
    if (m < 4 || m % 2 != 0) throw Error("extract_dimension needs even m >= 4");
    const int j = m / 2 - 2;
    const MasterFunctions& mf = detail::master_cache();
    const RationalFunction fact(Polynomial::term(GaussRational(BigRational(factorial(j))), Monomial::one()));

    CurvatureSet set;
    set.m = m;
    const RationalFunction Fm = mf.F.substitute(Var::m, RationalFunction(m));
    const RationalFunction Gm = mf.G.substitute(Var::m, RationalFunction(m));
    set.K_delta = fact * taylor_u(Fm, j)[j];
    set.H_delta = fact * taylor_u(Gm, j)[j];
    set.K_dirac = RationalFunction::var(Var::s4) * set.K_delta;
    set.H_dirac = RationalFunction::var(Var::s4) * RationalFunction::var(Var::t4) * set.H_delta;
    set.c_scal = scalar_constant(m);
    set.normalization = normalization_constant(m);

    if (m == 8 && !equals(set.K_delta, fixtures::curvature_one_variable(8)))
        throw MismatchAgainstReference("derivative convention drifted: K at m = 8 disagrees with the reference");
    return set;
}

// ---------------------------------------------------------------------------
// Transcendental evaluators.
// ---------------------------------------------------------------------------

/// f1(s) = (e^s - 1)/s, extended by f1(0) = 1; series within |s| < 1e-3.
inline double f1(double s) {
    if (std::abs(s) < 1e-3) {
        double sum = 0.0, term = 1.0;
        for (int k = 0; k < 8; ++k) {
            sum += term;
            term *= s / (k + 2);
        }
        return sum;
    }
    return std::expm1(s) / s;
}

/// j-th derivative of f1.  Series sum_{n>=0} s^n / (n! (n+j+1)) within
/// |s| < 1/2, otherwise the recurrence f1^(j)(s) = (e^s - j f1^(j-1)(s))/s.
inline double f1_deriv(int j, double s) {
    if (j == 0) return f1(s);
    if (std::abs(s) < 0.5) {
        double sum = 0.0, pow_term = 1.0; // s^n / n!
        for (int n = 0; n < 18; ++n) {
            sum += pow_term / (n + j + 1);
            pow_term *= s / (n + 1);
        }
        return sum;
    }
    return (std::exp(s) - j * f1_deriv(j - 1, s)) / s;
}

/// g2(s,t) = (f1(s+t) - f1(s))/t with the removable singularity at t = 0
/// filled by the Taylor expansion in t; g2(0,0) = 1/2.
inline double g2(double s, double t) {
    if (std::abs(t) < 1e-3) {
        double sum = 0.0, tfact = 1.0; // t^{j-1} / j!
        for (int j = 1; j <= 8; ++j) {
            tfact /= j;
            sum += f1_deriv(j, s) * tfact;
            tfact *= t;
        }
        return sum;
    }
    return (f1(s + t) - f1(s)) / t;
}

/// A numeric curvature-function evaluator.  Divided-difference constructions
/// declare the loci where the defining expression degenerates; direct
/// evaluation within `guard` of a declared locus is refused and must go
/// through limit_eval instead.
struct ModularExpr {
    std::function<double(double, double)> fn;
    int arity = 1;
    bool sing_s = false, sing_t = false, sing_sum = false;
    double guard = 0.05;

    double raw(double s, double t = 0.0) const { return fn(s, t); }
    double operator()(double s, double t = 0.0) const {
        if ((sing_s && std::abs(s) < guard) || (sing_t && std::abs(t) < guard) ||
            (sing_sum && std::abs(s + t) < guard))
            throw SingularLocus("evaluation within guard radius of a declared singular locus");
        return fn(s, t);
    }
};

/// Evaluate a ModularExpr at a singular point as the limit along the ray
/// (ds,dt): 4-level polynomial (Richardson) extrapolation of samples at
/// h, h/2, h/4, h/8 down to h = 0.
inline double limit_eval(const ModularExpr& f, double s0, double t0, double ds, double dt,
                         double h0 = 0.2) {
    constexpr int levels = 4;
    double x[levels], tab[levels][levels];
    for (int i = 0; i < levels; ++i) {
        x[i] = h0 / (1 << i);
        tab[i][0] = f.raw(s0 + x[i] * ds, t0 + x[i] * dt);
        if (!std::isfinite(tab[i][0])) throw ExtrapolationDiverged();
    }
    for (int c = 1; c < levels; ++c)
        for (int i = c; i < levels; ++i)
            tab[i][c] = (x[i] * tab[i - 1][c - 1] - x[i - c] * tab[i][c - 1]) / (x[i] - x[i - c]);
    const double value = tab[levels - 1][levels - 1];
    const double estimate = std::abs(value - tab[levels - 2][levels - 2]);
    if (!std::isfinite(value) || estimate > 1e-3 * (1.0 + std::abs(value)))
        throw ExtrapolationDiverged("extrapolation error estimate " + std::to_string(estimate));
    return value;
}

/// Log-form curvature functions of a dimension:
///   K(s)   = e^{s/4} K_delta(e^s) f1(s/2)
///   H(s,t) = e^{s/4} e^{t/4} [ e^{s/2} H_delta(e^s,e^t) f1(s/2) f1(t/2)
///                              + 2 g2(s/2,t/2) K_delta(e^{s+t}) ].
/// Both are regular everywhere (the divided differences inside f1 and g2 are
/// filled by their series), so no singular loci are declared.
struct LogForm {
    ModularExpr K;
    ModularExpr H;
};

namespace detail {

/// Numeric evaluation of a one/two-variable rational function at the
/// exponential points s = e^a, t = e^b (so s4 = e^{a/4}, t4 = e^{b/4}).
/// Evaluated as num/den directly: for strongly negative arguments both parts
/// are exponentially small but the quotient stays well conditioned, so the
/// absolute near-pole guard of the generic evaluator does not apply here.
inline double eval_exp_point(const RationalFunction& f, double a, double b) {
    const std::map<Var, std::complex<double>> at = {{Var::u, 0.0},
                                                    {Var::s4, std::exp(a / 4.0)},
                                                    {Var::t4, std::exp(b / 4.0)},
                                                    {Var::m, 0.0}};
    const std::complex<double> d = f.den().eval(at);
    if (d == std::complex<double>(0.0)) throw NearPole();
    return (f.num().eval(at) / d).real();
}

} // namespace detail

inline LogForm log_form(const CurvatureSet& set) {
    const RationalFunction Kd = set.K_delta;
    const RationalFunction Hd = set.H_delta;
    LogForm lf;
    lf.K.arity = 1;
    lf.K.fn = [Kd](double s, double) {
        return std::exp(s / 4.0) * detail::eval_exp_point(Kd, s, 0.0) * f1(s / 2.0);
    };
    lf.H.arity = 2;
    lf.H.fn = [Kd, Hd](double s, double t) {
        const double bracket = std::exp(s / 2.0) * detail::eval_exp_point(Hd, s, t) *
                                   f1(s / 2.0) * f1(t / 2.0) +
                               2.0 * g2(s / 2.0, t / 2.0) * detail::eval_exp_point(Kd, s + t, 0.0);
        return std::exp(s / 4.0) * std::exp(t / 4.0) * bracket;
    };
    return lf;
}

/// The functions entering the internal relations: the two local
/// Einstein-Hilbert gradient functions and the auxiliary T, T~, L, M, P, Q
/// built from divided differences of T.
struct EHFunctions {
    int m = 0;
    double kappa0 = 0.0; ///< K(0), needed as a constant inside T
    ModularExpr K_EH, H_EH, T, T_tilde, L, M, P, Q;
};

inline EHFunctions eh_functions(const CurvatureSet& set) {
    const LogForm lf = log_form(set);
    const double j0 = (set.m - 2) / 2.0;

    EHFunctions eh;
    eh.m = set.m;
    eh.kappa0 = lf.K.raw(0.0);
    const double kappa0 = eh.kappa0;

    const auto Kfn = lf.K.fn;
    const auto Hfn = lf.H.fn;
    auto T = [j0, kappa0, Kfn, Hfn](double s) {
        return 2.0 * j0 * kappa0 * f1(-j0 * s) + Hfn(s, -s);
    };
    // The exponential weight is e^{-j0 s} = e^{(2-m)s/2}; the often-quoted
    // dimension-four form e^{-s} is the j0 = 1 special case.
    auto Tt = [j0, T](double s) { return T(-s) * std::exp(-j0 * s); };

    eh.T.arity = 1;
    eh.T.fn = [T](double s, double) { return T(s); };
    eh.T_tilde.arity = 1;
    eh.T_tilde.fn = [Tt](double s, double) { return Tt(s); };

    eh.K_EH.arity = 1;
    eh.K_EH.sing_s = true;
    eh.K_EH.fn = [j0, Kfn](double s, double) {
        return -8.0 * j0 * std::sinh(s / 4.0) / s * Kfn(s, 0.0);
    };
    eh.H_EH.arity = 2;
    eh.H_EH.sing_s = eh.H_EH.sing_t = eh.H_EH.sing_sum = true;
    eh.H_EH.fn = [j0, Hfn](double s, double t) {
        return -8.0 * j0 * std::sinh((s + t) / 4.0) / (s + t) * Hfn(s, t);
    };

    eh.L.arity = 2;
    eh.L.sing_s = eh.L.sing_t = eh.L.sing_sum = true;
    eh.L.fn = [j0, T](double s, double t) { return -2.0 * T(s) * j0 * f1(-j0 * (s + t)); };

    eh.M.arity = 2;
    eh.M.sing_s = eh.M.sing_t = eh.M.sing_sum = true;
    eh.M.fn = [j0, T](double s, double t) {
        return 2.0 * std::exp(-j0 * (s + t)) *
               ((T(-t) - T(s)) / (s + t) + (T(t) - T(-s)) / (s + t) * std::exp(j0 * t));
    };

    eh.P.arity = 2;
    eh.P.sing_s = eh.P.sing_t = eh.P.sing_sum = true;
    eh.P.fn = [j0, T](double s, double t) {
        return -2.0 * j0 * f1(-j0 * s) * T(t) - 2.0 * (T(s + t) - T(t)) / s +
               2.0 * (T(s + t) - T(s)) / t;
    };

    eh.Q.arity = 2;
    eh.Q.sing_s = eh.Q.sing_t = eh.Q.sing_sum = true;
    eh.Q.fn = [j0, Tt](double s, double t) {
        return -2.0 * j0 * f1(-j0 * s) * Tt(t) - 2.0 * (Tt(s + t) - Tt(t)) / s +
               2.0 * (Tt(s + t) - Tt(s)) / t;
    };
    return eh;
}

/// Name-based lookup, used by the command-line `eval` front end.
inline const ModularExpr& eh_lookup(const EHFunctions& eh, const std::string& name) {
    if (name == "K_EH") return eh.K_EH;
    if (name == "H_EH") return eh.H_EH;
    if (name == "T") return eh.T;
    if (name == "Ttilde" || name == "T~") return eh.T_tilde;
    if (name == "L") return eh.L;
    if (name == "M") return eh.M;
    if (name == "P") return eh.P;
    if (name == "Q") return eh.Q;
    throw Error("unknown curvature function '" + name + "'");
}

// ---------------------------------------------------------------------------
// Relation verification.
// ---------------------------------------------------------------------------

/// Numerically verify the internal relations
///   K_EH(s) = -(T + T~)(s)  and  H_EH(s,t) = (L + M - P - Q)(s,t)
/// at `samples` admissible points drawn uniformly from [-3,3] with
/// |s|, |t|, |s+t| >= 0.1.  Deviations are relative to the larger side.
inline VerificationReport verify_relations(int m, int samples, double tol, unsigned seed) {
    const CurvatureSet set = extract_dimension(m);
    const EHFunctions eh = eh_functions(set);
    const LogForm lf = log_form(set);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> pick(-3.0, 3.0);
    auto admissible_s = [&]() {
        double s;
        do s = pick(rng);
        while (std::abs(s) < 0.1);
        return s;
    };

    VerificationReport rep;
    rep.suite = "relations-m" + std::to_string(m);

    double max1 = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = admissible_s();
        const double lhs = eh.K_EH(s);
        const double rhs = -(eh.T(s) + eh.T_tilde(s));
        max1 = std::max(max1, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    rep.add("relation-one", max1 < tol, max1, tol);

    double max2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        double s, t;
        do {
            s = admissible_s();
            t = admissible_s();
        } while (std::abs(s + t) < 0.1);
        const double lhs = eh.H_EH(s, t);
        const double rhs = eh.L(s, t) + eh.M(s, t) - eh.P(s, t) - eh.Q(s, t);
        max2 = std::max(max2, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    rep.add("relation-two", max2 < tol, max2, tol);

    // Informational entries: the commutative-limit values are reported, not
    // asserted (their classical normalization is convention-dependent).
    rep.add("kappa-at-zero", true, 0.0, 0.0, "K(0) = " + std::to_string(lf.K.raw(0.0)));
    rep.add("h-at-zero", true, 0.0, 0.0, "H(0,0) = " + std::to_string(lf.H.raw(0.0, 0.0)));
    if (m == 4) {
        // The sign variant e^{+u/2} of the one-variable log form circulates in
        // summary displays; it disagrees with the form that satisfies the
        // relations.  Flagged here so the discrepancy is visible in reports.
        const double u = 1.0;
        const double adopted = lf.K.raw(u);
        const double variant = std::exp(u / 2.0) / std::exp(-u / 2.0) * adopted;
        rep.add("log-form-exponent-variant", true, std::abs(variant - adopted), 0.0,
                "variant with flipped exponent sign deviates by " +
                    std::to_string(std::abs(variant - adopted)) + " at u = 1; adopted form satisfies the relations");
    }
    return rep;
}

} // namespace modcurv
