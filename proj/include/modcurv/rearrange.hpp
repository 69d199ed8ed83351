#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "cosphere.hpp"
#include "errors.hpp"
#include "polynomial.hpp"

namespace modcurv {

/// Insertion structure of an averaged b2 term (the four canonical types):
/// the Hessian of k, two separated gradients, two adjacent gradients, or a
/// pure scalar-curvature term.
enum class InsertionKind { Hess, GradGrad, GradSq, ScalTerm };

inline const char* insertion_name(InsertionKind k) {
    switch (k) {
        case InsertionKind::Hess: return "Hess";
        case InsertionKind::GradGrad: return "GradGrad";
        case InsertionKind::GradSq: return "GradSq";
        case InsertionKind::ScalTerm: return "ScalTerm";
    }
    return "?";
}

/// Normal-ordered form: all conformal-factor powers collected leftmost.  Each
/// K moved past an insertion leaves a modular half-weight on that insertion
/// (conjugation by k is a half-power of the modular operator).
struct CanonicalTerm {
    RationalFunction coeff; ///< rational function of m
    int xi_power = 0;       ///< nu
    int k_power = 0;        ///< mu, total collected K power
    int scal_power = 0;
    InsertionKind kind = InsertionKind::ScalTerm;
    std::vector<int> b0_exponents; ///< (p) / (p,q) / (p,q,l) around the insertions
    std::vector<int> halfweights;  ///< one per insertion
};

/// Collect the K powers of an averaged kinetic word to the left.  B0 commutes
/// with K; an insertion (GradK or Grad2K) crossed by a K picks up one modular
/// half-weight per unit of K power to its right.
inline CanonicalTerm normal_order(const KineticTerm& kt) {
    CanonicalTerm ct;
    ct.coeff = kt.coeff;
    ct.xi_power = kt.xi_power;
    ct.scal_power = kt.scal_power;

    struct Insertion {
        AtomKind kind;
        int k_after = 0;  // K power strictly to the right
        int b0_after = 0; // B0 power before the next insertion (or the end)
        int k_gap = 0;    // K power before the next insertion
    };
    std::vector<Insertion> ins;
    int lead_b0 = 0;
    for (const auto& f : kt.word) {
        switch (f.kind) {
            case AtomKind::K:
                ct.k_power += f.power;
                for (auto& i : ins) i.k_after += f.power;
                if (!ins.empty()) ins.back().k_gap += f.power;
                break;
            case AtomKind::B0:
                if (ins.empty()) lead_b0 += f.power;
                else ins.back().b0_after += f.power;
                break;
            case AtomKind::GradK:
            case AtomKind::Grad2K:
                ins.push_back({f.kind});
                break;
            default:
                throw Error("normal_order expects an averaged kinetic word, got " + f.str());
        }
    }

    ct.b0_exponents = {lead_b0};
    for (const auto& i : ins) {
        ct.b0_exponents.push_back(i.b0_after);
        ct.halfweights.push_back(i.k_after);
    }
    if (ins.empty()) {
        ct.kind = InsertionKind::ScalTerm;
    } else if (ins.size() == 1 && ins[0].kind == AtomKind::Grad2K) {
        ct.kind = InsertionKind::Hess;
    } else if (ins.size() == 2 && ins[0].kind == AtomKind::GradK &&
               ins[1].kind == AtomKind::GradK) {
        if (ct.b0_exponents[1] > 0) {
            ct.kind = InsertionKind::GradGrad;
        } else if (ins[0].k_gap == 0) {
            // Adjacent gradients act as a single element (∇k)².
            ct.kind = InsertionKind::GradSq;
            ct.b0_exponents.erase(ct.b0_exponents.begin() + 1);
        } else {
            throw Error("conformal-factor power trapped between adjacent gradients");
        }
    } else {
        throw Error("unsupported insertion structure in averaged b2 term");
    }
    return ct;
}

enum class BasisKind { K, H, C };

/// A coefficient times one member of the spectral basis family
///   K(p,q):   (1-u)^{-p} (s-u)^{-q}
///   H(p,q,l): (1-u)^{-p} (s-u)^{-q} (st-u)^{-l}
///   C(p):     (1-u)^{-p}
/// The insertion kind is kept because GradSq emits a one-variable K basis
/// whose modular argument is the product st.
struct SpectralFunction {
    RationalFunction prefactor; ///< rational function of s4, t4, m
    BasisKind basis = BasisKind::C;
    std::vector<int> exponents;
    InsertionKind kind = InsertionKind::ScalTerm;
};

/// Validate the homogeneity exponent relations and emit the spectral basis
/// member.  The modular half-weights become sqrt(s) / sqrt(t) prefactors; the
/// global k-power and the uniform overall factor 1/2 are bookkept in the
/// normalization accessor, never in term coefficients.
inline SpectralFunction to_spectral(const CanonicalTerm& ct) {
    int total_b0 = 0;
    for (int p : ct.b0_exponents) total_b0 += p;
    const int j = ct.kind == InsertionKind::ScalTerm ? 0
                  : ct.kind == InsertionKind::Hess   ? 1
                                                     : 2;
    if (ct.xi_power != 2 * total_b0 - 4)
        throw HomogeneityViolation("|xi|-power " + std::to_string(ct.xi_power) +
                                   " does not match resolvent powers");
    if (ct.k_power != ct.xi_power + 2 - j)
        throw HomogeneityViolation("k-power " + std::to_string(ct.k_power) +
                                   " does not match |xi|-power " + std::to_string(ct.xi_power));

    SpectralFunction sf;
    sf.kind = ct.kind;
    sf.prefactor = ct.coeff;
    switch (ct.kind) {
        case InsertionKind::ScalTerm:
            sf.basis = BasisKind::C;
            sf.exponents = {ct.b0_exponents[0]};
            break;
        case InsertionKind::Hess:
            sf.basis = BasisKind::K;
            sf.exponents = {ct.b0_exponents[0], ct.b0_exponents[1]};
            sf.prefactor = sf.prefactor * RationalFunction::var(Var::s4, 2 * ct.halfweights[0]);
            break;
        case InsertionKind::GradGrad:
            sf.basis = BasisKind::H;
            sf.exponents = {ct.b0_exponents[0], ct.b0_exponents[1], ct.b0_exponents[2]};
            sf.prefactor = sf.prefactor * RationalFunction::var(Var::s4, 2 * ct.halfweights[0]) *
                           RationalFunction::var(Var::t4, 2 * ct.halfweights[1]);
            break;
        case InsertionKind::GradSq:
            // One-variable basis in the joint modular argument st.
            sf.basis = BasisKind::K;
            sf.exponents = {ct.b0_exponents[0], ct.b0_exponents[1]};
            if (ct.halfweights[0] != ct.halfweights[1])
                throw HomogeneityViolation("adjacent gradients with unequal half-weights");
            sf.prefactor = sf.prefactor * RationalFunction::var(Var::s4, 2 * ct.halfweights[0]) *
                           RationalFunction::var(Var::t4, 2 * ct.halfweights[1]);
            break;
    }
    return sf;
}

/// The full spectral expansion of the averaged b2.
inline std::vector<SpectralFunction> spectral_expansion() {
    std::vector<SpectralFunction> out;
    for (const auto& kt : integrate_sphere(resolvent_b2())) out.push_back(to_spectral(normal_order(kt)));
    return out;
}

/// Master functions: F multiplies the Hessian of k, G multiplies (grad k)^2
/// (both the separated and the adjacent configuration), C multiplies the
/// scalar curvature.  Variables: u, s = s4^4, t = t4^4, m.
struct MasterFunctions {
    RationalFunction F;
    RationalFunction G;
    RationalFunction C;
};

namespace detail {

/// Sum of prefactor_i / prod_k base_k^{e_{i,k}} assembled over one shared
/// denominator (prefactor denominators are monomials in m).  Summing with
/// plain fraction addition would multiply all denominators together — there
/// is no polynomial gcd in the exact ring — so the common denominator is
/// built explicitly from the per-base maximal exponents.
struct BasisAccumulator {
    std::vector<Polynomial> bases;
    std::vector<int> max_exp;
    std::vector<std::pair<RationalFunction, std::vector<int>>> entries;

    explicit BasisAccumulator(std::vector<Polynomial> b)
        : bases(std::move(b)), max_exp(bases.size(), 0) {}

    void add(const RationalFunction& pref, std::vector<int> exps) {
        for (std::size_t k = 0; k < bases.size(); ++k) max_exp[k] = std::max(max_exp[k], exps[k]);
        entries.emplace_back(pref, std::move(exps));
    }

    RationalFunction total() const {
        if (entries.empty()) return RationalFunction(0);
        // Common monomial denominator in m across all prefactors.
        int m_deg = 0;
        for (const auto& [pref, exps] : entries) m_deg = std::max(m_deg, pref.den().degree(Var::m));
        Polynomial num(0);
        for (const auto& [pref, exps] : entries) {
            // pref = pref.num / (monic monomial m^d): lift to the common m^m_deg.
            const int d = pref.den().degree(Var::m);
            Polynomial part = pref.num() * Polynomial::var(Var::m, m_deg - d);
            for (std::size_t k = 0; k < bases.size(); ++k)
                part = part * bases[k].pow(max_exp[k] - exps[k]);
            num = num + part;
        }
        Polynomial den = Polynomial::var(Var::m, m_deg);
        for (std::size_t k = 0; k < bases.size(); ++k) den = den * bases[k].pow(max_exp[k]);
        return {num, den};
    }
};

} // namespace detail

inline MasterFunctions assemble_master(const std::vector<SpectralFunction>& terms) {
    const Polynomial u = Polynomial::var(Var::u);
    const Polynomial s = Polynomial::var(Var::s4, 4);
    const Polynomial st = s * Polynomial::var(Var::t4, 4);
    const Polynomial one(1);

    detail::BasisAccumulator f({one - u, s - u});
    detail::BasisAccumulator g({one - u, s - u, st - u});
    detail::BasisAccumulator c({one - u});
    for (const auto& sf : terms) {
        // Prefactor denominators must be monomials in m for the shared-
        // denominator assembly; the canonical form guarantees this here.
        const Polynomial& den = sf.prefactor.den();
        if (den.degree(Var::u) != 0 || den.degree(Var::s4) != 0 || den.degree(Var::t4) != 0 ||
            static_cast<int>(den.terms().size()) != 1)
            throw Error("spectral prefactor with non-monomial denominator");
        switch (sf.kind) {
            case InsertionKind::Hess:
                f.add(sf.prefactor, {sf.exponents[0], sf.exponents[1]});
                break;
            case InsertionKind::GradGrad:
                g.add(sf.prefactor, {sf.exponents[0], sf.exponents[1], sf.exponents[2]});
                break;
            case InsertionKind::GradSq:
                g.add(sf.prefactor, {sf.exponents[0], 0, sf.exponents[1]});
                break;
            case InsertionKind::ScalTerm:
                c.add(sf.prefactor, {sf.exponents[0]});
                break;
        }
    }
    return {f.total(), g.total(), c.total()};
}

inline MasterFunctions assemble_master() { return assemble_master(spectral_expansion()); }

// ---------------------------------------------------------------------------
// Constants and the quadrature oracle.
// ---------------------------------------------------------------------------

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// c_{(p,m)} = (p-2+(m-2)/2)! / (p-1)!, the degenerate value of the spectral
/// basis at s = t = 1.
inline BigRational constant_c(int p, int m) {
    if (p < 1 || m < 4 || m % 2 != 0) throw Error("constant_c needs p >= 1 and even m >= 4");
    return BigRational(factorial(p - 2 + (m - 2) / 2), factorial(p - 1));
}

/// The coefficient of the scalar-curvature term, assembled from the pipeline's
/// C sector: sum over ScalTerm contributions of coeff * c_{(p,m)}.
inline BigRational scalar_constant(int m, const std::vector<SpectralFunction>& terms) {
    BigRational total = 0;
    for (const auto& sf : terms) {
        if (sf.kind != InsertionKind::ScalTerm) continue;
        // The prefactor is rational in m only; evaluate it exactly.
        RationalFunction at_m = sf.prefactor.substitute(Var::m, RationalFunction(m));
        const Polynomial& num = at_m.num();
        const Polynomial& den = at_m.den();
        if (num.degree(Var::u) != 0 || num.degree(Var::s4) != 0 || num.degree(Var::t4) != 0 ||
            den.degree(Var::u) != 0 || den.degree(Var::s4) != 0 || den.degree(Var::t4) != 0)
            throw Error("scalar sector prefactor is not a constant in the modular variables");
        const GaussRational c = num.coeff(Monomial::one()) / den.coeff(Monomial::one());
        if (!c.is_real()) throw Error("scalar sector prefactor is not real");
        total += c.re() * constant_c(sf.exponents[0], m);
    }
    return total;
}

inline BigRational scalar_constant(int m) { return scalar_constant(m, spectral_expansion()); }

/// Overall constant in front of the modular scalar curvature:
/// (4*pi)^{-m/2} / Gamma(m/2) times the uniform factor 1/2 suppressed in the
/// term table.  Exposed once, never baked into coefficients.
struct Normalization {
    int four_pi_exponent;    ///< power of (4*pi)
    BigRational gamma_inverse; ///< 1 / Gamma(m/2)
    BigRational half_factor;   ///< the suppressed uniform 1/2
    double value() const {
        return std::pow(4.0 * std::acos(-1.0), four_pi_exponent) *
               to_double(gamma_inverse * half_factor);
    }
};

inline Normalization normalization_constant(int m) {
    if (m < 4 || m % 2 != 0) throw Error("normalization needs even m >= 4");
    return {-m / 2, BigRational(1, factorial(m / 2 - 1)), BigRational(1, 2)};
}

/// Closed-form value of the spectral basis member at numeric s, t:
/// (d/du)^{m/2-2} at u=0 of (1-u)^{-p}(s-u)^{-q}[(st-u)^{-l}].
inline double basis_value(int p, int q, int l, int m, double s, double t) {
    const RationalFunction u = RationalFunction::var(Var::u);
    const RationalFunction sv = RationalFunction::var(Var::s4, 4);
    const RationalFunction stv = sv * RationalFunction::var(Var::t4, 4);
    RationalFunction b = (RationalFunction(1) - u).pow(-p) * (sv - u).pow(-q);
    if (l > 0) b = b * (stv - u).pow(-l);
    // Series division instead of repeated quotient-rule differentiation: the
    // latter squares the denominator at every order.
    const int j = m / 2 - 2;
    const std::vector<RationalFunction> series = taylor_u(b, j);
    const std::map<Var, std::complex<double>> at = {
        {Var::u, 0.0}, {Var::s4, std::pow(s, 0.25)}, {Var::t4, std::pow(t, 0.25)},
        {Var::m, static_cast<double>(m)}};
    // Evaluate num/den directly: without cancellation the denominator carries
    // large monomial powers whose value can dip below any absolute near-pole
    // guard while the quotient stays perfectly conditioned.
    const std::complex<double> den = series[j].den().eval(at);
    if (den == std::complex<double>(0.0)) throw NearPole();
    return to_double(BigRational(factorial(j))) * (series[j].num().eval(at) / den).real();
}

namespace detail {

/// Integrand of the resolvent-power integral after the analytic lambda
/// derivatives at lambda = -1: the u^{-j0} prefactor cancels against the u^j
/// produced by each derivative, leaving
///   sum over j1+j2[+j3] = j0 of  multinomial * prod (p_i)_{j_i} (a_i+u)^{-p_i-j_i}
/// with a = (1, s, st) and rising factorials (p)_j.
inline double resolvent_integrand(int p, int q, int l, int j0, double s, double t, double u) {
    const int nf = l > 0 ? 3 : 2;
    const double a[3] = {1.0, s, s * t};
    const int pw[3] = {p, q, l};
    auto rising = [](int base, int j) {
        double r = 1;
        for (int i = 0; i < j; ++i) r *= base + i;
        return r;
    };
    auto binom = [](int n, int k) {
        double b = 1;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    };
    double total = 0;
    for (int j1 = 0; j1 <= j0; ++j1)
        for (int j2 = 0; j2 <= j0 - j1; ++j2) {
            const int j3 = j0 - j1 - j2;
            if (nf == 2 && j3 != 0) continue;
            double term = binom(j0, j1) * binom(j0 - j1, j2);
            const int js[3] = {j1, j2, j3};
            for (int i = 0; i < nf; ++i)
                term *= rising(pw[i], js[i]) * std::pow(a[i] + u, -pw[i] - js[i]);
            total += term;
        }
    return total;
}

/// Adaptive Simpson on [a,b] with absolute tolerance; throws after the
/// recursion budget is spent.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    // Accept on the absolute target, or once the panel has converged to the
    // floating-point floor (sharp peaks of magnitude >> 1 can never reach a
    // tiny absolute target in doubles).
    const double disc = std::abs(left + right - whole);
    if (disc < 15 * tol || disc < 1e-14 * std::abs(left + right))
        return left + right + (left + right - whole) / 15;
    if (depth <= 0) throw QuadratureNotConverged("adaptive budget exhausted");
    return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

} // namespace detail

/// Numerically evaluate the resolvent-power integral behind the rearrangement
/// chain:
///   (1/2) * Int_0^inf u^{-j0} (d/dlambda)^{j0}|_{lambda=-1}
///           (1-u*lambda)^{-p} (s-u*lambda)^{-q} [(st-u*lambda)^{-l}] du,
/// which must equal (1/2) * basis_value(p,q,l,m,s,t).  Pass l = 0 for the
/// one-variable family.
inline double quadrature_oracle(int p, int q, int l, int m, double s, double t) {
    if (p < 1 || q < 1 || l < 0 || m < 4 || m % 2 != 0)
        throw Error("quadrature_oracle needs p,q >= 1, l >= 0, even m >= 4");
    const int j0 = m / 2 - 1;
    // Map [0,inf) to [0,1) via u = v/(1-v).
    auto f = [&](double v) {
        if (v >= 1.0) return 0.0;
        const double u = v / (1.0 - v);
        const double w = 1.0 / ((1.0 - v) * (1.0 - v));
        return detail::resolvent_integrand(p, q, l, j0, s, t, u) * w;
    };
    const double a = 0.0, b = 1.0 - 1e-14;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double integral = detail::adaptive_simpson(f, a, b, fa, fm, fb, 1e-10, 40);
    return 0.5 * integral;
}

} // namespace modcurv
