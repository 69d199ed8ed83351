#pragma once

#include <functional>
#include <string>

#include "curvature.hpp" // f1, g2 series evaluators
#include "matrix.hpp"
#include "report.hpp"

namespace modcurv {

// ---------------------------------------------------------------------------
// Modular-function calculus on a finite-dimensional model.
// ---------------------------------------------------------------------------

/// Eigendata of a log-Weyl factor h, with the modular derivation acting on
/// matrix units in the eigenbasis as mu_ij = -2(lambda_i - lambda_j).
struct ModularData {
    std::vector<double> eigvals;
    CMat eigvecs;
    CMat weyl; ///< k = e^h

    explicit ModularData(const CMat& h) {
        EigenSystem es = jacobi_eigen(h);
        eigvals = std::move(es.eigvals);
        eigvecs = std::move(es.eigvecs);
        weyl = expm(h);
    }

    double mu(int i, int j) const { return -2.0 * (eigvals[i] - eigvals[j]); }
};

/// f(modular derivation)(x): conjugate to the eigenbasis, scale entry (i,j)
/// by f(mu_ij), conjugate back.
inline CMat apply_modular_fn(const std::function<double(double)>& f, const ModularData& md,
                             const CMat& x) {
    const int n = x.size();
    CMat xt = md.eigvecs.adjoint() * x * md.eigvecs;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) xt(i, j) *= f(md.mu(i, j));
    return md.eigvecs * xt * md.eigvecs.adjoint();
}

inline CMat apply_modular_fn(const std::function<double(double)>& f, const CMat& h, const CMat& x) {
    return apply_modular_fn(f, ModularData(h), x);
}

/// Two-variable calculus g(modular_1, modular_2)(x y): scale the product
/// chain x_ij y_jk by g(mu_ij, mu_jk) in the eigenbasis.
inline CMat apply_modular_fn2(const std::function<double(double, double)>& g, const ModularData& md,
                              const CMat& x, const CMat& y) {
    const int n = x.size();
    const CMat xt = md.eigvecs.adjoint() * x * md.eigvecs;
    const CMat yt = md.eigvecs.adjoint() * y * md.eigvecs;
    CMat zt(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            std::complex<double> acc = 0.0;
            for (int j = 0; j < n; ++j) acc += g(md.mu(i, j), md.mu(j, k)) * xt(i, j) * yt(j, k);
            zt(i, k) = acc;
        }
    return md.eigvecs * zt * md.eigvecs.adjoint();
}

inline CMat apply_modular_fn2(const std::function<double(double, double)>& g, const CMat& h,
                              const CMat& x, const CMat& y) {
    return apply_modular_fn2(g, ModularData(h), x, y);
}

// ---------------------------------------------------------------------------
// Frechet derivatives of the matrix exponential.
// ---------------------------------------------------------------------------

/// First- or second-order derivative of e^h along a derivation with
/// declared first variation X (and, for order 2, second variation
/// delta_X = delta(delta h)).  Block method: the derivative appears as the
/// upper-right block of the exponential of an upper-triangular block matrix.
inline CMat frechet_exp(const CMat& h, const CMat& X, int order, const CMat* delta_X = nullptr) {
    const int n = h.size();
    if (order == 1) {
        CMat big(2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                big(i, j) = h(i, j);
                big(n + i, n + j) = h(i, j);
                big(i, n + j) = X(i, j);
            }
        const CMat e = expm(big);
        CMat out(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) = e(i, n + j);
        return out;
    }
    if (order == 2) {
        // (1,3) block of exp [[h, X, Z/2], [0, h, X], [0, 0, h]] equals
        // (1/2) delta^2(e^h) when delta X = Z.
        CMat big(3 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                for (int b = 0; b < 3; ++b) big(b * n + i, b * n + j) = h(i, j);
                big(i, n + j) = X(i, j);
                big(n + i, 2 * n + j) = X(i, j);
                if (delta_X) big(i, 2 * n + j) = 0.5 * (*delta_X)(i, j);
            }
        const CMat e = expm(big);
        CMat out(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) = 2.0 * e(i, 2 * n + j);
        return out;
    }
    throw Error("frechet_exp supports orders 1 and 2 only");
}

// ---------------------------------------------------------------------------
// Test functions with analytic derivatives (for divided-difference fallbacks).
// ---------------------------------------------------------------------------

/// A scalar test function together with its first three derivatives, enough
/// to fill every removable singularity of the divided differences below to
/// second order.
struct ScalarFn {
    std::string name;
    std::function<double(double)> f, d1, d2, d3;
};

inline ScalarFn gaussian_test_fn() {
    return {"gaussian", [](double s) { return std::exp(-s * s); },
            [](double s) { return -2.0 * s * std::exp(-s * s); },
            [](double s) { return (4.0 * s * s - 2.0) * std::exp(-s * s); },
            [](double s) { return (12.0 * s - 8.0 * s * s * s) * std::exp(-s * s); }};
}

inline ScalarFn rational_test_fn() {
    auto u = [](double s) { return 1.0 + s * s; };
    return {"rational", [u](double s) { return 1.0 / u(s); },
            [u](double s) { return -2.0 * s / std::pow(u(s), 2); },
            [u](double s) { return (6.0 * s * s - 2.0) / std::pow(u(s), 3); },
            [u](double s) { return (24.0 * s - 24.0 * s * s * s) / std::pow(u(s), 4); }};
}

inline ScalarFn constant_one_fn() {
    auto zero = [](double) { return 0.0; };
    return {"one", [](double) { return 1.0; }, zero, zero, zero};
}

/// T~(s) = T(-s) e^{c s} with c = (2-m)/2, derivatives by the product rule.
inline ScalarFn tilde_of(const ScalarFn& T, double c) {
    auto f = [T, c](double s) { return T.f(-s) * std::exp(c * s); };
    auto d1 = [T, c](double s) { return (-T.d1(-s) + c * T.f(-s)) * std::exp(c * s); };
    auto d2 = [T, c](double s) {
        return (T.d2(-s) - 2.0 * c * T.d1(-s) + c * c * T.f(-s)) * std::exp(c * s);
    };
    auto d3 = [T, c](double s) {
        return (-T.d3(-s) + 3.0 * c * T.d2(-s) - 3.0 * c * c * T.d1(-s) + c * c * c * T.f(-s)) *
               std::exp(c * s);
    };
    return {T.name + "-tilde", f, d1, d2, d3};
}

namespace detail {

constexpr double kDivDiffGap = 1e-4;

/// (T(x+t) - T(t))/x with the x -> 0 limit filled to second order.
inline double forward_dd(const ScalarFn& T, double x, double t) {
    if (std::abs(x) < kDivDiffGap)
        return T.d1(t) + 0.5 * x * T.d2(t) + x * x / 6.0 * T.d3(t);
    return (T.f(x + t) - T.f(t)) / x;
}

} // namespace detail

/// L1(s,t) = -2 (T(s+t) - T(t))/s and L2(s,t) = 2 (T(s+t) - T(s))/t, the
/// exchange-lemma obstruction functions, stable at coincident gaps.
inline double exchange_L1(const ScalarFn& T, double s, double t) {
    return -2.0 * detail::forward_dd(T, s, t);
}
inline double exchange_L2(const ScalarFn& T, double s, double t) {
    return 2.0 * detail::forward_dd(T, t, s);
}

// ---------------------------------------------------------------------------
// Verification suites.
// ---------------------------------------------------------------------------

namespace detail {

inline double rel_dev(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

inline double rel_dev(const CMat& lhs, const CMat& rhs) {
    return (lhs - rhs).frobenius() / std::max({1.0, lhs.frobenius(), rhs.frobenius()});
}

/// Fourth-order five-point derivative of a matrix-valued curve at 0.
inline CMat stencil_derivative(const std::function<CMat(double)>& curve, double step) {
    const CMat f1m = curve(-step), f1p = curve(step);
    const CMat f2m = curve(-2.0 * step), f2p = curve(2.0 * step);
    return std::complex<double>(1.0 / (12.0 * step)) *
           (f2m - std::complex<double>(8.0) * f1m + std::complex<double>(8.0) * f1p - f2p);
}

} // namespace detail

/// Identities for the derivative of the Weyl factor: for a derivation with
/// delta h = X (and delta X = Z),
///   delta e^h   = e^h f1(-ad_h)(X)
///   delta^2 e^h = e^h [ f1(modular/2)(Z) + 2 g2(modular/2, modular/2)(X X) ]
/// where the modular derivation is -2 ad_h, so modular/2 = -ad_h.
inline VerificationReport verify_weyl_derivatives(int n, unsigned seed, double tol) {
    std::mt19937 rng(seed);
    const CMat h = random_hermitian(n, rng);
    const CMat X = random_hermitian(n, rng);
    const CMat Z = random_hermitian(n, rng);
    const ModularData md(h);

    VerificationReport rep;
    rep.suite = "weyl-derivatives-n" + std::to_string(n) + "-seed" + std::to_string(seed);

    // Order 1 against the modular-function identity.
    const CMat d1 = frechet_exp(h, X, 1);
    const CMat rhs1 = md.weyl * apply_modular_fn([](double mu) { return f1(mu / 2.0); }, md, X);
    const double e1 = detail::rel_dev(d1, rhs1);
    rep.add("first-derivative-identity", e1 < tol, e1, tol);

    // Order 1 against central finite differences.
    const double step = 1e-5;
    const CMat fd = std::complex<double>(0.5 / step) *
                    (expm(h + std::complex<double>(step) * X) -
                     expm(h - std::complex<double>(step) * X));
    const double efd = detail::rel_dev(d1, fd);
    rep.add("first-derivative-finite-difference", efd < 1e-7, efd, 1e-7);

    // Commuting direction: X = h gives delta e^h = h e^h.
    const CMat dcomm = frechet_exp(h, h, 1);
    const double ec = detail::rel_dev(dcomm, h * md.weyl);
    rep.add("commuting-direction", ec < tol, ec, tol);

    // Order 2 with declared second variation Z.
    const CMat d2 = frechet_exp(h, X, 2, &Z);
    const CMat rhs2 =
        md.weyl * (apply_modular_fn([](double mu) { return f1(mu / 2.0); }, md, Z) +
                   std::complex<double>(2.0) *
                       apply_modular_fn2([](double a, double b) { return g2(a / 2.0, b / 2.0); },
                                         md, X, X));
    const double e2 = detail::rel_dev(d2, rhs2);
    rep.add("second-derivative-identity", e2 < 10.0 * tol, e2, 10.0 * tol);

    return rep;
}

/// Trace properties of the modular calculus: Tr(Delta x) = Tr(x) and the
/// adjoint rule Tr(f(modular)(x) y) = Tr(x f(-modular)(y)).
inline VerificationReport verify_trace_properties(int n, unsigned seed, double tol) {
    std::mt19937 rng(seed);
    const CMat h = random_hermitian(n, rng);
    const CMat x = random_hermitian(n, rng);
    const CMat y = random_hermitian(n, rng);
    const ModularData md(h);
    const CMat k2 = md.weyl * md.weyl;
    const CMat k2inv = k2.inverse();

    VerificationReport rep;
    rep.suite = "trace-properties-n" + std::to_string(n) + "-seed" + std::to_string(seed);

    const CMat dx = k2inv * x * k2;
    const double e1 = detail::rel_dev(dx.trace().real(), x.trace().real());
    rep.add("modular-trace-invariance", e1 < tol, e1, tol);

    // The modular function e^{mu} reproduces conjugation by k^2.
    const CMat viafn = apply_modular_fn([](double mu) { return std::exp(mu); }, md, x);
    const double e2 = detail::rel_dev(viafn, dx);
    rep.add("modular-operator-realization", e2 < tol, e2, tol);

    const ScalarFn T = gaussian_test_fn();
    const double lhs = (apply_modular_fn(T.f, md, x) * y).trace().real();
    const double rhs = (x * apply_modular_fn([T](double mu) { return T.f(-mu); }, md, y)).trace().real();
    const double e3 = detail::rel_dev(lhs, rhs);
    rep.add("modular-adjoint-rule", e3 < tol, e3, tol);

    // Kernel of the derivation: x = h^2 commutes with h.
    const CMat hx = h * h;
    const CMat fx = apply_modular_fn(T.f, md, hx);
    const double e4 = detail::rel_dev(fx, std::complex<double>(T.f(0.0)) * hx);
    rep.add("commutant-scaling", e4 < tol, e4, tol);

    const CMat ones = apply_modular_fn([](double) { return 1.0; }, md, x);
    const double e5 = detail::rel_dev(ones, x);
    rep.add("unit-function", e5 < tol, e5, tol);

    return rep;
}

/// Exchange of a generic derivation with the modular calculus:
///   delta(T(modular)(psi)) = T(modular)(delta psi)
///     + L1(modular,modular)((delta h) psi) + L2(modular,modular)(psi (delta h))
/// with the derivation realized as h -> h + eps Y, psi -> psi + eps W.
inline VerificationReport verify_nabla_exchange(int n, unsigned seed, double tol) {
    std::mt19937 rng(seed);

    VerificationReport rep;
    rep.suite = "nabla-exchange-n" + std::to_string(n) + "-seed" + std::to_string(seed);

    auto run_case = [&](const std::string& label, const ScalarFn& T, const CMat& h, const CMat& Y,
                        const CMat& W, const CMat& psi, double tolerance) {
        const auto curve = [&](double eps) {
            const CMat he = h + std::complex<double>(eps) * Y;
            const CMat pe = psi + std::complex<double>(eps) * W;
            return apply_modular_fn(T.f, he, pe);
        };
        const CMat lhs = detail::stencil_derivative(curve, 1e-3);
        const ModularData md(h);
        const CMat rhs =
            apply_modular_fn(T.f, md, W) +
            apply_modular_fn2([&T](double s, double t) { return exchange_L1(T, s, t); }, md, Y, psi) +
            apply_modular_fn2([&T](double s, double t) { return exchange_L2(T, s, t); }, md, psi, Y);
        const double err = detail::rel_dev(lhs, rhs);
        rep.add(label, err < tolerance, err, tolerance);
    };

    const CMat Y = random_hermitian(n, rng);
    const CMat W = random_hermitian(n, rng);
    const CMat psi = random_hermitian(n, rng);

    // Dense h with generic spectrum.
    const CMat h = random_hermitian(n, rng);
    for (const ScalarFn& T : {gaussian_test_fn(), rational_test_fn()})
        run_case("dense-" + T.name, T, h, Y, W, psi, tol);

    // Diagonal h with distinct eigenvalues (all gaps distinct).
    CMat hd(n);
    for (int i = 0; i < n; ++i) hd(i, i) = 0.3 * i * i + 0.1 * i; // gaps pairwise distinct
    run_case("diagonal-distinct-gaussian", gaussian_test_fn(), hd, Y, W, psi, tol);

    // Repeated eigenvalue: the derivative fallback of L1/L2 carries the case.
    CMat hr(n);
    for (int i = 0; i < n; ++i) hr(i, i) = (i < 2) ? 0.7 : 0.7 + 0.4 * i;
    run_case("repeated-eigenvalue-gaussian", gaussian_test_fn(), hr, Y, W, psi, tol);
    run_case("repeated-eigenvalue-rational", rational_test_fn(), hr, Y, W, psi, tol);

    // T == 1 collapses to delta psi = delta psi (stencil roundoff only).
    run_case("constant-function", constant_one_fn(), h, Y, W, psi, 1e-11);

    return rep;
}

/// The four variation identities behind the Einstein-Hilbert gradient, in the
/// matrix model: the state is the trace, the geometric derivation is
/// ad_{iD} for a random self-adjoint D (so integration by parts is exact),
/// and the modular derivation is -2 ad_h.
inline VerificationReport verify_variation_lemmas(int m_param, int n, unsigned seed, double tol) {
    std::mt19937 rng(seed);
    const double c = (2.0 - m_param) / 2.0; // = -j0

    // Moderate spectral radius keeps the volume weight e^{(2-m)h} from
    // amplifying stencil roundoff at the larger m.
    const CMat h = std::complex<double>(0.5) * random_hermitian(n, rng);
    const CMat a = random_hermitian(n, rng);
    const CMat D = random_hermitian(n, rng);
    const CMat psi = random_hermitian(n, rng);
    const ModularData md(h);
    const CMat weight = expm(std::complex<double>(2.0 * c) * h); // e^{(2-m)h}

    const std::complex<double> iunit(0.0, 1.0);
    const CMat iD = iunit * D;
    const CMat grad_h = commutator(iD, h);
    const CMat grad_a = commutator(iD, a);
    const CMat grad2_h = commutator(iD, grad_h);

    VerificationReport rep;
    rep.suite = "variation-lemmas-m" + std::to_string(m_param) + "-n" + std::to_string(n) +
                "-seed" + std::to_string(seed);

    for (const ScalarFn& T : {gaussian_test_fn(), rational_test_fn()}) {
        const ScalarFn Tt = tilde_of(T, c);

        // --- Volume-factor variation ---------------------------------------
        {
            const CMat dvol = frechet_exp(std::complex<double>(2.0 * c) * h,
                                          std::complex<double>(2.0 * c) * a, 1);
            const double lhs = (dvol * apply_modular_fn(T.f, md, psi) * psi).trace().real();
            auto Lfn = [&](double s, double t) { return 2.0 * c * f1(c * (s + t)) * T.f(s); };
            const double rhs = (a * weight * apply_modular_fn2(Lfn, md, psi, psi)).trace().real();
            const double err = detail::rel_dev(lhs, rhs);
            rep.add("volume-variation-" + T.name, err < tol, err, tol);
        }

        // --- Modular-argument variation ------------------------------------
        {
            const auto curve = [&](double eps) {
                return apply_modular_fn(T.f, h + std::complex<double>(eps) * a, psi);
            };
            const CMat dmod = detail::stencil_derivative(curve, 1e-3);
            const double lhs = (weight * dmod * psi).trace().real();
            auto Mfn = [&](double s, double t) {
                const double x = s + t;
                double A, B;
                if (std::abs(x) < detail::kDivDiffGap) {
                    A = -(T.d1(-t) + 0.5 * x * T.d2(-t) + x * x / 6.0 * T.d3(-t));
                    B = T.d1(t) - 0.5 * x * T.d2(t) + x * x / 6.0 * T.d3(t);
                } else {
                    A = (T.f(-t) - T.f(s)) / x;
                    B = (T.f(t) - T.f(-s)) / x;
                }
                return 2.0 * std::exp(c * x) * (A + B * std::exp(-c * t));
            };
            const double rhs = (a * weight * apply_modular_fn2(Mfn, md, psi, psi)).trace().real();
            const double err = detail::rel_dev(lhs, rhs);
            rep.add("modular-variation-" + T.name, err < tol, err, tol);
        }

        // --- Integration by parts, first slot ------------------------------
        {
            const double lhs = (weight * apply_modular_fn(T.f, md, grad_h) * grad_a).trace().real();
            auto Pfn = [&](double s, double t) {
                return 2.0 * c * f1(c * s) * T.f(t) + exchange_L1(T, s, t) + exchange_L2(T, s, t);
            };
            const double rhs = -(a * weight * apply_modular_fn(T.f, md, grad2_h)).trace().real() -
                               (a * weight * apply_modular_fn2(Pfn, md, grad_h, grad_h)).trace().real();
            const double err = detail::rel_dev(lhs, rhs);
            rep.add("parts-first-slot-" + T.name, err < tol, err, tol);
        }

        // --- Integration by parts, second slot -----------------------------
        {
            const double lhs = (weight * apply_modular_fn(T.f, md, grad_a) * grad_h).trace().real();
            auto Qfn = [&](double s, double t) {
                return 2.0 * c * f1(c * s) * Tt.f(t) + exchange_L1(Tt, s, t) + exchange_L2(Tt, s, t);
            };
            const double rhs = -(a * weight * apply_modular_fn(Tt.f, md, grad2_h)).trace().real() -
                               (a * weight * apply_modular_fn2(Qfn, md, grad_h, grad_h)).trace().real();
            const double err = detail::rel_dev(lhs, rhs);
            rep.add("parts-second-slot-" + T.name, err < tol, err, tol);
        }
    }

    // Commutative reduction of the volume-factor variation: scalar h.
    {
        const ScalarFn T = gaussian_test_fn();
        const CMat hs = std::complex<double>(0.3) * CMat::identity(n);
        const CMat dvol = frechet_exp(std::complex<double>(2.0 * c) * hs,
                                      std::complex<double>(2.0 * c) * a, 1);
        const double lhs = (dvol * apply_modular_fn(T.f, hs, psi) * psi).trace().real();
        const double rhs =
            2.0 * c * T.f(0.0) *
            (a * expm(std::complex<double>(2.0 * c) * hs) * psi * psi).trace().real();
        const double err = detail::rel_dev(lhs, rhs);
        rep.add("volume-variation-commutative", err < tol, err, tol);
    }

    return rep;
}

} // namespace modcurv
