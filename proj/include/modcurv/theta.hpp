#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "errors.hpp"
#include "report.hpp"

namespace modcurv {

/// Skew-symmetric deformation matrix for the torus action (rank 2 or 3).
struct ThetaMatrix {
    int n = 2;
    std::vector<double> a; ///< row-major n*n

    static ThetaMatrix zero(int n) { return {n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)}; }

    /// Rank-2 matrix [[0, t],[-t, 0]].
    static ThetaMatrix rank2(double t) { return {2, {0.0, t, -t, 0.0}}; }

    /// Rank-3 matrix with independent upper-triangle entries.
    static ThetaMatrix rank3(double t12, double t13, double t23) {
        return {3, {0.0, t12, t13, -t12, 0.0, t23, -t13, -t23, 0.0}};
    }

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    bool is_skew(double tol = 0.0) const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(at(i, j) + at(j, i)) > tol) return false;
        return true;
    }

    ThetaMatrix scaled(double eps) const {
        ThetaMatrix s = *this;
        for (double& v : s.a) v *= eps;
        return s;
    }
};

using LatticePoint = std::vector<int>;

/// chi_theta(r, l) = exp(i pi <theta r, l>), the deformation bicharacter.
inline std::complex<double> bicharacter(const ThetaMatrix& theta, const LatticePoint& r,
                                        const LatticePoint& l) {
    double phase = 0.0;
    for (int i = 0; i < theta.n; ++i) {
        double tr = 0.0;
        for (int j = 0; j < theta.n; ++j) tr += theta.at(i, j) * r[j];
        phase += tr * l[i];
    }
    const double arg = std::acos(-1.0) * phase;
    return {std::cos(arg), std::sin(arg)};
}

/// Truncated Fourier expansion on the n-torus: finitely many lattice
/// coefficients with an explicit truncation radius (sup-norm on the lattice).
struct FourierElement {
    int n = 2;
    int radius = 0;
    std::map<LatticePoint, std::complex<double>> coeffs;

    static FourierElement constant(int n, std::complex<double> c) {
        FourierElement f;
        f.n = n;
        f.radius = 0;
        if (c != std::complex<double>(0.0)) f.coeffs[LatticePoint(n, 0)] = c;
        return f;
    }

    std::complex<double> coeff(const LatticePoint& r) const {
        auto it = coeffs.find(r);
        return it == coeffs.end() ? std::complex<double>(0.0) : it->second;
    }

    void set(const LatticePoint& r, std::complex<double> c) {
        int norm = 0;
        for (int v : r) norm = std::max(norm, std::abs(v));
        radius = std::max(radius, norm);
        if (c == std::complex<double>(0.0)) coeffs.erase(r);
        else coeffs[r] = c;
    }

    FourierElement star() const {
        FourierElement s;
        s.n = n;
        s.radius = radius;
        for (const auto& [r, c] : coeffs) {
            LatticePoint neg(n);
            for (int i = 0; i < n; ++i) neg[i] = -r[i];
            s.coeffs[neg] = std::conj(c);
        }
        return s;
    }

    bool is_self_adjoint(double tol = 1e-13) const {
        for (const auto& [r, c] : coeffs) {
            LatticePoint neg(n);
            for (int i = 0; i < n; ++i) neg[i] = -r[i];
            if (std::abs(std::conj(coeff(neg)) - c) > tol) return false;
        }
        return true;
    }

    double max_norm() const {
        double m = 0.0;
        for (const auto& [r, c] : coeffs) m = std::max(m, std::abs(c));
        return m;
    }

    friend FourierElement operator+(const FourierElement& x, const FourierElement& y) {
        FourierElement s = x;
        s.radius = std::max(x.radius, y.radius);
        for (const auto& [r, c] : y.coeffs) {
            const std::complex<double> v = s.coeff(r) + c;
            if (v == std::complex<double>(0.0)) s.coeffs.erase(r);
            else s.coeffs[r] = v;
        }
        return s;
    }
    friend FourierElement operator-(const FourierElement& x, const FourierElement& y) {
        FourierElement neg = y;
        for (auto& [r, c] : neg.coeffs) c = -c;
        return x + neg;
    }
    friend FourierElement operator*(std::complex<double> c, const FourierElement& x) {
        FourierElement s = x;
        for (auto& [r, v] : s.coeffs) v *= c;
        return s;
    }
};

/// The deformed product: twisted convolution
///   (f x_theta g)_{r+l} += chi_theta(r, l) f_r g_l.
/// The truncation radius is additive; exceeding `cap` is an error rather than
/// a silent truncation.
inline FourierElement deformed_mul(const FourierElement& f, const FourierElement& g,
                                   const ThetaMatrix& theta, int cap = 64) {
    if (f.n != g.n || f.n != theta.n) throw Error("rank mismatch in deformed product");
    if (f.radius + g.radius > cap)
        throw TruncationOverflow("product radius " + std::to_string(f.radius + g.radius) +
                                 " exceeds cap " + std::to_string(cap));
    FourierElement out;
    out.n = f.n;
    out.radius = f.radius + g.radius;
    for (const auto& [r, fc] : f.coeffs)
        for (const auto& [l, gc] : g.coeffs) {
            LatticePoint sum(f.n);
            for (int i = 0; i < f.n; ++i) sum[i] = r[i] + l[i];
            out.coeffs[sum] += bicharacter(theta, r, l) * fc * gc;
        }
    // Drop numerically empty slots so sparsity comparisons stay meaningful.
    for (auto it = out.coeffs.begin(); it != out.coeffs.end();)
        it = (it->second == std::complex<double>(0.0)) ? out.coeffs.erase(it) : std::next(it);
    return out;
}

/// Truncated exponential power series of a self-adjoint element with respect
/// to the deformed product.
inline FourierElement weyl_exp(const FourierElement& h, const ThetaMatrix& theta, int degree,
                               int cap = 64) {
    if (degree > 12) throw Error("weyl_exp supports degree <= 12");
    if (!h.is_self_adjoint()) throw Error("weyl_exp expects a self-adjoint element");
    if (h.radius * degree > cap)
        throw TruncationOverflow("series radius " + std::to_string(h.radius * degree) +
                                 " exceeds cap " + std::to_string(cap));
    FourierElement sum = FourierElement::constant(h.n, 1.0);
    FourierElement power = FourierElement::constant(h.n, 1.0);
    double fact = 1.0;
    for (int j = 1; j <= degree; ++j) {
        power = deformed_mul(power, h, theta, cap);
        fact *= j;
        sum = sum + std::complex<double>(1.0 / fact) * power;
    }
    return sum;
}

/// Random self-adjoint element supported on |r|_inf <= radius.
inline FourierElement random_self_adjoint(int n, int radius, std::mt19937& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> pick(-0.5, 0.5);
    FourierElement f;
    f.n = n;
    std::vector<LatticePoint> pts;
    LatticePoint p(n, -radius);
    while (true) {
        pts.push_back(p);
        int i = 0;
        while (i < n && ++p[i] > radius) p[i++] = -radius;
        if (i == n) break;
    }
    for (const auto& r : pts) {
        const std::complex<double> c{scale * pick(rng), scale * pick(rng)};
        LatticePoint neg(n);
        for (int i = 0; i < n; ++i) neg[i] = -r[i];
        if (neg == r) {
            f.set(r, c.real());
        } else if (f.coeffs.find(r) == f.coeffs.end() && f.coeffs.find(neg) == f.coeffs.end()) {
            f.set(r, c);
            f.set(neg, std::conj(c));
        }
    }
    return f;
}

/// Algebraic axioms of the deformed product on random truncated elements.
inline VerificationReport verify_theta_axioms(int rank, int radius, unsigned seed, double tol = 1e-12) {
    std::mt19937 rng(seed);
    const ThetaMatrix theta = rank == 2 ? ThetaMatrix::rank2(0.3741)
                                        : ThetaMatrix::rank3(0.3741, 0.1295, -0.2216);
    const FourierElement f = random_self_adjoint(rank, radius, rng);
    const FourierElement g = random_self_adjoint(rank, radius, rng);
    const FourierElement h = random_self_adjoint(rank, radius, rng);

    VerificationReport rep;
    rep.suite = "theta-rank" + std::to_string(rank) + "-radius" + std::to_string(radius) + "-seed" +
                std::to_string(seed);

    // Associativity against the direct triple sum implicit in re-association.
    const FourierElement left = deformed_mul(deformed_mul(f, g, theta), h, theta);
    const FourierElement right = deformed_mul(f, deformed_mul(g, h, theta), theta);
    const double ea = (left - right).max_norm();
    rep.add("associativity", ea < tol, ea, tol);

    // Star axiom (f x g)* = g* x f*.
    const FourierElement fg = deformed_mul(f, g, theta);
    const double es = (fg.star() - deformed_mul(g.star(), f.star(), theta)).max_norm();
    rep.add("star-axiom", es < tol, es, tol);

    // Trace property of the zero mode.
    const double et = std::abs(fg.coeff(LatticePoint(rank, 0)) -
                               deformed_mul(g, f, theta).coeff(LatticePoint(rank, 0)));
    rep.add("trace-property", et < 1e-13, et, 1e-13);

    // Invariant (zero-mode) elements are central and multiply pointwise.
    const FourierElement inv = FourierElement::constant(rank, {0.831, 0.0});
    const double ec = (deformed_mul(inv, g, theta) - deformed_mul(g, inv, theta)).max_norm();
    rep.add("centrality-of-invariants", ec < tol, ec, tol);
    const double ep = (deformed_mul(inv, g, theta) - std::complex<double>(0.831) * g).max_norm();
    rep.add("invariant-scalar-action", ep < tol, ep, tol);

    // theta -> 0 continuity: linear decay of the deformation defect along
    // eps in {1, 1/2, 1/4}.  The base matrix is scaled into the regime where
    // no bicharacter phase wraps, so halving eps should halve the defect.
    const FourierElement plain = deformed_mul(f, g, ThetaMatrix::zero(rank));
    const ThetaMatrix theta0 = theta.scaled(0.02);
    double prev = 0.0;
    bool decays = true;
    for (int k = 0; k < 3; ++k) {
        const double eps = 1.0 / (1 << k);
        const double defect = (deformed_mul(f, g, theta0.scaled(eps)) - plain).max_norm();
        if (k > 0 && !(defect < 0.65 * prev)) decays = false;
        prev = defect;
    }
    rep.add("theta-continuity", decays, prev, 0.0,
            "defect halves as eps halves along {1, 1/2, 1/4}");

    return rep;
}

} // namespace modcurv
