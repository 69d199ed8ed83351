#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "errors.hpp"

namespace modcurv {

/// Dense complex matrix, sized for the finite-dimensional operator model
/// (n <= a few dozen; everything is O(n^3) without blocking).
class CMat {
public:
    using C = std::complex<double>;

    CMat() = default;
    explicit CMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, C(0.0)) {}

    static CMat identity(int n) {
        CMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int size() const { return n_; }
    C& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const C& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    friend CMat operator+(const CMat& x, const CMat& y) {
        CMat r(x.n_);
        for (std::size_t k = 0; k < x.a_.size(); ++k) r.a_[k] = x.a_[k] + y.a_[k];
        return r;
    }
    friend CMat operator-(const CMat& x, const CMat& y) {
        CMat r(x.n_);
        for (std::size_t k = 0; k < x.a_.size(); ++k) r.a_[k] = x.a_[k] - y.a_[k];
        return r;
    }
    friend CMat operator*(C c, const CMat& x) {
        CMat r(x.n_);
        for (std::size_t k = 0; k < x.a_.size(); ++k) r.a_[k] = c * x.a_[k];
        return r;
    }
    friend CMat operator*(const CMat& x, const CMat& y) {
        const int n = x.n_;
        CMat r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const C v = x(i, k);
                if (v == C(0.0)) continue;
                for (int j = 0; j < n; ++j) r(i, j) += v * y(k, j);
            }
        return r;
    }

    CMat adjoint() const {
        CMat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    C trace() const {
        C t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius() const {
        double s = 0.0;
        for (const C& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    CMat inverse() const {
        const int n = n_;
        CMat a = *this, r = identity(n);
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int i = col + 1; i < n; ++i)
                if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
            if (std::abs(a(piv, col)) < 1e-300) throw Error("singular matrix in inverse()");
            if (piv != col)
                for (int j = 0; j < n; ++j) {
                    std::swap(a(col, j), a(piv, j));
                    std::swap(r(col, j), r(piv, j));
                }
            const C d = a(col, col);
            for (int j = 0; j < n; ++j) {
                a(col, j) /= d;
                r(col, j) /= d;
            }
            for (int i = 0; i < n; ++i) {
                if (i == col) continue;
                const C f = a(i, col);
                if (f == C(0.0)) continue;
                for (int j = 0; j < n; ++j) {
                    a(i, j) -= f * a(col, j);
                    r(i, j) -= f * r(col, j);
                }
            }
        }
        return r;
    }

private:
    int n_ = 0;
    std::vector<C> a_;
};

inline CMat commutator(const CMat& x, const CMat& y) { return x * y - y * x; }

/// Random Hermitian matrix with entries of order one.
inline CMat random_hermitian(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> pick(-0.5, 0.5);
    CMat b(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = {pick(rng), pick(rng)};
    CMat h = b + b.adjoint();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = 0.5 * h(i, j);
    return h;
}

/// Hermitian eigendecomposition A = V diag(lambda) V^* by cyclic Jacobi
/// rotations; sweeps continue until the off-diagonal Frobenius norm drops
/// below 1e-13 (relative to the matrix scale).
struct EigenSystem {
    std::vector<double> eigvals;
    CMat eigvecs;
};

inline EigenSystem jacobi_eigen(const CMat& a0) {
    using C = std::complex<double>;
    const int n = a0.size();
    CMat a = a0;
    CMat v = CMat::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };
    const double scale = std::max(a.frobenius(), 1.0);

    for (int sweep = 0; sweep < 60 && off_norm() > 1e-13 * scale; ++sweep) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const C apq = a(p, q);
                const double r = std::abs(apq);
                if (r < 1e-300) continue;
                // Phase away the off-diagonal entry, then a real rotation.
                const C phase = apq / r; // a(p,q) = r * phase
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double tau = (app - aqq) / (2.0 * r);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Unitary U (2x2 block): column update x_p' = c x_p + s*conj(phase) x_q,
                // x_q' = -s*phase x_p + c x_q; chosen so U^* A U kills (p,q).
                const C upp = c, upq = -s * phase;
                const C uqp = s * std::conj(phase), uqq = c;
                for (int i = 0; i < n; ++i) { // A <- A U, V <- V U
                    const C aip = a(i, p), aiq = a(i, q);
                    a(i, p) = aip * upp + aiq * uqp;
                    a(i, q) = aip * upq + aiq * uqq;
                    const C vip = v(i, p), viq = v(i, q);
                    v(i, p) = vip * upp + viq * uqp;
                    v(i, q) = vip * upq + viq * uqq;
                }
                for (int j = 0; j < n; ++j) { // A <- U^* A
                    const C apj = a(p, j), aqj = a(q, j);
                    a(p, j) = std::conj(upp) * apj + std::conj(uqp) * aqj;
                    a(q, j) = std::conj(upq) * apj + std::conj(uqq) * aqj;
                }
            }
    }
    if (off_norm() > 1e-12 * scale) throw Error("Jacobi eigensolver did not converge");

    EigenSystem es;
    es.eigvals.resize(n);
    for (int i = 0; i < n; ++i) es.eigvals[i] = a(i, i).real();
    es.eigvecs = v;
    return es;
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series
/// (the scaled norm is pushed below 1/4, where the series converges to
/// machine precision in ~20 terms).
inline CMat expm(const CMat& a) {
    const int n = a.size();
    const double norm = a.frobenius();
    int squarings = 0;
    double scaled = norm;
    while (scaled > 0.25) {
        scaled *= 0.5;
        ++squarings;
    }
    const double factor = std::ldexp(1.0, -squarings);
    CMat b = std::complex<double>(factor) * a;

    CMat result = CMat::identity(n);
    CMat term = CMat::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = std::complex<double>(1.0 / k) * (term * b);
        result = result + term;
        if (term.frobenius() < 1e-18) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

} // namespace modcurv
