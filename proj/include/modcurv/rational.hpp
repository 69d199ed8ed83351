#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace modcurv {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline double to_double(const BigRational& r) { return r.convert_to<double>(); }

/// Gaussian rational a + b*i with arbitrary-precision components.
/// Closed under +, -, *, / (nonzero divisor); i*i = -1.
class GaussRational {
public:
    GaussRational() = default;
    GaussRational(long v) : re_(v) {} // NOLINT(google-explicit-constructor)
    GaussRational(BigRational re) : re_(std::move(re)) {} // NOLINT(google-explicit-constructor)
    GaussRational(BigRational re, BigRational im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussRational i() { return {BigRational(0), BigRational(1)}; }

    const BigRational& re() const { return re_; }
    const BigRational& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    GaussRational conj() const { return {re_, -im_}; }

    friend GaussRational operator+(const GaussRational& a, const GaussRational& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend GaussRational operator-(const GaussRational& a, const GaussRational& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }
    friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend GaussRational operator/(const GaussRational& a, const GaussRational& b) {
        if (b.is_zero()) throw DivisionByZero();
        const BigRational n = b.re_ * b.re_ + b.im_ * b.im_;
        const GaussRational p = a * b.conj();
        return {p.re_ / n, p.im_ / n};
    }
    GaussRational& operator+=(const GaussRational& o) { return *this = *this + o; }
    GaussRational& operator-=(const GaussRational& o) { return *this = *this - o; }
    GaussRational& operator*=(const GaussRational& o) { return *this = *this * o; }
    GaussRational& operator/=(const GaussRational& o) { return *this = *this / o; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    std::complex<double> to_complex() const { return {to_double(re_), to_double(im_)}; }

    /// Canonical rendering: "a/b" when real, "(a/b)+(c/d)i" otherwise.
    /// The denominator is always printed so parsing stays unambiguous.
    std::string str() const {
        auto frac = [](const BigRational& r) {
            std::ostringstream os;
            os << numerator(r) << '/' << denominator(r);
            return os.str();
        };
        if (im_ == 0) return frac(re_);
        return "(" + frac(re_) + ")+(" + frac(im_) + ")i";
    }

private:
    BigRational re_{0};
    BigRational im_{0};
};

} // namespace modcurv
