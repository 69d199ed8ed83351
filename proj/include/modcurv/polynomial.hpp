#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "rational.hpp"

namespace modcurv {

/// Ring generators.  s4 and t4 are quarter powers of the two modular
/// parameters, so that half-integer powers of s and t stay polynomial:
/// sqrt(s) = s4^2, s = s4^4, and likewise for t.
enum class Var : int { u = 0, m = 1, s4 = 2, t4 = 3 };

inline constexpr int kNumVars = 4;
inline constexpr std::array<const char*, kNumVars> kVarNames = {"u", "m", "s4", "t4"};

inline int var_index(Var v) { return static_cast<int>(v); }

/// Exponent vector over (u, m, s4, t4); totally ordered lexicographically.
struct Monomial {
    std::array<int, kNumVars> e{0, 0, 0, 0};

    static Monomial one() { return {}; }
    static Monomial var(Var v, int power = 1) {
        Monomial mo;
        mo.e[var_index(v)] = power;
        return mo;
    }

    bool is_one() const { return e == std::array<int, kNumVars>{0, 0, 0, 0}; }
    int degree(Var v) const { return e[var_index(v)]; }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r;
        for (int i = 0; i < kNumVars; ++i) r.e[i] = a.e[i] + b.e[i];
        return r;
    }
    friend auto operator<=>(const Monomial& a, const Monomial& b) = default;

    std::string str() const {
        std::string s;
        for (int i = 0; i < kNumVars; ++i) {
            if (e[i] == 0) continue;
            if (!s.empty()) s += "*";
            s += kVarNames[i];
            if (e[i] != 1) s += "^" + std::to_string(e[i]);
        }
        return s;
    }
};

/// Sparse multivariate polynomial with Gaussian-rational coefficients.
/// Zero coefficients are never stored.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(GaussRational c) { // NOLINT(google-explicit-constructor)
        if (!c.is_zero()) terms_[Monomial::one()] = std::move(c);
    }
    Polynomial(long c) : Polynomial(GaussRational(c)) {} // NOLINT(google-explicit-constructor)

    static Polynomial var(Var v, int power = 1) {
        Polynomial p;
        p.terms_[Monomial::var(v, power)] = GaussRational(1);
        return p;
    }
    static Polynomial term(GaussRational c, Monomial mo) {
        Polynomial p;
        if (!c.is_zero()) p.terms_[mo] = std::move(c);
        return p;
    }

    const std::map<Monomial, GaussRational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Coefficient of a monomial (zero when absent).
    GaussRational coeff(const Monomial& mo) const {
        auto it = terms_.find(mo);
        return it == terms_.end() ? GaussRational(0) : it->second;
    }

    /// Largest monomial under the lexicographic order, with its coefficient.
    std::pair<Monomial, GaussRational> leading() const {
        if (terms_.empty()) return {Monomial::one(), GaussRational(0)};
        auto it = std::prev(terms_.end());
        return {it->first, it->second};
    }

    void add_term(const Monomial& mo, const GaussRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(mo, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (const auto& [mo, c] : b.terms_) r.add_term(mo, c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (const auto& [mo, c] : b.terms_) r.add_term(mo, -c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r;
        for (const auto& [mo, c] : a.terms_) r.terms_[mo] = -c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    friend Polynomial operator*(const GaussRational& c, const Polynomial& p) {
        Polynomial r;
        if (c.is_zero()) return r;
        for (const auto& [mo, pc] : p.terms_) r.terms_[mo] = c * pc;
        return r;
    }
    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    Polynomial pow(int n) const {
        Polynomial r(1);
        Polynomial base = *this;
        for (; n > 0; n >>= 1) {
            if (n & 1) r *= base;
            if (n > 1) base *= base;
        }
        return r;
    }

    Polynomial differentiate(Var v) const {
        const int vi = var_index(v);
        Polynomial r;
        for (const auto& [mo, c] : terms_) {
            if (mo.e[vi] == 0) continue;
            Monomial d = mo;
            d.e[vi] -= 1;
            r.add_term(d, GaussRational(BigRational(mo.e[vi])) * c);
        }
        return r;
    }

    int degree(Var v) const {
        int d = 0;
        for (const auto& [mo, c] : terms_) d = std::max(d, mo.degree(v));
        return d;
    }

    /// Coefficient polynomials with respect to one variable: result[j] is the
    /// coefficient of v^j (with v removed).
    std::vector<Polynomial> collect(Var v) const {
        const int vi = var_index(v);
        std::vector<Polynomial> out(static_cast<std::size_t>(degree(v)) + 1);
        for (const auto& [mo, c] : terms_) {
            Monomial rest = mo;
            const int j = rest.e[vi];
            rest.e[vi] = 0;
            out[static_cast<std::size_t>(j)].add_term(rest, c);
        }
        return out;
    }

    std::complex<double> eval(const std::map<Var, std::complex<double>>& at) const {
        std::complex<double> acc = 0.0;
        for (const auto& [mo, c] : terms_) {
            std::complex<double> t = c.to_complex();
            for (int i = 0; i < kNumVars; ++i) {
                if (mo.e[i] == 0) continue;
                auto it = at.find(static_cast<Var>(i));
                if (it == at.end()) throw Error(std::string("missing assignment for variable ") + kVarNames[i]);
                std::complex<double> p = 1.0;
                for (int k = 0; k < mo.e[i]; ++k) p *= it->second;
                t *= p;
            }
            acc += t;
        }
        return acc;
    }

    /// Canonical rendering: terms sorted with the largest monomial first, the
    /// coefficient always written explicitly.  "0" for the zero polynomial.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!out.empty()) out += " + ";
            out += it->second.str();
            if (!it->first.is_one()) out += "*" + it->first.str();
        }
        return out;
    }

private:
    std::map<Monomial, GaussRational> terms_;
};

/// Quotient of two polynomials.  Canonical form reduces joint integer content
/// and scales so that the denominator's leading coefficient is exactly one.
/// No polynomial GCD is computed anywhere: equality is decided by
/// cross-multiplied expansion, which is exact and cheap at the sizes used here.
class RationalFunction {
public:
    RationalFunction() : num_(0), den_(1) {}
    RationalFunction(long c) : num_(c), den_(1) {} // NOLINT(google-explicit-constructor)
    RationalFunction(GaussRational c) : num_(std::move(c)), den_(1) {} // NOLINT(google-explicit-constructor)
    RationalFunction(Polynomial n) : num_(std::move(n)), den_(1) { normalize(); } // NOLINT
    RationalFunction(Polynomial n, Polynomial d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_.is_zero()) throw DivisionByZero("rational function with zero denominator");
        normalize();
    }

    static RationalFunction var(Var v, int power = 1) { return RationalFunction(Polynomial::var(v, power)); }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
        return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
    }
    friend RationalFunction operator-(const RationalFunction& a) { return {-a.num_, a.den_}; }
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
        if (b.num_.is_zero()) throw DivisionByZero();
        return {a.num_ * b.den_, a.den_ * b.num_};
    }
    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
    RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
    RationalFunction& operator/=(const RationalFunction& o) { return *this = *this / o; }

    RationalFunction pow(int n) const {
        if (n < 0) return RationalFunction(den_.pow(-n), num_.pow(-n));
        return RationalFunction(num_.pow(n), den_.pow(n));
    }

    /// Semantic equality: cross-multiplied difference expands to zero.
    friend bool equals(const RationalFunction& a, const RationalFunction& b) {
        return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
    }

    RationalFunction differentiate(Var v, int k = 1) const {
        RationalFunction f = *this;
        for (int j = 0; j < k; ++j) {
            f = RationalFunction(f.num_.differentiate(v) * f.den_ - f.num_ * f.den_.differentiate(v),
                                 f.den_ * f.den_);
        }
        return f;
    }

    RationalFunction substitute(Var v, const RationalFunction& value) const {
        RationalFunction n = substitute_poly(num_, v, value);
        RationalFunction d = substitute_poly(den_, v, value);
        if (d.num_.is_zero()) throw DenominatorVanishes();
        return n / d;
    }

    std::complex<double> eval_numeric(const std::map<Var, std::complex<double>>& at) const {
        const std::complex<double> d = den_.eval(at);
        if (std::abs(d) <= 1e-12) throw NearPole();
        return num_.eval(at) / d;
    }

    std::string str() const { return num_.str() + " | " + den_.str(); }

private:
    static RationalFunction substitute_poly(const Polynomial& p, Var v, const RationalFunction& value) {
        // Horner evaluation in v with polynomial coefficients.
        auto coeffs = p.collect(v);
        RationalFunction acc(0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * value + RationalFunction(*it);
        return acc;
    }

    void normalize() {
        if (num_.is_zero()) {
            den_ = Polynomial(1);
            return;
        }
        // Scaling both parts by the inverse of the denominator's leading
        // coefficient makes the denominator monic under the lexicographic
        // order; this also subsumes integer-content reduction of the pair.
        const GaussRational scale = GaussRational(1) / den_.leading().second;
        num_ = scale * num_;
        den_ = scale * den_;
    }

    Polynomial num_;
    Polynomial den_;
};

// --- parsing of the canonical serialization -------------------------------

namespace detail {

inline BigRational parse_fraction(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) throw ParseError("expected a/b fraction in '" + s + "'");
    try {
        return {BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1))};
    } catch (const std::exception&) {
        throw ParseError("bad fraction '" + s + "'");
    }
}

inline GaussRational parse_coeff(const std::string& s) {
    if (!s.empty() && s.front() == '(') {
        // (a/b)+(c/d)i
        auto mid = s.find(")+(");
        if (mid == std::string::npos || s.size() < 6 || s.back() != 'i' || s[s.size() - 2] != ')')
            throw ParseError("bad complex coefficient '" + s + "'");
        return {parse_fraction(s.substr(1, mid - 1)), parse_fraction(s.substr(mid + 3, s.size() - mid - 5))};
    }
    return {parse_fraction(s)};
}

inline std::vector<std::string> split(const std::string& s, const std::string& sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

} // namespace detail

inline Polynomial parse_polynomial(const std::string& text) {
    if (text == "0") return Polynomial();
    Polynomial p;
    for (const auto& term : detail::split(text, " + ")) {
        auto factors = detail::split(term, "*");
        if (factors.empty()) throw ParseError("empty term in '" + text + "'");
        GaussRational c = detail::parse_coeff(factors[0]);
        Monomial mo;
        for (std::size_t i = 1; i < factors.size(); ++i) {
            auto caret = factors[i].find('^');
            std::string name = factors[i].substr(0, caret);
            int power = 1;
            if (caret != std::string::npos) power = std::atoi(factors[i].c_str() + caret + 1);
            bool found = false;
            for (int v = 0; v < kNumVars; ++v) {
                if (name == kVarNames[v]) {
                    mo.e[v] += power;
                    found = true;
                    break;
                }
            }
            if (!found) throw ParseError("unknown variable '" + name + "'");
        }
        p.add_term(mo, c);
    }
    return p;
}

inline RationalFunction parse_rational_function(const std::string& text) {
    auto parts = detail::split(text, " | ");
    if (parts.size() != 2) throw ParseError("expected 'num | den' in '" + text + "'");
    return {parse_polynomial(parts[0]), parse_polynomial(parts[1])};
}

/// Taylor coefficients of f around u = 0, as rational functions of the
/// remaining variables.  Computed by series division, which keeps denominators
/// as powers of den(u=0) instead of the squared-denominator growth of the
/// quotient rule — this is what makes high-order extraction cheap.
inline std::vector<RationalFunction> taylor_u(const RationalFunction& f, int order) {
    auto n = f.num().collect(Var::u);
    auto d = f.den().collect(Var::u);
    if (d.empty() || d[0].is_zero()) throw DenominatorVanishes("denominator vanishes at u = 0");
    RationalFunction d0inv = RationalFunction(1) / RationalFunction(d[0]);
    std::vector<RationalFunction> c;
    for (int k = 0; k <= order; ++k) {
        RationalFunction acc = k < static_cast<int>(n.size()) ? RationalFunction(n[k]) : RationalFunction(0);
        for (int i = 1; i <= k; ++i) {
            if (i < static_cast<int>(d.size())) acc -= RationalFunction(d[i]) * c[k - i];
        }
        c.push_back(acc * d0inv);
    }
    return c;
}

} // namespace modcurv
