#pragma once

#include "polynomial.hpp"

namespace modcurv::fixtures {

/// Reference formulas for the master one- and two-variable curvature
/// generating functions and their per-dimension germs.  These are independent
/// transcriptions of the published closed forms; the derivation pipeline is
/// required to reproduce every one of them exactly.  Everything is expressed
/// over the quarter-power generators: sqrt(s) = s4^2, s = s4^4, and likewise
/// for t.

inline RationalFunction u() { return RationalFunction::var(Var::u); }
inline RationalFunction m() { return RationalFunction::var(Var::m); }
inline RationalFunction sqrt_s() { return RationalFunction::var(Var::s4, 2); }
inline RationalFunction s() { return RationalFunction::var(Var::s4, 4); }
inline RationalFunction sqrt_t() { return RationalFunction::var(Var::t4, 2); }
inline RationalFunction t() { return RationalFunction::var(Var::t4, 4); }
inline RationalFunction c(long v) { return RationalFunction(v); }
inline RationalFunction frac(long a, long b) {
    return RationalFunction(GaussRational(BigRational(a, b)));
}

/// One-variable master function
///   F(u,s,m) = [m(√s+1)(u-1) + 2(2√s+u+1)] / [m(u-1)^3(u-s)].
inline RationalFunction master_one_variable() {
    const RationalFunction num =
        m() * (sqrt_s() + c(1)) * (u() - c(1)) + c(2) * (c(2) * sqrt_s() + u() + c(1));
    const RationalFunction den = m() * (u() - c(1)).pow(3) * (u() - s());
    return num / den;
}

/// Two-variable master function G(u,s,t,m); numerator grouped by powers of u,
/// denominator m(u-1)^3(u-s)^2(u-st).
inline RationalFunction master_two_variable() {
    const RationalFunction rs = sqrt_s();
    const RationalFunction rt = sqrt_t();
    const RationalFunction u0 = s() * rs *
        (m() * ((c(2) * rs + c(1)) * rt + c(2)) - c(4) * ((c(2) * rs + c(1)) * rt + c(1)));
    const RationalFunction u1 = -u() * rs *
        (s() * (c(6) * rt + c(4)) + rs * (c(10) - c(4) * rt) - c(2) * (rt + c(1)) +
         m() * (c(2) * s() * rs * rt + c(2) * rs * (rt - c(1)) + c(2) * s() + rt + c(2)));
    const RationalFunction u2 = u().pow(2) *
        (c(2) * (s() + c(2) * rs + c(3)) * (rs * rt + c(1)) -
         m() * (s() * rs * rt - c(2) * s() * (rt - c(1)) - c(2) * rs + c(2)));
    const RationalFunction u3 = u().pow(3) * (m() * rs * rt + c(2) * m() + c(2) * rs + c(2));
    const RationalFunction den = m() * (u() - c(1)).pow(3) * (u() - s()).pow(2) * (u() - s() * t());
    return (u0 + u1 + u2 + u3) / den;
}

/// Per-dimension one-variable curvature functions for the rescaled Laplacian.
inline RationalFunction curvature_one_variable(int dim) {
    switch (dim) {
        case 4:
            return c(-1) / (c(2) * s());
        case 6:
            return -(c(2) * s() + sqrt_s() + c(2)) / (c(3) * s().pow(2));
        case 8:
            return -(c(2) * s() * sqrt_s() + c(3) * s().pow(2) + c(4) * s() + c(2) * sqrt_s() + c(3)) /
                   (c(2) * s().pow(3));
        default:
            throw Error("no one-variable reference stored for dimension " + std::to_string(dim));
    }
}

/// Per-dimension two-variable curvature functions for the rescaled Laplacian.
inline RationalFunction curvature_two_variable(int dim) {
    const RationalFunction rs = sqrt_s();
    const RationalFunction rt = sqrt_t();
    switch (dim) {
        case 4:
            return c(1) / (s() * rs * t());
        case 6:
            return ((c(4) * s() + rs + c(3)) * t() + (c(2) * rs + c(1)) * rt + c(4)) /
                   (c(3) * s().pow(2) * rs * t().pow(2));
        case 8:
            return ((c(4) * s() * rs + c(3) * s() + c(2) * rs + c(1)) * t() * rt +
                    (c(2) * s() * rs + c(6) * s().pow(2) + c(5) * s() + rs + c(4)) * t().pow(2) +
                    (c(8) * s() + c(3) * rs + c(5)) * t() + (c(4) * rs + c(2)) * rt + c(6)) /
                   (c(2) * s().pow(3) * rs * t().pow(3));
        default:
            throw Error("no two-variable reference stored for dimension " + std::to_string(dim));
    }
}

} // namespace modcurv::fixtures
