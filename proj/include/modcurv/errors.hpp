#pragma once

#include <stdexcept>
#include <string>

namespace modcurv {

/// Error hierarchy shared by the whole workbench.  Every failure mode that a
/// caller can meaningfully react to gets its own type; everything else is a
/// plain std::logic_error (programming bug).
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& what = "division by zero") : Error(what) {}
};

struct DenominatorVanishes : Error {
    explicit DenominatorVanishes(const std::string& what = "substitution makes denominator vanish identically")
        : Error(what) {}
};

struct NearPole : Error {
    explicit NearPole(const std::string& what = "numeric evaluation too close to a pole") : Error(what) {}
};

struct UnsupportedOrder : Error {
    explicit UnsupportedOrder(const std::string& what = "product term order > 2 not supported") : Error(what) {}
};

struct MismatchAgainstReference : Error {
    explicit MismatchAgainstReference(const std::string& what) : Error(what) {}
};

struct GradingViolation : Error {
    explicit GradingViolation(const std::string& what) : Error(what) {}
};

struct UnknownPattern : Error {
    explicit UnknownPattern(const std::string& what) : Error(what) {}
};

struct RuleMismatch : Error {
    explicit RuleMismatch(const std::string& what) : Error(what) {}
};

struct HomogeneityViolation : Error {
    explicit HomogeneityViolation(const std::string& what) : Error(what) {}
};

struct QuadratureNotConverged : Error {
    explicit QuadratureNotConverged(const std::string& what = "adaptive quadrature budget exhausted")
        : Error(what) {}
};

struct SingularLocus : Error {
    explicit SingularLocus(const std::string& what = "evaluation point lies on a singular locus") : Error(what) {}
};

struct ExtrapolationDiverged : Error {
    explicit ExtrapolationDiverged(const std::string& what = "Richardson extrapolation diverged") : Error(what) {}
};

struct TruncationOverflow : Error {
    explicit TruncationOverflow(const std::string& what = "Fourier truncation radius exceeded") : Error(what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace modcurv
