#pragma once

#include <functional>

#include "errors.hpp"
#include "symterm.hpp"

namespace modcurv {

/// Vertical (fiberwise) differential: one application introduces exactly one
/// free index, supplied by the caller as `label`.  Leibniz rule over the word
/// with the per-atom rewrite rules:
///   D(B0^p)    = -p K^2 B0^{p+1} DXi2        (valid for p = -1 as well,
///                                             where it gives K^2 DXi2)
///   D(Xi2^x)   = x Xi2^{x-1} DXi2
///   D(DXi2_j)  = D2Xi2_{j,label}
///   D(SigmaD)  = DSigmaD
///   D of everything else vanishes.
inline SymbolSum vertical_diff(const SymbolSum& s, int label) {
    std::vector<SymbolTerm> out;
    for (const auto& t : s.terms()) {
        for (std::size_t i = 0; i < t.word.size(); ++i) {
            const Factor& f = t.word[i];
            SymbolTerm nt{t.coeff, {}};
            std::vector<Factor> repl;
            switch (f.kind) {
                case AtomKind::B0:
                    nt.coeff *= GaussRational(-f.power);
                    repl = {Factor(AtomKind::K, 2), Factor(AtomKind::B0, f.power + 1),
                            Factor(AtomKind::DXi2, 1, {label})};
                    break;
                case AtomKind::Xi2:
                    nt.coeff *= GaussRational(f.power);
                    repl = {Factor(AtomKind::Xi2, f.power - 1), Factor(AtomKind::DXi2, 1, {label})};
                    break;
                case AtomKind::DXi2:
                    repl = {Factor(AtomKind::D2Xi2, 1, {f.labels[0], label})};
                    break;
                case AtomKind::SigmaD:
                    repl = {Factor(AtomKind::DSigmaD, 1, {label})};
                    break;
                default:
                    continue; // derivative vanishes
            }
            nt.word.assign(t.word.begin(), t.word.begin() + static_cast<long>(i));
            nt.word.insert(nt.word.end(), repl.begin(), repl.end());
            nt.word.insert(nt.word.end(), t.word.begin() + static_cast<long>(i) + 1, t.word.end());
            out.push_back(std::move(nt));
        }
    }
    return SymbolSum(std::move(out));
}

/// Horizontal (covariant) differential with one free index `label`:
///   grad(K)       = GradK
///   grad(GradK_j) = Grad2K_{label,j}
///   grad(B0^p)    = -sum_i B0^{i+1} (GradK K + K GradK) Xi2 B0^{p-i}
///   grad(B0^{-1}) = +(GradK K + K GradK) Xi2
///   grad(Xi2) = grad(SigmaD) = grad(DSigmaD) = grad(DXi2) = grad(Scal) = 0
/// (the missing second-order term grad^2(Xi2) is supplied by
/// horizontal_diff2 below).
inline SymbolSum horizontal_diff(const SymbolSum& s, int label) {
    std::vector<SymbolTerm> out;
    auto nabla_k2 = [&](std::vector<SymbolTerm>& dst, const SymbolTerm& t, std::size_t i,
                        int left_b0, int right_b0, const GaussRational& sign) {
        // Insert B0^left (GradK K + K GradK) Xi2 B0^right at position i.
        for (int variant = 0; variant < 2; ++variant) {
            SymbolTerm nt{sign * t.coeff, {}};
            nt.word.assign(t.word.begin(), t.word.begin() + static_cast<long>(i));
            if (left_b0 != 0) nt.word.emplace_back(AtomKind::B0, left_b0);
            if (variant == 0) {
                nt.word.emplace_back(AtomKind::GradK, 1, std::vector<int>{label});
                nt.word.emplace_back(AtomKind::K, 1);
            } else {
                nt.word.emplace_back(AtomKind::K, 1);
                nt.word.emplace_back(AtomKind::GradK, 1, std::vector<int>{label});
            }
            nt.word.emplace_back(AtomKind::Xi2, 1);
            if (right_b0 != 0) nt.word.emplace_back(AtomKind::B0, right_b0);
            nt.word.insert(nt.word.end(), t.word.begin() + static_cast<long>(i) + 1, t.word.end());
            dst.push_back(std::move(nt));
        }
    };
    for (const auto& t : s.terms()) {
        for (std::size_t i = 0; i < t.word.size(); ++i) {
            const Factor& f = t.word[i];
            switch (f.kind) {
                case AtomKind::K:
                    // K^a: position of the derivative inside the power matters.
                    for (int pos = 0; pos < f.power; ++pos) {
                        SymbolTerm nt{t.coeff, {}};
                        nt.word.assign(t.word.begin(), t.word.begin() + static_cast<long>(i));
                        if (pos != 0) nt.word.emplace_back(AtomKind::K, pos);
                        nt.word.emplace_back(AtomKind::GradK, 1, std::vector<int>{label});
                        if (f.power - 1 - pos != 0) nt.word.emplace_back(AtomKind::K, f.power - 1 - pos);
                        nt.word.insert(nt.word.end(), t.word.begin() + static_cast<long>(i) + 1,
                                       t.word.end());
                        out.push_back(std::move(nt));
                    }
                    break;
                case AtomKind::GradK: {
                    SymbolTerm nt{t.coeff, t.word};
                    nt.word[i] = Factor(AtomKind::Grad2K, 1, {label, f.labels[0]});
                    out.push_back(std::move(nt));
                    break;
                }
                case AtomKind::B0:
                    if (f.power == -1) {
                        nabla_k2(out, t, i, 0, 0, GaussRational(1));
                    } else if (f.power >= 1) {
                        for (int pos = 0; pos < f.power; ++pos)
                            nabla_k2(out, t, i, pos + 1, f.power - pos, GaussRational(-1));
                    } else {
                        throw Error("horizontal derivative of unexpected B0 power");
                    }
                    break;
                case AtomKind::Grad2K:
                    throw Error("third covariant gradient of the conformal factor is never needed");
                default:
                    break; // derivative vanishes
            }
        }
    }
    return SymbolSum(std::move(out));
}

/// Second horizontal differential with index pair (l1, l2): the iterated
/// first-order rule plus the curvature correction grad^2(|xi|^2) = Grad2Xi2,
/// which is invisible to two first-order passes because grad(|xi|^2) = 0.
/// The correction enters through the |xi|^2 dependence of each factor:
/// for F(Xi2) it contributes (dF/dXi2) * Grad2Xi2(l1,l2).
inline SymbolSum horizontal_diff2(const SymbolSum& s, int l1, int l2) {
    SymbolSum result = horizontal_diff(horizontal_diff(s, l1), l2);
    std::vector<SymbolTerm> corrections;
    for (const auto& t : s.terms()) {
        for (std::size_t i = 0; i < t.word.size(); ++i) {
            const Factor& f = t.word[i];
            SymbolTerm nt{t.coeff, {}};
            std::vector<Factor> repl;
            switch (f.kind) {
                case AtomKind::B0:
                    nt.coeff *= GaussRational(-f.power);
                    repl = {Factor(AtomKind::K, 2), Factor(AtomKind::B0, f.power + 1),
                            Factor(AtomKind::Grad2Xi2, 1, {l1, l2})};
                    break;
                case AtomKind::Xi2:
                    nt.coeff *= GaussRational(f.power);
                    repl = {Factor(AtomKind::Xi2, f.power - 1), Factor(AtomKind::Grad2Xi2, 1, {l1, l2})};
                    break;
                default:
                    continue;
            }
            nt.word.assign(t.word.begin(), t.word.begin() + static_cast<long>(i));
            nt.word.insert(nt.word.end(), repl.begin(), repl.end());
            nt.word.insert(nt.word.end(), t.word.begin() + static_cast<long>(i) + 1, t.word.end());
            corrections.push_back(std::move(nt));
        }
    }
    return result + SymbolSum(std::move(corrections));
}

/// Shift every index label by a fixed offset (used to keep the two operands
/// of a product from colliding on label names).
inline SymbolSum shift_labels(const SymbolSum& s, int offset) {
    std::vector<SymbolTerm> out = s.terms();
    for (auto& t : out)
        for (auto& f : t.word)
            for (int& l : f.labels) l += offset;
    return SymbolSum::unnormalized(std::move(out));
}

/// Bi-differential product terms a_0, a_1, a_2 of the symbol composition.
inline SymbolSum widom_product(int j, const SymbolSum& p_in, const SymbolSum& q_in) {
    const SymbolSum& p = p_in;
    const SymbolSum q = shift_labels(q_in, p.max_label() + 1);
    const int base = std::max(p.max_label(), q.max_label()) + 1;
    const GaussRational i = GaussRational::i();
    switch (j) {
        case 0:
            return p * q;
        case 1:
            // -i (Dp)(grad q), fresh D-index contracted with the fresh
            // grad-index.
            return (-i) * (vertical_diff(p, base) * horizontal_diff(q, base));
        case 2: {
            const int a = base, b = base + 1, c = base + 2;
            // -1/2 (D^2 p)(grad^2 q): index pairs matched in order.
            SymbolSum first = GaussRational(BigRational(-1, 2)) *
                (vertical_diff(vertical_diff(p, a), b) * horizontal_diff2(q, a, b));
            // -(Dp)(Dq) Grad2Tau: the second factor's index sits in the first
            // (inner) slot of the transport curvature.
            SymbolSum tau = vertical_diff(p, a) * vertical_diff(q, b) *
                SymbolSum(SymbolTerm{GaussRational(-1), {Factor(AtomKind::Grad2Tau, 1, {b, a})}});
            // -1/2 (Dp)(D^2 q) Grad3Ell.
            SymbolSum ell = GaussRational(BigRational(-1, 2)) *
                (vertical_diff(p, a) * vertical_diff(vertical_diff(q, b), c) *
                 SymbolSum(SymbolTerm{GaussRational(1), {Factor(AtomKind::Grad3Ell, 1, {a, b, c})}}));
            return first + tau + ell;
        }
        default:
            throw UnsupportedOrder("widom_product order " + std::to_string(j) + " not supported");
    }
}

struct PSymbols {
    SymbolSum p2; ///< principal symbol, stored as B0^{-1} = k^2|xi|^2 - lambda
    SymbolSum p1;
    SymbolSum p0;
    SymbolSum b0; ///< leading resolvent symbol B0
};

inline PSymbols build_p_symbols() {
    PSymbols ps;
    ps.p2 = SymbolSum(SymbolTerm{GaussRational(1), {Factor(AtomKind::B0, -1)}});
    ps.p1 = SymbolSum(SymbolTerm{
        -GaussRational::i(),
        {Factor(AtomKind::K), Factor(AtomKind::GradK, 1, {0}), Factor(AtomKind::DSigmaD, 1, {0}),
         Factor(AtomKind::SigmaD)}});
    ps.p0 = SymbolSum(SymbolTerm{
        GaussRational(BigRational(1, 4)), {Factor(AtomKind::K, 2), Factor(AtomKind::Scal)}});
    ps.b0 = SymbolSum(SymbolTerm{GaussRational(1), {Factor(AtomKind::B0, 1)}});
    return ps;
}

/// Reference expansion of the subleading resolvent symbol: the published
/// three-term expression, transcribed directly.
inline SymbolSum reference_b1() {
    const GaussRational i = GaussRational::i();
    SymbolTerm t1{i,
                  {Factor(AtomKind::K), Factor(AtomKind::B0), Factor(AtomKind::GradK, 1, {0}),
                   Factor(AtomKind::B0), Factor(AtomKind::DSigmaD, 1, {0}), Factor(AtomKind::SigmaD)}};
    SymbolTerm t2{-i,
                  {Factor(AtomKind::K, 3), Factor(AtomKind::B0, 2), Factor(AtomKind::GradK, 1, {0}),
                   Factor(AtomKind::B0), Factor(AtomKind::DXi2, 1, {0}), Factor(AtomKind::Xi2)}};
    SymbolTerm t3{-i,
                  {Factor(AtomKind::K, 2), Factor(AtomKind::B0, 2), Factor(AtomKind::GradK, 1, {0}),
                   Factor(AtomKind::K), Factor(AtomKind::B0), Factor(AtomKind::Xi2),
                   Factor(AtomKind::DXi2, 1, {0})}};
    return SymbolSum(std::vector<SymbolTerm>{t1, t2, t3});
}

/// b1 = (a0(b0,p1) + a1(b0,p2)) (-b0), checked term-by-term against the
/// transcribed reference before anything downstream runs.
inline SymbolSum resolvent_b1() {
    const PSymbols ps = build_p_symbols();
    SymbolSum b1 =
        (widom_product(0, ps.b0, ps.p1) + widom_product(1, ps.b0, ps.p2)) * (-ps.b0);
    if (!(b1 == reference_b1()))
        throw MismatchAgainstReference("resolvent b1 differs from the transcribed reference");
    return b1;
}

/// b2 = [a0(b0,p0) + a0(b1,p1) + a1(b0,p1) + a1(b1,p2) + a2(b0,p2)] (-b0).
/// Every term is checked to have xi-degree -4 and a real coefficient.
inline SymbolSum resolvent_b2() {
    const PSymbols ps = build_p_symbols();
    const SymbolSum b1 = resolvent_b1();
    SymbolSum b2 = (widom_product(0, ps.b0, ps.p0) + widom_product(0, b1, ps.p1) +
                    widom_product(1, ps.b0, ps.p1) + widom_product(1, b1, ps.p2) +
                    widom_product(2, ps.b0, ps.p2)) *
                   (-ps.b0);
    for (const auto& t : b2.terms()) {
        if (t.xi_degree() != -4)
            throw GradingViolation("b2 term of xi-degree " + std::to_string(t.xi_degree()) + ": " +
                                   t.str());
        if (!t.coeff.is_real())
            throw GradingViolation("b2 term with non-real coefficient: " + t.str());
    }
    return b2;
}

/// Pointwise Clifford reduction (no sphere averaging):
///   SigmaD * SigmaD                    -> Xi2       ((i c(xi))^2 = |xi|^2)
///   DSigmaD_a DSigmaD_b Grad2Tau(b,a)  -> -1/4 Scal (transport curvature
///                                         contraction on the spinor bundle)
/// Used for the direct check sigma(D^2) = |xi|^2 + Scal/4.
inline SymbolSum clifford_reduce(const SymbolSum& s) {
    std::vector<SymbolTerm> out;
    for (const auto& t : s.terms()) {
        SymbolTerm nt{t.coeff, {}};
        std::vector<Factor> clifford;
        std::vector<Factor> rest;
        for (const auto& f : t.word) {
            if (atom_class(f.kind) == AtomClass::Clifford) clifford.push_back(f);
            else rest.push_back(f);
        }
        if (clifford.empty()) {
            nt.word = rest;
            out.push_back(std::move(nt));
            continue;
        }
        if (clifford.size() == 2 && clifford[0].kind == AtomKind::SigmaD &&
            clifford[1].kind == AtomKind::SigmaD) {
            rest.emplace_back(AtomKind::Xi2, 1);
            nt.word = rest;
            out.push_back(std::move(nt));
            continue;
        }
        if (clifford.size() == 2 && clifford[0].kind == AtomKind::DSigmaD &&
            clifford[1].kind == AtomKind::DSigmaD) {
            // Find the transport-curvature factor pairing the two indices.
            auto tau = std::find_if(rest.begin(), rest.end(), [](const Factor& f) {
                return f.kind == AtomKind::Grad2Tau;
            });
            if (tau != rest.end() && tau->labels[0] == clifford[1].labels[0] &&
                tau->labels[1] == clifford[0].labels[0]) {
                nt.coeff *= GaussRational(BigRational(-1, 4));
            } else if (tau != rest.end() && tau->labels[0] == clifford[0].labels[0] &&
                       tau->labels[1] == clifford[1].labels[0]) {
                nt.coeff *= GaussRational(BigRational(1, 4));
            } else {
                throw UnknownPattern("Clifford pair without matching transport curvature: " + t.str());
            }
            rest.erase(tau);
            rest.emplace_back(AtomKind::Scal, 1);
            nt.word = rest;
            out.push_back(std::move(nt));
            continue;
        }
        throw UnknownPattern("no pointwise Clifford reduction for: " + t.str());
    }
    return SymbolSum(std::move(out));
}

/// sigma(D^2) computed through the product machinery: a0 + a1 + a2 applied to
/// the Dirac symbol with itself, Clifford-reduced.
inline SymbolSum dirac_square_symbol() {
    SymbolSum sigma_d(SymbolTerm{GaussRational(1), {Factor(AtomKind::SigmaD)}});
    SymbolSum total = widom_product(0, sigma_d, sigma_d) + widom_product(1, sigma_d, sigma_d) +
                      widom_product(2, sigma_d, sigma_d);
    return clifford_reduce(total);
}

} // namespace modcurv
