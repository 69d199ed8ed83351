#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "rational.hpp"

namespace modcurv {

/// Atom alphabet of the noncommutative symbol algebra.
///
///   K        conformal factor k
///   B0       leading resolvent factor (k^2|xi|^2 - lambda)^{-1}; a negative
///            power encodes the inverse, i.e. B0^{-1} = k^2|xi|^2 - lambda,
///            which is exactly the principal symbol p2
///   GradK    first covariant gradient of k (one index slot)
///   Grad2K   Hessian of k (two slots, symmetric)
///   SigmaD   symbol of the Dirac operator (Clifford multiplication by xi)
///   DSigmaD  its vertical derivative (one slot)
///   DXi2     vertical derivative of |xi|^2 (one slot)
///   D2Xi2    second vertical derivative of |xi|^2 (two slots, symmetric)
///   Grad2Xi2 horizontal second derivative of |xi|^2 (two slots, symmetric)
///   Grad2Tau curvature of the parallel transport (two slots, antisymmetric)
///   Grad3Ell third jet of the phase function (three slots)
///   Scal     scalar curvature function
///   Xi2      |xi|^2
enum class AtomKind {
    K = 0,
    B0,
    GradK,
    Grad2K,
    SigmaD,
    DSigmaD,
    DXi2,
    D2Xi2,
    Grad2Xi2,
    Grad2Tau,
    Grad3Ell,
    Scal,
    Xi2,
};

inline constexpr int kAtomCount = 13;

inline const char* atom_name(AtomKind k) {
    static constexpr const char* names[kAtomCount] = {
        "K", "B0", "GradK", "Grad2K", "SigmaD", "DSigmaD", "DXi2",
        "D2Xi2", "Grad2Xi2", "Grad2Tau", "Grad3Ell", "Scal", "Xi2"};
    return names[static_cast<int>(k)];
}

inline int atom_slots(AtomKind k) {
    static constexpr int slots[kAtomCount] = {0, 0, 1, 2, 0, 1, 1, 2, 2, 2, 3, 0, 0};
    return slots[static_cast<int>(k)];
}

/// xi-degree per unit power.
inline int atom_xi_degree(AtomKind k) {
    switch (k) {
        case AtomKind::Xi2: return 2;
        case AtomKind::Grad2Xi2: return 2; // grad^2 |xi|^2 is quadratic in xi
        case AtomKind::DXi2: return 1;
        case AtomKind::SigmaD: return 1;
        case AtomKind::Grad3Ell: return 1; // third phase jet is linear in xi
        case AtomKind::B0: return -2;
        default: return 0;
    }
}

/// Commutation class: central atoms commute with everything; Clifford atoms
/// commute with kinetic atoms but not among themselves; kinetic atoms K and B0
/// commute with each other but not with GradK / Grad2K.
enum class AtomClass { Kinetic, Clifford, Central };

inline AtomClass atom_class(AtomKind k) {
    switch (k) {
        case AtomKind::K:
        case AtomKind::B0:
        case AtomKind::GradK:
        case AtomKind::Grad2K:
            return AtomClass::Kinetic;
        case AtomKind::SigmaD:
        case AtomKind::DSigmaD:
            return AtomClass::Clifford;
        default:
            return AtomClass::Central;
    }
}

/// One factor of a noncommutative word: an atom raised to a power, carrying
/// abstract index labels (one per slot).
struct Factor {
    AtomKind kind;
    int power = 1;
    std::vector<int> labels;

    Factor(AtomKind k, int p = 1, std::vector<int> l = {}) : kind(k), power(p), labels(std::move(l)) {}

    friend bool operator==(const Factor&, const Factor&) = default;

    std::string str() const {
        std::string s = atom_name(kind);
        if (!labels.empty()) {
            s += "(";
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(labels[i]);
            }
            s += ")";
        }
        if (power != 1) s += "^" + std::to_string(power);
        return s;
    }
};

/// Coefficient times an ordered word.  Index labels occur exactly twice per
/// term (a perfect contraction pairing).
struct SymbolTerm {
    GaussRational coeff;
    std::vector<Factor> word;

    int xi_degree() const {
        int d = 0;
        for (const auto& f : word) d += atom_xi_degree(f.kind) * f.power;
        return d;
    }

    std::string word_str() const {
        if (word.empty()) return "1";
        std::string s;
        for (const auto& f : word) {
            if (!s.empty()) s += "*";
            s += f.str();
        }
        return s;
    }
    std::string str() const { return coeff.str() + " * " + word_str(); }
};

namespace detail {

/// Canonicalize one term in place:
///  - K/B0 runs inside the kinetic block are merged and sorted (they commute),
///  - the word is arranged as [centrals][kinetic][clifford], with the Clifford
///    block keeping its relative order,
///  - index labels are renamed by deterministic scan order,
///  - symmetric index slots are sorted; the antisymmetric Grad2Tau slot pair
///    is sorted with a sign flip.
inline void canonicalize_term(SymbolTerm& t) {
    if (t.coeff.is_zero()) {
        t.word.clear();
        return;
    }
    std::vector<Factor> kinetic, clifford, central;
    int pending_k = 0, pending_b0 = 0;
    auto flush = [&] {
        if (pending_k != 0) kinetic.emplace_back(AtomKind::K, pending_k);
        if (pending_b0 != 0) kinetic.emplace_back(AtomKind::B0, pending_b0);
        pending_k = pending_b0 = 0;
    };
    int xi2_power = 0, scal_power = 0;
    for (const auto& f : t.word) {
        if (f.power == 0) continue;
        switch (atom_class(f.kind)) {
            case AtomClass::Kinetic:
                if (f.kind == AtomKind::K) {
                    pending_k += f.power;
                } else if (f.kind == AtomKind::B0) {
                    pending_b0 += f.power;
                } else {
                    flush();
                    kinetic.push_back(f);
                }
                break;
            case AtomClass::Clifford:
                clifford.push_back(f);
                break;
            case AtomClass::Central:
                if (f.kind == AtomKind::Xi2) {
                    xi2_power += f.power;
                } else if (f.kind == AtomKind::Scal) {
                    scal_power += f.power;
                } else {
                    central.push_back(f);
                }
                break;
        }
    }
    flush();
    if (scal_power != 0) central.emplace_back(AtomKind::Scal, scal_power);
    if (xi2_power != 0) central.emplace_back(AtomKind::Xi2, xi2_power);

    // Open terms (labels still awaiting contraction by a later product stage)
    // must keep their caller-chosen labels: renaming them would break the
    // pairing.  Only fully contracted terms are relabeled.
    std::map<int, int> occurrences;
    for (const auto* block : {&kinetic, &clifford, &central})
        for (const auto& f : *block)
            for (int l : f.labels) occurrences[l]++;
    bool closed = true;
    for (const auto& [label, n] : occurrences)
        if (n != 2) closed = false;
    if (!closed) {
        t.word.clear();
        t.word.insert(t.word.end(), central.begin(), central.end());
        t.word.insert(t.word.end(), kinetic.begin(), kinetic.end());
        t.word.insert(t.word.end(), clifford.begin(), clifford.end());
        return;
    }

    // Iteratively settle label ranks and slot order (two passes suffice for
    // the small label population used here).
    std::map<int, int> rank;
    auto scan = [&] {
        rank.clear();
        int next = 0;
        auto visit = [&](const std::vector<Factor>& block) {
            for (const auto& f : block)
                for (int l : f.labels)
                    if (!rank.contains(l)) rank[l] = next++;
        };
        visit(kinetic);
        visit(clifford);
        visit(central);
    };
    auto slot_sort = [&] {
        auto r = [&](int l) { return rank.at(l); };
        auto fix = [&](std::vector<Factor>& block) {
            for (auto& f : block) {
                switch (f.kind) {
                    case AtomKind::Grad2K:
                    case AtomKind::D2Xi2:
                    case AtomKind::Grad2Xi2:
                        std::sort(f.labels.begin(), f.labels.end(),
                                  [&](int a, int b) { return r(a) < r(b); });
                        break;
                    case AtomKind::Grad3Ell:
                        if (r(f.labels[1]) > r(f.labels[2])) std::swap(f.labels[1], f.labels[2]);
                        break;
                    case AtomKind::Grad2Tau:
                        if (r(f.labels[0]) > r(f.labels[1])) {
                            std::swap(f.labels[0], f.labels[1]);
                            t.coeff = -t.coeff;
                        }
                        break;
                    default:
                        break;
                }
            }
        };
        fix(kinetic);
        fix(clifford);
        fix(central);
    };
    auto central_sort = [&] {
        std::stable_sort(central.begin(), central.end(), [&](const Factor& a, const Factor& b) {
            if (a.kind != b.kind) return a.kind < b.kind;
            if (a.power != b.power) return a.power < b.power;
            std::vector<int> ra, rb;
            for (int l : a.labels) ra.push_back(rank.at(l));
            for (int l : b.labels) rb.push_back(rank.at(l));
            return ra < rb;
        });
    };
    for (int pass = 0; pass < 3; ++pass) {
        scan();
        slot_sort();
        central_sort();
    }
    scan();
    auto relabel = [&](std::vector<Factor>& block) {
        for (auto& f : block)
            for (int& l : f.labels) l = rank.at(l);
    };
    relabel(kinetic);
    relabel(clifford);
    relabel(central);

    t.word.clear();
    t.word.insert(t.word.end(), central.begin(), central.end());
    t.word.insert(t.word.end(), kinetic.begin(), kinetic.end());
    t.word.insert(t.word.end(), clifford.begin(), clifford.end());
}

} // namespace detail

/// Sum of symbol terms; like terms (identical canonical word) are merged and
/// zero coefficients dropped.
class SymbolSum {
public:
    SymbolSum() = default;
    SymbolSum(SymbolTerm t) { // NOLINT(google-explicit-constructor)
        terms_.push_back(std::move(t));
        normalize();
    }
    explicit SymbolSum(std::vector<SymbolTerm> terms) : terms_(std::move(terms)) { normalize(); }

    static SymbolSum one() { return SymbolSum(SymbolTerm{GaussRational(1), {}}); }

    /// Wrap terms without canonicalizing.  Needed when label names are
    /// significant to a caller that is still wiring up contractions (the
    /// canonical form renames labels of fully contracted terms).
    static SymbolSum unnormalized(std::vector<SymbolTerm> terms) {
        SymbolSum s;
        s.terms_ = std::move(terms);
        return s;
    }

    const std::vector<SymbolTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    friend SymbolSum operator+(const SymbolSum& a, const SymbolSum& b) {
        std::vector<SymbolTerm> t = a.terms_;
        t.insert(t.end(), b.terms_.begin(), b.terms_.end());
        return SymbolSum(std::move(t));
    }
    friend SymbolSum operator-(const SymbolSum& a, const SymbolSum& b) { return a + (-b); }
    friend SymbolSum operator-(const SymbolSum& a) {
        std::vector<SymbolTerm> t = a.terms_;
        for (auto& term : t) term.coeff = -term.coeff;
        return SymbolSum(std::move(t));
    }
    friend SymbolSum operator*(const GaussRational& c, const SymbolSum& a) {
        std::vector<SymbolTerm> t = a.terms_;
        for (auto& term : t) term.coeff = c * term.coeff;
        return SymbolSum(std::move(t));
    }
    /// Noncommutative concatenation product.
    friend SymbolSum operator*(const SymbolSum& a, const SymbolSum& b) {
        std::vector<SymbolTerm> out;
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                SymbolTerm t{ta.coeff * tb.coeff, ta.word};
                t.word.insert(t.word.end(), tb.word.begin(), tb.word.end());
                out.push_back(std::move(t));
            }
        return SymbolSum(std::move(out));
    }

    friend bool operator==(const SymbolSum& a, const SymbolSum& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i) {
            if (a.terms_[i].coeff != b.terms_[i].coeff || a.terms_[i].word != b.terms_[i].word)
                return false;
        }
        return true;
    }

    /// Keep only terms whose xi-degree satisfies the predicate.
    template <class Pred>
    SymbolSum filter(Pred keep) const {
        std::vector<SymbolTerm> t;
        for (const auto& term : terms_)
            if (keep(term)) t.push_back(term);
        return SymbolSum(std::move(t));
    }

    int max_label() const {
        int m = -1;
        for (const auto& t : terms_)
            for (const auto& f : t.word)
                for (int l : f.labels) m = std::max(m, l);
        return m;
    }

    std::vector<std::string> lines() const {
        std::vector<std::string> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) out.push_back(t.str());
        return out;
    }

private:
    void normalize() {
        std::map<std::string, SymbolTerm> merged;
        for (auto& t : terms_) {
            detail::canonicalize_term(t);
            if (t.coeff.is_zero()) continue;
            const std::string key = t.word_str();
            auto [it, inserted] = merged.try_emplace(key, t);
            if (!inserted) it->second.coeff += t.coeff;
        }
        terms_.clear();
        for (auto& [key, t] : merged)
            if (!t.coeff.is_zero()) terms_.push_back(std::move(t));
    }

    std::vector<SymbolTerm> terms_;
};

} // namespace modcurv
