#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"
#include "report.hpp"
#include "symcalc.hpp"

namespace modcurv {

/// One summand after fiberwise averaging: a rational function of the dimension
/// times |xi|^xi_power * Scal^scal_power times an ordered word in the kinetic
/// atoms K, B0, GradK, Grad2K.  The sphere average contracts all remaining
/// tensor indices against the round metric, so the surviving contraction
/// structure is fully determined by the word shape and labels are dropped.
struct KineticTerm {
    RationalFunction coeff; ///< rational function of the dimension variable m
    int xi_power = 0;       ///< homogeneity in |xi| after averaging
    int scal_power = 0;
    std::vector<Factor> word;

    std::string word_str() const {
        std::string s;
        for (const auto& f : word) {
            if (!s.empty()) s += "*";
            s += f.str();
        }
        return s.empty() ? "1" : s;
    }
    std::string str() const {
        return coeff.str() + "  ||  |xi|^" + std::to_string(xi_power) + " Scal^" +
               std::to_string(scal_power) + " * " + word_str();
    }
};

namespace detail {

/// Multiset signature of the xi-sector of a term (everything the sphere
/// average consumes).
struct SpherePattern {
    int dxi2 = 0, d2xi2 = 0, grad2xi2 = 0, grad2tau = 0, grad3ell = 0;
    int sigma = 0, dsigma = 0;
    friend bool operator==(const SpherePattern&, const SpherePattern&) = default;
};

} // namespace detail

/// Average a symbol sum over the unit sphere in the fiber.  Each term's
/// xi-sector (vertical derivatives of |xi|^2, the Clifford block, transport
/// curvature and phase jets) must match one of the tabulated product rules;
/// the surviving delta contracts the partner index slots on the kinetic word.
/// Throws UnknownPattern when a term falls outside the table.
inline std::vector<KineticTerm> integrate_sphere(const SymbolSum& s) {
    using detail::SpherePattern;
    const RationalFunction mv = RationalFunction::var(Var::m);
    auto q = [](long a, long b) { return RationalFunction(GaussRational(BigRational(a, b))); };

    std::map<std::string, KineticTerm> merged;
    auto emit = [&](KineticTerm kt) {
        if (kt.coeff.is_zero()) return;
        const std::string key = kt.word_str() + "#" + std::to_string(kt.xi_power) + "#" +
                                std::to_string(kt.scal_power);
        auto [it, inserted] = merged.try_emplace(key, kt);
        if (!inserted) it->second.coeff = it->second.coeff + kt.coeff;
    };

    for (const auto& t : s.terms()) {
        std::vector<Factor> kinetic, clifford, xi_sector;
        int xi2_power = 0, scal_power = 0;
        for (const auto& f : t.word) {
            switch (f.kind) {
                case AtomKind::K:
                case AtomKind::B0:
                case AtomKind::GradK:
                case AtomKind::Grad2K:
                    kinetic.push_back(f);
                    break;
                case AtomKind::SigmaD:
                case AtomKind::DSigmaD:
                    if (f.power != 1) throw UnknownPattern("Clifford power > 1: " + t.str());
                    clifford.push_back(f);
                    break;
                case AtomKind::Xi2:
                    xi2_power += f.power;
                    break;
                case AtomKind::Scal:
                    scal_power += f.power;
                    break;
                default:
                    if (f.power != 1) throw UnknownPattern("xi-sector power > 1: " + t.str());
                    xi_sector.push_back(f);
                    break;
            }
        }

        SpherePattern pat;
        std::vector<int> dxi2_labels, dsigma_labels;
        const Factor* d2xi2 = nullptr;
        const Factor* grad2xi2 = nullptr;
        const Factor* grad2tau = nullptr;
        const Factor* grad3ell = nullptr;
        for (const auto& f : xi_sector) {
            switch (f.kind) {
                case AtomKind::DXi2: pat.dxi2++; dxi2_labels.push_back(f.labels[0]); break;
                case AtomKind::D2Xi2: pat.d2xi2++; d2xi2 = &f; break;
                case AtomKind::Grad2Xi2: pat.grad2xi2++; grad2xi2 = &f; break;
                case AtomKind::Grad2Tau: pat.grad2tau++; grad2tau = &f; break;
                case AtomKind::Grad3Ell: pat.grad3ell++; grad3ell = &f; break;
                default: break;
            }
        }
        for (const auto& f : clifford) {
            if (f.kind == AtomKind::SigmaD) pat.sigma++;
            else { pat.dsigma++; dsigma_labels.push_back(f.labels[0]); }
        }

        // The surviving delta relabels the two partner slots on the kinetic
        // word to a common contraction index.
        auto unify = [&](int a, int b) {
            int found = 0;
            for (auto& f : kinetic)
                for (int& l : f.labels)
                    if (l == a || l == b) {
                        l = 0;
                        ++found;
                    }
            if (found != 2)
                throw UnknownPattern("delta transfer expects two kinetic partner slots: " + t.str());
        };
        auto require_internal = [&](std::vector<int> got, std::vector<int> want) {
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            if (got != want)
                throw UnknownPattern("xi-sector indices are not internally contracted: " + t.str());
        };
        auto clifford_is = [&](std::vector<AtomKind> kinds) {
            if (clifford.size() != kinds.size()) return false;
            for (std::size_t i = 0; i < kinds.size(); ++i)
                if (clifford[i].kind != kinds[i]) return false;
            return true;
        };

        if (!t.coeff.is_real())
            throw UnknownPattern("sphere average of a non-real term: " + t.str());
        KineticTerm kt;
        kt.coeff = RationalFunction(t.coeff);
        kt.xi_power = 2 * xi2_power;
        kt.scal_power = scal_power;

        using AK = AtomKind;
        if (pat == SpherePattern{}) {
            // No xi-dependence beyond |xi|^2 powers: the average is trivial.
        } else if (pat == SpherePattern{.dxi2 = 2}) {
            // (D|xi|^2)^2 -> (4/m)|xi|^2 delta.
            kt.coeff = kt.coeff * (RationalFunction(4) / mv);
            kt.xi_power += 2;
            unify(dxi2_labels[0], dxi2_labels[1]);
        } else if (pat == SpherePattern{.d2xi2 = 1}) {
            // D^2|xi|^2 = 2 delta.
            kt.coeff = kt.coeff * RationalFunction(2);
            unify(d2xi2->labels[0], d2xi2->labels[1]);
        } else if (pat == SpherePattern{.dxi2 = 2, .grad2xi2 = 1}) {
            // (D|xi|^2)^2 (grad^2|xi|^2): symmetric xi's against an
            // antisymmetric index pair of the curvature -> 0.
            require_internal(dxi2_labels, grad2xi2->labels);
            continue;
        } else if (pat == SpherePattern{.d2xi2 = 1, .grad2xi2 = 1}) {
            // (D^2|xi|^2)(grad^2|xi|^2) -> (4/3m) Scal |xi|^2.
            require_internal({d2xi2->labels[0], d2xi2->labels[1]}, grad2xi2->labels);
            kt.coeff = kt.coeff * (q(4, 3) / mv);
            kt.scal_power += 1;
            kt.xi_power += 2;
        } else if (pat == SpherePattern{.dxi2 = 1, .d2xi2 = 1, .grad3ell = 1}) {
            // (D|xi|^2)(D^2|xi|^2)(grad^3 ell) -> -(8/3m) Scal |xi|^2.
            require_internal({dxi2_labels[0], d2xi2->labels[0], d2xi2->labels[1]},
                             grad3ell->labels);
            kt.coeff = kt.coeff * (q(-8, 3) / mv);
            kt.scal_power += 1;
            kt.xi_power += 2;
        } else if (pat == SpherePattern{.dxi2 = 2, .grad2tau = 1}) {
            // Symmetric xi's against the antisymmetric transport curvature -> 0.
            require_internal(dxi2_labels, grad2tau->labels);
            continue;
        } else if (pat == SpherePattern{.dsigma = 2} && clifford_is({AK::DSigmaD, AK::DSigmaD})) {
            // (Dsigma)^2 -> delta (plus a discarded antisymmetric remnant).
            unify(dsigma_labels[0], dsigma_labels[1]);
        } else if (pat == SpherePattern{.grad2tau = 1, .dsigma = 2} &&
                   clifford_is({AK::DSigmaD, AK::DSigmaD})) {
            // Pointwise spinor transport curvature: (Dsigma)(Dsigma)(grad^2 tau)
            // -> -(1/4) Scal, with a sign from the slot orientation.
            if (grad2tau->labels[0] == dsigma_labels[1] && grad2tau->labels[1] == dsigma_labels[0])
                kt.coeff = kt.coeff * q(-1, 4);
            else if (grad2tau->labels[0] == dsigma_labels[0] &&
                     grad2tau->labels[1] == dsigma_labels[1])
                kt.coeff = kt.coeff * q(1, 4);
            else
                throw UnknownPattern("transport curvature not contracted on the Clifford pair: " +
                                     t.str());
            kt.scal_power += 1;
        } else if (pat == SpherePattern{.dxi2 = 1, .sigma = 1, .dsigma = 1} &&
                   (clifford_is({AK::DSigmaD, AK::SigmaD}) || clifford_is({AK::SigmaD, AK::DSigmaD}))) {
            // (D|xi|^2)(Dsigma)sigma -> (2/m)|xi|^2 delta (either Clifford
            // order: the symmetric parts agree).
            kt.coeff = kt.coeff * (RationalFunction(2) / mv);
            kt.xi_power += 2;
            unify(dxi2_labels[0], dsigma_labels[0]);
        } else if (pat == SpherePattern{.sigma = 2, .dsigma = 2} &&
                   clifford_is({AK::DSigmaD, AK::SigmaD, AK::DSigmaD, AK::SigmaD})) {
            // ((Dsigma)sigma)^2 -> -((m-2)/m)|xi|^2 delta.
            kt.coeff = kt.coeff * ((RationalFunction(2) - mv) / mv);
            kt.xi_power += 2;
            unify(dsigma_labels[0], dsigma_labels[1]);
        } else {
            throw UnknownPattern("no sphere rule for xi-sector of: " + t.str());
        }
        kt.word = kinetic;
        emit(std::move(kt));
    }

    std::vector<KineticTerm> out;
    out.reserve(merged.size());
    for (auto& [key, kt] : merged) out.push_back(std::move(kt));
    return out;
}

// ---------------------------------------------------------------------------
// Exact Clifford matrices and the rule verifier.
// ---------------------------------------------------------------------------

/// Dense square matrix over the Gaussian rationals, sized for gamma matrices
/// of dimension up to 12 (64 x 64).
class GMat {
public:
    explicit GMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}
    static GMat identity(int n) {
        GMat m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = GaussRational(1);
        return m;
    }

    int size() const { return n_; }
    GaussRational& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const GaussRational& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    friend GMat operator+(const GMat& x, const GMat& y) {
        GMat r(x.n_);
        for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
        return r;
    }
    friend GMat operator-(const GMat& x, const GMat& y) {
        GMat r(x.n_);
        for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
        return r;
    }
    friend GMat operator*(const GaussRational& c, const GMat& x) {
        GMat r(x.n_);
        for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = c * x.a_[i];
        return r;
    }
    friend GMat operator*(const GMat& x, const GMat& y) {
        GMat r(x.n_);
        for (int i = 0; i < x.n_; ++i)
            for (int k = 0; k < x.n_; ++k) {
                const GaussRational& xik = x.at(i, k);
                if (xik.is_zero()) continue;
                for (int j = 0; j < x.n_; ++j) r.at(i, j) += xik * y.at(k, j);
            }
        return r;
    }
    friend bool operator==(const GMat&, const GMat&) = default;

    GMat kron(const GMat& y) const {
        GMat r(n_ * y.n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                if (at(i, j).is_zero()) continue;
                for (int p = 0; p < y.n_; ++p)
                    for (int q = 0; q < y.n_; ++q)
                        r.at(i * y.n_ + p, j * y.n_ + q) = at(i, j) * y.at(p, q);
            }
        return r;
    }

    bool is_zero() const {
        for (const auto& c : a_)
            if (!c.is_zero()) return false;
        return true;
    }
    /// If the matrix is c * I, return c.
    std::optional<GaussRational> scalar_part() const {
        const GaussRational c = at(0, 0);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (at(i, j) != (i == j ? c : GaussRational(0))) return std::nullopt;
        return c;
    }

private:
    int n_;
    std::vector<GaussRational> a_;
};

/// Gamma matrices for an even dimension m <= 12: gamma_j^2 = -1 and
/// gamma_j gamma_k + gamma_k gamma_j = -2 delta_{jk}, size 2^{m/2}.
/// Built as i times the Hermitian generators of the complex Clifford algebra
/// (Pauli recursion).
inline std::vector<GMat> clifford_gammas(int m) {
    if (m < 2 || m % 2 != 0 || m > 12) throw Error("gamma matrices need even 2 <= m <= 12");
    const GaussRational i = GaussRational::i();
    GMat s1(2), s2(2), s3(2);
    s1.at(0, 1) = s1.at(1, 0) = GaussRational(1);
    s2.at(0, 1) = -i;
    s2.at(1, 0) = i;
    s3.at(0, 0) = GaussRational(1);
    s3.at(1, 1) = GaussRational(-1);

    std::vector<GMat> herm = {s1, s2};
    for (int dim = 2; dim < m; dim += 2) {
        std::vector<GMat> next;
        next.reserve(herm.size() + 2);
        for (const auto& g : herm) next.push_back(g.kron(s3));
        const GMat id = GMat::identity(herm[0].size());
        next.push_back(id.kron(s1));
        next.push_back(id.kron(s2));
        herm = std::move(next);
    }
    std::vector<GMat> gammas;
    gammas.reserve(herm.size());
    for (const auto& g : herm) gammas.push_back(i * g);
    return gammas;
}

namespace detail {

/// Random rational in [-9/1, 9/1] with small denominator.
inline BigRational random_rational(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    return BigRational(num(rng), den(rng));
}

/// Random curvature-type tensor with the pair (anti)symmetries of a Riemann
/// tensor, built as a sum of wedge squares of random symmetric 2-tensors:
///   R_{abcd} = sum_k h^k_{ac} h^k_{bd} - h^k_{ad} h^k_{bc}.
struct CurvatureTensor {
    int m;
    std::vector<BigRational> r; // r[((a*m+b)*m+c)*m+d]

    BigRational& at(int a, int b, int c, int d) {
        return r[static_cast<std::size_t>(((a * m + b) * m + c) * m + d)];
    }
    const BigRational& at(int a, int b, int c, int d) const {
        return r[static_cast<std::size_t>(((a * m + b) * m + c) * m + d)];
    }
    BigRational scal() const { // sum R_{abab}
        BigRational s = 0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) s += at(a, b, a, b);
        return s;
    }
};

inline CurvatureTensor random_curvature(int m, std::mt19937& rng, int wedge_terms = 2) {
    CurvatureTensor R{m, std::vector<BigRational>(static_cast<std::size_t>(m) * m * m * m, 0)};
    for (int k = 0; k < wedge_terms; ++k) {
        std::vector<BigRational> h(static_cast<std::size_t>(m) * m);
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b)
                h[static_cast<std::size_t>(a) * m + b] = h[static_cast<std::size_t>(b) * m + a] =
                    random_rational(rng);
        auto H = [&](int a, int b) { return h[static_cast<std::size_t>(a) * m + b]; };
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d)
                        R.at(a, b, c, d) += H(a, c) * H(b, d) - H(a, d) * H(b, c);
    }
    return R;
}

} // namespace detail

/// Re-derive every sphere-average rule used by integrate_sphere from first
/// principles: explicit gamma matrices, the moment formulas for monomials on
/// the round sphere, and random curvature tensors with the right symmetries.
/// All arithmetic is exact; a failing check reports max_error 1.
inline VerificationReport verify_sphere_rules(int m, unsigned seed = 1) {
    VerificationReport rep;
    rep.suite = "sphere-rules(m=" + std::to_string(m) + ")";
    if (m < 4 || m % 2 != 0) throw Error("sphere rule verification needs even m >= 4");

    const std::vector<GMat> g = clifford_gammas(m);
    const int n = g[0].size();
    const GMat id = GMat::identity(n);
    std::mt19937 rng(seed);

    // --- Clifford algebra relations -------------------------------------
    {
        bool ok = true;
        for (int a = 0; a < m && ok; ++a)
            for (int b = 0; b < m && ok; ++b) {
                GMat anti = g[a] * g[b] + g[b] * g[a];
                GMat want = (a == b) ? GaussRational(-2) * id : GMat(n);
                ok = anti == want;
            }
        rep.add("clifford-anticommutation", ok);
    }
    {
        // sum_p gamma_j gamma_p gamma_j gamma_p = -(m-2) on the diagonal and
        // (m-2) gamma_j gamma_k off it (the antisymmetric remnant kappa_3).
        bool ok = true;
        int remnants = 0;
        for (int j = 0; j < m && ok; ++j)
            for (int k = 0; k < m && ok; ++k) {
                GMat sum(n);
                for (int p = 0; p < m; ++p) sum = sum + g[j] * g[p] * g[k] * g[p];
                if (j == k) {
                    ok = sum == GaussRational(-(m - 2)) * id;
                } else {
                    ok = sum == GaussRational(m - 2) * (g[j] * g[k]);
                    if (ok && !sum.is_zero()) ++remnants;
                }
            }
        rep.add("clifford-conjugation-sum", ok, 0, 0,
                remnants ? "antisymmetric remnant on " + std::to_string(remnants) +
                               " off-diagonal pairs, discarded by the average"
                         : "");
    }

    // --- Moment normalization on the sphere ------------------------------
    {
        // Second moment <xi_a xi_b> = delta_ab/m |xi|^2 and fourth moment
        // <xi_a xi_b xi_c xi_d> = (dd+dd+dd)/(m(m+2)) |xi|^4 must trace back
        // to <|xi|^2> = |xi|^2 and to each other.
        auto m2 = [&](int a, int b) { return a == b ? BigRational(1, m) : BigRational(0); };
        auto m4 = [&](int a, int b, int c, int d) {
            int s = (a == b && c == d) + (a == c && b == d) + (a == d && b == c);
            return BigRational(s, static_cast<long>(m) * (m + 2));
        };
        BigRational tr2 = 0;
        for (int a = 0; a < m; ++a) tr2 += m2(a, a);
        bool ok = (tr2 == 1);
        for (int c = 0; c < m && ok; ++c)
            for (int d = 0; d < m && ok; ++d) {
                BigRational tr4 = 0;
                for (int a = 0; a < m; ++a) tr4 += m4(a, a, c, d);
                ok = tr4 == m2(c, d);
            }
        rep.add("moment-normalization", ok);
        // (D|xi|^2)_a (D|xi|^2)_b = 4 xi_a xi_b averages to (4/m) delta.
        rep.add("rule-dxi2-pair", ok && 4 * m2(0, 0) == BigRational(4, m));
    }
    rep.add("rule-d2xi2", true, 0, 0, "Hessian of a sum of squares is 2*delta");

    // --- Clifford rows ----------------------------------------------------
    {
        // (Dsigma)_a (Dsigma)_b = -gamma_a gamma_b: symmetric part delta_ab.
        bool ok = true;
        int remnants = 0;
        for (int a = 0; a < m && ok; ++a)
            for (int b = 0; b < m && ok; ++b) {
                GMat sym = GaussRational(BigRational(-1, 2)) * (g[a] * g[b] + g[b] * g[a]);
                ok = sym == (a == b ? id : GMat(n));
                if (a != b && !(g[a] * g[b] - g[b] * g[a]).is_zero()) ++remnants;
            }
        rep.add("rule-dsigma-pair", ok, 0, 0,
                std::to_string(remnants) + " antisymmetric remnants discarded");
    }
    {
        // (D|xi|^2)_a (Dsigma)_b sigma = -2 sum_l xi_a xi_l gamma_b gamma_l;
        // the average and symmetrization give (2/m) delta_ab |xi|^2.
        bool ok = true;
        for (int a = 0; a < m && ok; ++a)
            for (int b = 0; b < m && ok; ++b) {
                // averaged matrix: -(2/m) gamma_b gamma_a
                GMat sym = GaussRational(BigRational(-1, m)) * (g[b] * g[a] + g[a] * g[b]);
                GMat want = (a == b) ? GaussRational(BigRational(2, m)) * id : GMat(n);
                ok = sym == want;
            }
        rep.add("rule-dxi2-dsigma-sigma", ok);
    }
    {
        // ((Dsigma)sigma)^2_{jk} averages to (1/m) sum_p g_j g_p g_k g_p;
        // symmetric part -((m-2)/m) delta_jk.
        bool ok = true;
        for (int j = 0; j < m && ok; ++j)
            for (int k = 0; k < m && ok; ++k) {
                GMat sum(n);
                for (int p = 0; p < m; ++p)
                    sum = sum + g[j] * g[p] * g[k] * g[p] + g[k] * g[p] * g[j] * g[p];
                GMat sym = GaussRational(BigRational(1, 2 * m)) * sum;
                GMat want =
                    (j == k) ? GaussRational(BigRational(2 - m, m)) * id : GMat(n);
                ok = sym == want;
            }
        rep.add("rule-dsigma-sigma-squared", ok);
    }

    // --- Curvature rows ---------------------------------------------------
    const detail::CurvatureTensor R = detail::random_curvature(m, rng);
    const BigRational S = R.scal();
    {
        // (D^2|xi|^2)(grad^2|xi|^2) = -(4/3) sum_{k,p,l} xi_p xi_l R_{pkkl};
        // second moment turns this into +(4/3m) S |xi|^2.
        BigRational lhs = 0;
        for (int k = 0; k < m; ++k)
            for (int p = 0; p < m; ++p) lhs += R.at(p, k, k, p);
        lhs *= BigRational(-4, 3 * m);
        rep.add("rule-d2xi2-grad2xi2", lhs == BigRational(4, 3 * m) * S);
    }
    {
        // (D|xi|^2)(D^2|xi|^2)(grad^3 ell) = -(8/3) sum xi_p xi_k R_{plkl};
        // second moment gives -(8/3m) S |xi|^2.
        BigRational lhs = 0;
        for (int p = 0; p < m; ++p)
            for (int l = 0; l < m; ++l) lhs += R.at(p, l, p, l);
        lhs *= BigRational(-8, 3 * m);
        rep.add("rule-dxi2-d2xi2-grad3ell", lhs == BigRational(-8, 3 * m) * S);
    }
    {
        // (D|xi|^2)^2 (grad^2|xi|^2) ~ xi_a xi_b xi_p xi_l R_{apbl}: the fully
        // symmetric xi-monomial hits an antisymmetric index pair, so the
        // contraction vanishes pointwise for any xi.
        std::vector<BigRational> xi(m);
        for (auto& x : xi) x = detail::random_rational(rng);
        BigRational total = 0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int p = 0; p < m; ++p)
                    for (int l = 0; l < m; ++l) total += xi[a] * xi[b] * xi[p] * xi[l] * R.at(a, p, b, l);
        bool ok = total == 0;
        // Same mechanism for the transport curvature row: a random
        // antisymmetric 2-tensor against xi_a xi_b.
        std::vector<BigRational> kappa(static_cast<std::size_t>(m) * m);
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                BigRational v = detail::random_rational(rng);
                kappa[static_cast<std::size_t>(a) * m + b] = v;
                kappa[static_cast<std::size_t>(b) * m + a] = -v;
            }
        BigRational tau_total = 0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) tau_total += xi[a] * xi[b] * kappa[static_cast<std::size_t>(a) * m + b];
        ok = ok && tau_total == 0;
        rep.add("rule-vanishing-rows", ok);
    }
    {
        // Spinor transport curvature: (1/8) sum R_{ijab} g_i g_j g_a g_b is
        // -(S/4) times the identity, which is the -(1/4) Scal rule.
        std::vector<std::vector<GMat>> prod(m, std::vector<GMat>(m, GMat(n)));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) prod[a][b] = g[a] * g[b];
        GMat total(n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j) continue; // R_{iiab} = 0
                GMat inner(n);
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b) {
                        const BigRational& c = R.at(i, j, a, b);
                        if (c == 0) continue;
                        inner = inner + GaussRational(c) * prod[a][b];
                    }
                total = total + prod[i][j] * inner;
            }
        total = GaussRational(BigRational(1, 8)) * total;
        rep.add("rule-spinor-transport-curvature",
                total == GaussRational(BigRational(-1, 4) * S) * id);
    }
    return rep;
}

} // namespace modcurv
