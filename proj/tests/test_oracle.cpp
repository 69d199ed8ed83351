#include <catch_amalgamated.hpp>

#include <random>

#include "modcurv/oracle.hpp"
#include "modcurv/rearrange.hpp"

using namespace modcurv;
using C = std::complex<double>;

namespace {

CMat matpow(const CMat& x, int p) {
    if (p < 0) return matpow(x.inverse(), -p);
    CMat r = CMat::identity(x.size());
    for (int i = 0; i < p; ++i) r = r * x;
    return r;
}

} // namespace

TEST_CASE("eigensolver and exponential basics") {
    std::mt19937 rng(11);
    for (int n : {5, 6, 7, 8}) {
        const CMat h = random_hermitian(n, rng);
        const EigenSystem es = jacobi_eigen(h);
        // Residual ||A V - V Lambda||.
        CMat vl = es.eigvecs;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) vl(i, j) *= es.eigvals[j];
        CHECK((h * es.eigvecs - vl).frobenius() < 1e-12);
        CHECK((es.eigvecs.adjoint() * es.eigvecs - CMat::identity(n)).frobenius() < 1e-12);

        // exp via eigenbasis agrees with scaling-and-squaring.
        CMat ed(n);
        for (int i = 0; i < n; ++i) ed(i, i) = std::exp(es.eigvals[i]);
        const CMat viaeig = es.eigvecs * ed * es.eigvecs.adjoint();
        CHECK((expm(h) - viaeig).frobenius() < 1e-12);
    }
}

TEST_CASE("modular function calculus") {
    std::mt19937 rng(23);
    const int n = 6;
    const CMat h = random_hermitian(n, rng);
    const CMat x = random_hermitian(n, rng);
    const ModularData md(h);

    SECTION("exponential function realizes conjugation by k^2") {
        const CMat k2 = md.weyl * md.weyl;
        const CMat expected = k2.inverse() * x * k2;
        const CMat got = apply_modular_fn([](double mu) { return std::exp(mu); }, md, x);
        CHECK((got - expected).frobenius() < 1e-12 * expected.frobenius());
    }
    SECTION("constant one leaves the argument unchanged") {
        const CMat got = apply_modular_fn([](double) { return 1.0; }, md, x);
        CHECK((got - x).frobenius() < 1e-13);
    }
    SECTION("commuting argument is scaled by the value at zero") {
        const CMat hx = h * h;
        const ScalarFn T = gaussian_test_fn();
        const CMat got = apply_modular_fn(T.f, md, hx);
        CHECK((got - C(T.f(0.0)) * hx).frobenius() < 1e-12);
    }
}

TEST_CASE("Weyl-factor derivative identities") {
    for (int n : {5, 6, 7})
        for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
            const VerificationReport rep = verify_weyl_derivatives(n, seed, 1e-10);
            for (const auto& c : rep.checks) {
                INFO(rep.suite << ": " << c.name << " err=" << c.max_error);
                CHECK(c.pass);
            }
        }
}

TEST_CASE("trace properties of the modular calculus") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const VerificationReport rep = verify_trace_properties(6, seed, 1e-12);
        for (const auto& c : rep.checks) {
            INFO(rep.suite << ": " << c.name << " err=" << c.max_error);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("exchange of derivations with the modular calculus") {
    for (int n : {5, 6, 7})
        for (unsigned seed : {7u, 8u, 9u}) {
            const VerificationReport rep = verify_nabla_exchange(n, seed, 1e-9);
            for (const auto& c : rep.checks) {
                INFO(rep.suite << ": " << c.name << " err=" << c.max_error);
                CHECK(c.pass);
            }
        }
}

TEST_CASE("variation identities behind the Einstein-Hilbert gradient") {
    for (int m : {4, 6, 8})
        for (int n : {5, 6, 7})
            for (unsigned seed = 1; seed <= 20; ++seed) {
                const VerificationReport rep = verify_variation_lemmas(m, n, seed, 1e-9);
                for (const auto& c : rep.checks) {
                    INFO(rep.suite << ": " << c.name << " err=" << c.max_error);
                    CHECK(c.pass);
                }
            }
}

TEST_CASE("normal ordering is faithful in the matrix model") {
    // The averaged kinetic words are operator products; collecting the
    // conformal factors to the left must not change the product.  Model:
    // K -> k = e^h, B0 -> (r k^2 + 1)^{-1} with a scalar for |xi|^2,
    // GradK -> X, Grad2K -> Y, and a half-weight w on an insertion means
    // conjugation k^{-w} (.) k^w.
    std::mt19937 rng(20260823);
    std::uniform_int_distribution<int> pick_pow(1, 3), pick_kind(0, 3), coin(0, 1);
    std::uniform_real_distribution<double> pick_r(0.5, 2.0);
    const int n = 6;

    for (int inst = 0; inst < 50; ++inst) {
        const CMat h = C(0.4) * random_hermitian(n, rng);
        const CMat X = random_hermitian(n, rng);
        const CMat Y = random_hermitian(n, rng);
        const double r = pick_r(rng);
        const CMat k = expm(h);
        const CMat B0 = (C(r) * (k * k) + CMat::identity(n)).inverse();

        // Build a random averaged kinetic word of one of the four shapes.
        const int kind = pick_kind(rng);
        std::vector<Factor> word;
        auto emit_segment = [&](int kp, int bp) {
            // split the powers into randomly interleaved factors
            while (kp > 0 || bp > 0) {
                if (bp == 0 || (kp > 0 && coin(rng))) {
                    const int take = std::min(kp, 1 + coin(rng));
                    word.push_back(Factor(AtomKind::K, take));
                    kp -= take;
                } else {
                    const int take = std::min(bp, 1 + coin(rng));
                    word.push_back(Factor(AtomKind::B0, take));
                    bp -= take;
                }
            }
        };
        const int a0 = pick_pow(rng) - 1, b0 = pick_pow(rng);
        emit_segment(a0, b0);
        if (kind == 1) { // Hessian
            word.push_back(Factor(AtomKind::Grad2K, 1, {0, 0}));
            emit_segment(pick_pow(rng) - 1, pick_pow(rng));
        } else if (kind == 2) { // separated gradients
            word.push_back(Factor(AtomKind::GradK, 1, {0}));
            emit_segment(pick_pow(rng) - 1, pick_pow(rng));
            word.push_back(Factor(AtomKind::GradK, 1, {0}));
            emit_segment(pick_pow(rng) - 1, pick_pow(rng));
        } else if (kind == 3) { // adjacent gradients
            word.push_back(Factor(AtomKind::GradK, 1, {0}));
            word.push_back(Factor(AtomKind::GradK, 1, {0}));
            emit_segment(pick_pow(rng) - 1, pick_pow(rng));
        }

        KineticTerm kt;
        kt.coeff = RationalFunction(1);
        kt.word = word;
        const CanonicalTerm ct = normal_order(kt);

        // Direct evaluation of the word as written.
        CMat direct = CMat::identity(n);
        for (const auto& f : word) {
            switch (f.kind) {
                case AtomKind::K: direct = direct * matpow(k, f.power); break;
                case AtomKind::B0: direct = direct * matpow(B0, f.power); break;
                case AtomKind::GradK: direct = direct * X; break;
                case AtomKind::Grad2K: direct = direct * Y; break;
                default: FAIL("unexpected factor");
            }
        }

        // Evaluation of the normal-ordered form.
        CMat canonical = matpow(k, ct.k_power) * matpow(B0, ct.b0_exponents[0]);
        const int n_ins = static_cast<int>(ct.halfweights.size());
        for (int i = 0; i < n_ins; ++i) {
            const CMat& ins = (ct.kind == InsertionKind::Hess) ? Y : X;
            const int w = ct.halfweights[i];
            canonical = canonical * matpow(k, -w) * ins * matpow(k, w);
            if (ct.kind == InsertionKind::GradSq && i == 0) continue; // no B0 between
            canonical = canonical * matpow(B0, ct.b0_exponents[i + (ct.kind == InsertionKind::GradSq ? 0 : 1)]);
        }

        INFO("instance " << inst << " kind " << insertion_name(ct.kind));
        CHECK((direct - canonical).frobenius() <
              1e-10 * std::max(1.0, direct.frobenius()));
    }
}
