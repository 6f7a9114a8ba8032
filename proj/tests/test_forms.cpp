// Unit tests for constant-coefficient forms: wedge algebra, standard Kaehler
// powers, restrictions to complex and real planes, and the pairing.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "kpsh/forms.hpp"
#include "kpsh/frames.hpp"
#include "kpsh/hermitian.hpp"
#include "kpsh/rng.hpp"

using namespace kpsh;

namespace {

ComplexForm monomial_11(int n, int j, int k) {
    // i dz_j ^ dzbar_k
    ComplexForm f(n, 1, 1);
    f.set_coeff({j}, {k}, cplx(0.0, 1.0));
    return f;
}

ComplexForm dz(int n, int j) {
    ComplexForm f(n, 1, 0);
    f.set_coeff({j}, {}, 1.0);
    return f;
}

} // namespace

TEST_CASE("wedge of positive monomials gives the volume monomial") {
    const ComplexForm a = positive_monomial(2, 0);
    const ComplexForm b = positive_monomial(2, 1);
    const ComplexForm w = wedge(a, b);
    CHECK(w.p() == 2);
    CHECK(w.q() == 2);
    // (i dz0 dzbar0)(i dz1 dzbar1) = + dz0 dz1 dzbar0 dzbar1 after reordering.
    const cplx c = w.coeff({0, 1}, {0, 1});
    CHECK(c.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w.is_real());
}

TEST_CASE("wedge with a repeated covector vanishes") {
    const ComplexForm z0 = dz(2, 0);
    CHECK(wedge(z0, z0).is_zero());
}

TEST_CASE("omega^2 on C^2 is twice the volume form") {
    const ComplexForm w2 = wedge(omega_std(2), omega_std(2));
    const ComplexForm diff = w2 - vol_form(2) * cplx(2.0);
    CHECK(diff.is_zero());
}

TEST_CASE("omega_power normalization") {
    for (int n = 1; n <= 3; ++n) {
        const HermitianMatrix id = HermitianMatrix::identity(n);
        // Top power / n! is the unit volume monomial.
        const ComplexForm top = omega_power(id, n, true);
        const ComplexForm dv = top - vol_form(n);
        CHECK(dv.is_zero());
        // k = 0 is the scalar 1; k = 1 is omega itself.
        const ComplexForm one = omega_power(id, 0, true);
        CHECK(std::abs(one.coeff({}, {}) - cplx(1.0)) < 1e-14);
        const ComplexForm w1 = omega_power(id, 1, true) - omega_std(n);
        CHECK(w1.is_zero());
    }
}

TEST_CASE("anticommutativity sign law on random monomial pairs") {
    Rng rng(101);
    const int n = 4;
    for (int t = 0; t < 1000; ++t) {
        const int pa = 1 + static_cast<int>(rng.next_u64() % 2);
        const int qa = static_cast<int>(rng.next_u64() % 2);
        const int pb = static_cast<int>(rng.next_u64() % 2);
        const int qb = 1 + static_cast<int>(rng.next_u64() % 2);
        auto pick = [&](int count) {
            MultiIndex I;
            while (static_cast<int>(I.size()) < count) {
                const int j = static_cast<int>(rng.next_u64() % n);
                bool dup = false;
                for (int v : I) dup |= (v == j);
                if (!dup) I.push_back(j);
            }
            std::sort(I.begin(), I.end());
            return I;
        };
        ComplexForm a(n, pa, qa), b(n, pb, qb);
        a.set_coeff(pick(pa), pick(qa), cplx(rng.uniform() - 0.5, rng.uniform() - 0.5));
        b.set_coeff(pick(pb), pick(qb), cplx(rng.uniform() - 0.5, rng.uniform() - 0.5));
        const double sign = ((pa + qa) * (pb + qb)) % 2 == 0 ? 1.0 : -1.0;
        const ComplexForm lhs = wedge(a, b);
        const ComplexForm rhs = wedge(b, a) * cplx(sign);
        CHECK((lhs - rhs).is_zero());
    }
}

TEST_CASE("restrict_complex coordinate anchors") {
    const ComplexForm m00 = monomial_11(2, 0, 0);
    CHECK(restrict_complex(m00, ComplexFrame::coordinate(2, {0})) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(restrict_complex(m00, ComplexFrame::coordinate(2, {1})) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("omega^p / p! restricts to p! / p! = 1 on every complex p-plane") {
    Rng rng(7);
    for (int n = 2; n <= 4; ++n) {
        for (int p = 1; p <= std::min(3, n); ++p) {
            const ComplexForm wp = omega_power(HermitianMatrix::identity(n), p, true);
            for (int t = 0; t < 20; ++t) {
                const ComplexFrame P = ComplexFrame::random(n, p, rng);
                CHECK(restrict_complex(wp, P) == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("frame monomial restricts to 1 on its own frame") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const ComplexFrame P = ComplexFrame::random(3, 2, rng);
        const ComplexForm m = frame_monomial(P);
        CHECK(restrict_complex(m, P) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(m.is_real(1e-10));
    }
}

TEST_CASE("restrict_real coordinate anchors and the Wirtinger bound") {
    // omega on the complex line span(d/dx0, d/dy0) has unit density.
    const ComplexForm w = omega_std(2);
    CHECK(restrict_real(w, RealFrame::coordinate(2, {0, 1})) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // omega vanishes on the Lagrangian plane span(d/dx0, d/dx1).
    CHECK(restrict_real(w, RealFrame::coordinate(2, {0, 2})) ==
          doctest::Approx(0.0).epsilon(1e-14));

    // |omega^2 / 2!| <= 1 on random real 4-frames in C^3; = 1 on complex ones.
    const ComplexForm w2 = omega_power(HermitianMatrix::identity(3), 2, true);
    Rng rng(23);
    for (int t = 0; t < 500; ++t) {
        const double v = restrict_real(w2, RealFrame::random(3, 4, rng));
        CHECK(v >= -1.0 - 1e-9);
        CHECK(v <= 1.0 + 1e-9);
    }
    for (int t = 0; t < 20; ++t) {
        const RealFrame V = ComplexFrame::random(3, 2, rng).complexified();
        CHECK(restrict_real(w2, V) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("poincare_pair basics") {
    // (omega, omega) on C^2: omega^2 = 2 vol.
    CHECK(poincare_pair(omega_std(2), omega_std(2)) == doctest::Approx(2.0).epsilon(1e-12));
    // Matching positive monomials pair to 1.
    const ComplexForm a = positive_monomial(2, 0);
    const ComplexForm b = positive_monomial(2, 1);
    CHECK(poincare_pair(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    // One-sided duality: strongly positive against weakly positive is >= 0.
    Rng rng(31);
    for (int t = 0; t < 50; ++t) {
        const ComplexForm sp = frame_monomial(ComplexFrame::random(3, 2, rng));
        const ComplexForm wk = frame_monomial(ComplexFrame::random(3, 1, rng));
        CHECK(poincare_pair(sp, wk) >= -1e-10);
    }
}

TEST_CASE("json round trip preserves coefficients and bidegree") {
    ComplexForm f(3, 2, 2);
    f.set_coeff({0, 1}, {0, 2}, cplx(1.5, -0.25));
    f.set_coeff({1, 2}, {1, 2}, cplx(-2.0, 0.0));
    const ComplexForm g = ComplexForm::from_json(f.to_json());
    CHECK(g.n() == 3);
    CHECK(g.p() == 2);
    CHECK(g.q() == 2);
    CHECK((f - g).is_zero());
}
