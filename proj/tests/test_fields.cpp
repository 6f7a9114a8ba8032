// Unit tests for the grid calculus: finite-difference dd^c, pointwise
// margins, the d_c identity, integral criterion, plane restrictions,
// regularized maxima, and the pseudonorm.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "kpsh/calculus.hpp"
#include "kpsh/grid.hpp"
#include "kpsh/positivity.hpp"
#include "kpsh/rng.hpp"

using namespace kpsh;

namespace {

GridDomain box(int n, int pts, double half) {
    GridDomain d;
    d.n = n;
    d.shape.assign(2 * n, pts);
    const double h = 2.0 * half / (pts - 1);
    d.spacing.assign(2 * n, h);
    d.origin.assign(2 * n, -half);
    d.validate();
    return d;
}

double abs2(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

} // namespace

TEST_CASE("ddc is exact on quadratics") {
    const GridDomain d = box(2, 9, 1.0);

    // |z|^2 -> 2 Id at every interior point.
    const ScalarField f = ScalarField::sample(d, abs2);
    for_each_ddc(f, [&](const std::vector<int>&, std::int64_t, const HermitianMatrix& h) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const cplx want = i == j ? cplx(2.0) : cplx(0.0);
                CHECK(std::abs(h(i, j) - want) < 1e-12);
            }
    });

    // Re(z0^2) = x0^2 - y0^2 is pluriharmonic: dd^c = 0.
    const ScalarField g = ScalarField::sample(
        d, [](const std::vector<double>& x) { return x[0] * x[0] - x[1] * x[1]; });
    for_each_ddc(g, [&](const std::vector<int>&, std::int64_t, const HermitianMatrix& h) {
        CHECK(h.frobenius() < 1e-12);
    });
}

TEST_CASE("ddc of |z0|^2 |z1|^2 at (1,1)") {
    // Center the grid at z = (1, 1) so a grid point sits exactly there.
    GridDomain d = box(2, 9, 0.25);
    d.origin = {0.75, -0.25, 0.75, -0.25};
    const ScalarField f = ScalarField::sample(d, [](const std::vector<double>& x) {
        const double a = x[0] * x[0] + x[1] * x[1];
        const double b = x[2] * x[2] + x[3] * x[3];
        return a * b;
    });
    const HermitianMatrix h = ddc_at(f, {4, 4, 4, 4}); // the point (1, 0, 1, 0)
    // Analytic Hessian 2 * [[|z1|^2, z1 zbar0], [z0 zbar1, |z0|^2]] = 2*[[1,1],[1,1]].
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(h(i, j) - cplx(2.0)) < 1e-10);
    const auto ev = hermitian_eigenvalues(h);
    CHECK(ev.values[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(ev.values[1] == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("psh_margin_field constants on quadratic potentials") {
    const GridDomain d2 = box(2, 7, 1.0);
    const ScalarField f = ScalarField::sample(d2, abs2);
    for (int q = 1; q <= 2; ++q) {
        const ScalarField m = psh_margin_field(f, q);
        for (std::int64_t i = 0; i < d2.size(); ++i)
            if (m.masked_in(i)) CHECK(m.values[i] == doctest::Approx(2.0 * q).epsilon(1e-11));
    }

    // |z0|^2 - |z1|^2 + 2 |z2|^2: eigenvalues (-2, 2, 4), q = 2 margin 0.
    const GridDomain d3 = box(3, 5, 0.5);
    const ScalarField g = ScalarField::sample(d3, [](const std::vector<double>& x) {
        return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3] +
               2.0 * (x[4] * x[4] + x[5] * x[5]);
    });
    const ScalarField m = psh_margin_field(g, 2);
    for (std::int64_t i = 0; i < d3.size(); ++i)
        if (m.masked_in(i)) CHECK(std::abs(m.values[i]) < 1e-10);
}

TEST_CASE("d_c identity: residual vanishes on constants, O(h^2) on cubics") {
    const GridDomain d = box(2, 9, 1.0);
    const ScalarField c = ScalarField::sample(d, [](const std::vector<double>&) { return 3.5; });
    const DcResult rc = dc_and_dcal(c, 2);
    CHECK(rc.residual < 1e-14);
    for (const GenForm& f : rc.dc_oneform)
        for (const auto& [k, v] : f.coeffs) CHECK(std::abs(v) < 1e-14);

    // A fixed cubic: the disagreement between the two routes shrinks ~4x per
    // halving of h.
    auto cubic = [](const std::vector<double>& x) {
        return x[0] * x[0] * x[0] - 0.5 * x[1] * x[1] * x[1] + 0.75 * x[2] * x[2] * x[2] +
               x[0] * x[0] * x[1] + 0.5 * x[2] * x[3] * x[0] - x[3] * x[3] * x[3];
    };
    const double r9 = dc_and_dcal(ScalarField::sample(box(2, 9, 1.0), cubic), 2).residual;
    const double r17 = dc_and_dcal(ScalarField::sample(box(2, 17, 1.0), cubic), 2).residual;
    CHECK(r17 > 0.0);
    CHECK(r9 / r17 > 3.5);
}

TEST_CASE("integral criterion against bump test forms") {
    const GridDomain d = box(2, 17, 1.0);
    auto bump_fn = [](const std::vector<double>& x) {
        double b = 1.0;
        for (double v : x) {
            const double t = v / 0.6;
            const double s = 1.0 - t * t;
            b *= s > 0.0 ? s * s * s : 0.0;
        }
        return b;
    };
    const ScalarField bump = ScalarField::sample(d, bump_fn);
    const ComplexForm mono = positive_monomial(2, 1); // (n-q, n-q) = (1,1)

    // Pluriharmonic phi: discrete summation by parts is exact, integral ~ 0.
    const ScalarField ph = ScalarField::sample(
        d, [](const std::vector<double>& x) { return x[0] * x[0] - x[1] * x[1]; });
    CHECK(std::abs(integral_criterion(ph, bump, mono, 1)) < 1e-10);

    // Strictly psh phi gives a strictly positive integral, and adding a
    // pluriharmonic part does not change it (same dd^c).
    const ScalarField f = ScalarField::sample(d, abs2);
    const double i1 = integral_criterion(f, bump, mono, 1);
    CHECK(i1 > 0.0);
    const ScalarField fp = ScalarField::sample(d, [](const std::vector<double>& x) {
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] +
               2.0 * (x[0] * x[0] - x[1] * x[1]) - 3.0 * x[2];
    });
    CHECK(integral_criterion(fp, bump, mono, 1) == doctest::Approx(i1).epsilon(1e-10));

    // Random bump placements against a psh potential stay nonnegative.
    Rng rng(71);
    for (int t = 0; t < 10; ++t) {
        const double cx = rng.uniform(-0.2, 0.2), cy = rng.uniform(-0.2, 0.2);
        const ScalarField b2 = ScalarField::sample(d, [&](const std::vector<double>& x) {
            double b = 1.0;
            for (int a = 0; a < 4; ++a) {
                const double c = a == 0 ? cx : (a == 1 ? cy : 0.0);
                const double t2 = (x[a] - c) / 0.5;
                const double s = 1.0 - t2 * t2;
                b *= s > 0.0 ? s * s * s : 0.0;
            }
            return b;
        });
        CHECK(integral_criterion(f, b2, mono, 1) >= -1e-6);
    }
}

TEST_CASE("plane subharmonicity restrictions") {
    const GridDomain d = box(2, 7, 1.0);
    const ScalarField f = ScalarField::sample(d, abs2);
    const PlaneReport r1 = plane_subharmonicity(f, 1, 200, 3, false);
    CHECK(r1.min_trace == doctest::Approx(2.0).epsilon(1e-9));
    const PlaneReport r2 = plane_subharmonicity(f, 2, 50, 3, false);
    CHECK(r2.min_trace == doctest::Approx(4.0).epsilon(1e-9));

    // Quadratic with dd^c = diag(-1, 2, 3): refined min over 2-planes is 1.
    const GridDomain d3 = box(3, 5, 0.5);
    const ScalarField g = ScalarField::sample(d3, [](const std::vector<double>& x) {
        return -0.5 * (x[0] * x[0] + x[1] * x[1]) + (x[2] * x[2] + x[3] * x[3]) +
               1.5 * (x[4] * x[4] + x[5] * x[5]);
    });
    const PlaneReport rr = plane_subharmonicity(g, 2, 40, 5, true);
    CHECK(rr.min_trace == doctest::Approx(1.0).epsilon(1e-6));

    // q = 1 flags the negative direction of |z0|^2 - |z1|^2.
    const ScalarField h = ScalarField::sample(d, [](const std::vector<double>& x) {
        return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
    });
    const PlaneReport rn = plane_subharmonicity(h, 1, 100, 7, true);
    CHECK(rn.min_trace == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("regularized max: branches, diagonal, equivariance") {
    // Plain max outside the band, bit-exact.
    CHECK(regularized_max(0.0, 5.0, 1.0) == 5.0);
    CHECK(regularized_max(5.0, 0.0, 1.0) == 5.0);
    CHECK(regularized_max(-7.25, 13.5, 0.3) == 13.5);

    // Diagonal value t + 3 eps / 16 and kernel join conditions.
    for (double eps : {0.1, 0.5, 2.0}) {
        CHECK(regularized_max(1.0, 1.0, eps) ==
              doctest::Approx(1.0 + 3.0 * eps / 16.0).epsilon(1e-14));
        CHECK(regmax_kernel(eps, eps) == doctest::Approx(eps).epsilon(1e-14));
        CHECK(regmax_kernel(-eps, eps) == doctest::Approx(eps).epsilon(1e-14));
        // C^1 join: one-sided slopes at t = eps agree with |t|' = 1.
        const double h = 1e-6 * eps;
        const double slope = (regmax_kernel(eps, eps) - regmax_kernel(eps - h, eps)) / h;
        CHECK(slope == doctest::Approx(1.0).epsilon(1e-4));
    }

    // Translation equivariance, exact for representable sums.
    Rng rng(73);
    for (int t = 0; t < 1000; ++t) {
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        const double c = rng.uniform_int(-4, 4) * 0.25; // exactly representable
        const double eps = 0.5;
        CHECK(regularized_max(a + c, b + c, eps) ==
              doctest::Approx(regularized_max(a, b, eps) + c).epsilon(1e-13));
    }

    CHECK_THROWS_AS(regularized_max(0.0, 0.0, -1.0), contract_error);
}

TEST_CASE("pseudonorm on constants") {
    const GridDomain d = box(1, 9, 1.0);
    const std::vector<std::uint8_t> all(d.size(), 1);

    const ScalarField c = ScalarField::sample(d, [](const std::vector<double>&) { return -2.5; });
    const PseudonormReport r = greenwu_pseudonorm(c, all, 3);
    // All derivative sups vanish; each term contributes 2^{-i} * max(1, 0).
    CHECK(r.value == doctest::Approx(2.5 + 7.0 / 8.0).epsilon(1e-12));
    for (double v : r.derivative_sups) CHECK(v < 1e-12);

    const ScalarField z = ScalarField::sample(d, [](const std::vector<double>&) { return 0.0; });
    CHECK(greenwu_pseudonorm(z, all, 0).value == 0.0);
}

TEST_CASE("field io round trip") {
    const GridDomain d = box(1, 5, 1.0);
    const ScalarField f = ScalarField::sample(d, abs2);
    const std::string path = "kpsh_test_field.csv";
    write_field(f, path);
    const ScalarField g = read_field(path);
    CHECK(g.domain == d);
    REQUIRE(g.values.size() == f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(g.values[i] == doctest::Approx(f.values[i]).epsilon(1e-15));
    std::remove(path.c_str());
}
