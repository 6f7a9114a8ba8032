// Unit tests for the spectral heat flow on the flat torus.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kpsh/calculus.hpp"
#include "kpsh/grid.hpp"
#include "kpsh/heat.hpp"

using namespace kpsh;

namespace {

GridDomain torus(int n, int pts) {
    GridDomain d;
    d.n = n;
    d.shape.assign(2 * n, pts);
    d.spacing.assign(2 * n, 2.0 * M_PI / pts);
    d.origin.assign(2 * n, 0.0);
    d.topology = GridDomain::Topology::torus;
    d.validate();
    return d;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace

TEST_CASE("constants and eigenmodes") {
    const GridDomain d = torus(1, 32);
    const ScalarField c =
        ScalarField::sample(d, [](const std::vector<double>&) { return 4.25; });
    CHECK(sup_diff(heat_smooth(c, 0.7), c) < 1e-12);

    // cos(k . x) is a Laplacian eigenfunction: damped by exp(-t |k|^2).
    auto mode = [](const std::vector<double>& x) { return std::cos(2 * x[0] + 3 * x[1]); };
    const ScalarField f = ScalarField::sample(d, mode);
    const double t = 0.05;
    const ScalarField ft = heat_smooth(f, t);
    const double damp = std::exp(-t * 13.0); // |k|^2 = 4 + 9
    double err = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        err = std::max(err, std::abs(ft.values[i] - damp * f.values[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("identity at t = 0, error on t < 0") {
    const GridDomain d = torus(1, 16);
    const ScalarField f = ScalarField::sample(
        d, [](const std::vector<double>& x) { return std::sin(x[0]) + 0.3 * std::cos(2 * x[1]); });
    CHECK(sup_diff(heat_smooth(f, 0.0), f) < 1e-13);
    CHECK_THROWS_AS(heat_smooth(f, -0.1), contract_error);
}

TEST_CASE("semigroup, mean preservation, sup contraction") {
    const GridDomain d = torus(1, 32);
    const ScalarField f = ScalarField::sample(d, [](const std::vector<double>& x) {
        return std::cos(x[0]) - 0.5 * std::sin(2 * x[0] + x[1]) + 0.2 * std::cos(3 * x[1]);
    });

    const ScalarField two_step = heat_smooth(heat_smooth(f, 0.03), 0.07);
    const ScalarField one_step = heat_smooth(f, 0.1);
    CHECK(sup_diff(two_step, one_step) < 1e-10);

    auto mean = [](const ScalarField& g) {
        double s = 0.0;
        for (double v : g.values) s += v;
        return s / static_cast<double>(g.values.size());
    };
    auto sup = [](const ScalarField& g) {
        double s = -1e300;
        for (double v : g.values) s = std::max(s, v);
        return s;
    };
    const ScalarField ft = heat_smooth(f, 0.2);
    CHECK(std::abs(mean(ft) - mean(f)) < 1e-12);
    CHECK(sup(ft) <= sup(f) + 1e-10);
}

TEST_CASE("uniform convergence to a continuous non-smooth function") {
    const GridDomain d = torus(1, 64);
    // Max of two quadratic-like periodic bumps: continuous, crease along the
    // locus where they tie.
    const ScalarField f = ScalarField::sample(d, [](const std::vector<double>& x) {
        const double a = std::cos(x[0]) + 0.5 * std::cos(x[1]);
        const double b = std::cos(x[1] - 1.0) + 0.5 * std::cos(x[0] - 2.0);
        return std::max(a, b);
    });
    const double e2 = sup_diff(heat_smooth(f, 1e-2), f);
    const double e3 = sup_diff(heat_smooth(f, 1e-3), f);
    const double e4 = sup_diff(heat_smooth(f, 1e-4), f);
    CHECK(e3 < e2);
    CHECK(e4 < e3);
    CHECK(e4 < 0.02);
}

TEST_CASE("smoothing preserves strict psh margins on a compact") {
    const GridDomain d = torus(1, 64);
    // Periodized strictly psh potential near x = 0: -cos x0 - cos y0 has
    // dd^c = cos x0 + cos y0 > 0 on the set K below.
    const ScalarField f = ScalarField::sample(
        d, [](const std::vector<double>& x) { return -std::cos(x[0]) - std::cos(x[1]); });
    std::vector<std::uint8_t> K(d.size(), 0);
    for_each_interior(d, 0, [&](const std::vector<int>& idx, std::int64_t fl) {
        bool in = true;
        for (int a = 0; a < d.axes(); ++a) {
            const double c = d.origin[a] + d.spacing[a] * idx[a];
            in = in && std::min(c, 2.0 * M_PI - c) <= 0.6;
        }
        K[fl] = in ? 1 : 0;
    });

    // Margin of the unsmoothed field on K.
    const ScalarField m0 = psh_margin_field(f, 1);
    double eps_measured = 1e300;
    for (std::int64_t i = 0; i < d.size(); ++i)
        if (K[i]) eps_measured = std::min(eps_measured, m0.values[i]);
    CHECK(eps_measured > 0.5);

    const SmoothingReport rep = smoothing_preserves_psh(f, 1, {1e-4, 1e-3, 1e-2}, K);
    CHECK(rep.any_success);
    for (double m : rep.min_margins) CHECK(m >= 0.0);
    CHECK(rep.min_margins[0] >= eps_measured / 2.0);
}

TEST_CASE("heat flow commutes with ddc on smooth fields") {
    const GridDomain d = torus(1, 32);
    const ScalarField f = ScalarField::sample(d, [](const std::vector<double>& x) {
        return -std::cos(x[0]) + 0.4 * std::sin(x[0] + x[1]);
    });
    const double t = 5e-3;

    // Route 1: smooth then differentiate.
    const HermitianField h1 = ddc_field(heat_smooth(f, t));
    // Route 2: differentiate then smooth the (single) Hessian entry.
    const HermitianField h0 = ddc_field(f);
    ScalarField entry;
    entry.domain = d;
    entry.values.assign(d.size(), 0.0);
    for (std::size_t k = 0; k < h0.size(); ++k)
        entry.values[h0.flat_index[k]] = h0.values[k](0, 0).real();
    const ScalarField smoothed = heat_smooth(entry, t);

    double err = 0.0;
    for (std::size_t k = 0; k < h1.size(); ++k)
        err = std::max(err,
                       std::abs(h1.values[k](0, 0).real() - smoothed.values[h1.flat_index[k]]));
    CHECK(err < 1e-8);
}
