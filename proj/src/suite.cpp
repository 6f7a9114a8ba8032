#include "kpsh/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "kpsh/calculus.hpp"
#include "kpsh/constructions.hpp"
#include "kpsh/forms.hpp"
#include "kpsh/frames.hpp"
#include "kpsh/heat.hpp"
#include "kpsh/hermitian.hpp"
#include "kpsh/positivity.hpp"
#include "kpsh/potentials.hpp"
#include "kpsh/rng.hpp"

namespace kpsh {
namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

GridDomain box_grid(int n, int pts, double half, double stagger = 0.0) {
    GridDomain d;
    d.n = n;
    for (int a = 0; a < 2 * n; ++a) {
        d.shape.push_back(pts);
        d.spacing.push_back(2.0 * half / (pts - 1));
        d.origin.push_back(-half + stagger);
    }
    return d;
}

GridDomain torus_grid(int n, int pts) {
    GridDomain d;
    d.n = n;
    d.topology = GridDomain::Topology::torus;
    const double period = 2.0 * std::acos(-1.0);
    for (int a = 0; a < 2 * n; ++a) {
        d.shape.push_back(pts);
        d.spacing.push_back(period / pts);
        d.origin.push_back(0.0);
    }
    return d;
}

// --- criterion 1: eigenvalue-sum margin vs Grassmannian trace minimization ---

std::string c1_payload(std::uint64_t seed, double& worst) {
    Rng rng(seed);
    std::string csv = "trial,n,q,psh_margin,kyfan_min_trace,abs_diff\n";
    worst = 0.0;
    int trial = 0;
    for (int n : {3, 4}) {
        for (int i = 0; i < 100; ++i, ++trial) {
            const HermitianMatrix h = HermitianMatrix::random(n, rng, 1.0);
            for (int q = 1; q <= n; ++q) {
                const double m = psh_margin(h, q);
                const double k = kyfan_min_trace(h, q, 12, rng.next_u64());
                const double d = std::abs(m - k);
                worst = std::max(worst, d);
                csv += std::to_string(trial) + "," + std::to_string(n) + "," +
                       std::to_string(q) + "," + g17(m) + "," + g17(k) + "," + g17(d) + "\n";
            }
        }
    }
    return csv;
}

CriterionResult criterion1(std::uint64_t seed) {
    CriterionResult r;
    r.id = 1;
    r.name = "eigenvalue-margin vs frame-trace minimization";
    double worst = 0.0;
    const std::string csv = c1_payload(seed, worst);
    r.passed = worst <= 1e-6;
    r.detail = "200 random Hermitian matrices (n=3,4), all q: max |psh_margin - "
               "kyfan_min_trace| = " + g17(worst) + " (tol 1e-6)";
    r.csv_outputs.emplace_back("criterion1_kyfan.csv", csv);
    return r;
}

// --- criterion 2: weak/strong cone agreement on nu ^ omega^{q-1} ---

CriterionResult criterion2(std::uint64_t seed) {
    CriterionResult r;
    r.id = 2;
    r.name = "cone equivalence on nu ^ omega^(q-1)";
    Rng rng(seed);
    std::string csv = "trial,n,q,closed_margin,search_margin,abs_diff,weak_pos,strong_pos\n";
    double worst_search = 0.0, worst_closed = 0.0;
    bool signs_ok = true;
    struct Batch {
        int n, q, count;
    };
    int trial = 0;
    for (const Batch b : {Batch{3, 2, 100}, Batch{4, 2, 60}, Batch{4, 3, 40}}) {
        for (int i = 0; i < b.count; ++i, ++trial) {
            const HermitianMatrix nu = HermitianMatrix::random(b.n, rng, 1.0);
            const ComplexForm eta = nu_wedge_omega_k(nu, b.q - 1);
            const double closed = factorial(b.q - 1) * psh_margin(nu, b.q);

            const PositivityVerdict weak = weak_positivity_test(eta, 64, 1e-9, rng.next_u64());
            const PositivityVerdict strong =
                strong_positivity_certificate(eta, 256, 1e-8, rng.next_u64());
            worst_closed = std::max(worst_closed, std::abs(weak.margin - closed));
            if (weak.positive != strong.positive && std::abs(closed) > 1e-9)
                signs_ok = false;

            // Independent oracle: the raw Grassmannian search on an untagged
            // copy must reproduce the closed-form minimum.
            ComplexForm raw(eta.n(), eta.p(), eta.q(), eta.coeffs());
            const SearchResult sr = min_restriction_search(raw, 6, rng.next_u64());
            const double d = std::abs(sr.value - closed);
            worst_search = std::max(worst_search, d);

            csv += std::to_string(trial) + "," + std::to_string(b.n) + "," +
                   std::to_string(b.q) + "," + g17(closed) + "," + g17(sr.value) + "," +
                   g17(d) + "," + std::to_string(weak.positive ? 1 : 0) + "," +
                   std::to_string(strong.positive ? 1 : 0) + "\n";
        }
    }
    r.passed = signs_ok && worst_search <= 1e-6 && worst_closed <= 1e-9;
    r.detail = "200 random nu: weak/strong sign agreement " +
               std::string(signs_ok ? "yes" : "NO") +
               "; max |search - (q-1)! margin| = " + g17(worst_search) +
               " (tol 1e-6); max |weak.margin - closed| = " + g17(worst_closed);
    r.csv_outputs.emplace_back("criterion2_cone.csv", csv);
    return r;
}

// --- criterion 3: comass bound of omega^q / q! on real 2q-planes ---

std::string c3_payload(std::uint64_t seed, double& out_min, double& out_max,
                       double& complexified_dev) {
    Rng rng(seed);
    out_min = 1e300;
    out_max = -1e300;
    complexified_dev = 0.0;
    std::string csv = "batch,min_value,max_value\n";
    double bmin = 1e300, bmax = -1e300;
    int batch = 0;
    for (int i = 0; i < 10000; ++i) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 2); // 2 or 3
        const int q = 1 + static_cast<int>(rng.next_u64() % 2); // 1 or 2
        const ComplexForm wq = omega_power(HermitianMatrix::identity(n), q, true);
        const RealFrame v = RealFrame::random(n, 2 * q, rng);
        const double val = restrict_real(wq, v);
        out_min = std::min(out_min, val);
        out_max = std::max(out_max, val);
        bmin = std::min(bmin, val);
        bmax = std::max(bmax, val);
        if ((i + 1) % 1000 == 0) {
            csv += std::to_string(batch++) + "," + g17(bmin) + "," + g17(bmax) + "\n";
            bmin = 1e300;
            bmax = -1e300;
        }
    }
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 2);
        const int q = 1 + static_cast<int>(rng.next_u64() % 2);
        const ComplexForm wq = omega_power(HermitianMatrix::identity(n), q, true);
        const ComplexFrame p = ComplexFrame::random(n, q, rng);
        const double val = restrict_real(wq, p.complexified());
        complexified_dev = std::max(complexified_dev, std::abs(val - 1.0));
    }
    csv += "complexified_max_dev," + g17(complexified_dev) + ",\n";
    return csv;
}

CriterionResult criterion3(std::uint64_t seed) {
    CriterionResult r;
    r.id = 3;
    r.name = "comass of omega^q/q! on real 2q-planes";
    double lo, hi, cdev;
    const std::string csv = c3_payload(seed, lo, hi, cdev);
    r.passed = lo >= -1.0 - 1e-9 && hi <= 1.0 + 1e-9 && cdev <= 1e-9;
    r.detail = "10^4 random real 2q-frames (q<=2, n<=3): values in [" + g17(lo) + ", " +
               g17(hi) + "] (bound 1+1e-9); 100 complexified frames: max |value - 1| = " +
               g17(cdev) + " (tol 1e-9)";
    r.csv_outputs.emplace_back("criterion3_comass.csv", csv);
    return r;
}

// --- criterion 4: dd^c stencil convergence and exactness on quadratics ---

double max_ddc_error(const Potential& pot, const GridDomain& d) {
    const ScalarField f = sample_potential(pot, d);
    double worst = 0.0;
    for_each_ddc(f, [&](const std::vector<int>& idx, std::int64_t, const HermitianMatrix& h) {
        const HermitianMatrix exact = pot.ddc(d.point(idx));
        for (int i = 0; i < h.n(); ++i)
            for (int j = 0; j < h.n(); ++j)
                worst = std::max(worst, std::abs(h(i, j) - exact(i, j)));
    });
    return worst;
}

CriterionResult criterion4(std::uint64_t seed) {
    CriterionResult r;
    r.id = 4;
    r.name = "dd^c grid convergence";
    Rng rng(seed);
    std::string csv = "potential,grid,max_error,observed_order\n";

    std::vector<PotentialPtr> quartics = {
        radial_power_potential(2, 2.0, 1.0),
        sum_potential({radial_power_potential(2, 2.0, 0.8, {cplx(0.1, 0.05), cplx(-0.07, 0.12)}),
                       radial_power_potential(2, 2.0, 0.5, {cplx(-0.12, -0.03), cplx(0.06, -0.09)})}),
        sum_potential({radial_power_potential(2, 2.0, 1.0, {cplx(0.04, -0.11), cplx(0.09, 0.02)}),
                       quadratic_potential(HermitianMatrix::random(2, rng, 0.5))}),
    };

    bool orders_ok = true;
    double min_order = 1e300;
    for (std::size_t pi = 0; pi < quartics.size(); ++pi) {
        double prev = 0.0;
        for (int pts : {17, 33, 65}) {
            const double err = max_ddc_error(*quartics[pi], box_grid(2, pts, 0.5));
            double order = 0.0;
            if (pts > 17) {
                order = std::log2(prev / err);
                min_order = std::min(min_order, order);
                if (order < 1.9) orders_ok = false;
            }
            csv += std::to_string(pi) + "," + std::to_string(pts - 1) + "," + g17(err) + "," +
                   g17(order) + "\n";
            prev = err;
        }
    }

    // Quadratics are reproduced exactly by the second-order stencil.
    double quad_err = 0.0;
    for (int i = 0; i < 3; ++i) {
        const HermitianMatrix h = HermitianMatrix::random(2, rng, 1.0);
        std::vector<double> lin(4);
        for (double& v : lin) v = rng.uniform(-1.0, 1.0);
        quad_err = std::max(quad_err,
                            max_ddc_error(*quadratic_potential(h, lin, rng.uniform(-1.0, 1.0)),
                                          box_grid(2, 17, 0.5)));
    }
    csv += "quadratic_max_error," + g17(quad_err) + ",,\n";

    r.passed = orders_ok && quad_err <= 1e-10;
    r.detail = "3 quartic potentials, grids 16->32->64: min observed order = " + g17(min_order) +
               " (need >= 1.9); quadratic exactness max error = " + g17(quad_err) +
               " (tol 1e-10)";
    r.csv_outputs.emplace_back("criterion4_ddc.csv", csv);
    return r;
}

// --- criterion 5: the d_c wedge identity, two-route residual ratio ---

std::string c5_payload(std::uint64_t seed, double& min_ratio) {
    Rng rng(seed);
    std::string csv = "potential,q,residual_h,residual_h2,ratio\n";
    min_ratio = 1e300;
    for (int pi = 0; pi < 5; ++pi) {
        // Random real cubic in the four real coordinates.
        std::vector<double> c;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j)
                for (int k = j; k < 4; ++k) c.push_back(rng.uniform(-1.0, 1.0));
        auto cubic = [c](const std::vector<double>& x) {
            double s = 0.0;
            std::size_t t = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = i; j < 4; ++j)
                    for (int k = j; k < 4; ++k) s += c[t++] * x[i] * x[j] * x[k];
            return s;
        };
        for (int q : {1, 2}) {
            const double res_h = dc_and_dcal(ScalarField::sample(box_grid(2, 9, 0.5), cubic), q)
                                     .residual;
            const double res_h2 = dc_and_dcal(ScalarField::sample(box_grid(2, 17, 0.5), cubic), q)
                                      .residual;
            const double ratio = res_h / res_h2;
            min_ratio = std::min(min_ratio, ratio);
            csv += std::to_string(pi) + "," + std::to_string(q) + "," + g17(res_h) + "," +
                   g17(res_h2) + "," + g17(ratio) + "\n";
        }
    }
    return csv;
}

CriterionResult criterion5(std::uint64_t seed) {
    CriterionResult r;
    r.id = 5;
    r.name = "d_c identity residual ratio";
    double min_ratio = 0.0;
    const std::string csv = c5_payload(seed, min_ratio);
    r.passed = min_ratio >= 3.5;
    r.detail = "5 random cubics, q in {1,2}, h -> h/2: min residual ratio = " + g17(min_ratio) +
               " (need >= 3.5)";
    r.csv_outputs.emplace_back("criterion5_dc.csv", csv);
    return r;
}

// --- criterion 6: restricted Laplacian over planes vs the eigenvalue margin ---

CriterionResult criterion6(std::uint64_t seed) {
    CriterionResult r;
    r.id = 6;
    r.name = "plane subharmonicity vs margin";
    Rng rng(seed);
    std::string csv = "trial,margin,min_plane_trace,abs_diff\n";
    double worst = 0.0;
    bool signs_ok = true;
    const GridDomain d = box_grid(3, 7, 0.5);
    for (int i = 0; i < 50; ++i) {
        const HermitianMatrix h = HermitianMatrix::random(3, rng, 1.0);
        std::vector<double> lin(6);
        for (double& v : lin) v = rng.uniform(-0.5, 0.5);
        const ScalarField f = sample_potential(*quadratic_potential(h, lin), d);
        const double margin = psh_margin(h * 2.0, 2);
        const PlaneReport rep = plane_subharmonicity(f, 2, 1000, rng.next_u64(), true);
        const double diff = std::abs(rep.min_trace - margin);
        worst = std::max(worst, diff);
        const bool psh_a = margin >= 0.0, psh_b = rep.min_trace >= -1e-6;
        if (psh_a != psh_b && std::abs(margin) > 1e-6) signs_ok = false;
        csv += std::to_string(i) + "," + g17(margin) + "," + g17(rep.min_trace) + "," +
               g17(diff) + "\n";
    }
    r.passed = worst <= 1e-6 && signs_ok;
    r.detail = "50 random quadratics, 10^3 planes each (refined): max |min trace - margin| = " +
               g17(worst) + " (tol 1e-6); sign classification agreement " +
               (signs_ok ? "yes" : "NO");
    r.csv_outputs.emplace_back("criterion6_planes.csv", csv);
    return r;
}

// --- criterion 7: heat smoothing preserves strict margins; commutation ---

CriterionResult criterion7(std::uint64_t) {
    CriterionResult r;
    r.id = 7;
    r.name = "heat smoothing preserves margins";
    const GridDomain d = torus_grid(1, 64);
    const double pi = std::acos(-1.0);

    std::vector<std::function<double(const std::vector<double>&)>> pots = {
        [](const std::vector<double>& x) { return -std::cos(x[0]) - std::cos(x[1]); },
        [](const std::vector<double>& x) {
            return -std::cos(x[0]) - std::cos(x[1]) + 0.2 * std::cos(x[0] + x[1]);
        },
        [](const std::vector<double>& x) {
            return -std::cos(x[0]) - std::cos(x[1]) - 0.1 * std::cos(2 * x[0]) -
                   0.1 * std::cos(2 * x[1]);
        },
    };

    std::vector<std::uint8_t> K(d.size(), 0);
    for_each_interior(d, 0, [&](const std::vector<int>& idx, std::int64_t f) {
        const std::vector<double> x = d.point(idx);
        const double dx = std::min(x[0], 2 * pi - x[0]);
        const double dy = std::min(x[1], 2 * pi - x[1]);
        K[f] = (dx <= 0.6 && dy <= 0.6) ? 1 : 0;
    });

    std::string csv = "potential,t,min_margin\n";
    bool ok = true;
    double commutation = 0.0;
    for (std::size_t pi_i = 0; pi_i < pots.size(); ++pi_i) {
        const ScalarField phi = ScalarField::sample(d, pots[pi_i]);

        // Margin of the unsmoothed field on K.
        double eps0 = 1e300;
        const ScalarField m0 = psh_margin_field(phi, 1);
        for (std::int64_t f = 0; f < d.size(); ++f)
            if (K[f] && m0.masked_in(f)) eps0 = std::min(eps0, m0.values[f]);
        csv += std::to_string(pi_i) + ",0," + g17(eps0) + "\n";
        if (eps0 <= 0.0) ok = false;

        const std::vector<double> ts = {1e-4, 1e-3, 1e-2};
        const SmoothingReport rep = smoothing_preserves_psh(phi, 1, ts, K);
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            csv += std::to_string(pi_i) + "," + g17(ts[ti]) + "," + g17(rep.min_margins[ti]) +
                   "\n";
            if (rep.min_margins[ti] < 0.0) ok = false;
        }
        if (rep.min_margins[0] < 0.5 * eps0) ok = false;

        // Commutation of the flow with the dd^c stencil (both are Fourier
        // multipliers on the torus, so the defect is pure roundoff).
        const double t = 1e-3;
        const HermitianField h_then_heat_src = ddc_field(phi);
        ScalarField h00{d, std::vector<double>(d.size(), 0.0), {}};
        for (std::size_t k = 0; k < h_then_heat_src.size(); ++k)
            h00.values[h_then_heat_src.flat_index[k]] = h_then_heat_src.values[k](0, 0).real();
        const ScalarField a = heat_smooth(h00, t);
        const HermitianField b = ddc_field(heat_smooth(phi, t));
        for (std::size_t k = 0; k < b.size(); ++k)
            commutation = std::max(
                commutation, std::abs(b.values[k](0, 0).real() - a.values[b.flat_index[k]]));
    }
    csv += "commutation_defect," + g17(commutation) + ",\n";

    r.passed = ok && commutation < 1e-8;
    r.detail = "3 torus potentials, t in {1e-4,1e-3,1e-2}: margins nonnegative and >= eps/2 at "
               "t=1e-4: " + std::string(ok ? "yes" : "NO") +
               "; heat/dd^c commutation defect = " + g17(commutation) + " (tol 1e-8)";
    r.csv_outputs.emplace_back("criterion7_heat.csv", csv);
    return r;
}

// --- criterion 8: regularized maximum branch structure and closure ---

CriterionResult criterion8(std::uint64_t seed) {
    CriterionResult r;
    r.id = 8;
    r.name = "regularized maximum";
    Rng rng(seed);
    std::string csv = "check,value\n";

    // Bit-exact plain max outside the band.
    int exact_fail = 0;
    for (int i = 0; i < 100000; ++i) {
        const double eps = rng.uniform(1e-6, 2.0);
        const double x = rng.uniform(-10.0, 10.0);
        const double sep = eps * (1.0 + rng.uniform());
        const double y = rng.next_u64() % 2 ? x + sep : x - sep;
        if (regularized_max(x, y, eps) != std::max(x, y)) ++exact_fail;
    }
    csv += "bit_exact_failures," + std::to_string(exact_fail) + "\n";

    // Kernel matches the quartic spline inside the band; the spline's value
    // and first two derivatives join |t| at t = eps.
    double spline_dev = 0.0, join_dev = 0.0;
    for (const double eps : {0.1, 0.3, 1.7}) {
        for (int i = 0; i <= 20; ++i) {
            const double t = -eps + 2.0 * eps * i / 20.0;
            const double poly =
                -std::pow(t, 4) / (8 * eps * eps * eps) + 3 * t * t / (4 * eps) + 3 * eps / 8;
            spline_dev = std::max(spline_dev, std::abs(regmax_kernel(t, eps) - poly));
        }
        const double m = -std::pow(eps, 4) / (8 * eps * eps * eps) + 3 * eps * eps / (4 * eps) +
                         3 * eps / 8;
        const double mp = -eps * eps * eps / (2 * eps * eps * eps) + 3 * eps / (2 * eps);
        const double mpp = -3 * eps * eps / (2 * eps * eps * eps) + 3 / (2 * eps);
        join_dev = std::max({join_dev, std::abs(m - eps), std::abs(mp - 1.0), std::abs(mpp)});
    }
    csv += "spline_deviation," + g17(spline_dev) + "\n";
    csv += "join_deviation," + g17(join_dev) + "\n";

    // Closure: the regularized max of two psh quadratics keeps a margin
    // bounded below by the stencil truncation error.
    auto psd = [&](double ridge) {
        std::vector<cplx> a(4), m(4, cplx(0, 0));
        for (auto& v : a) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) m[i * 2 + j] += a[i * 2 + k] * std::conj(a[j * 2 + k]);
        m[0] += ridge;
        m[3] += ridge;
        return HermitianMatrix(2, m);
    };
    double closure_min = 1e300, closure_min_fine = 1e300;
    double h_coarse = 0.0, h_fine = 0.0;
    {
        const PotentialPtr f = quadratic_potential(psd(0.1), {0.6, -0.2, 0.1, 0.4});
        const PotentialPtr g = quadratic_potential(psd(0.1), {-0.5, 0.3, -0.2, -0.1}, 0.05);
        for (int pts : {25, 49}) {
            const GridDomain d = box_grid(2, pts, 0.5);
            const ScalarField rm = regularized_max(sample_potential(*f, d),
                                                   sample_potential(*g, d), 0.2);
            const ScalarField mf = psh_margin_field(rm, 1);
            double mn = 1e300;
            for (std::int64_t i = 0; i < d.size(); ++i)
                if (mf.masked_in(i)) mn = std::min(mn, mf.values[i]);
            if (pts == 25) {
                closure_min = mn;
                h_coarse = d.spacing[0];
            } else {
                closure_min_fine = mn;
                h_fine = d.spacing[0];
            }
        }
    }
    csv += "closure_min_margin_h," + g17(closure_min) + "\n";
    csv += "closure_min_margin_h2," + g17(closure_min_fine) + "\n";

    const bool closure_ok = closure_min >= -64.0 * h_coarse * h_coarse - 1e-9 &&
                            closure_min_fine >= -64.0 * h_fine * h_fine - 1e-9;
    r.passed = exact_fail == 0 && spline_dev <= 1e-12 && join_dev <= 1e-12 && closure_ok;
    r.detail = "bit-exact max outside band: " + std::to_string(exact_fail) +
               "/100000 failures; spline/join deviations " + g17(spline_dev) + "/" +
               g17(join_dev) + " (tol 1e-12); closure margins " + g17(closure_min) + " @h=" +
               g17(h_coarse) + ", " + g17(closure_min_fine) + " @h/2 (bound -64 h^2)";
    r.csv_outputs.emplace_back("criterion8_regmax.csv", csv);
    return r;
}

// --- criterion 9: the three neighbourhood-potential constructions ---

CriterionResult criterion9(std::uint64_t) {
    CriterionResult r;
    r.id = 9;
    r.name = "constructions";
    std::string csv = "check,value\n";
    bool ok = true;
    auto record = [&](const std::string& name, double value, bool pass) {
        csv += name + "," + g17(value) + "\n";
        if (!pass) ok = false;
    };

    // Bridge potential: identity on the unit ball, flat quadratic outside the
    // blending band, both cell-exact.
    {
        const PotentialPtr phi = quadratic_potential(HermitianMatrix::identity(1) * 0.25);
        const TorusEmbedResult te = torus_embedding_potential(phi, 1.0, 2.0, 0.1);
        record("embed_A", te.A, std::abs(te.A - 0.4) <= 1e-3);
        const GridDomain d = box_grid(1, 47, 2.3);
        int id_fail = 0, flat_fail = 0, flat_count = 0;
        double hess_dev = 0.0;
        for_each_interior(d, 0, [&](const std::vector<int>& idx, std::int64_t) {
            const std::vector<double> x = d.point(idx);
            const double pv = phi->value(x), vv = te.v->value(x), tv = te.phi_tilde->value(x);
            const double rr = x[0] * x[0] + x[1] * x[1];
            if (rr <= 1.0 && tv != pv) ++id_fail;
            if (vv - pv >= 0.1) {
                ++flat_count;
                if (tv != vv) ++flat_fail;
                const HermitianMatrix h = te.phi_tilde->ddc(x);
                hess_dev = std::max(hess_dev, std::abs(h(0, 0) - 2.0 * te.A));
            }
        });
        record("embed_identity_failures", id_fail, id_fail == 0);
        record("embed_flat_cells", flat_count, flat_count > 0);
        record("embed_flat_failures", flat_fail, flat_fail == 0);
        record("embed_flat_hessian_dev", hess_dev, hess_dev <= 1e-9);
    }

    // Gluing constant: the glued field stays psh.
    {
        const GridDomain d = box_grid(1, 33, 1.0);
        const ScalarField phi0 = ScalarField::sample(
            d, [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; });
        const ScalarField phi1 = ScalarField::sample(d, [](const std::vector<double>& x) {
            return 0.3 * (x[0] * x[0] - x[1] * x[1]) + 0.2 * x[0];
        });
        const ScalarField xi = ScalarField::sample(d, [](const std::vector<double>& x) {
            const double rr = std::sqrt(x[0] * x[0] + x[1] * x[1]);
            if (rr <= 0.4) return 1.0;
            if (rr >= 0.8) return 0.0;
            const double t = (0.8 - rr) / 0.4;
            return t * t * (3 - 2 * t);
        });
        const GlueResult gr = glue_constant(phi0, phi1, xi, 0.5, 1);
        record("glue_C", gr.C, gr.C >= 1.0);
        record("glue_min_margin", gr.min_margin, gr.min_margin >= -1e-8);
    }

    // Exhaustion potential: region masks match the analytic branch radii for
    // Z = {0} in C^2, phi = |z|^2, to one grid cell.
    {
        const PotentialPtr phi = quadratic_potential(HermitianMatrix::identity(2));
        const SubvarietyZ z = SubvarietyZ::point({cplx(0, 0), cplx(0, 0)});
        const GridDomain d = box_grid(2, 25, 1.0, 0.04);
        const double A = -0.8, B = 1.0, eps = 0.15;
        const ExhaustResult er = exhaustion_potential(phi, z, 1.0, A, B, eps, 2, d);
        record("exhaust_c_phi", er.c_phi, er.c_phi > 0.0);

        // The branch boundaries solve (1 - c_phi) r^2 - log r + A - B = +-eps/3,
        // a decreasing function of r on (0, 1).
        auto fval = [&](double rr) {
            return (1.0 - er.c_phi) * rr * rr - std::log(rr) + A - B;
        };
        auto solve = [&](double target) {
            double lo = 1e-8, hi = 1.0;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (fval(mid) > target ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        const double r_near = solve(eps / 3.0);   // psi == phi - B inside
        const double r_outer = solve(-eps / 3.0); // psi == chi1 - A outside
        double diag = 0.0;
        for (double h : d.spacing) diag += h * h;
        diag = std::sqrt(diag);

        int mask_fail = 0;
        double max_psi_w = -1e300;
        for_each_interior(d, 0, [&](const std::vector<int>& idx, std::int64_t f) {
            const double rr = z.distance(d.point(idx));
            if (rr < r_near - diag && !er.near_z_mask[f]) ++mask_fail;
            if (rr > r_near + diag && er.near_z_mask[f]) ++mask_fail;
            if (rr > r_outer + diag && !er.outer_mask[f]) ++mask_fail;
            if (rr < r_outer - diag && er.outer_mask[f]) ++mask_fail;
            if (er.w_mask[f]) max_psi_w = std::max(max_psi_w, er.psi.values[f]);
        });
        record("exhaust_r_near", r_near, r_near > 0.0);
        record("exhaust_r_outer", r_outer, r_outer > r_near);
        record("exhaust_mask_failures", mask_fail, mask_fail == 0);
        record("exhaust_max_psi_on_W", max_psi_w, max_psi_w <= 0.0);
        record("exhaust_min_margin", er.min_margin_away_from_pole,
               er.min_margin_away_from_pole >= -1e-8);
    }

    r.passed = ok;
    r.detail = std::string("bridge/glue/exhaustion checks ") + (ok ? "all passed" : "FAILED") +
               "; see criterion9_constructions.csv";
    r.csv_outputs.emplace_back("criterion9_constructions.csv", csv);
    return r;
}

// --- criterion 10: the singular integrability experiment ---

CriterionResult criterion10(std::uint64_t) {
    CriterionResult r;
    r.id = 10;
    r.name = "singular integrability experiment";
    SibonyConfig cfg; // beta = 1/2, n = 2, p = 1, N = 2,4,8,16, grid 48
    const SibonyReport rep = sibony_experiment(cfg);

    const std::size_t m = rep.integrals.size();
    const double stab = std::abs(rep.integrals[m - 1] - rep.integrals[m - 2]);
    const bool stab_ok = stab < 1e-3 * std::abs(rep.integrals[m - 1]);

    std::string csv = rep.csv();
    std::string rcsv = "r,integral\n";
    for (std::size_t i = 0; i < rep.r_values.size(); ++i)
        rcsv += g17(rep.r_values[i]) + "," + g17(rep.integrals_by_r[i]) + "\n";

    r.passed = stab_ok && rep.monotone && rep.cauchy_in_r;
    r.detail = "beta=1/2, n=2, p=1, grid 48: |I_16 - I_8| = " + g17(stab) + " (< 1e-3 |I_16| = " +
               g17(1e-3 * std::abs(rep.integrals[m - 1])) + "); monotone " +
               (rep.monotone ? "yes" : "NO") + "; exclusion sweep r=2^-3..2^-6 Cauchy " +
               (rep.cauchy_in_r ? "yes" : "NO") + "; smooth-case boundary check rel err " +
               g17(rep.smooth_check_rel_error);
    r.csv_outputs.emplace_back("criterion10_sibony.csv", csv);
    r.csv_outputs.emplace_back("criterion10_rsweep.csv", rcsv);
    return r;
}

// --- criterion 11: determinism of the CSV payloads ---

CriterionResult criterion11(std::uint64_t c1_seed, std::uint64_t c3_seed,
                            std::uint64_t c5_seed) {
    CriterionResult r;
    r.id = 11;
    r.name = "determinism";
    std::string csv = "payload,identical\n";
    bool ok = true;
    auto compare = [&](const std::string& name, const std::string& a, const std::string& b) {
        const bool same = a == b;
        csv += name + "," + std::to_string(same ? 1 : 0) + "\n";
        if (!same) ok = false;
    };

    {
        double w1 = 0.0, w2 = 0.0;
        compare("kyfan", c1_payload(c1_seed, w1), c1_payload(c1_seed, w2));
    }
    {
        double a1, a2, a3, b1, b2, b3;
        compare("comass", c3_payload(c3_seed, a1, a2, a3), c3_payload(c3_seed, b1, b2, b3));
    }
    {
        double m1 = 0.0, m2 = 0.0;
        compare("dc", c5_payload(c5_seed, m1), c5_payload(c5_seed, m2));
    }
    {
        SibonyConfig cfg;
        cfg.grid_points = 16;
        cfg.n_list = {2, 4};
        compare("sibony", sibony_experiment(cfg).csv(), sibony_experiment(cfg).csv());
    }

    r.passed = ok;
    r.detail = std::string("repeated generation with identical seeds: ") +
               (ok ? "all payloads byte-identical" : "MISMATCH");
    r.csv_outputs.emplace_back("criterion11_determinism.csv", csv);
    return r;
}

} // namespace

bool SuiteResult::all_passed() const {
    for (const CriterionResult& c : criteria)
        if (!c.passed) return false;
    return true;
}

std::string SuiteResult::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["all_passed"] = all_passed();
    j["criteria"] = nlohmann::json::array();
    for (const CriterionResult& c : criteria) {
        nlohmann::json cj;
        cj["id"] = c.id;
        cj["name"] = c.name;
        cj["passed"] = c.passed;
        cj["detail"] = c.detail;
        cj["seconds"] = c.seconds;
        cj["csv_files"] = nlohmann::json::array();
        for (const auto& [name, _] : c.csv_outputs) cj["csv_files"].push_back(name);
        j["criteria"].push_back(cj);
    }
    return j.dump(2);
}

SuiteResult run_suite(std::uint64_t seed) {
    SuiteResult out;
    out.seed = seed;
    Rng rng(seed);
    std::vector<std::uint64_t> s(12);
    for (auto& v : s) v = rng.next_u64();

    std::vector<std::function<CriterionResult()>> runners = {
        [&] { return criterion1(s[1]); },  [&] { return criterion2(s[2]); },
        [&] { return criterion3(s[3]); },  [&] { return criterion4(s[4]); },
        [&] { return criterion5(s[5]); },  [&] { return criterion6(s[6]); },
        [&] { return criterion7(s[7]); },  [&] { return criterion8(s[8]); },
        [&] { return criterion9(s[9]); },  [&] { return criterion10(s[10]); },
        [&] { return criterion11(s[1], s[3], s[5]); },
    };
    for (auto& run : runners) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult c = run();
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.criteria.push_back(std::move(c));
    }
    return out;
}

} // namespace kpsh
