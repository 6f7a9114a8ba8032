#include "kpsh/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <sstream>

namespace kpsh {

TorusEmbedResult torus_embedding_potential(PotentialPtr phi, double C, double R,
                                           double eps) {
    require(R > 1.0, "torus_embedding_potential: R must exceed 1");
    require(eps > 0.0 && C >= 0.0, "torus_embedding_potential: bad C or eps");
    const int n = phi->n();

    // Minimal A with A R^2 - A - eps > C + eps, small slack for strictness.
    const double A = (C + 2.0 * eps) / (R * R - 1.0) * (1.0 + 1e-6);

    TorusEmbedResult out;
    out.A = A;
    out.v = sum_potential({quadratic_potential(HermitianMatrix::identity(n) * A),
                           constant_potential(n, -A - eps)});
    out.phi_tilde = regmax_potential(phi, out.v, eps);
    return out;
}

ProductResult local_product_potential(const ScalarField& theta, double c1, double c2,
                                      const GridDomain& product_grid, int q) {
    theta.validate();
    product_grid.validate();
    const GridDomain& zd = theta.domain;
    const GridDomain& pd = product_grid;
    const int nz = zd.n;
    const int nb = pd.n - nz;
    require(nb >= 1, "local_product_potential: product grid adds no normal directions");
    require(q >= 1 && q <= pd.n, "local_product_potential: q out of range");
    for (int a = 0; a < zd.axes(); ++a) {
        require(zd.shape[a] == pd.shape[a] && zd.spacing[a] == pd.spacing[a] &&
                    zd.origin[a] == pd.origin[a],
                "local_product_potential: Z-factor axes do not match the product grid");
    }

    // Measured log-derivative ratios of theta on its interior.
    const ScalarField theta_margin_probe = theta; // alias for clarity
    double m1 = 0.0, m2 = 0.0;
    for_each_interior(zd, 1, [&](const std::vector<int>& idx, std::int64_t f) {
        const double tv = theta.values[f];
        require(tv > 0.0, "local_product_potential: theta must be positive");
        double g2 = 0.0;
        for (int a = 0; a < zd.axes(); ++a) {
            const std::int64_t fp = zd.neighbour(idx, a, 1);
            const std::int64_t fm = zd.neighbour(idx, a, -1);
            const double g = (theta.values[fp] - theta.values[fm]) / (2.0 * zd.spacing[a]);
            g2 += g * g;
        }
        m1 = std::max(m1, std::sqrt(g2) / tv);
        m2 = std::max(m2, 0.5 * ddc_at(theta_margin_probe, idx).frobenius() / tv);
    });
    if (m1 > c1 || m2 > c2)
        throw contract_error("local_product_potential: measured theta ratios exceed "
                             "the declared bounds");

    // phi(z, b) = theta(z) |b|^2 on the product grid.
    ProductResult out;
    out.measured_c1 = m1;
    out.measured_c2 = m2;
    out.phi.domain = pd;
    out.phi.values.resize(pd.size());
    {
        std::vector<int> idx(pd.axes(), 0);
        std::vector<int> zidx(zd.axes());
        for (std::int64_t f = 0; f < pd.size(); ++f) {
            for (int a = 0; a < zd.axes(); ++a) zidx[a] = idx[a];
            double b2 = 0.0;
            for (int a = zd.axes(); a < pd.axes(); ++a) {
                const double c = pd.origin[a] + pd.spacing[a] * idx[a];
                b2 += c * c;
            }
            out.phi.values[f] = theta.values[zd.flat(zidx)] * b2;
            for (int a = pd.axes() - 1; a >= 0; --a) {
                if (++idx[a] < pd.shape[a]) break;
                idx[a] = 0;
            }
        }
    }

    // Verify the four-term dd^c expansion
    //   theta * omega_B + dd^c(theta) |b|^2 + cross + cross*
    // against the finite-difference dd^c of the sampled product.
    std::vector<std::pair<double, double>> radius_margin;
    for_each_ddc(out.phi, [&](const std::vector<int>& idx, std::int64_t,
                              const HermitianMatrix& h_fd) {
        std::vector<int> zidx(zd.axes());
        for (int a = 0; a < zd.axes(); ++a) zidx[a] = idx[a];
        const std::int64_t zf = zd.flat(zidx);
        const double tv = theta.values[zf];
        const HermitianMatrix h_theta = ddc_at(theta, zidx);
        std::vector<cplx> theta_dz(nz);
        for (int j = 0; j < nz; ++j) {
            const std::int64_t xp = zd.neighbour(zidx, 2 * j, 1);
            const std::int64_t xm = zd.neighbour(zidx, 2 * j, -1);
            const std::int64_t yp = zd.neighbour(zidx, 2 * j + 1, 1);
            const std::int64_t ym = zd.neighbour(zidx, 2 * j + 1, -1);
            const double tx = (theta.values[xp] - theta.values[xm]) / (2.0 * zd.spacing[2 * j]);
            const double ty = (theta.values[yp] - theta.values[ym]) / (2.0 * zd.spacing[2 * j + 1]);
            theta_dz[j] = cplx{0.5 * tx, -0.5 * ty};
        }
        std::vector<cplx> b(nb);
        double b2 = 0.0;
        for (int k = 0; k < nb; ++k) {
            const int a = zd.axes() + 2 * k;
            b[k] = cplx{pd.origin[a] + pd.spacing[a] * idx[a],
                        pd.origin[a + 1] + pd.spacing[a + 1] * idx[a + 1]};
            b2 += std::norm(b[k]);
        }

        const int nn = pd.n;
        std::vector<cplx> e(nn * nn, cplx{0.0, 0.0});
        for (int j = 0; j < nz; ++j)
            for (int k = 0; k < nz; ++k) e[j * nn + k] = h_theta(j, k) * b2;
        for (int k = 0; k < nb; ++k) e[(nz + k) * nn + (nz + k)] += 2.0 * tv;
        for (int j = 0; j < nz; ++j)
            for (int k = 0; k < nb; ++k) {
                e[j * nn + (nz + k)] = 2.0 * theta_dz[j] * b[k];
                e[(nz + k) * nn + j] = std::conj(e[j * nn + (nz + k)]);
            }
        const HermitianMatrix h_expansion(nn, std::move(e), 1e-8);

        const HermitianMatrix diff = h_fd + h_expansion * -1.0;
        out.expansion_error = std::max(out.expansion_error, diff.frobenius());
        radius_margin.emplace_back(std::sqrt(b2), psh_margin(h_fd, q));
    });

    std::sort(radius_margin.begin(), radius_margin.end());
    double r_max = 0.0;
    for (const auto& [r, m] : radius_margin) {
        // The margin is exactly zero at b = 0 (the z-block of dd^c phi
        // vanishes there), so positivity is demanded only up to tolerance.
        if (m < -1e-9) break;
        r_max = r;
    }
    out.r_max = r_max;
    return out;
}

GlueResult glue_constant(const ScalarField& phi0, const ScalarField& phi1,
                         const ScalarField& xi, double eps, int q, double tol) {
    phi0.validate();
    phi1.validate();
    xi.validate();
    require(phi0.domain == phi1.domain && phi0.domain == xi.domain,
            "glue_constant: grid mismatch");
    require(eps > 0.0, "glue_constant: eps must be positive");
    const auto& d = phi0.domain;

    // X = supp(d xi): interior cells with a nonvanishing xi gradient.
    std::vector<std::uint8_t> x_mask(d.size(), 0);
    for_each_interior(d, 1, [&](const std::vector<int>& idx, std::int64_t f) {
        for (int a = 0; a < d.axes(); ++a) {
            const std::int64_t fp = d.neighbour(idx, a, 1);
            const std::int64_t fm = d.neighbour(idx, a, -1);
            if (std::abs(xi.values[fp] - xi.values[fm]) > 1e-12) {
                x_mask[f] = 1;
                return;
            }
        }
    });

    ScalarField xiphi1;
    xiphi1.domain = d;
    xiphi1.values.resize(d.size());
    for (std::size_t i = 0; i < xiphi1.values.size(); ++i)
        xiphi1.values[i] = xi.values[i] * phi1.values[i];

    GlueResult out;
    bool margin_ok = true;
    for_each_ddc(phi0, [&](const std::vector<int>& idx, std::int64_t f,
                           const HermitianMatrix& h0) {
        if (!x_mask[f]) return;
        if (psh_margin(h0, q) < q * eps - 1e-9) margin_ok = false;
        const HermitianMatrix hg = ddc_at(xiphi1, idx);
        out.overlap_norm = std::max(out.overlap_norm,
                                    -hermitian_eigenvalues(hg).values[0]);
    });
    if (!margin_ok)
        throw contract_error("glue_constant: phi0 margin below q*eps on the overlap");

    out.C = std::max(1.0, (1.0 + 1e-3) * out.overlap_norm / eps);
    out.glued.domain = d;
    out.glued.values.resize(d.size());
    for (std::size_t i = 0; i < out.glued.values.size(); ++i)
        out.glued.values[i] = out.C * phi0.values[i] + xiphi1.values[i];

    double min_margin = 1e300;
    for_each_ddc(out.glued, [&](const std::vector<int>&, std::int64_t,
                                const HermitianMatrix& h) {
        min_margin = std::min(min_margin, psh_margin(h, q));
    });
    out.min_margin = min_margin;
    if (min_margin < -tol)
        throw consistency_error("glue_constant: glued potential lost positivity");
    return out;
}

ExhaustResult exhaustion_potential(PotentialPtr phi, const SubvarietyZ& z,
                                   double lambda, double A, double B, double eps,
                                   int q, const GridDomain& grid) {
    grid.validate();
    require(z.dim_c <= q - 1, "exhaustion_potential: need dim_C Z <= q - 1");
    require(eps > 0.0, "exhaustion_potential: eps must be positive");
    const PotentialPtr chi = log_distance_potential(z, lambda);
    const double h_max = *std::max_element(grid.spacing.begin(), grid.spacing.end());

    // Rescale so dd^c(c_phi * phi) ^ omega^{q-1} > omega^q on the grid,
    // i.e. c_phi * margin_q(dd^c phi) >= q pointwise.
    double min_margin = 1e300;
    ScalarField phi_s = ScalarField::sample(
        grid, [&](const std::vector<double>& x) { return phi->value(x); });
    for_each_interior(grid, 0, [&](const std::vector<int>& idx, std::int64_t) {
        min_margin = std::min(min_margin, psh_margin(phi->ddc(grid.point(idx)), q));
    });
    require(min_margin > 0.0,
            "exhaustion_potential: phi is not strictly omega^q-psh on the grid");
    const double c_phi = (1.0 + 1e-3) * static_cast<double>(q) / min_margin;

    ExhaustResult out;
    out.c_phi = c_phi;
    ScalarField chi1;
    chi1.domain = grid;
    chi1.values.resize(grid.size());
    out.w_mask.assign(grid.size(), 0);
    out.near_z_mask.assign(grid.size(), 0);
    out.outer_mask.assign(grid.size(), 0);
    out.psi.domain = grid;
    out.psi.values.resize(grid.size());

    std::vector<int> idx(grid.axes(), 0);
    bool precondition_ok = true;
    for (std::int64_t f = 0; f < grid.size(); ++f) {
        const std::vector<double> x = grid.point(idx);
        const double chi1v = c_phi * phi_s.values[f] + chi->value(x);
        chi1.values[f] = chi1v;
        const double low = phi_s.values[f] - B;
        const double high = chi1v - A;
        out.psi.values[f] = regularized_max(low, high, eps / 3.0);
        if (chi1v <= A) {
            out.w_mask[f] = 1;
            if (!(phi_s.values[f] < B - eps)) precondition_ok = false;
        }
        if (high - low < -eps / 3.0) out.near_z_mask[f] = 1;
        if (high - low > eps / 3.0) out.outer_mask[f] = 1;
        for (int a = grid.axes() - 1; a >= 0; --a) {
            if (++idx[a] < grid.shape[a]) break;
            idx[a] = 0;
        }
    }
    if (!precondition_ok)
        throw contract_error("exhaustion_potential: phi < B - eps fails on W");

    double min_margin_psi = 1e300;
    for_each_ddc(out.psi, [&](const std::vector<int>& i2, std::int64_t,
                              const HermitianMatrix& h) {
        if (chi->singular_near(grid.point(i2), 3.0 * h_max)) return;
        min_margin_psi = std::min(min_margin_psi, psh_margin(h, q));
    });
    out.min_margin_away_from_pole = min_margin_psi;
    return out;
}

bool EtaField::bit_identical_on(const EtaField& o,
                                const std::vector<std::uint8_t>& mask) const {
    if (n != o.n || flat_index.size() != o.flat_index.size()) return false;
    const std::size_t block = static_cast<std::size_t>(n) * n;
    for (std::size_t i = 0; i < flat_index.size(); ++i) {
        if (flat_index[i] != o.flat_index[i]) return false;
        if (!mask.empty() && mask[flat_index[i]] == 0) continue;
        if (std::memcmp(&entries[i * block], &o.entries[i * block],
                        block * sizeof(cplx)) != 0)
            return false;
    }
    return true;
}

TruncationResult pole_truncation_sequence(PotentialPtr chi1, double eps,
                                          const std::vector<double>& n_list, int p,
                                          const GridDomain& grid,
                                          const std::vector<std::uint8_t>& v_mask) {
    grid.validate();
    require(eps > 0.0, "pole_truncation_sequence: eps must be positive");
    require(p >= 1 && p <= grid.n, "pole_truncation_sequence: p out of range");

    TruncationResult out;
    for (double N : n_list) {
        ScalarField phi_n = ScalarField::sample(grid, [&](const std::vector<double>& x) {
            return regularized_max(-N, chi1->value(x), eps);
        });
        EtaField eta;
        eta.domain = grid;
        eta.n = grid.n;
        for_each_ddc(phi_n, [&](const std::vector<int>&, std::int64_t f,
                                const HermitianMatrix& h) {
            eta.flat_index.push_back(f);
            eta.entries.insert(eta.entries.end(), h.entries().begin(), h.entries().end());
        });
        // Positivity is a property of the potential itself; near an
        // unresolved pole the finite-difference Hessian says nothing, so the
        // margin is evaluated from the analytic Hessian of the composite.
        const PotentialPtr phi_n_pot =
            regmax_potential(constant_potential(grid.n, -N), chi1, eps);
        double min_margin = 1e300;
        for_each_interior(grid, 0, [&](const std::vector<int>& idx, std::int64_t) {
            const std::vector<double> x = grid.point(idx);
            if (chi1->singular_near(x, 1e-9)) return;
            min_margin = std::min(min_margin, psh_margin(phi_n_pot->ddc(x), p));
        });
        out.n_values.push_back(N);
        out.phi_n.push_back(std::move(phi_n));
        out.eta_n.push_back(std::move(eta));
        out.min_margins.push_back(min_margin);
    }
    out.stabilization_index = -1;
    for (int i = 0; i < static_cast<int>(out.eta_n.size()); ++i) {
        bool stable = true;
        for (std::size_t j = i; j < out.eta_n.size(); ++j)
            if (!out.eta_n[j].bit_identical_on(out.eta_n.back(), v_mask)) stable = false;
        if (stable) {
            out.stabilization_index = i;
            break;
        }
    }
    return out;
}

namespace {

// Coefficient of (i sum A dz dzbar) ^ (i sum B dz dzbar) relative to vol on
// C^2: tr(A) tr(B) - tr(A B).
double wedge11_coeff_n2(const HermitianMatrix& a, const HermitianMatrix& b) {
    const cplx tra = a(0, 0) + a(1, 1);
    const cplx trb = b(0, 0) + b(1, 1);
    cplx trab{0.0, 0.0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) trab += a(i, j) * b(j, i);
    return (tra * trb - trab).real();
}

} // namespace

double sibony_integral(const Potential& theta_potential, const EtaField& eta, int p,
                       const std::vector<std::uint8_t>& u_mask,
                       double exclusion_radius) {
    const GridDomain& d = eta.domain;
    const int n = d.n;
    require(n - p == 1, "sibony_integral: theta must be a (1,1)-form (n - p = 1)");
    require(eta.n == n, "sibony_integral: dimension mismatch");

    const ComplexForm w_pm1 = omega_power(HermitianMatrix::identity(n), p - 1, false);
    const ComplexForm v = vol_form(n);
    MultiIndex full(n);
    std::iota(full.begin(), full.end(), 0);
    const cplx vol_coeff = v.coeff(full, full);
    double cell = std::pow(2.0, n);
    for (int a = 0; a < d.axes(); ++a) cell *= d.spacing[a];

    bool any = false;
    double acc = 0.0;
    const std::size_t block = static_cast<std::size_t>(n) * n;
    for (std::size_t i = 0; i < eta.flat_index.size(); ++i) {
        const std::int64_t f = eta.flat_index[i];
        if (!u_mask.empty() && u_mask[f] == 0) continue;
        const std::vector<double> x = d.point(d.unflat(f));
        if (theta_potential.singular_near(x, exclusion_radius)) continue;
        any = true;
        std::vector<cplx> he(eta.entries.begin() + i * block,
                             eta.entries.begin() + (i + 1) * block);
        const HermitianMatrix h(n, std::move(he), 1e-8);
        const ComplexForm top = wedge(
            wedge(form_from_hermitian(theta_potential.ddc(x)), form_from_hermitian(h)),
            w_pm1);
        acc += (top.coeff(full, full) / vol_coeff).real();
    }
    require(any, "sibony_integral: quadrature mask is empty");
    return acc * cell;
}

std::string SibonyReport::csv() const {
    std::ostringstream os;
    os << "N,I_N,stabilization_index\n";
    char buf[64];
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", n_values[i], integrals[i],
                      stabilization_index);
        os << buf;
    }
    return os.str();
}

SibonyReport sibony_experiment(const SibonyConfig& cfg) {
    require(cfg.n == 2 && cfg.p == 1, "sibony_experiment: implemented for n=2, p=1");
    require(cfg.beta > 0.0 && cfg.beta < 1.0, "sibony_experiment: need 0 < beta < 1");
    require(cfg.n - cfg.p >= 1 + cfg.p - 1,
            "sibony_experiment: codimension precondition"); // codim {0} = n >= p+1
    require(cfg.n >= cfg.p + 1, "sibony_experiment: codim Z >= p+1 required");

    const int g = cfg.grid_points;
    GridDomain d;
    d.n = cfg.n;
    const double h = 2.0 * cfg.half_width / g;
    // Cell-centered, staggered off the singular point at the origin.
    for (int a = 0; a < 2 * cfg.n; ++a) {
        d.shape.push_back(g);
        d.spacing.push_back(h);
        d.origin.push_back(-cfg.half_width + 0.5 * h);
    }
    d.validate();

    const PotentialPtr theta_pot = radial_power_potential(cfg.n, cfg.beta);
    const SubvarietyZ z0 = SubvarietyZ::point(std::vector<cplx>(cfg.n, cplx{0.0, 0.0}));
    const PotentialPtr chi1 = log_distance_potential(z0, 1.0);

    const double cell = std::pow(2.0, cfg.n) * std::pow(h, 2 * cfg.n);
    const double r_excl = 2.0 * h;
    std::vector<double> radii;
    for (int k = 3; k <= 6; ++k) radii.push_back(std::pow(2.0, -k));

    SibonyReport rep;
    rep.r_values = radii;
    rep.integrals_by_r.assign(radii.size(), 0.0);

    // phi_N sampled around a stencil analytically; dd^c by the same central
    // differences used everywhere else.
    auto phi_n_at = [&](double N, const std::vector<double>& x) {
        return regularized_max(-N, chi1->value(x), cfg.eps);
    };
    auto ddc_fd = [&](double N, const std::vector<double>& x) {
        std::vector<cplx> e(cfg.n * cfg.n);
        std::vector<double> xp(x);
        auto ev = [&](int a1, int s1, int a2, int s2) {
            xp = x;
            xp[a1] += s1 * h;
            if (a2 >= 0) xp[a2] += s2 * h;
            return phi_n_at(N, xp);
        };
        const double center = phi_n_at(N, x);
        for (int j = 0; j < cfg.n; ++j) {
            const int xj = 2 * j, yj = 2 * j + 1;
            const double sxx = (ev(xj, 1, -1, 0) - 2.0 * center + ev(xj, -1, -1, 0)) / (h * h);
            const double syy = (ev(yj, 1, -1, 0) - 2.0 * center + ev(yj, -1, -1, 0)) / (h * h);
            e[j * cfg.n + j] = cplx{0.5 * (sxx + syy), 0.0};
            for (int k = j + 1; k < cfg.n; ++k) {
                const int xk = 2 * k, yk = 2 * k + 1;
                auto cross = [&](int a, int b) {
                    return (ev(a, 1, b, 1) - ev(a, 1, b, -1) - ev(a, -1, b, 1) +
                            ev(a, -1, b, -1)) /
                           (4.0 * h * h);
                };
                const double re = 0.5 * (cross(xj, xk) + cross(yj, yk));
                const double im = 0.5 * (cross(xj, yk) - cross(yj, xk));
                e[j * cfg.n + k] = cplx{re, im};
                e[k * cfg.n + j] = cplx{re, -im};
            }
        }
        return HermitianMatrix(cfg.n, std::move(e), 1e-8);
    };

    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const double N = cfg.n_list[ni];
        const bool last = ni + 1 == cfg.n_list.size();
        double acc = 0.0;
        std::vector<double> acc_r(radii.size(), 0.0);
        std::vector<int> idx(d.axes(), 1);
        for_each_interior(d, 1, [&](const std::vector<int>& id2, std::int64_t) {
            const std::vector<double> x = d.point(id2);
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            const double r = std::sqrt(r2);
            if (r <= r_excl && !last) return;
            double c_val = 0.0;
            bool have = false;
            if (r > r_excl || last) {
                const HermitianMatrix hn = ddc_fd(N, x);
                c_val = wedge11_coeff_n2(theta_pot->ddc(x), hn);
                have = true;
            }
            if (!have) return;
            if (r > r_excl) acc += c_val;
            if (last)
                for (std::size_t k = 0; k < radii.size(); ++k)
                    if (r > radii[k]) acc_r[k] += c_val;
        });
        rep.n_values.push_back(N);
        rep.integrals.push_back(acc * cell);
        if (last)
            for (std::size_t k = 0; k < radii.size(); ++k)
                rep.integrals_by_r[k] = acc_r[k] * cell;
    }

    // Monotone within twice the quadrature error. The error scale is
    // estimated from the finest shell of the exclusion-radius sweep (the
    // mass the fixed grid cannot resolve near the singular point).
    const std::size_t nr = rep.integrals_by_r.size();
    const double quad_err =
        nr >= 2 ? std::abs(rep.integrals_by_r[nr - 1] - rep.integrals_by_r[nr - 2]) : 0.0;
    for (std::size_t i = 1; i < rep.integrals.size(); ++i)
        if (rep.integrals[i] <
            rep.integrals[i - 1] -
                (2.0 * quad_err + cfg.tol * std::max(1.0, std::abs(rep.integrals[i]))))
            rep.monotone = false;
    const double last_i = rep.integrals.back();
    const double prev_i = rep.integrals[rep.integrals.size() - 2];
    if (std::abs(last_i - prev_i) < cfg.tol * std::abs(last_i))
        rep.stabilization_index = static_cast<int>(rep.integrals.size()) - 2;

    // Cauchy behaviour of the exclusion-radius sweep: shell contributions
    // (differences between successive radii) must decrease.
    for (std::size_t k = 2; k < rep.integrals_by_r.size(); ++k) {
        const double d1 = std::abs(rep.integrals_by_r[k - 1] - rep.integrals_by_r[k - 2]);
        const double d2 = std::abs(rep.integrals_by_r[k] - rep.integrals_by_r[k - 1]);
        if (d2 > d1) rep.cauchy_in_r = false;
    }

    // Smooth cross-check with theta = omega_std: volume quadrature of
    // omega ^ dd^c(phi_N) against the Stokes boundary integral of
    // omega ^ d^c(phi_N) over the faces of U.
    {
        const double N = cfg.n_list.size() > 1 ? cfg.n_list[1] : cfg.n_list[0];
        const PotentialPtr phi_n_pot =
            regmax_potential(constant_potential(cfg.n, -N), chi1, cfg.eps);

        double vol_acc = 0.0;
        for_each_interior(d, 1, [&](const std::vector<int>& id2, std::int64_t) {
            const std::vector<double> x = d.point(id2);
            const HermitianMatrix hn = ddc_fd(N, x);
            vol_acc += wedge11_coeff_n2(HermitianMatrix::identity(cfg.n), hn);
        });
        const double vol_integral = vol_acc * cell;

        // U = [-hw + h, hw - h]^4 (union of interior cells); boundary faces
        // are 3-dim boxes with cell-centered quadrature points.
        const GenForm omega_g = gen_from_complex_form(omega_std(cfg.n));
        const double lo = -cfg.half_width + h;
        const double hi = cfg.half_width - h;
        double bdry = 0.0;
        for (int a = 0; a < d.axes(); ++a) {
            std::vector<int> tangent;
            for (int b = 0; b < d.axes(); ++b)
                if (b != a) tangent.push_back(b);
            std::vector<std::vector<double>> frame(3, std::vector<double>(d.axes(), 0.0));
            for (int t = 0; t < 3; ++t) frame[t][tangent[t]] = 1.0;
            const double orient = (a % 2 == 0) ? 1.0 : -1.0; // parity of (a, rest)

            for (int side = 0; side < 2; ++side) {
                const double face_coord = side == 0 ? hi : lo;
                const double sgn = (side == 0 ? 1.0 : -1.0) * orient;
                // 3D cell-centered quadrature on the face.
                const int m = g - 2;
                std::vector<int> fi(3, 0);
                double face_acc = 0.0;
                while (true) {
                    std::vector<double> x(d.axes());
                    x[a] = face_coord;
                    for (int t = 0; t < 3; ++t)
                        x[tangent[t]] = lo + (fi[t] + 0.5) * h;
                    const auto grad = phi_n_pot->gradient(x);
                    GenForm dc;
                    dc.n = cfg.n;
                    dc.degree = 1;
                    for (int j = 0; j < cfg.n; ++j) {
                        const cplx phi_z{0.5 * grad[2 * j], -0.5 * grad[2 * j + 1]};
                        dc.add({j}, cplx{0.0, -1.0} * phi_z);
                        dc.add({cfg.n + j}, cplx{0.0, 1.0} * std::conj(phi_z));
                    }
                    const GenForm beta = gen_wedge(omega_g, dc);
                    face_acc += gen_eval_on_real_vectors(beta, frame).real();
                    int t = 2;
                    while (t >= 0) {
                        if (++fi[t] < m) break;
                        fi[t] = 0;
                        --t;
                    }
                    if (t < 0) break;
                }
                bdry += sgn * face_acc * h * h * h;
            }
        }
        rep.smooth_check_rel_error =
            std::abs(vol_integral - bdry) / std::max(1e-300, std::abs(bdry));
    }
    return rep;
}

} // namespace kpsh
