#include "kpsh/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace kpsh {

void GenForm::add(const std::vector<int>& ids, cplx c) {
    if (std::abs(c) < kCoeffPrune) return;
    auto [it, inserted] = coeffs.try_emplace(ids, c);
    if (!inserted) {
        it->second += c;
        if (std::abs(it->second) < kCoeffPrune) coeffs.erase(it);
    }
}

cplx GenForm::get(const std::vector<int>& ids) const {
    auto it = coeffs.find(ids);
    return it == coeffs.end() ? cplx{0.0, 0.0} : it->second;
}

double GenForm::max_coeff_distance(const GenForm& o) const {
    double d = 0.0;
    for (const auto& [k, c] : coeffs) d = std::max(d, std::abs(c - o.get(k)));
    for (const auto& [k, c] : o.coeffs) d = std::max(d, std::abs(c - get(k)));
    return d;
}

GenForm gen_wedge(const GenForm& a, const GenForm& b) {
    require(a.n == b.n, "gen_wedge: dimension mismatch");
    GenForm out;
    out.n = a.n;
    out.degree = a.degree + b.degree;
    MultiIndex merged;
    for (const auto& [ka, ca] : a.coeffs)
        for (const auto& [kb, cb] : b.coeffs) {
            const int s = shuffle_sign(ka, kb, merged);
            if (s == 0) continue;
            out.add(merged, ca * cb * static_cast<double>(s));
        }
    return out;
}

GenForm gen_from_complex_form(const ComplexForm& f) {
    GenForm out;
    out.n = f.n();
    out.degree = f.degree();
    for (const auto& [key, c] : f.coeffs()) {
        std::vector<int> ids;
        ids.reserve(f.degree());
        for (int i : key.I) ids.push_back(i);
        for (int j : key.J) ids.push_back(f.n() + j);
        out.add(ids, c);
    }
    return out;
}

GenForm gen_contract(const GenForm& f, const std::vector<double>& v) {
    const int n = f.n;
    auto pairing = [&](int id) -> cplx {
        if (id < n) return cplx{v[2 * id], v[2 * id + 1]};           // dz_id
        return cplx{v[2 * (id - n)], -v[2 * (id - n) + 1]};          // dzbar
    };
    GenForm out;
    out.n = n;
    out.degree = f.degree - 1;
    for (const auto& [ids, c] : f.coeffs) {
        double sign = 1.0;
        for (std::size_t m = 0; m < ids.size(); ++m) {
            const cplx pv = pairing(ids[m]);
            if (std::abs(pv) >= kCoeffPrune) {
                std::vector<int> rest;
                rest.reserve(ids.size() - 1);
                for (std::size_t r = 0; r < ids.size(); ++r)
                    if (r != m) rest.push_back(ids[r]);
                out.add(rest, c * pv * sign);
            }
            sign = -sign;
        }
    }
    return out;
}

cplx gen_eval_on_real_vectors(const GenForm& f,
                              const std::vector<std::vector<double>>& vectors) {
    const int d = f.degree;
    require(static_cast<int>(vectors.size()) == d,
            "gen_eval_on_real_vectors: wrong number of vectors");
    cplx acc{0.0, 0.0};
    std::vector<cplx> m(d * d);
    for (const auto& [ids, c] : f.coeffs) {
        for (int col = 0; col < d; ++col) {
            const auto& v = vectors[col];
            for (int row = 0; row < d; ++row) {
                const int id = ids[row];
                m[row * d + col] = id < f.n
                                       ? cplx{v[2 * id], v[2 * id + 1]}
                                       : cplx{v[2 * (id - f.n)], -v[2 * (id - f.n) + 1]};
            }
        }
        acc += c * detail::det_small(m, d);
    }
    return acc;
}

namespace {

// Fast stencil access with torus wrapping.
struct Stencil {
    const ScalarField& phi;
    std::vector<std::int64_t> strides;
    bool torus;

    explicit Stencil(const ScalarField& f) : phi(f) {
        const auto& d = f.domain;
        strides.assign(d.axes(), 1);
        for (int a = d.axes() - 2; a >= 0; --a)
            strides[a] = strides[a + 1] * d.shape[a + 1];
        torus = d.topology == GridDomain::Topology::torus;
    }

    std::int64_t shift(const std::vector<int>& idx, std::int64_t f, int axis,
                       int step) const {
        if (!torus) return f + step * strides[axis];
        const int s = phi.domain.shape[axis];
        int v = idx[axis] + step;
        v %= s;
        if (v < 0) v += s;
        return f + (v - idx[axis]) * strides[axis];
    }

    double at(const std::vector<int>& idx, std::int64_t f, int a1, int s1) const {
        return phi.values[shift(idx, f, a1, s1)];
    }
    double at(const std::vector<int>& idx, std::int64_t f, int a1, int s1, int a2,
              int s2) const {
        return phi.values[shift(idx, shift(idx, f, a1, s1), a2, s2)];
    }
};

} // namespace

HermitianMatrix ddc_at(const ScalarField& phi, const std::vector<int>& idx) {
    const Stencil st(phi);
    const auto& d = phi.domain;
    const std::int64_t f = d.flat(idx);
    const int n = d.n;

    auto second = [&](int a) {
        const double h = d.spacing[a];
        return (st.at(idx, f, a, 1) - 2.0 * phi.values[f] + st.at(idx, f, a, -1)) /
               (h * h);
    };
    auto cross = [&](int a, int b) {
        const double ha = d.spacing[a], hb = d.spacing[b];
        return (st.at(idx, f, a, 1, b, 1) - st.at(idx, f, a, 1, b, -1) -
                st.at(idx, f, a, -1, b, 1) + st.at(idx, f, a, -1, b, -1)) /
               (4.0 * ha * hb);
    };

    std::vector<cplx> h(n * n);
    for (int j = 0; j < n; ++j) {
        const int xj = 2 * j, yj = 2 * j + 1;
        h[j * n + j] = cplx{0.5 * (second(xj) + second(yj)), 0.0};
        for (int k = j + 1; k < n; ++k) {
            const int xk = 2 * k, yk = 2 * k + 1;
            const double re = 0.5 * (cross(xj, xk) + cross(yj, yk));
            const double im = 0.5 * (cross(xj, yk) - cross(yj, xk));
            h[j * n + k] = cplx{re, im};
            h[k * n + j] = cplx{re, -im};
        }
    }
    return HermitianMatrix(n, std::move(h), 1e-10);
}

void for_each_ddc(const ScalarField& phi,
                  const std::function<void(const std::vector<int>&, std::int64_t,
                                           const HermitianMatrix&)>& fn) {
    phi.validate();
    for_each_interior(phi.domain, 1, [&](const std::vector<int>& idx, std::int64_t f) {
        fn(idx, f, ddc_at(phi, idx));
    });
}

HermitianField ddc_field(const ScalarField& phi) {
    phi.validate();
    HermitianField out;
    out.domain = phi.domain;
    const int pad = phi.domain.topology == GridDomain::Topology::torus ? 0 : 1;
    for (int a = 0; a < phi.domain.axes(); ++a) {
        out.interior_lo.push_back(pad);
        out.interior_hi.push_back(phi.domain.shape[a] - 1 - pad);
    }
    for_each_ddc(phi, [&](const std::vector<int>&, std::int64_t f, const HermitianMatrix& h) {
        out.values.push_back(h);
        out.flat_index.push_back(f);
    });
    return out;
}

ScalarField psh_margin_field(const ScalarField& phi, int q) {
    require(q >= 1 && q <= phi.domain.n, "psh_margin_field: q out of range");
    ScalarField out;
    out.domain = phi.domain;
    out.values.assign(phi.values.size(), 0.0);
    out.mask.assign(phi.values.size(), 0);
    for_each_ddc(phi, [&](const std::vector<int>&, std::int64_t f, const HermitianMatrix& h) {
        if (!phi.masked_in(f)) return;
        out.values[f] = psh_margin(h, q);
        out.mask[f] = 1;
    });
    return out;
}

DcResult dc_and_dcal(const ScalarField& phi, int q) {
    phi.validate();
    const auto& d = phi.domain;
    const int n = d.n;
    require(q >= 1 && q <= n, "dc_and_dcal: q out of range");

    const GenForm omega_g = gen_from_complex_form(omega_std(n));
    GenForm omega_qm1;
    omega_qm1.n = n;
    omega_qm1.degree = 0;
    omega_qm1.add({}, cplx{1.0, 0.0});
    double qm1_fact = 1.0;
    for (int i = 1; i <= q - 1; ++i) {
        omega_qm1 = gen_wedge(omega_qm1, omega_g);
        qm1_fact *= i;
    }
    GenForm omega_q_norm = gen_wedge(omega_qm1, omega_g);
    for (auto& [k, c] : omega_q_norm.coeffs) c /= qm1_fact * q;

    DcResult out;
    const Stencil st(phi);
    for_each_interior(d, 2, [&](const std::vector<int>& idx, std::int64_t f) {
        // Second-order gradient for the d^c route.
        std::vector<double> g2(d.axes()), g4(d.axes());
        for (int a = 0; a < d.axes(); ++a) {
            const double h = d.spacing[a];
            g2[a] = (st.at(idx, f, a, 1) - st.at(idx, f, a, -1)) / (2.0 * h);
            // Fourth-order gradient for the contraction route, so the
            // residual isolates the second-order truncation error.
            g4[a] = (-st.at(idx, f, a, 2) + 8.0 * st.at(idx, f, a, 1) -
                     8.0 * st.at(idx, f, a, -1) + st.at(idx, f, a, -2)) /
                    (12.0 * h);
        }

        GenForm dc;
        dc.n = n;
        dc.degree = 1;
        for (int j = 0; j < n; ++j) {
            const cplx phi_z{0.5 * g2[2 * j], -0.5 * g2[2 * j + 1]};
            dc.add({j}, cplx{0.0, -1.0} * phi_z);
            dc.add({n + j}, cplx{0.0, 1.0} * std::conj(phi_z));
        }

        GenForm route_a = gen_wedge(dc, omega_qm1);
        for (auto& [k, c] : route_a.coeffs) c /= qm1_fact;

        // Sharp of d(phi) under the Kaehler metric g = 2 * Euclidean.
        std::vector<double> sharp(d.axes());
        for (int a = 0; a < d.axes(); ++a) sharp[a] = 0.5 * g4[a];
        GenForm route_b = gen_contract(omega_q_norm, sharp);

        out.residual = std::max(out.residual, route_a.max_coeff_distance(route_b));
        out.dc_oneform.push_back(std::move(dc));
        out.dcal.push_back(std::move(route_a));
        out.dcal_contract.push_back(std::move(route_b));
        out.flat_index.push_back(f);
    });
    return out;
}

double integral_criterion(const ScalarField& phi, const ScalarField& bump,
                          const ComplexForm& monomial, int q) {
    phi.validate();
    bump.validate();
    require(phi.domain == bump.domain, "integral_criterion: grid mismatch");
    const auto& d = phi.domain;
    const int n = d.n;
    require(q >= 1 && q <= n, "integral_criterion: q out of range");
    require(monomial.p() == n - q && monomial.q() == n - q,
            "integral_criterion: test monomial must be (n-q, n-q)");

    // Compact support: the bump must vanish within two cells of a box boundary.
    if (d.topology == GridDomain::Topology::box) {
        std::vector<int> idx(d.axes(), 0);
        for (std::int64_t f = 0; f < d.size(); ++f) {
            bool near_boundary = false;
            for (int a = 0; a < d.axes(); ++a)
                if (idx[a] < 2 || idx[a] > d.shape[a] - 3) near_boundary = true;
            if (near_boundary && bump.values[f] != 0.0)
                throw contract_error("integral_criterion: support touches boundary");
            for (int a = d.axes() - 1; a >= 0; --a) {
                if (++idx[a] < d.shape[a]) break;
                idx[a] = 0;
            }
        }
    }

    const ComplexForm w_qm1 = omega_power(HermitianMatrix::identity(n), q - 1, false);
    const ComplexForm v = vol_form(n);
    MultiIndex full(n);
    for (int i = 0; i < n; ++i) full[i] = i;
    const cplx vol_coeff = v.coeff(full, full);

    double cell = 1.0;
    for (int a = 0; a < d.axes(); ++a) cell *= d.spacing[a];
    cell *= std::pow(2.0, n); // vol = 2^n dx0 dy0 ... as a measure

    double acc = 0.0;
    for_each_ddc(bump, [&](const std::vector<int>&, std::int64_t f, const HermitianMatrix& hb) {
        const ComplexForm top = wedge(wedge(w_qm1, form_from_hermitian(hb)), monomial);
        const cplx c = top.coeff(full, full) / vol_coeff;
        acc += phi.values[f] * c.real();
    });
    return acc * cell;
}

PlaneReport plane_subharmonicity(const ScalarField& phi, int q, int planes,
                                 std::uint64_t seed, bool refine) {
    phi.validate();
    const auto& d = phi.domain;
    const int n = d.n;
    require(q >= 1 && q <= n, "plane_subharmonicity: q out of range");
    const int pad = d.topology == GridDomain::Topology::torus ? 0 : 1;
    for (int a = 0; a < d.axes(); ++a)
        require(d.shape[a] > 2 * pad, "plane_subharmonicity: no interior points");

    Rng root(seed);
    PlaneReport rep;
    std::vector<int> best_idx;
    std::vector<std::vector<cplx>> best_cols;
    for (int t = 0; t < planes; ++t) {
        Rng rng = root.spawn(static_cast<std::uint64_t>(t));
        std::vector<int> idx(d.axes());
        for (int a = 0; a < d.axes(); ++a)
            idx[a] = rng.uniform_int(pad, d.shape[a] - 1 - pad);
        const HermitianMatrix h = ddc_at(phi, idx);
        const ComplexFrame p = ComplexFrame::random(n, q, rng);
        double tr = 0.0;
        for (int k = 0; k < q; ++k) {
            const auto& c = p.column(k);
            for (int i = 0; i < n; ++i) {
                cplx hc{0.0, 0.0};
                for (int j = 0; j < n; ++j) hc += h(i, j) * c[j];
                tr += (std::conj(c[i]) * hc).real();
            }
        }
        if (tr < rep.min_trace) {
            rep.min_trace = tr;
            best_idx = idx;
            best_cols = p.columns();
        }
    }
    if (refine && !best_idx.empty()) {
        const HermitianMatrix h = ddc_at(phi, best_idx);
        rep.min_trace = std::min(rep.min_trace, kyfan_refine(h, best_cols));
    }
    rep.argmin_idx = best_idx;
    rep.argmin_frame = best_cols;
    return rep;
}

double regmax_kernel(double t, double eps) {
    require(eps > 0.0, "regularized_max: eps must be positive");
    const double a = std::abs(t);
    if (a >= eps) return a;
    const double t2 = t * t;
    return -t2 * t2 / (8.0 * eps * eps * eps) + 3.0 * t2 / (4.0 * eps) + 3.0 * eps / 8.0;
}

double regularized_max(double x, double y, double eps) {
    require(eps > 0.0, "regularized_max: eps must be positive");
    // Bit-exact plain max outside the band.
    if (x - y >= eps) return x;
    if (y - x >= eps) return y;
    return 0.5 * ((x + y) + regmax_kernel(x - y, eps));
}

ScalarField regularized_max(const ScalarField& f, const ScalarField& g, double eps) {
    require(f.domain == g.domain, "regularized_max: grid mismatch");
    ScalarField out;
    out.domain = f.domain;
    out.values.resize(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out.values[i] = regularized_max(f.values[i], g.values[i], eps);
    if (!f.mask.empty() || !g.mask.empty()) {
        out.mask.assign(f.values.size(), 1);
        for (std::size_t i = 0; i < f.values.size(); ++i)
            out.mask[i] = static_cast<std::uint8_t>(
                f.masked_in(static_cast<std::int64_t>(i)) &&
                g.masked_in(static_cast<std::int64_t>(i)));
    }
    return out;
}

ScalarField regularized_max(double level, const ScalarField& g, double eps) {
    ScalarField out = g;
    for (double& v : out.values) v = regularized_max(level, v, eps);
    return out;
}

namespace {

// Central-difference derivative of f along the axis tuple at idx; recursion
// shrinks the usable interior by one cell per order.
double fd_derivative(const Stencil& st, const ScalarField& f, std::vector<int>& idx,
                     const std::vector<int>& tuple, std::size_t k) {
    if (k == tuple.size()) {
        // Flatten with torus wrapping (box interiors already stay in range).
        std::int64_t fl = 0;
        for (int a = 0; a < f.domain.axes(); ++a) {
            int v = idx[a];
            if (f.domain.topology == GridDomain::Topology::torus) {
                v %= f.domain.shape[a];
                if (v < 0) v += f.domain.shape[a];
            }
            fl = fl * f.domain.shape[a] + v;
        }
        return f.values[fl];
    }
    const int a = tuple[k];
    const double h = f.domain.spacing[a];
    idx[a] += 1;
    const double plus = fd_derivative(st, f, idx, tuple, k + 1);
    idx[a] -= 2;
    const double minus = fd_derivative(st, f, idx, tuple, k + 1);
    idx[a] += 1;
    return (plus - minus) / (2.0 * h);
}

} // namespace

PseudonormReport greenwu_pseudonorm(const ScalarField& f,
                                    const std::vector<std::uint8_t>& K, int m) {
    f.validate();
    require(m >= 0, "greenwu_pseudonorm: order must be nonnegative");
    require(K.empty() || K.size() == f.values.size(), "greenwu_pseudonorm: mask size");
    auto in_k = [&](std::int64_t fl) { return K.empty() || K[fl] != 0; };
    bool any = false;
    double sup = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (in_k(static_cast<std::int64_t>(i))) {
            any = true;
            sup = std::max(sup, std::abs(f.values[i]));
        }
    require(any, "greenwu_pseudonorm: K is empty");

    PseudonormReport rep;
    const Stencil st(f);
    const auto& d = f.domain;
    for (int order = 1; order <= m; ++order) {
        double dsup = 0.0;
        std::vector<int> tuple(order, 0);
        for_each_interior(d, order, [&](const std::vector<int>& idx, std::int64_t fl) {
            if (!in_k(fl)) return;
            double frob2 = 0.0;
            std::fill(tuple.begin(), tuple.end(), 0);
            std::vector<int> work(idx);
            while (true) {
                const double v = fd_derivative(st, f, work, tuple, 0);
                frob2 += v * v;
                int pos = order - 1;
                while (pos >= 0 && tuple[pos] == d.axes() - 1) --pos;
                if (pos < 0) break;
                ++tuple[pos];
                for (int i = pos + 1; i < order; ++i) tuple[i] = 0;
            }
            dsup = std::max(dsup, std::sqrt(frob2));
        });
        rep.derivative_sups.push_back(dsup);
    }
    rep.value = sup;
    for (int i = 1; i <= m; ++i)
        rep.value += std::pow(2.0, -i) * std::max(1.0, rep.derivative_sups[i - 1]);
    const double last = rep.derivative_sups.empty() ? 0.0 : rep.derivative_sups.back();
    rep.truncation_bound = (m == 0) ? 0.0 : std::pow(2.0, -m) * std::max(1.0, last);
    return rep;
}

} // namespace kpsh
