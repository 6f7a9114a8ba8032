#include "kpsh/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace kpsh {

std::string PositivityVerdict::to_json() const {
    nlohmann::json j;
    j["positive"] = positive;
    j["margin"] = margin;
    j["grade"] = (grade == Grade::exact) ? "exact" : "sampled";
    if (witness) {
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& c : witness->columns()) {
            nlohmann::json col = nlohmann::json::array();
            for (const cplx& v : c) col.push_back({v.real(), v.imag()});
            cols.push_back(col);
        }
        j["witness"] = cols;
    }
    return j.dump();
}

double psh_margin(const HermitianMatrix& h, int q) {
    require(q >= 1 && q <= h.n(), "psh_margin: q out of range");
    const EigenSpectrum s = hermitian_eigenvalues(h);
    return std::accumulate(s.values.begin(), s.values.begin() + q, 0.0);
}

bool is_strongly_q_convex(const HermitianMatrix& h, int q) {
    require(q >= 1 && q <= h.n(), "is_strongly_q_convex: q out of range");
    return hermitian_eigenvalues(h).values[q - 1] > 0.0;
}

ComplexForm nu_wedge_omega_k(const HermitianMatrix& nu, int k) {
    const int n = nu.n();
    require(k >= 0 && k <= n - 1, "nu_wedge_omega_k: k out of range");

    ComplexForm direct = wedge(form_from_hermitian(nu), omega_power(
                                    HermitianMatrix::identity(n), k, /*normalized=*/false));

    // Eigenbasis expansion: k! sum over (k+1)-tuples T of (sum_{t in T} a_t)
    // times the frame monomial of the eigenvector columns T.
    const EigenSpectrum s = hermitian_eigenvalues(nu);
    ComplexForm expansion(n, k + 1, k + 1);
    std::vector<int> tuple(k + 1);
    std::iota(tuple.begin(), tuple.end(), 0);
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    while (true) {
        double alpha_sum = 0.0;
        std::vector<std::vector<cplx>> cols;
        for (int t : tuple) {
            alpha_sum += s.values[t];
            std::vector<cplx> c(n);
            for (int i = 0; i < n; ++i) c[i] = s.vec(i, t);
            cols.push_back(std::move(c));
        }
        const ComplexFrame frame(n, k + 1, std::move(cols));
        expansion = expansion + frame_monomial(frame) * cplx{kfact * alpha_sum, 0.0};

        int pos = k;
        while (pos >= 0 && tuple[pos] == n - (k + 1) + pos) --pos;
        if (pos < 0) break;
        ++tuple[pos];
        for (int i = pos + 1; i <= k; ++i) tuple[i] = tuple[i - 1] + 1;
    }

    double scale = 1.0;
    for (const auto& [key, c] : direct.coeffs()) scale = std::max(scale, std::abs(c));
    const ComplexForm diff = direct - expansion;
    double defect = 0.0;
    for (const auto& [key, c] : diff.coeffs()) defect = std::max(defect, std::abs(c));
    if (defect > 1e-9 * scale)
        throw consistency_error("nu_wedge_omega_k: eigenbasis expansion disagrees "
                                "with the direct wedge");

    ComplexForm::NuWedgeTag tag;
    tag.nu_entries = nu.entries();
    tag.k = k;
    direct.set_nu_tag(std::move(tag));
    return direct;
}

namespace {

// Objective for the Grassmannian search: orthonormalize raw columns, then
// restrict. Raw parameters are the 2np real components of the columns.
struct RestrictionObjective {
    const ComplexForm& eta;
    int n, p;

    double operator()(const std::vector<double>& x) const {
        std::vector<std::vector<cplx>> cols(p, std::vector<cplx>(n));
        for (int k = 0; k < p; ++k)
            for (int i = 0; i < n; ++i)
                cols[k][i] = cplx{x[2 * (k * n + i)], x[2 * (k * n + i) + 1]};
        return restrict_complex(eta, ComplexFrame(n, p, orthonormalize(std::move(cols))));
    }
};

} // namespace

SearchResult min_restriction_search(const ComplexForm& eta, int trials,
                                    std::uint64_t seed) {
    require(eta.p() == eta.q() && eta.p() >= 1, "min_restriction_search: need (p,p), p>=1");
    const int n = eta.n();
    const int p = eta.p();
    Rng root(seed);

    const RestrictionObjective obj{eta, n, p};
    const int dim = 2 * n * p;

    double best_val = 1e300;
    std::vector<double> best_x;

    for (int trial = 0; trial < std::max(1, trials); ++trial) {
        Rng rng = root.spawn(static_cast<std::uint64_t>(trial));
        std::vector<double> x(dim);
        for (double& v : x) v = rng.normal();

        double f = obj(x);
        double step = 0.25;
        std::vector<double> grad(dim), cand(dim);
        for (int iter = 0; iter < 500 && step > 1e-14; ++iter) {
            const double fd = 1e-6;
            for (int i = 0; i < dim; ++i) {
                const double save = x[i];
                x[i] = save + fd;
                const double fp = obj(x);
                x[i] = save - fd;
                const double fm = obj(x);
                x[i] = save;
                grad[i] = (fp - fm) / (2.0 * fd);
            }
            double gnorm = 0.0;
            for (double g : grad) gnorm += g * g;
            gnorm = std::sqrt(gnorm);
            if (gnorm < 1e-12) break;

            bool improved = false;
            while (step > 1e-14) {
                for (int i = 0; i < dim; ++i) cand[i] = x[i] - step * grad[i] / gnorm;
                const double fc = obj(cand);
                // Armijo condition along the normalized descent direction.
                if (fc <= f - 1e-4 * step * gnorm) {
                    // Renormalize the parameters to keep conditioning sane.
                    std::vector<std::vector<cplx>> cols(p, std::vector<cplx>(n));
                    for (int k = 0; k < p; ++k)
                        for (int i = 0; i < n; ++i)
                            cols[k][i] = cplx{cand[2 * (k * n + i)], cand[2 * (k * n + i) + 1]};
                    cols = orthonormalize(std::move(cols));
                    for (int k = 0; k < p; ++k)
                        for (int i = 0; i < n; ++i) {
                            cand[2 * (k * n + i)] = cols[k][i].real();
                            cand[2 * (k * n + i) + 1] = cols[k][i].imag();
                        }
                    const double improvement = f - fc;
                    x = cand;
                    f = obj(x);
                    improved = true;
                    step = std::min(step * 2.0, 1.0);
                    if (improvement < 1e-12) iter = 500; // converged
                    break;
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        if (f < best_val) {
            best_val = f;
            best_x = x;
        }
    }

    std::vector<std::vector<cplx>> cols(p, std::vector<cplx>(n));
    for (int k = 0; k < p; ++k)
        for (int i = 0; i < n; ++i)
            cols[k][i] = cplx{best_x[2 * (k * n + i)], best_x[2 * (k * n + i) + 1]};
    ComplexFrame frame(n, p, orthonormalize(std::move(cols)));
    return SearchResult{restrict_complex(eta, frame), frame};
}

namespace {

HermitianMatrix one_one_matrix(const ComplexForm& eta) {
    const int n = eta.n();
    std::vector<cplx> h(n * n, cplx{0.0, 0.0});
    for (const auto& [key, c] : eta.coeffs())
        h[key.I[0] * n + key.J[0]] = c / cplx{0.0, 1.0};
    return HermitianMatrix(n, std::move(h));
}

ComplexFrame eigen_bottom_frame(const EigenSpectrum& s, int count) {
    const int n = static_cast<int>(s.values.size());
    std::vector<std::vector<cplx>> cols;
    for (int k = 0; k < count; ++k) {
        std::vector<cplx> c(n);
        for (int i = 0; i < n; ++i) c[i] = s.vec(i, k);
        cols.push_back(std::move(c));
    }
    return ComplexFrame(n, count, std::move(cols));
}

} // namespace

PositivityVerdict weak_positivity_test(const ComplexForm& eta, int trials, double tol,
                                       std::uint64_t seed) {
    require(eta.p() == eta.q(), "weak_positivity_test: form must be (p,p)");
    require(eta.is_real(1e-9), "weak_positivity_test: form must be real");
    PositivityVerdict v;

    if (eta.is_zero()) {
        v.positive = true;
        v.margin = 0.0;
        v.grade = PositivityVerdict::Grade::exact;
        return v;
    }
    if (eta.nu_tag()) {
        const auto& tag = *eta.nu_tag();
        const HermitianMatrix nu(eta.n(), tag.nu_entries);
        const EigenSpectrum s = hermitian_eigenvalues(nu);
        double kfact = 1.0;
        for (int i = 2; i <= tag.k; ++i) kfact *= i;
        v.margin = kfact * std::accumulate(s.values.begin(),
                                           s.values.begin() + tag.k + 1, 0.0);
        v.positive = v.margin >= -tol;
        v.witness = eigen_bottom_frame(s, tag.k + 1);
        v.grade = PositivityVerdict::Grade::exact;
        return v;
    }
    if (eta.p() == 1) {
        const HermitianMatrix h = one_one_matrix(eta);
        const EigenSpectrum s = hermitian_eigenvalues(h);
        v.margin = s.values[0];
        v.positive = v.margin >= -tol;
        v.witness = eigen_bottom_frame(s, 1);
        v.grade = PositivityVerdict::Grade::exact;
        return v;
    }

    const SearchResult r = min_restriction_search(eta, trials, seed);
    v.margin = r.value;
    v.positive = v.margin >= -tol;
    v.witness = r.frame;
    v.grade = PositivityVerdict::Grade::sampled;
    return v;
}

std::vector<double> nnls(const std::vector<double>& A, int rows, int cols,
                         const std::vector<double>& b, double* residual) {
    // Lawson-Hanson active set method.
    std::vector<double> x(cols, 0.0);
    std::vector<bool> passive(cols, false);

    auto residual_vec = [&](const std::vector<double>& xx) {
        std::vector<double> r(b);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) r[i] -= A[i * cols + j] * xx[j];
        return r;
    };
    auto solve_passive = [&](std::vector<double>& z) {
        // Least squares on the passive columns via normal equations.
        std::vector<int> idx;
        for (int j = 0; j < cols; ++j)
            if (passive[j]) idx.push_back(j);
        const int m = static_cast<int>(idx.size());
        z.assign(cols, 0.0);
        if (m == 0) return;
        std::vector<double> ata(m * m, 0.0), atb(m, 0.0);
        for (int a = 0; a < m; ++a) {
            for (int c = a; c < m; ++c) {
                double s = 0.0;
                for (int i = 0; i < rows; ++i)
                    s += A[i * cols + idx[a]] * A[i * cols + idx[c]];
                ata[a * m + c] = ata[c * m + a] = s;
            }
            for (int i = 0; i < rows; ++i) atb[a] += A[i * cols + idx[a]] * b[i];
            ata[a * m + a] += 1e-12; // ridge for rank deficiency
        }
        // Gaussian elimination with partial pivoting.
        std::vector<double> M(ata);
        std::vector<double> rhs(atb);
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        for (int c = 0; c < m; ++c) {
            int piv = c;
            for (int r2 = c + 1; r2 < m; ++r2)
                if (std::abs(M[r2 * m + c]) > std::abs(M[piv * m + c])) piv = r2;
            if (piv != c) {
                for (int k = 0; k < m; ++k) std::swap(M[piv * m + k], M[c * m + k]);
                std::swap(rhs[piv], rhs[c]);
            }
            for (int r2 = c + 1; r2 < m; ++r2) {
                const double f = M[r2 * m + c] / M[c * m + c];
                for (int k = c; k < m; ++k) M[r2 * m + k] -= f * M[c * m + k];
                rhs[r2] -= f * rhs[c];
            }
        }
        std::vector<double> sol(m);
        for (int c = m - 1; c >= 0; --c) {
            double s = rhs[c];
            for (int k = c + 1; k < m; ++k) s -= M[c * m + k] * sol[k];
            sol[c] = s / M[c * m + c];
        }
        for (int a = 0; a < m; ++a) z[idx[a]] = sol[a];
    };

    for (int outer = 0; outer < 3 * cols + 30; ++outer) {
        const std::vector<double> r = residual_vec(x);
        // Gradient w = A^T r; pick the most positive inactive component.
        int best = -1;
        double bestw = 1e-10;
        for (int j = 0; j < cols; ++j) {
            if (passive[j]) continue;
            double w = 0.0;
            for (int i = 0; i < rows; ++i) w += A[i * cols + j] * r[i];
            if (w > bestw) {
                bestw = w;
                best = j;
            }
        }
        if (best < 0) break;
        passive[best] = true;

        std::vector<double> z;
        solve_passive(z);
        for (int inner = 0; inner < 3 * cols + 30; ++inner) {
            double alpha = 1.0;
            bool clipped = false;
            for (int j = 0; j < cols; ++j)
                if (passive[j] && z[j] <= 0.0) {
                    const double a = x[j] / (x[j] - z[j]);
                    if (a < alpha) alpha = a;
                    clipped = true;
                }
            if (!clipped) {
                x = z;
                break;
            }
            for (int j = 0; j < cols; ++j)
                if (passive[j]) x[j] += alpha * (z[j] - x[j]);
            for (int j = 0; j < cols; ++j)
                if (passive[j] && x[j] <= 1e-14) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            solve_passive(z);
        }
    }
    if (residual) {
        const std::vector<double> r = residual_vec(x);
        double s = 0.0;
        for (double v : r) s += v * v;
        *residual = std::sqrt(s);
    }
    return x;
}

PositivityVerdict strong_positivity_certificate(const ComplexForm& eta, int dict_size,
                                                double tol, std::uint64_t seed) {
    require(eta.p() == eta.q(), "strong_positivity_certificate: form must be (p,p)");
    require(eta.is_real(1e-9), "strong_positivity_certificate: form must be real");
    PositivityVerdict v;

    if (eta.is_zero()) {
        v.positive = true;
        v.margin = 0.0;
        v.grade = PositivityVerdict::Grade::exact;
        return v;
    }
    if (eta.nu_tag()) {
        // Claim: for this shape the weak and strong cones coincide.
        const auto& tag = *eta.nu_tag();
        const HermitianMatrix nu(eta.n(), tag.nu_entries);
        double kfact = 1.0;
        for (int i = 2; i <= tag.k; ++i) kfact *= i;
        v.margin = kfact * psh_margin(nu, tag.k + 1);
        v.positive = v.margin >= -tol;
        v.grade = PositivityVerdict::Grade::exact;
        if (!v.positive)
            v.witness = eigen_bottom_frame(
                hermitian_eigenvalues(nu), tag.k + 1);
        return v;
    }
    if (eta.p() == 1) {
        const HermitianMatrix h = one_one_matrix(eta);
        const EigenSpectrum s = hermitian_eigenvalues(h);
        v.margin = s.values[0];
        v.positive = v.margin >= -tol;
        v.grade = PositivityVerdict::Grade::exact;
        if (!v.positive) v.witness = eigen_bottom_frame(s, 1);
        return v;
    }

    // Sampled dictionary of simple strongly positive monomials; NNLS fit.
    const int n = eta.n();
    const int p = eta.p();
    Rng rng(seed);
    std::vector<ComplexForm> dict;
    dict.reserve(dict_size);
    for (int d = 0; d < dict_size; ++d) {
        Rng child = rng.spawn(static_cast<std::uint64_t>(d));
        dict.push_back(frame_monomial(ComplexFrame::random(n, p, child)));
    }

    // Stack real and imaginary parts of all coefficients over the union of keys.
    std::vector<ComplexForm::Key> keys;
    for (const auto& [key, c] : eta.coeffs()) keys.push_back(key);
    for (const auto& f : dict)
        for (const auto& [key, c] : f.coeffs())
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                keys.push_back(key);
    std::sort(keys.begin(), keys.end());

    const int rows = 2 * static_cast<int>(keys.size());
    std::vector<double> A(rows * dict_size, 0.0), b(rows, 0.0);
    for (std::size_t r = 0; r < keys.size(); ++r) {
        const cplx be = eta.coeff(keys[r].I, keys[r].J);
        b[2 * r] = be.real();
        b[2 * r + 1] = be.imag();
        for (int d = 0; d < dict_size; ++d) {
            const cplx ce = dict[d].coeff(keys[r].I, keys[r].J);
            A[(2 * r) * dict_size + d] = ce.real();
            A[(2 * r + 1) * dict_size + d] = ce.imag();
        }
    }
    double residual = 0.0;
    nnls(A, rows, dict_size, b, &residual);

    double scale = 0.0;
    for (double v2 : b) scale = std::max(scale, std::abs(v2));
    if (residual < tol * std::max(1.0, scale)) {
        v.positive = true;
        v.margin = residual;
        v.grade = PositivityVerdict::Grade::exact; // a decomposition is a certificate
        return v;
    }

    // Inconclusive; see whether the weak search finds an outright violation.
    const SearchResult s = min_restriction_search(eta, 16, seed);
    v.positive = false;
    v.grade = PositivityVerdict::Grade::sampled;
    if (s.value < -tol) {
        v.margin = s.value;
        v.witness = s.frame;
    } else {
        v.margin = residual;
    }
    return v;
}

double kyfan_refine(const HermitianMatrix& h, std::vector<std::vector<cplx>>& cols) {
    const int n = h.n();
    const int q = static_cast<int>(cols.size());

    auto trace_val = [&](const std::vector<std::vector<cplx>>& P) {
        double s = 0.0;
        for (const auto& c : P)
            for (int i = 0; i < n; ++i) {
                cplx hc{0.0, 0.0};
                for (int j = 0; j < n; ++j) hc += h(i, j) * c[j];
                s += (std::conj(c[i]) * hc).real();
            }
        return s;
    };

    // Modified Gram-Schmidt that drops numerically dependent columns instead
    // of throwing; used to assemble the enriched search basis.
    auto mgs_drop = [n](std::vector<std::vector<cplx>> v) {
        std::vector<std::vector<cplx>> out;
        for (auto& c : v) {
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& u : out) {
                    cplx d{0.0, 0.0};
                    for (int i = 0; i < n; ++i) d += std::conj(u[i]) * c[i];
                    for (int i = 0; i < n; ++i) c[i] -= d * u[i];
                }
            double nn = 0.0;
            for (const cplx& x : c) nn += std::norm(x);
            nn = std::sqrt(nn);
            if (nn > 1e-8) {
                for (cplx& x : c) x /= nn;
                out.push_back(std::move(c));
            }
        }
        return out;
    };
    auto matvec = [&](const std::vector<cplx>& c) {
        std::vector<cplx> r(n, cplx{0.0, 0.0});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r[i] += h(i, j) * c[j];
        return r;
    };

    const double scale = std::max(1.0, h.frobenius());
    cols = orthonormalize(std::move(cols));
    double f = trace_val(cols);

    // Block Rayleigh-Ritz descent: each iteration minimizes the trace over
    // the subspace spanned by the current frame, its projected residuals,
    // and the previous frame, then keeps the best q-dimensional span. The
    // value is monotone non-increasing and convergence does not degrade with
    // a small spectral gap the way plain projected gradient does.
    std::vector<std::vector<cplx>> prev;
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<std::vector<cplx>> residuals;
        double rnorm2 = 0.0;
        for (int k = 0; k < q; ++k) {
            std::vector<cplx> r = matvec(cols[k]);
            for (int m = 0; m < q; ++m) {
                cplx dot{0.0, 0.0};
                for (int i = 0; i < n; ++i) dot += std::conj(cols[m][i]) * r[i];
                for (int i = 0; i < n; ++i) r[i] -= dot * cols[m][i];
            }
            for (const cplx& v : r) rnorm2 += std::norm(v);
            residuals.push_back(std::move(r));
        }
        if (rnorm2 < 1e-26 * scale * scale) break;

        std::vector<std::vector<cplx>> basis = cols;
        for (auto& r : residuals) basis.push_back(std::move(r));
        for (auto& p : prev) basis.push_back(std::move(p));
        basis = mgs_drop(std::move(basis));
        const int m = static_cast<int>(basis.size());
        if (m <= q) break;

        std::vector<cplx> proj(m * m, cplx{0.0, 0.0});
        std::vector<std::vector<cplx>> hb(m);
        for (int a = 0; a < m; ++a) hb[a] = matvec(basis[a]);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int i = 0; i < n; ++i) proj[a * m + b] += std::conj(basis[a][i]) * hb[b][i];
        const EigenSpectrum s = hermitian_eigenvalues(HermitianMatrix(m, std::move(proj), 1e-6));

        prev = cols;
        std::vector<std::vector<cplx>> next(q, std::vector<cplx>(n, cplx{0.0, 0.0}));
        for (int k = 0; k < q; ++k)
            for (int a = 0; a < m; ++a)
                for (int i = 0; i < n; ++i) next[k][i] += s.vec(a, k) * basis[a][i];
        next = orthonormalize(std::move(next));
        const double fc = trace_val(next);
        if (fc > f - 1e-15 * scale) break;
        cols = std::move(next);
        f = fc;
    }
    return f;
}

double kyfan_min_trace(const HermitianMatrix& h, int q, int trials,
                       std::uint64_t seed) {
    require(q >= 1 && q <= h.n(), "kyfan_min_trace: q out of range");
    Rng root(seed);
    double best = 1e300;
    for (int t = 0; t < std::max(1, trials); ++t) {
        Rng rng = root.spawn(static_cast<std::uint64_t>(t));
        std::vector<std::vector<cplx>> cols(q, std::vector<cplx>(h.n()));
        for (auto& c : cols)
            for (cplx& v : c) v = cplx{rng.normal(), rng.normal()};
        best = std::min(best, kyfan_refine(h, cols));
    }
    return best;
}

} // namespace kpsh
