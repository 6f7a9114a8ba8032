#include "kpsh/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kpsh {

HermitianMatrix::HermitianMatrix(int n, std::vector<cplx> entries, double tol)
    : n_(n), a_(std::move(entries)) {
    require(n >= 1, "HermitianMatrix: n must be positive");
    require(static_cast<int>(a_.size()) == n * n, "HermitianMatrix: wrong entry count");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j <= i; ++j)
            require(std::abs(a_[i * n_ + j] - std::conj(a_[j * n_ + i])) <= tol,
                    "HermitianMatrix: entries are not Hermitian");
    // Symmetrize exactly so downstream algebra sees H == H*.
    for (int i = 0; i < n_; ++i) {
        a_[i * n_ + i] = cplx{a_[i * n_ + i].real(), 0.0};
        for (int j = 0; j < i; ++j) {
            const cplx m = 0.5 * (a_[i * n_ + j] + std::conj(a_[j * n_ + i]));
            a_[i * n_ + j] = m;
            a_[j * n_ + i] = std::conj(m);
        }
    }
}

HermitianMatrix HermitianMatrix::identity(int n) {
    std::vector<cplx> e(n * n, cplx{0.0, 0.0});
    for (int i = 0; i < n; ++i) e[i * n + i] = cplx{1.0, 0.0};
    return HermitianMatrix(n, std::move(e));
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    std::vector<cplx> e(n * n, cplx{0.0, 0.0});
    for (int i = 0; i < n; ++i) e[i * n + i] = cplx{d[i], 0.0};
    return HermitianMatrix(n, std::move(e));
}

HermitianMatrix HermitianMatrix::zero(int n) {
    return HermitianMatrix(n, std::vector<cplx>(n * n, cplx{0.0, 0.0}));
}

HermitianMatrix HermitianMatrix::random(int n, Rng& rng, double scale) {
    std::vector<cplx> e(n * n);
    for (int i = 0; i < n; ++i) {
        e[i * n + i] = cplx{scale * rng.normal(), 0.0};
        for (int j = i + 1; j < n; ++j) {
            const cplx v{scale * rng.normal(), scale * rng.normal()};
            e[i * n + j] = v;
            e[j * n + i] = std::conj(v);
        }
    }
    return HermitianMatrix(n, std::move(e));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
    require(n_ == o.n_, "HermitianMatrix +: size mismatch");
    std::vector<cplx> e(a_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += o.a_[i];
    return HermitianMatrix(n_, std::move(e));
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
    std::vector<cplx> e(a_);
    for (cplx& v : e) v *= s;
    return HermitianMatrix(n_, std::move(e));
}

HermitianMatrix HermitianMatrix::shifted(double s) const {
    std::vector<cplx> e(a_);
    for (int i = 0; i < n_; ++i) e[i * n_ + i] -= s;
    return HermitianMatrix(n_, std::move(e));
}

double HermitianMatrix::frobenius() const {
    double s = 0.0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

EigenSpectrum hermitian_eigenvalues(const HermitianMatrix& h) {
    const int n = h.n();
    std::vector<cplx> a = h.entries();
    std::vector<cplx> u(n * n, cplx{0.0, 0.0});
    for (int i = 0; i < n; ++i) u[i * n + i] = cplx{1.0, 0.0};

    const double scale = std::max(1.0, h.frobenius());
    const double tol = 1e-13 * scale;

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += std::norm(a[i * n + j]);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx g = a[p * n + q];
                const double ag = std::abs(g);
                if (ag < 1e-300) continue;
                // Phase-scale column q so the pivot becomes real, then apply
                // a real Jacobi rotation.
                const cplx w = std::conj(g) / ag;
                for (int i = 0; i < n; ++i) {
                    a[i * n + q] *= w;
                    u[i * n + q] *= w;
                }
                for (int j = 0; j < n; ++j) a[q * n + j] *= std::conj(w);

                const double alpha = a[p * n + p].real();
                const double beta = a[q * n + q].real();
                const double tau = (beta - alpha) / (2.0 * ag);
                const double t =
                    (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int i = 0; i < n; ++i) {
                    const cplx aip = a[i * n + p];
                    const cplx aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                    const cplx uip = u[i * n + p];
                    const cplx uiq = u[i * n + q];
                    u[i * n + p] = c * uip - s * uiq;
                    u[i * n + q] = s * uip + c * uiq;
                }
                for (int j = 0; j < n; ++j) {
                    const cplx apj = a[p * n + j];
                    const cplx aqj = a[q * n + j];
                    a[p * n + j] = c * apj - s * aqj;
                    a[q * n + j] = s * apj + c * aqj;
                }
                a[p * n + q] = cplx{0.0, 0.0};
                a[q * n + p] = cplx{0.0, 0.0};
            }
        }
    }
    require(off_norm() <= 10 * tol, "hermitian_eigenvalues: Jacobi failed to converge");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return a[i * n + i].real() < a[j * n + j].real();
    });

    EigenSpectrum out;
    out.values.resize(n);
    out.frame.resize(n * n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = a[order[k] * n + order[k]].real();
        for (int i = 0; i < n; ++i) out.frame[i * n + k] = u[i * n + order[k]];
    }
    return out;
}

} // namespace kpsh
