#include "kpsh/frames.hpp"

#include <cmath>

namespace kpsh {

namespace {
constexpr double kDependTol = 1e-10;
}

std::vector<std::vector<cplx>> orthonormalize(std::vector<std::vector<cplx>> cols) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            cplx dot{0.0, 0.0};
            for (std::size_t i = 0; i < cols[k].size(); ++i)
                dot += std::conj(cols[j][i]) * cols[k][i];
            for (std::size_t i = 0; i < cols[k].size(); ++i)
                cols[k][i] -= dot * cols[j][i];
        }
        double norm2 = 0.0;
        for (const cplx& v : cols[k]) norm2 += std::norm(v);
        const double norm = std::sqrt(norm2);
        require(norm > kDependTol, "orthonormalize: columns are numerically dependent");
        for (cplx& v : cols[k]) v /= norm;
    }
    return cols;
}

std::vector<std::vector<double>> orthonormalize(std::vector<std::vector<double>> cols) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < cols[k].size(); ++i)
                dot += cols[j][i] * cols[k][i];
            for (std::size_t i = 0; i < cols[k].size(); ++i)
                cols[k][i] -= dot * cols[j][i];
        }
        double norm2 = 0.0;
        for (double v : cols[k]) norm2 += v * v;
        const double norm = std::sqrt(norm2);
        require(norm > kDependTol, "orthonormalize: columns are numerically dependent");
        for (double& v : cols[k]) v /= norm;
    }
    return cols;
}

ComplexFrame::ComplexFrame(int n, int p, std::vector<std::vector<cplx>> columns)
    : n_(n), p_(p), columns_(std::move(columns)) {
    require(n >= 1 && p >= 1 && p <= n, "ComplexFrame: bad dimensions");
    require(static_cast<int>(columns_.size()) == p, "ComplexFrame: wrong column count");
    for (const auto& c : columns_)
        require(static_cast<int>(c.size()) == n, "ComplexFrame: wrong column length");
    for (int a = 0; a < p_; ++a)
        for (int b = 0; b <= a; ++b) {
            cplx dot{0.0, 0.0};
            for (int i = 0; i < n_; ++i) dot += std::conj(columns_[a][i]) * columns_[b][i];
            const cplx want = (a == b) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            require(std::abs(dot - want) < 1e-10, "ComplexFrame: columns not orthonormal");
        }
}

ComplexFrame ComplexFrame::coordinate(int n, const std::vector<int>& axes) {
    std::vector<std::vector<cplx>> cols;
    for (int a : axes) {
        require(a >= 0 && a < n, "ComplexFrame::coordinate: axis out of range");
        std::vector<cplx> c(n, cplx{0.0, 0.0});
        c[a] = cplx{1.0, 0.0};
        cols.push_back(std::move(c));
    }
    return ComplexFrame(n, static_cast<int>(axes.size()), std::move(cols));
}

ComplexFrame ComplexFrame::random(int n, int p, Rng& rng) {
    std::vector<std::vector<cplx>> cols(p, std::vector<cplx>(n));
    for (auto& c : cols)
        for (cplx& v : c) v = cplx{rng.normal(), rng.normal()};
    return ComplexFrame(n, p, orthonormalize(std::move(cols)));
}

RealFrame ComplexFrame::complexified() const {
    std::vector<std::vector<double>> cols;
    cols.reserve(2 * p_);
    for (const auto& u : columns_) {
        std::vector<double> re(2 * n_), im(2 * n_);
        for (int j = 0; j < n_; ++j) {
            re[2 * j] = u[j].real();
            re[2 * j + 1] = u[j].imag();
            // i*u: (x + iy) -> (-y + ix)
            im[2 * j] = -u[j].imag();
            im[2 * j + 1] = u[j].real();
        }
        cols.push_back(std::move(re));
        cols.push_back(std::move(im));
    }
    return RealFrame(n_, 2 * p_, std::move(cols));
}

RealFrame::RealFrame(int n, int k, std::vector<std::vector<double>> columns)
    : n_(n), k_(k), columns_(std::move(columns)) {
    require(n >= 1 && k >= 1 && k <= 2 * n, "RealFrame: bad dimensions");
    require(static_cast<int>(columns_.size()) == k, "RealFrame: wrong column count");
    for (const auto& c : columns_)
        require(static_cast<int>(c.size()) == 2 * n, "RealFrame: wrong column length");
    for (int a = 0; a < k_; ++a)
        for (int b = 0; b <= a; ++b) {
            double dot = 0.0;
            for (int i = 0; i < 2 * n_; ++i) dot += columns_[a][i] * columns_[b][i];
            const double want = (a == b) ? 1.0 : 0.0;
            require(std::abs(dot - want) < 1e-10, "RealFrame: columns not orthonormal");
        }
}

RealFrame RealFrame::coordinate(int n, const std::vector<int>& axes) {
    std::vector<std::vector<double>> cols;
    for (int a : axes) {
        require(a >= 0 && a < 2 * n, "RealFrame::coordinate: axis out of range");
        std::vector<double> c(2 * n, 0.0);
        c[a] = 1.0;
        cols.push_back(std::move(c));
    }
    return RealFrame(n, static_cast<int>(axes.size()), std::move(cols));
}

RealFrame RealFrame::random(int n, int k, Rng& rng) {
    std::vector<std::vector<double>> cols(k, std::vector<double>(2 * n));
    for (auto& c : cols)
        for (double& v : c) v = rng.normal();
    return RealFrame(n, k, orthonormalize(std::move(cols)));
}

} // namespace kpsh
