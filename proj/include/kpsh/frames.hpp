#pragma once

#include <vector>

#include "kpsh/common.hpp"
#include "kpsh/rng.hpp"

namespace kpsh {

/// Orthonormal frame spanning a complex p-plane in C^n. Columns are
/// orthonormal under the standard Hermitian inner product (tol 1e-12).
class ComplexFrame {
public:
    ComplexFrame(int n, int p, std::vector<std::vector<cplx>> columns);

    int n() const { return n_; }
    int p() const { return p_; }
    const std::vector<cplx>& column(int k) const { return columns_[k]; }
    const std::vector<std::vector<cplx>>& columns() const { return columns_; }

    /// Standard coordinate frame spanning e_{axes[0]}, ..., e_{axes[p-1]}.
    static ComplexFrame coordinate(int n, const std::vector<int>& axes);
    static ComplexFrame random(int n, int p, Rng& rng);

    /// The corresponding real 2p-frame (u_1, i u_1, u_2, i u_2, ...).
    class RealFrame complexified() const;

private:
    int n_, p_;
    std::vector<std::vector<cplx>> columns_; // each of length n
};

/// Orthonormal frame spanning a real k-plane in R^{2n}
/// (real coordinate layout x0, y0, x1, y1, ...).
class RealFrame {
public:
    RealFrame(int n, int k, std::vector<std::vector<double>> columns);

    int n() const { return n_; } // complex ambient dimension
    int k() const { return k_; }
    const std::vector<double>& column(int j) const { return columns_[j]; }

    static RealFrame coordinate(int n, const std::vector<int>& axes);
    static RealFrame random(int n, int k, Rng& rng);

private:
    int n_, k_;
    std::vector<std::vector<double>> columns_; // each of length 2n
};

/// Modified Gram-Schmidt; throws if the columns are numerically dependent.
std::vector<std::vector<cplx>> orthonormalize(std::vector<std::vector<cplx>> cols);
std::vector<std::vector<double>> orthonormalize(std::vector<std::vector<double>> cols);

} // namespace kpsh
