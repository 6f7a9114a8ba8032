#pragma once

#include <vector>

#include "kpsh/common.hpp"
#include "kpsh/rng.hpp"

namespace kpsh {

/// An n x n Hermitian coefficient matrix; represents the real (1,1)-form
/// i sum h_{jk} dz_j ^ dzbar_k.
class HermitianMatrix {
public:
    HermitianMatrix(int n, std::vector<cplx> entries, double tol = 1e-12);

    static HermitianMatrix identity(int n);
    static HermitianMatrix diagonal(const std::vector<double>& d);
    static HermitianMatrix zero(int n);
    static HermitianMatrix random(int n, Rng& rng, double scale = 1.0);

    int n() const { return n_; }
    cplx operator()(int i, int j) const { return a_[i * n_ + j]; }
    const std::vector<cplx>& entries() const { return a_; }

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator*(double s) const;
    /// H - s * Id.
    HermitianMatrix shifted(double s) const;

    double frobenius() const;

private:
    int n_;
    std::vector<cplx> a_;
};

/// Ascending eigenvalues with a unitary eigenbasis (column k of `frame`
/// is the eigenvector for values[k]).
struct EigenSpectrum {
    std::vector<double> values;
    std::vector<cplx> frame; // row-major n x n, columns are eigenvectors

    cplx vec(int i, int k) const {
        const int n = static_cast<int>(values.size());
        return frame[i * n + k];
    }
};

/// Cyclic Jacobi diagonalization with fixed sweep order; deterministic for a
/// fixed input. Converges when the off-diagonal Frobenius norm drops below
/// 1e-13 (relative to the matrix scale).
EigenSpectrum hermitian_eigenvalues(const HermitianMatrix& h);

} // namespace kpsh
