#pragma once

#include <memory>
#include <vector>

#include "kpsh/grid.hpp"
#include "kpsh/hermitian.hpp"

namespace kpsh {

/// Analytic potential on C^n with closed-form value, real gradient, and
/// dd^c matrix (H_jk = 2 d^2/dz_j dzbar_k) away from its singular set.
/// Points use the real layout x0, y0, x1, y1, ...
class Potential {
public:
    virtual ~Potential() = default;
    virtual int n() const = 0;
    virtual double value(const std::vector<double>& x) const = 0;
    virtual std::vector<double> gradient(const std::vector<double>& x) const = 0;
    virtual HermitianMatrix ddc(const std::vector<double>& x) const = 0;
    /// True within `radius` of the singular set (pole / non-smooth locus).
    virtual bool singular_near(const std::vector<double>& x, double radius) const {
        (void)x;
        (void)radius;
        return false;
    }
};

using PotentialPtr = std::shared_ptr<const Potential>;

/// A point or a linear complex subspace of C^n.
struct SubvarietyZ {
    int n = 1;
    int dim_c = 0;
    std::vector<cplx> center;                  // length n
    std::vector<std::vector<cplx>> basis;      // dim_c orthonormal n-vectors

    /// Euclidean distance from z to the affine subspace.
    double distance(const std::vector<double>& x) const;
    static SubvarietyZ point(std::vector<cplx> center);
};

/// phi(z) = sum_{jk} h_jk z_j zbar_k + <lin, x> + c, with dd^c = 2h.
PotentialPtr quadratic_potential(const HermitianMatrix& h,
                                 std::vector<double> linear = {}, double c = 0.0);

/// phi(z) = scale * |z - z0|^(2 beta); strictly psh for 0 < beta <= 1 away
/// from the center (and everywhere for beta = 1).
PotentialPtr radial_power_potential(int n, double beta, double scale = 1.0,
                                    std::vector<cplx> center = {});

/// phi(z) = lambda * log dist(z, Z); psh away from Z for linear Z.
PotentialPtr log_distance_potential(const SubvarietyZ& z, double lambda = 1.0);

PotentialPtr constant_potential(int n, double c);
PotentialPtr sum_potential(std::vector<PotentialPtr> parts,
                           std::vector<double> weights = {});
/// Regularized maximum of two potentials (C^2 composite).
PotentialPtr regmax_potential(PotentialPtr a, PotentialPtr b, double eps);

/// Samples onto a grid.
ScalarField sample_potential(const Potential& p, const GridDomain& d);

} // namespace kpsh
