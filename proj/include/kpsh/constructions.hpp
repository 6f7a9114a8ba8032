#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpsh/calculus.hpp"
#include "kpsh/grid.hpp"
#include "kpsh/potentials.hpp"

namespace kpsh {

struct TorusEmbedResult {
    PotentialPtr phi_tilde; // max_eps(phi, V), V = A|x|^2 - A - eps
    PotentialPtr v;
    double A = 0.0;
};

/// Ball-to-torus bridge potential: given 0 <= phi <= C on |x| <= R (R > 1),
/// returns max_eps(phi, V) with the minimal A satisfying
/// A R^2 - A - eps > C + eps, so the result equals phi on the unit ball and
/// the flat quadratic V near |x| = R.
TorusEmbedResult torus_embedding_potential(PotentialPtr phi, double C, double R,
                                           double eps);

struct ProductResult {
    ScalarField phi;        // theta(z) |b|^2 on the product grid
    double r_max = 0.0;     // largest tested |b|-radius with positive margin
    double expansion_error = 0.0; // max defect of the four-term dd^c expansion
    double measured_c1 = 0.0, measured_c2 = 0.0;
};

/// Product-neighbourhood potential phi(z, b) = theta(z) |b|^2. The theta
/// field lives on the leading real axes of the product grid (the Z-factor);
/// the remaining complex coordinates are the normal directions b.
ProductResult local_product_potential(const ScalarField& theta, double c1, double c2,
                                      const GridDomain& product_grid, int q);

struct GlueResult {
    double C = 1.0;
    ScalarField glued; // C phi0 + xi phi1
    double min_margin = 0.0;
    double overlap_norm = 0.0; // max over X of -alpha_min(dd^c(xi phi1))
};

/// Gluing constant: C = max(1, (1 + 1e-3) eps^{-1} max_X(-alpha_min)) where
/// the eigenvalue scale is that of dd^c(xi phi1) and X = supp(d xi).
/// Requires psh_margin_field(phi0, q) >= q*eps on X; asserts the glued field
/// has margin >= -tol.
GlueResult glue_constant(const ScalarField& phi0, const ScalarField& phi1,
                         const ScalarField& xi, double eps, int q,
                         double tol = 1e-8);

struct ExhaustResult {
    ScalarField psi; // max_{eps/3}(phi - B, chi1 - A)
    double c_phi = 0.0;
    bool pole_flag = true;
    std::vector<std::uint8_t> w_mask;        // {chi1 <= A}
    std::vector<std::uint8_t> near_z_mask;   // psi == phi - B exactly
    std::vector<std::uint8_t> outer_mask;    // psi == chi1 - A exactly
    double min_margin_away_from_pole = 0.0;
};

/// Exhaustion potential of the working set W = {chi1 <= A}, where
/// chi = lambda log dist(., Z), chi1 = c_phi * phi + chi with c_phi scaled so
/// dd^c(c_phi phi) ^ omega^{q-1} > omega^q on the grid. Throws if
/// phi < B - eps fails on W.
ExhaustResult exhaustion_potential(PotentialPtr phi, const SubvarietyZ& z,
                                   double lambda, double A, double B, double eps,
                                   int q, const GridDomain& grid);

/// Packed (1,1)-form field (row-major n x n complex entries per point);
/// lighter than HermitianField for large grids and bit-exact comparable.
struct EtaField {
    GridDomain domain;
    int n = 0;
    std::vector<std::int64_t> flat_index;
    std::vector<cplx> entries; // size() * n * n

    bool bit_identical_on(const EtaField& o, const std::vector<std::uint8_t>& mask) const;
};

struct TruncationResult {
    std::vector<double> n_values;
    std::vector<ScalarField> phi_n;
    std::vector<EtaField> eta_n; // dd^c(phi_N); wedge with omega^{p-1} implied
    int stabilization_index = -1; // first i with eta bit-identical to the last, on V
    std::vector<double> min_margins; // psh margin (q = p) per N
};

/// phi_N = max_eps(-N, chi1); eta_N = dd^c(phi_N) ^ omega^{p-1} represented
/// by its dd^c factor. Reports bit-exact stabilization on the mask V and the
/// vanishing of eta_N on {chi1 < -N - eps}.
TruncationResult pole_truncation_sequence(PotentialPtr chi1, double eps,
                                          const std::vector<double>& n_list, int p,
                                          const GridDomain& grid,
                                          const std::vector<std::uint8_t>& v_mask);

struct SibonyReport {
    std::vector<double> n_values;
    std::vector<double> integrals;       // I_N over U minus the exclusion ball
    std::vector<double> r_values;        // exclusion radii swept (descending)
    std::vector<double> integrals_by_r;  // I at the largest N per radius
    int stabilization_index = -1;
    bool monotone = true;
    bool cauchy_in_r = true;
    double smooth_check_rel_error = 0.0; // theta = omega case vs Stokes boundary
    std::string csv() const;            // (N, I_N, stabilization_index) rows
};

struct SibonyConfig {
    int n = 2;
    int p = 1;
    double beta = 0.5;
    std::vector<double> n_list = {2, 4, 8, 16};
    double eps = 0.1;
    double half_width = 0.25; // U = [-hw, hw]^{2n}, grid staggered off 0
    int grid_points = 48;
    double tol = 1e-3;
};

/// The singular-integrability experiment: theta = dd^c(|z|^(2 beta)),
/// chi1 = log|z|, I_N = int_U theta ^ dd^c(phi_N) ^ omega^{p-1} with cells
/// within the exclusion radius of Z = {0} removed. Streams the quadrature
/// (nothing grid-sized is stored).
SibonyReport sibony_experiment(const SibonyConfig& cfg);

/// Quadrature of theta ^ eta ^ omega^{p-1} over masked cells for stored eta
/// fields; theta supplied analytically via its dd^c potential.
double sibony_integral(const Potential& theta_potential, const EtaField& eta, int p,
                       const std::vector<std::uint8_t>& u_mask, double exclusion_radius);

} // namespace kpsh
