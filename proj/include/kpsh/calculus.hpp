#pragma once

#include <functional>
#include <map>
#include <vector>

#include "kpsh/forms.hpp"
#include "kpsh/grid.hpp"
#include "kpsh/positivity.hpp"

namespace kpsh {

/// A constant-coefficient exterior form over the 2n complex covectors
/// dz_0..dz_{n-1}, dzbar_0..dzbar_{n-1} (covector id j < n means dz_j,
/// id n+j means dzbar_j), without a fixed bidegree. Used for the odd-degree
/// forms d^c(phi) and d_c(phi) where (p,q)-pure storage does not apply.
struct GenForm {
    int n = 0;
    int degree = 0;
    std::map<std::vector<int>, cplx> coeffs; // sorted covector-id lists

    void add(const std::vector<int>& ids, cplx c);
    cplx get(const std::vector<int>& ids) const;
    double max_coeff_distance(const GenForm& o) const;
};

GenForm gen_wedge(const GenForm& a, const GenForm& b);
GenForm gen_from_complex_form(const ComplexForm& f);
/// Interior product with a real tangent vector (layout x0,y0,x1,y1,...).
GenForm gen_contract(const GenForm& f, const std::vector<double>& v);
/// Raw evaluation on real tangent vectors (same layout).
cplx gen_eval_on_real_vectors(const GenForm& f,
                              const std::vector<std::vector<double>>& vectors);

/// dd^c of phi at one grid point: H_jk = 2 d^2 phi / dz_j dzbar_k by
/// second-order central differences. idx must have a one-cell margin on
/// box domains.
HermitianMatrix ddc_at(const ScalarField& phi, const std::vector<int>& idx);

/// Full dd^c field over the stencil-valid interior.
HermitianField ddc_field(const ScalarField& phi);

/// Streaming variant: fn(idx, flat, H) per stencil-valid interior point.
void for_each_ddc(const ScalarField& phi,
                  const std::function<void(const std::vector<int>&, std::int64_t,
                                           const HermitianMatrix&)>& fn);

/// Pointwise psh_margin of ddc_field; masked to the stencil interior.
ScalarField psh_margin_field(const ScalarField& phi, int q);

struct DcResult {
    std::vector<GenForm> dc_oneform;    // d^c(phi) per interior point
    std::vector<GenForm> dcal;          // d_c(phi) via the wedge identity
    std::vector<GenForm> dcal_contract; // d_c(phi) via contraction of omega^q/q!
    std::vector<std::int64_t> flat_index;
    double residual = 0.0; // max pointwise coefficient disagreement
};

/// Computes d^c(phi) and d_c(phi) two ways: 1/(q-1)! d^c(phi) ^ omega^{q-1}
/// (second-order gradients) and contraction of omega^q/q! with the sharp of
/// d(phi) (fourth-order gradients, so the disagreement is the genuine O(h^2)
/// truncation error of the first route).
DcResult dc_and_dcal(const ScalarField& phi, int q);

/// Trapezoid integral of phi * omega^{q-1} ^ dd^c(alpha) where alpha is
/// bump * monomial, an (n-q, n-q) test form. The bump must vanish with a
/// two-cell margin.
double integral_criterion(const ScalarField& phi, const ScalarField& bump,
                          const ComplexForm& monomial, int q);

struct PlaneReport {
    double min_trace = 1e300;
    std::vector<int> argmin_idx;
    std::vector<std::vector<cplx>> argmin_frame;
};

/// Restricted Laplacian Re tr(P* H(x) P) over `planes` random affine complex
/// q-planes at random interior points; reports the minimum. With refine=true
/// the best plane is polished to a local minimum (Ky Fan refinement), so at
/// a fixed point the value converges to psh_margin there.
PlaneReport plane_subharmonicity(const ScalarField& phi, int q, int planes,
                                 std::uint64_t seed, bool refine = false);

/// C^2 quartic spline kernel: |t| outside [-eps, eps], else
/// -t^4/(8 eps^3) + 3 t^2/(4 eps) + 3 eps/8.
double regmax_kernel(double t, double eps);
/// max_eps(x, y) = ((x + y) + M_eps(x - y)) / 2.
double regularized_max(double x, double y, double eps);
ScalarField regularized_max(const ScalarField& f, const ScalarField& g, double eps);
ScalarField regularized_max(double level, const ScalarField& g, double eps);

struct PseudonormReport {
    double value = 0.0;
    std::vector<double> derivative_sups; // raw D(K, i, f), i = 1..m
    double truncation_bound = 0.0;       // sum_{i>m} 2^{-i} * max(1, D_m)
};

/// Green-Wu style pseudonorm sup_K |f| + sum_{i<=m} 2^{-i} max(1, D(K,i,f)),
/// D = sup over K of the Frobenius norm of the order-i central-difference
/// derivative tensor.
PseudonormReport greenwu_pseudonorm(const ScalarField& f,
                                    const std::vector<std::uint8_t>& K, int m = 3);

} // namespace kpsh
