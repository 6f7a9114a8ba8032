#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kpsh/forms.hpp"
#include "kpsh/frames.hpp"
#include "kpsh/hermitian.hpp"

namespace kpsh {

struct PositivityVerdict {
    bool positive = false;
    double margin = 0.0;
    std::optional<ComplexFrame> witness;
    enum class Grade { exact, sampled } grade = Grade::sampled;

    std::string to_json() const;
};

/// Sum of the q smallest eigenvalues of H. Nonnegative iff the (1,1)-form
/// is pointwise omega^q-psh; >= q*eps iff strictly so with margin eps.
double psh_margin(const HermitianMatrix& h, int q);

/// True iff alpha_q > 0 (at most q-1 nonpositive eigenvalues).
bool is_strongly_q_convex(const HermitianMatrix& h, int q);

/// The (k+1,k+1)-form nu ^ omega_std^k (unnormalized power). Computed by
/// direct wedge and cross-checked against the eigenbasis expansion
/// k! * sum_{|T|=k+1} (sum_{t in T} alpha_t) * prod_{t in T} i xi_t ^ xibar_t
/// (agreement 1e-9 or throws). The result carries a provenance tag.
ComplexForm nu_wedge_omega_k(const HermitianMatrix& nu, int k);

/// Minimizes restrict_complex(eta, P) over complex p-frames by multistart
/// projected-gradient descent (finite-difference gradients, orthonormalizing
/// retraction, backtracking line search). Returns the best value and frame.
struct SearchResult {
    double value;
    ComplexFrame frame;
};
SearchResult min_restriction_search(const ComplexForm& eta, int trials,
                                    std::uint64_t seed);

/// Weak positivity: nonnegative restriction to every complex p-plane.
/// Exact for p=1 (eigenvalue test) and for forms tagged by nu_wedge_omega_k
/// (closed form min = k! * psh_margin(nu, k+1)); otherwise sampled search,
/// where "positive" means no violation found.
PositivityVerdict weak_positivity_test(const ComplexForm& eta, int trials = 64,
                                       double tol = 1e-9,
                                       std::uint64_t seed = 20260823);

/// Strong positivity: nonnegative combination of simple positive monomials.
/// Exact for p=1 and for nu-tagged forms; otherwise attempts a nonnegative
/// least-squares fit over a sampled monomial dictionary. A failed fit is
/// inconclusive (positive=false, sampled), not a disproof.
PositivityVerdict strong_positivity_certificate(const ComplexForm& eta,
                                                int dict_size = 256,
                                                double tol = 1e-8,
                                                std::uint64_t seed = 20260823);

/// Min over complex q-frames of Re tr(P* H P), by multistart projected
/// gradient with the analytic tangent gradient. Independent oracle for
/// psh_margin (Ky Fan minimum principle).
double kyfan_min_trace(const HermitianMatrix& h, int q, int trials = 16,
                       std::uint64_t seed = 20260823);

/// Refines a frame in place to a local minimum of Re tr(P* H P).
double kyfan_refine(const HermitianMatrix& h, std::vector<std::vector<cplx>>& cols);

/// Nonnegative least squares (Lawson-Hanson): minimizes |Ax - b| over x >= 0.
/// A is row-major rows x cols. Returns x; residual written if requested.
std::vector<double> nnls(const std::vector<double>& A, int rows, int cols,
                         const std::vector<double>& b, double* residual = nullptr);

} // namespace kpsh
