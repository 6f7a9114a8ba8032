#pragma once

#include <map>
#include <optional>
#include <vector>

#include "kpsh/common.hpp"

namespace kpsh {

/// Strictly increasing list of axis indices in [0, n).
using MultiIndex = std::vector<int>;

bool multi_index_valid(const MultiIndex& I, int n);

/// Sign of merging two disjoint increasing index lists into one increasing
/// list. Returns 0 if the lists overlap, otherwise +/-1; `merged` receives
/// the sorted union.
int shuffle_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex& merged);

class ComplexFrame; // frames.hpp
class RealFrame;
class HermitianMatrix; // hermitian.hpp

/// A (p,q)-form with constant complex coefficients on C^n, stored sparsely
/// over the monomial basis dz_I ^ dzbar_J (all dz factors first, ascending
/// indices). Values are immutable after construction.
class ComplexForm {
public:
    struct Key {
        MultiIndex I, J;
        bool operator<(const Key& o) const {
            if (I != o.I) return I < o.I;
            return J < o.J;
        }
        bool operator==(const Key& o) const { return I == o.I && J == o.J; }
    };
    using CoeffMap = std::map<Key, cplx>;

    ComplexForm(int n, int p, int q);
    ComplexForm(int n, int p, int q, CoeffMap coeffs);

    int n() const { return n_; }
    int p() const { return p_; }
    int q() const { return q_; }
    int degree() const { return p_ + q_; }
    const CoeffMap& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    cplx coeff(const MultiIndex& I, const MultiIndex& J) const;
    void set_coeff(const MultiIndex& I, const MultiIndex& J, cplx c);

    ComplexForm conjugate() const;
    /// True iff the form equals its own conjugate (entrywise, tol 1e-12).
    bool is_real(double tol = 1e-12) const;

    ComplexForm operator+(const ComplexForm& o) const;
    ComplexForm operator-(const ComplexForm& o) const;
    ComplexForm operator*(cplx s) const;

    /// Provenance tag set by nu_wedge_omega_k; enables closed-form
    /// positivity tests on forms of shape nu ^ omega^k.
    struct NuWedgeTag {
        std::vector<cplx> nu_entries; // row-major n x n Hermitian
        int k = 0;
    };
    const std::optional<NuWedgeTag>& nu_tag() const { return nu_tag_; }
    void set_nu_tag(NuWedgeTag tag) { nu_tag_ = std::move(tag); }

    std::string to_json() const;
    static ComplexForm from_json(const std::string& text);

private:
    int n_, p_, q_;
    CoeffMap coeffs_;
    std::optional<NuWedgeTag> nu_tag_;
    void prune();
};

/// Graded-commutative exterior product.
ComplexForm wedge(const ComplexForm& a, const ComplexForm& b);

/// The positive (1,1)-monomial i dz_j ^ dzbar_j (j = k) on C^n.
ComplexForm positive_monomial(int n, int j);

/// i sum_{j,k} h_{jk} dz_j ^ dzbar_k for a Hermitian coefficient matrix.
ComplexForm form_from_hermitian(const HermitianMatrix& h);

/// The standard Kaehler form i sum_j dz_j ^ dzbar_j on C^n.
ComplexForm omega_std(int n);

/// Product of the n standard positive (1,1)-monomials; omega_std^n = n! vol.
ComplexForm vol_form(int n);

/// omega^k for omega given by a Hermitian matrix; divided by k! if normalized.
ComplexForm omega_power(const HermitianMatrix& omega, int k, bool normalized);

/// Simple strongly positive (p,p)-monomial built from the frame's covectors:
/// product over columns u of i xi ^ xibar with xi = sum_j u_j dz_j.
ComplexForm frame_monomial(const ComplexFrame& P);

/// Density of a real (p,p)-form restricted to the complex p-plane spanned by
/// the frame, relative to the plane's own unit volume. Normalized so that the
/// frame's own positive monomial restricts to +1.
double restrict_complex(const ComplexForm& eta, const ComplexFrame& P);

/// Value of a real form of total degree 2q on an ordered orthonormal real
/// frame, normalized so that omega_std has unit density on complex lines.
double restrict_real(const ComplexForm& rho, const RealFrame& V);

/// Raw evaluation of the form on real tangent vectors (layout x0,y0,x1,y1,...).
cplx eval_on_real_vectors(const ComplexForm& rho,
                          const std::vector<std::vector<double>>& vectors);

/// Coefficient of a ^ b relative to vol_form(n); requires complementary
/// bidegrees and both forms real.
double poincare_pair(const ComplexForm& a, const ComplexForm& b);

namespace detail {
/// Determinant of a small dense complex matrix (LU with partial pivoting).
cplx det_small(std::vector<cplx> m, int d);
} // namespace detail

} // namespace kpsh
