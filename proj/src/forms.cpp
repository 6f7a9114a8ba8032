#include "kpsh/forms.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "kpsh/frames.hpp"
#include "kpsh/hermitian.hpp"

namespace kpsh {

bool multi_index_valid(const MultiIndex& I, int n) {
    for (std::size_t k = 0; k < I.size(); ++k) {
        if (I[k] < 0 || I[k] >= n) return false;
        if (k > 0 && I[k] <= I[k - 1]) return false;
    }
    return true;
}

int shuffle_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex& merged) {
    merged.clear();
    merged.reserve(a.size() + b.size());
    // Count inversions: every element of b preceded (in the concatenation
    // a+b) by a larger element of a contributes one transposition.
    int inversions = 0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] == b[ib]) return 0;
        if (a[ia] < b[ib]) {
            merged.push_back(a[ia++]);
        } else {
            inversions += static_cast<int>(a.size() - ia);
            merged.push_back(b[ib++]);
        }
    }
    while (ia < a.size()) merged.push_back(a[ia++]);
    while (ib < b.size()) merged.push_back(b[ib++]);
    return (inversions % 2 == 0) ? 1 : -1;
}

ComplexForm::ComplexForm(int n, int p, int q) : n_(n), p_(p), q_(q) {
    require(n >= 0 && p >= 0 && q >= 0 && p <= n && q <= n,
            "ComplexForm: bidegree out of range");
}

ComplexForm::ComplexForm(int n, int p, int q, CoeffMap coeffs)
    : n_(n), p_(p), q_(q), coeffs_(std::move(coeffs)) {
    require(n >= 0 && p >= 0 && q >= 0 && p <= n && q <= n,
            "ComplexForm: bidegree out of range");
    for (const auto& [key, c] : coeffs_) {
        require(static_cast<int>(key.I.size()) == p_ &&
                    static_cast<int>(key.J.size()) == q_,
                "ComplexForm: index pair of wrong length");
        require(multi_index_valid(key.I, n_) && multi_index_valid(key.J, n_),
                "ComplexForm: invalid multi-index");
    }
    prune();
}

void ComplexForm::prune() {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (std::abs(it->second) < kCoeffPrune)
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

cplx ComplexForm::coeff(const MultiIndex& I, const MultiIndex& J) const {
    auto it = coeffs_.find(Key{I, J});
    return it == coeffs_.end() ? cplx{0.0, 0.0} : it->second;
}

void ComplexForm::set_coeff(const MultiIndex& I, const MultiIndex& J, cplx c) {
    require(static_cast<int>(I.size()) == p_ && static_cast<int>(J.size()) == q_,
            "set_coeff: index pair of wrong length");
    require(multi_index_valid(I, n_) && multi_index_valid(J, n_),
            "set_coeff: invalid multi-index");
    if (std::abs(c) < kCoeffPrune)
        coeffs_.erase(Key{I, J});
    else
        coeffs_[Key{I, J}] = c;
}

ComplexForm ComplexForm::conjugate() const {
    // conj(dz_I ^ dzbar_J) = dzbar_I ^ dz_J = (-1)^{pq} dz_J ^ dzbar_I.
    ComplexForm out(n_, q_, p_);
    const double sign = (p_ * q_) % 2 == 0 ? 1.0 : -1.0;
    for (const auto& [key, c] : coeffs_)
        out.coeffs_[Key{key.J, key.I}] = sign * std::conj(c);
    return out;
}

bool ComplexForm::is_real(double tol) const {
    if (p_ != q_) return false;
    const ComplexForm c = conjugate();
    for (const auto& [key, v] : coeffs_)
        if (std::abs(v - c.coeff(key.I, key.J)) > tol) return false;
    for (const auto& [key, v] : c.coeffs_)
        if (std::abs(v - coeff(key.I, key.J)) > tol) return false;
    return true;
}

ComplexForm ComplexForm::operator+(const ComplexForm& o) const {
    require(n_ == o.n_ && p_ == o.p_ && q_ == o.q_, "form +: degree mismatch");
    ComplexForm out = *this;
    out.nu_tag_.reset();
    for (const auto& [key, c] : o.coeffs_) out.coeffs_[key] += c;
    out.prune();
    return out;
}

ComplexForm ComplexForm::operator-(const ComplexForm& o) const {
    return *this + o * cplx{-1.0, 0.0};
}

ComplexForm ComplexForm::operator*(cplx s) const {
    ComplexForm out(n_, p_, q_);
    for (const auto& [key, c] : coeffs_) out.coeffs_[key] = c * s;
    out.prune();
    return out;
}

ComplexForm wedge(const ComplexForm& a, const ComplexForm& b) {
    require(a.n() == b.n(), "wedge: dimension mismatch");
    require(a.p() + b.p() <= a.n() && a.q() + b.q() <= a.n(),
            "wedge: total degree overflow");
    ComplexForm out(a.n(), a.p() + b.p(), a.q() + b.q());
    ComplexForm::CoeffMap acc;
    MultiIndex mi, mj;
    for (const auto& [ka, ca] : a.coeffs()) {
        for (const auto& [kb, cb] : b.coeffs()) {
            const int si = shuffle_sign(ka.I, kb.I, mi);
            if (si == 0) continue;
            const int sj = shuffle_sign(ka.J, kb.J, mj);
            if (sj == 0) continue;
            // Move the dz factors of b (p_b of them) past the dzbar factors
            // of a (q_a of them).
            const int cross = (b.p() * a.q()) % 2 == 0 ? 1 : -1;
            acc[ComplexForm::Key{mi, mj}] +=
                ca * cb * static_cast<double>(si * sj * cross);
        }
    }
    return ComplexForm(a.n(), a.p() + b.p(), a.q() + b.q(), std::move(acc));
}

ComplexForm positive_monomial(int n, int j) {
    require(j >= 0 && j < n, "positive_monomial: index out of range");
    ComplexForm out(n, 1, 1);
    out.set_coeff({j}, {j}, cplx{0.0, 1.0});
    return out;
}

ComplexForm form_from_hermitian(const HermitianMatrix& h) {
    ComplexForm out(h.n(), 1, 1);
    for (int j = 0; j < h.n(); ++j)
        for (int k = 0; k < h.n(); ++k)
            out.set_coeff({j}, {k}, cplx{0.0, 1.0} * h(j, k));
    return out;
}

ComplexForm omega_std(int n) { return form_from_hermitian(HermitianMatrix::identity(n)); }

ComplexForm vol_form(int n) {
    ComplexForm out(n, 0, 0);
    out.set_coeff({}, {}, cplx{1.0, 0.0});
    for (int j = 0; j < n; ++j) out = wedge(out, positive_monomial(n, j));
    return out;
}

ComplexForm omega_power(const HermitianMatrix& omega, int k, bool normalized) {
    require(k >= 0 && k <= omega.n(), "omega_power: k out of range");
    ComplexForm out(omega.n(), 0, 0);
    out.set_coeff({}, {}, cplx{1.0, 0.0});
    const ComplexForm w = form_from_hermitian(omega);
    double fact = 1.0;
    for (int i = 1; i <= k; ++i) {
        out = wedge(out, w);
        fact *= i;
    }
    if (normalized) out = out * cplx{1.0 / fact, 0.0};
    return out;
}

namespace detail {

cplx det_small(std::vector<cplx> m, int d) {
    // LU with partial pivoting; d is tiny (<= n).
    cplx det{1.0, 0.0};
    for (int col = 0; col < d; ++col) {
        int piv = col;
        double best = std::abs(m[col * d + col]);
        for (int r = col + 1; r < d; ++r) {
            const double v = std::abs(m[r * d + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return {0.0, 0.0};
        if (piv != col) {
            for (int c = 0; c < d; ++c) std::swap(m[piv * d + c], m[col * d + c]);
            det = -det;
        }
        det *= m[col * d + col];
        for (int r = col + 1; r < d; ++r) {
            const cplx f = m[r * d + col] / m[col * d + col];
            for (int c = col; c < d; ++c) m[r * d + c] -= f * m[col * d + c];
        }
    }
    return det;
}

} // namespace detail

namespace {

// Coefficient of dz_{0..p-1} ^ dzbar_{0..p-1} in the standard volume
// monomial on C^p.
cplx plane_vol_coeff(int p) {
    const ComplexForm v = vol_form(p);
    MultiIndex full(p);
    for (int i = 0; i < p; ++i) full[i] = i;
    return v.coeff(full, full);
}

} // namespace

ComplexForm frame_monomial(const ComplexFrame& P) {
    const int n = P.n();
    ComplexForm out(n, 0, 0);
    out.set_coeff({}, {}, cplx{1.0, 0.0});
    for (int k = 0; k < P.p(); ++k) {
        const auto& u = P.column(k);
        ComplexForm xi_wedge(n, 1, 1); // i xi ^ xibar
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const cplx c = cplx{0.0, 1.0} * u[a] * std::conj(u[b]);
                if (std::abs(c) >= kCoeffPrune)
                    xi_wedge.set_coeff({a}, {b}, xi_wedge.coeff({a}, {b}) + c);
            }
        out = wedge(out, xi_wedge);
    }
    return out;
}

double restrict_complex(const ComplexForm& eta, const ComplexFrame& P) {
    require(eta.p() == eta.q(), "restrict_complex: form must be (p,p)");
    require(eta.is_real(1e-9), "restrict_complex: form must be real");
    require(eta.n() == P.n() && eta.p() == P.p(),
            "restrict_complex: degree/dimension mismatch");
    const int p = eta.p();
    if (p == 0) return eta.coeff({}, {}).real();

    // Pullback convention dz_j -> sum_m conj(P_{jm}) dw_m, so a (1,1)-form
    // with matrix H restricts to the plane form with matrix P* H P.
    cplx acc{0.0, 0.0};
    std::vector<cplx> sub(p * p);
    for (const auto& [key, c] : eta.coeffs()) {
        for (int r = 0; r < p; ++r)
            for (int m = 0; m < p; ++m) sub[r * p + m] = std::conj(P.column(m)[key.I[r]]);
        const cplx dI = detail::det_small(sub, p);
        if (std::abs(dI) < kCoeffPrune) continue;
        for (int r = 0; r < p; ++r)
            for (int m = 0; m < p; ++m) sub[r * p + m] = P.column(m)[key.J[r]];
        const cplx dJ = detail::det_small(sub, p);
        acc += c * dI * dJ;
    }
    return (acc / plane_vol_coeff(p)).real();
}

cplx eval_on_real_vectors(const ComplexForm& rho,
                          const std::vector<std::vector<double>>& vectors) {
    const int d = rho.degree();
    require(static_cast<int>(vectors.size()) == d,
            "eval_on_real_vectors: wrong number of vectors");
    cplx acc{0.0, 0.0};
    std::vector<cplx> m(d * d);
    for (const auto& [key, c] : rho.coeffs()) {
        // Rows: dz_{i} factors then dzbar_{j} factors; columns: vectors.
        for (int col = 0; col < d; ++col) {
            const auto& v = vectors[col];
            int row = 0;
            for (int i : key.I) m[(row++) * d + col] = cplx{v[2 * i], v[2 * i + 1]};
            for (int j : key.J) m[(row++) * d + col] = cplx{v[2 * j], -v[2 * j + 1]};
        }
        acc += c * detail::det_small(m, d);
    }
    return acc;
}

double restrict_real(const ComplexForm& rho, const RealFrame& V) {
    require(rho.degree() % 2 == 0, "restrict_real: odd total degree");
    const int q = rho.degree() / 2;
    require(V.k() == 2 * q && V.n() == rho.n(),
            "restrict_real: degree/dimension mismatch");
    std::vector<std::vector<double>> vs;
    vs.reserve(V.k());
    for (int j = 0; j < V.k(); ++j) vs.push_back(V.column(j));
    const cplx val = eval_on_real_vectors(rho, vs);
    // Normalization: omega_std evaluates to 2 on (d/dx, d/dy); divide by 2^q
    // so complex planes carry unit density (Wirtinger equality case).
    return val.real() / std::pow(2.0, q);
}

double poincare_pair(const ComplexForm& a, const ComplexForm& b) {
    require(a.n() == b.n(), "poincare_pair: dimension mismatch");
    require(a.p() == a.q() && b.p() == b.q() && a.p() + b.p() == a.n(),
            "poincare_pair: degrees not complementary");
    const ComplexForm w = wedge(a, b);
    const ComplexForm v = vol_form(a.n());
    MultiIndex full(a.n());
    for (int i = 0; i < a.n(); ++i) full[i] = i;
    const cplx num = w.coeff(full, full);
    const cplx den = v.coeff(full, full);
    return (num / den).real();
}

std::string ComplexForm::to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    j["p"] = p_;
    j["q"] = q_;
    j["entries"] = nlohmann::json::array();
    for (const auto& [key, c] : coeffs_) {
        j["entries"].push_back(
            {{"I", key.I}, {"J", key.J}, {"re", c.real()}, {"im", c.imag()}});
    }
    // Optional provenance of nu ^ omega^k shaped forms; preserving it across
    // serialization keeps the closed-form positivity tests exact.
    if (nu_tag_) {
        nlohmann::json t;
        t["k"] = nu_tag_->k;
        t["nu_re"] = nlohmann::json::array();
        t["nu_im"] = nlohmann::json::array();
        for (const cplx& c : nu_tag_->nu_entries) {
            t["nu_re"].push_back(c.real());
            t["nu_im"].push_back(c.imag());
        }
        j["nu_tag"] = t;
    }
    return j.dump();
}

ComplexForm ComplexForm::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ComplexForm out(j.at("n").get<int>(), j.at("p").get<int>(), j.at("q").get<int>());
    for (const auto& e : j.at("entries")) {
        out.set_coeff(e.at("I").get<MultiIndex>(), e.at("J").get<MultiIndex>(),
                      cplx{e.at("re").get<double>(), e.at("im").get<double>()});
    }
    if (j.contains("nu_tag")) {
        const auto& t = j.at("nu_tag");
        NuWedgeTag tag;
        tag.k = t.at("k").get<int>();
        const auto re = t.at("nu_re").get<std::vector<double>>();
        const auto im = t.at("nu_im").get<std::vector<double>>();
        require(re.size() == im.size(), "form json: malformed nu tag");
        for (std::size_t i = 0; i < re.size(); ++i)
            tag.nu_entries.emplace_back(re[i], im[i]);
        out.set_nu_tag(std::move(tag));
    }
    return out;
}

} // namespace kpsh
