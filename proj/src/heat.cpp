#include "kpsh/heat.hpp"

#include <cmath>
#include <numbers>

#include "kpsh/calculus.hpp"

namespace kpsh {

namespace {

bool is_pow2(int s) { return s > 0 && (s & (s - 1)) == 0; }

// In-place radix-2 FFT on a stride-1 buffer; inverse scales by 1/s.
void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const int s = static_cast<int>(a.size());
    for (int i = 1, j = 0; i < s; ++i) {
        int bit = s >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= s; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / len * (inverse ? 1.0 : -1.0);
        const cplx wl{std::cos(ang), std::sin(ang)};
        for (int i = 0; i < s; i += len) {
            cplx w{1.0, 0.0};
            for (int k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (cplx& v : a) v /= static_cast<double>(s);
}

void dft_direct(std::vector<cplx>& a, bool inverse) {
    const int s = static_cast<int>(a.size());
    std::vector<cplx> out(s, cplx{0.0, 0.0});
    const double sgn = inverse ? 1.0 : -1.0;
    for (int k = 0; k < s; ++k)
        for (int j = 0; j < s; ++j) {
            const double ang = sgn * 2.0 * std::numbers::pi * k * j / s;
            out[k] += a[j] * cplx{std::cos(ang), std::sin(ang)};
        }
    if (inverse)
        for (cplx& v : out) v /= static_cast<double>(s);
    a = std::move(out);
}

void transform_axis(std::vector<cplx>& data, const std::vector<int>& shape, int axis,
                    bool inverse) {
    const int s = shape[axis];
    std::int64_t inner = 1, outer = 1;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
    for (int a = 0; a < axis; ++a) outer *= shape[a];

    std::vector<cplx> line(s);
    for (std::int64_t o = 0; o < outer; ++o)
        for (std::int64_t i = 0; i < inner; ++i) {
            const std::int64_t base = o * s * inner + i;
            for (int k = 0; k < s; ++k) line[k] = data[base + k * inner];
            if (is_pow2(s))
                fft_pow2(line, inverse);
            else
                dft_direct(line, inverse);
            for (int k = 0; k < s; ++k) data[base + k * inner] = line[k];
        }
}

} // namespace

ScalarField heat_smooth(const ScalarField& phi, double t) {
    phi.validate();
    require(phi.domain.topology == GridDomain::Topology::torus,
            "heat_smooth: field must live on a torus");
    require(t >= 0.0, "heat_smooth: t must be nonnegative");
    const auto& d = phi.domain;
    if (t == 0.0) return phi;

    std::vector<cplx> data(phi.values.begin(), phi.values.end());
    for (int a = 0; a < d.axes(); ++a) transform_axis(data, d.shape, a, false);

    // Mode (k_0, ..., k_{2n-1}) decays by exp(-t sum kappa_a^2) with
    // kappa = 2 pi k / period (plain integers for the 2 pi torus).
    std::vector<std::vector<double>> kappa2(d.axes());
    for (int a = 0; a < d.axes(); ++a) {
        const double period = d.shape[a] * d.spacing[a];
        kappa2[a].resize(d.shape[a]);
        for (int k = 0; k < d.shape[a]; ++k) {
            const int signed_k = (k <= d.shape[a] / 2) ? k : k - d.shape[a];
            const double kap = 2.0 * std::numbers::pi * signed_k / period;
            kappa2[a][k] = kap * kap;
        }
    }
    std::vector<int> idx(d.axes(), 0);
    for (std::int64_t f = 0; f < d.size(); ++f) {
        double k2 = 0.0;
        for (int a = 0; a < d.axes(); ++a) k2 += kappa2[a][idx[a]];
        data[f] *= std::exp(-t * k2);
        for (int a = d.axes() - 1; a >= 0; --a) {
            if (++idx[a] < d.shape[a]) break;
            idx[a] = 0;
        }
    }

    for (int a = 0; a < d.axes(); ++a) transform_axis(data, d.shape, a, true);
    ScalarField out;
    out.domain = d;
    out.values.resize(phi.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = data[i].real();
    return out;
}

SmoothingReport smoothing_preserves_psh(const ScalarField& phi, int q,
                                        const std::vector<double>& t_list,
                                        const std::vector<std::uint8_t>& K) {
    SmoothingReport rep;
    for (double t : t_list) {
        const ScalarField smooth = heat_smooth(phi, t);
        const ScalarField margin = psh_margin_field(smooth, q);
        double min_margin = 1e300;
        for (std::size_t i = 0; i < margin.values.size(); ++i) {
            if (!margin.masked_in(static_cast<std::int64_t>(i))) continue;
            if (!K.empty() && K[i] == 0) continue;
            min_margin = std::min(min_margin, margin.values[i]);
        }
        rep.t_values.push_back(t);
        rep.min_margins.push_back(min_margin);
        if (min_margin >= 0.0) rep.any_success = true;
    }
    return rep;
}

} // namespace kpsh
