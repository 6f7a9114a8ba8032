#include "kpsh/potentials.hpp"

#include <cmath>

#include "kpsh/calculus.hpp"

namespace kpsh {

namespace {

std::vector<cplx> to_complex(const std::vector<double>& x) {
    std::vector<cplx> z(x.size() / 2);
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = cplx{x[2 * j], x[2 * j + 1]};
    return z;
}

// Real gradient from the Wirtinger derivatives phi_{zbar_j}:
// phi_x = 2 Re(phi_zbar), phi_y = 2 Im(phi_zbar).
std::vector<double> gradient_from_zbar(const std::vector<cplx>& dzbar) {
    std::vector<double> g(2 * dzbar.size());
    for (std::size_t j = 0; j < dzbar.size(); ++j) {
        g[2 * j] = 2.0 * dzbar[j].real();
        g[2 * j + 1] = 2.0 * dzbar[j].imag();
    }
    return g;
}

class QuadraticPotential final : public Potential {
public:
    QuadraticPotential(HermitianMatrix h, std::vector<double> lin, double c)
        : h_(std::move(h)), lin_(std::move(lin)), c_(c) {
        if (lin_.empty()) lin_.assign(2 * h_.n(), 0.0);
        require(static_cast<int>(lin_.size()) == 2 * h_.n(),
                "quadratic potential: linear part has wrong length");
    }
    int n() const override { return h_.n(); }
    double value(const std::vector<double>& x) const override {
        const auto z = to_complex(x);
        double v = c_;
        for (int j = 0; j < h_.n(); ++j) {
            for (int k = 0; k < h_.n(); ++k)
                v += (z[j] * h_(j, k) * std::conj(z[k])).real();
            v += lin_[2 * j] * x[2 * j] + lin_[2 * j + 1] * x[2 * j + 1];
        }
        return v;
    }
    std::vector<double> gradient(const std::vector<double>& x) const override {
        const auto z = to_complex(x);
        std::vector<cplx> dzbar(h_.n(), cplx{0.0, 0.0});
        for (int j = 0; j < h_.n(); ++j)
            for (int k = 0; k < h_.n(); ++k) dzbar[j] += h_(k, j) * z[k];
        auto g = gradient_from_zbar(dzbar);
        for (std::size_t a = 0; a < g.size(); ++a) g[a] += lin_[a];
        return g;
    }
    HermitianMatrix ddc(const std::vector<double>&) const override {
        return h_ * 2.0;
    }

private:
    HermitianMatrix h_;
    std::vector<double> lin_;
    double c_;
};

class RadialPowerPotential final : public Potential {
public:
    RadialPowerPotential(int n, double beta, double scale, std::vector<cplx> center)
        : n_(n), beta_(beta), scale_(scale), center_(std::move(center)) {
        require(n >= 1 && beta > 0.0, "radial power potential: bad parameters");
        if (center_.empty()) center_.assign(n, cplx{0.0, 0.0});
    }
    int n() const override { return n_; }
    double rho(const std::vector<double>& x, std::vector<cplx>& w) const {
        w = to_complex(x);
        double r = 0.0;
        for (int j = 0; j < n_; ++j) {
            w[j] -= center_[j];
            r += std::norm(w[j]);
        }
        return r;
    }
    double value(const std::vector<double>& x) const override {
        std::vector<cplx> w;
        return scale_ * std::pow(rho(x, w), beta_);
    }
    std::vector<double> gradient(const std::vector<double>& x) const override {
        std::vector<cplx> w;
        const double r = rho(x, w);
        std::vector<cplx> dzbar(n_);
        const double f = scale_ * beta_ * std::pow(r, beta_ - 1.0);
        for (int j = 0; j < n_; ++j) dzbar[j] = f * w[j];
        return gradient_from_zbar(dzbar);
    }
    HermitianMatrix ddc(const std::vector<double>& x) const override {
        std::vector<cplx> w;
        const double r = rho(x, w);
        std::vector<cplx> h(n_ * n_);
        const double f1 = 2.0 * scale_ * beta_ * std::pow(r, beta_ - 1.0);
        const double f2 = 2.0 * scale_ * beta_ * (beta_ - 1.0) * std::pow(r, beta_ - 2.0);
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                h[j * n_ + k] = f2 * std::conj(w[j]) * w[k];
                if (j == k) h[j * n_ + k] += f1;
            }
        return HermitianMatrix(n_, std::move(h));
    }
    bool singular_near(const std::vector<double>& x, double radius) const override {
        if (beta_ >= 1.0 && beta_ == std::floor(beta_)) return false;
        std::vector<cplx> w;
        return std::sqrt(rho(x, w)) <= radius;
    }

private:
    int n_;
    double beta_, scale_;
    std::vector<cplx> center_;
};

class LogDistancePotential final : public Potential {
public:
    LogDistancePotential(SubvarietyZ z, double lambda) : z_(std::move(z)), lambda_(lambda) {
        // M = I - projector onto the subspace directions.
        const int n = z_.n;
        m_.assign(n * n, cplx{0.0, 0.0});
        for (int i = 0; i < n; ++i) m_[i * n + i] = cplx{1.0, 0.0};
        for (const auto& b : z_.basis)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m_[i * n + j] -= b[i] * std::conj(b[j]);
    }
    int n() const override { return z_.n; }
    // rho = w* M w with w = z - center; returns Mw too.
    double rho(const std::vector<double>& x, std::vector<cplx>& mw) const {
        auto w = to_complex(x);
        const int n = z_.n;
        for (int j = 0; j < n; ++j) w[j] -= z_.center[j];
        mw.assign(n, cplx{0.0, 0.0});
        double r = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) mw[i] += m_[i * n + j] * w[j];
            r += (std::conj(w[i]) * mw[i]).real();
        }
        return r;
    }
    double value(const std::vector<double>& x) const override {
        std::vector<cplx> mw;
        return 0.5 * lambda_ * std::log(rho(x, mw));
    }
    std::vector<double> gradient(const std::vector<double>& x) const override {
        std::vector<cplx> mw;
        const double r = rho(x, mw);
        std::vector<cplx> dzbar(z_.n);
        for (int k = 0; k < z_.n; ++k) dzbar[k] = 0.5 * lambda_ * mw[k] / r;
        return gradient_from_zbar(dzbar);
    }
    HermitianMatrix ddc(const std::vector<double>& x) const override {
        std::vector<cplx> mw;
        const double r = rho(x, mw);
        const int n = z_.n;
        std::vector<cplx> h(n * n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                h[j * n + k] = lambda_ * (std::conj(m_[j * n + k]) / r -
                                          std::conj(mw[j]) * mw[k] / (r * r));
        return HermitianMatrix(n, std::move(h));
    }
    bool singular_near(const std::vector<double>& x, double radius) const override {
        return z_.distance(x) <= radius;
    }

private:
    SubvarietyZ z_;
    double lambda_;
    std::vector<cplx> m_;
};

class ConstantPotential final : public Potential {
public:
    ConstantPotential(int n, double c) : n_(n), c_(c) {}
    int n() const override { return n_; }
    double value(const std::vector<double>&) const override { return c_; }
    std::vector<double> gradient(const std::vector<double>&) const override {
        return std::vector<double>(2 * n_, 0.0);
    }
    HermitianMatrix ddc(const std::vector<double>&) const override {
        return HermitianMatrix::zero(n_);
    }

private:
    int n_;
    double c_;
};

class SumPotential final : public Potential {
public:
    SumPotential(std::vector<PotentialPtr> parts, std::vector<double> weights)
        : parts_(std::move(parts)), weights_(std::move(weights)) {
        require(!parts_.empty(), "sum potential: no parts");
        if (weights_.empty()) weights_.assign(parts_.size(), 1.0);
        require(weights_.size() == parts_.size(), "sum potential: weight count");
        for (const auto& p : parts_)
            require(p->n() == parts_[0]->n(), "sum potential: dimension mismatch");
    }
    int n() const override { return parts_[0]->n(); }
    double value(const std::vector<double>& x) const override {
        double v = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            v += weights_[i] * parts_[i]->value(x);
        return v;
    }
    std::vector<double> gradient(const std::vector<double>& x) const override {
        std::vector<double> g(2 * n(), 0.0);
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            const auto gi = parts_[i]->gradient(x);
            for (std::size_t a = 0; a < g.size(); ++a) g[a] += weights_[i] * gi[a];
        }
        return g;
    }
    HermitianMatrix ddc(const std::vector<double>& x) const override {
        HermitianMatrix h = parts_[0]->ddc(x) * weights_[0];
        for (std::size_t i = 1; i < parts_.size(); ++i)
            h = h + parts_[i]->ddc(x) * weights_[i];
        return h;
    }
    bool singular_near(const std::vector<double>& x, double radius) const override {
        for (const auto& p : parts_)
            if (p->singular_near(x, radius)) return true;
        return false;
    }

private:
    std::vector<PotentialPtr> parts_;
    std::vector<double> weights_;
};

class RegMaxPotential final : public Potential {
public:
    RegMaxPotential(PotentialPtr a, PotentialPtr b, double eps)
        : a_(std::move(a)), b_(std::move(b)), eps_(eps) {
        require(a_->n() == b_->n(), "regmax potential: dimension mismatch");
        require(eps_ > 0.0, "regmax potential: eps must be positive");
    }
    int n() const override { return a_->n(); }
    double value(const std::vector<double>& x) const override {
        return regularized_max(a_->value(x), b_->value(x), eps_);
    }
    std::vector<double> gradient(const std::vector<double>& x) const override {
        const double d = a_->value(x) - b_->value(x);
        const double mp = kernel_prime(d);
        const auto ga = a_->gradient(x);
        const auto gb = b_->gradient(x);
        std::vector<double> g(ga.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] = 0.5 * ((ga[i] + gb[i]) + mp * (ga[i] - gb[i]));
        return g;
    }
    HermitianMatrix ddc(const std::vector<double>& x) const override {
        const double d = a_->value(x) - b_->value(x);
        const double mp = kernel_prime(d);
        const double mpp = kernel_second(d);
        const HermitianMatrix ha = a_->ddc(x);
        const HermitianMatrix hb = b_->ddc(x);
        HermitianMatrix h = ha * (0.5 * (1.0 + mp)) + hb * (0.5 * (1.0 - mp));
        if (mpp != 0.0) {
            // Cross term M''(d) * d_{z_j} d_{zbar_k} from the chain rule.
            const auto ga = a_->gradient(x);
            const auto gb = b_->gradient(x);
            const int nn = n();
            std::vector<cplx> dz(nn);
            for (int j = 0; j < nn; ++j)
                dz[j] = 0.5 * cplx{ga[2 * j] - gb[2 * j], -(ga[2 * j + 1] - gb[2 * j + 1])};
            std::vector<cplx> cross(nn * nn);
            for (int j = 0; j < nn; ++j)
                for (int k = 0; k < nn; ++k) cross[j * nn + k] = dz[j] * std::conj(dz[k]);
            h = h + HermitianMatrix(nn, std::move(cross)) * mpp;
        }
        return h;
    }
    bool singular_near(const std::vector<double>& x, double radius) const override {
        return a_->singular_near(x, radius) || b_->singular_near(x, radius);
    }

private:
    double kernel_prime(double t) const {
        if (t >= eps_) return 1.0;
        if (t <= -eps_) return -1.0;
        return -t * t * t / (2.0 * eps_ * eps_ * eps_) + 3.0 * t / (2.0 * eps_);
    }
    double kernel_second(double t) const {
        if (std::abs(t) >= eps_) return 0.0;
        return 3.0 / (2.0 * eps_) - 3.0 * t * t / (2.0 * eps_ * eps_ * eps_);
    }
    PotentialPtr a_, b_;
    double eps_;
};

} // namespace

double SubvarietyZ::distance(const std::vector<double>& x) const {
    auto w = to_complex(x);
    for (int j = 0; j < n; ++j) w[j] -= center[j];
    for (const auto& b : basis) {
        cplx dot{0.0, 0.0};
        for (int j = 0; j < n; ++j) dot += std::conj(b[j]) * w[j];
        for (int j = 0; j < n; ++j) w[j] -= dot * b[j];
    }
    double r = 0.0;
    for (const cplx& v : w) r += std::norm(v);
    return std::sqrt(r);
}

SubvarietyZ SubvarietyZ::point(std::vector<cplx> center) {
    SubvarietyZ z;
    z.n = static_cast<int>(center.size());
    z.dim_c = 0;
    z.center = std::move(center);
    return z;
}

PotentialPtr quadratic_potential(const HermitianMatrix& h, std::vector<double> linear,
                                 double c) {
    return std::make_shared<QuadraticPotential>(h, std::move(linear), c);
}

PotentialPtr radial_power_potential(int n, double beta, double scale,
                                    std::vector<cplx> center) {
    return std::make_shared<RadialPowerPotential>(n, beta, scale, std::move(center));
}

PotentialPtr log_distance_potential(const SubvarietyZ& z, double lambda) {
    require(static_cast<int>(z.center.size()) == z.n, "log potential: bad center");
    require(static_cast<int>(z.basis.size()) == z.dim_c, "log potential: bad basis");
    return std::make_shared<LogDistancePotential>(z, lambda);
}

PotentialPtr constant_potential(int n, double c) {
    return std::make_shared<ConstantPotential>(n, c);
}

PotentialPtr sum_potential(std::vector<PotentialPtr> parts, std::vector<double> weights) {
    return std::make_shared<SumPotential>(std::move(parts), std::move(weights));
}

PotentialPtr regmax_potential(PotentialPtr a, PotentialPtr b, double eps) {
    return std::make_shared<RegMaxPotential>(std::move(a), std::move(b), eps);
}

ScalarField sample_potential(const Potential& p, const GridDomain& d) {
    require(p.n() == d.n, "sample_potential: dimension mismatch");
    return ScalarField::sample(d, [&](const std::vector<double>& x) { return p.value(x); });
}

} // namespace kpsh
