#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace kpsh {

/// Deterministic, portable pseudo-random generator (splitmix64 core).
/// Used everywhere instead of <random> distributions so that reports are
/// byte-identical across platforms and standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Marsaglia polar method (deterministic draw order).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Independent child stream; used to give parallel trials fixed seeds.
    Rng spawn(std::uint64_t stream) {
        return Rng(next_u64() ^ (0xa0761d6478bd642fULL * (stream + 1)));
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace kpsh
