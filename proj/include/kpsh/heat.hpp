#pragma once

#include <vector>

#include "kpsh/grid.hpp"

namespace kpsh {

/// Spectral heat flow on a flat torus field (period 2 pi per axis assumed by
/// the mode frequencies k = ..., -1, 0, 1, ...): Fourier mode k is damped by
/// exp(-t |k|^2). t = 0 is the identity; semigroup in t.
ScalarField heat_smooth(const ScalarField& phi, double t);

struct SmoothingReport {
    std::vector<double> t_values;
    std::vector<double> min_margins; // min of psh_margin_field on K at each t
    bool any_success = false;        // some tested t gives min >= 0
};

/// For each t, smooths phi and reports the min of psh_margin_field(.,q) on
/// the mask K (empty mask = whole grid).
SmoothingReport smoothing_preserves_psh(const ScalarField& phi, int q,
                                        const std::vector<double>& t_list,
                                        const std::vector<std::uint8_t>& K);

} // namespace kpsh
