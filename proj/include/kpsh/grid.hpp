#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kpsh/common.hpp"
#include "kpsh/hermitian.hpp"

namespace kpsh {

/// Uniform grid over a box or flat torus in R^{2n} ~ C^n.
/// Real axis layout: axis 2j is x_j, axis 2j+1 is y_j.
struct GridDomain {
    enum class Topology { box, torus };

    int n = 1;                     // complex dimension
    std::vector<int> shape;        // points per real axis (2n entries)
    std::vector<double> spacing;   // h per axis
    std::vector<double> origin;    // coordinate of index 0 per axis
    Topology topology = Topology::box;

    int axes() const { return 2 * n; }
    std::int64_t size() const;
    void validate() const;

    /// Row-major flat index (last axis fastest).
    std::int64_t flat(const std::vector<int>& idx) const;
    std::vector<int> unflat(std::int64_t f) const;
    std::vector<double> point(const std::vector<int>& idx) const;

    /// Neighbour index along `axis` offset by `step`, wrapping on tori.
    /// Returns -1 if the neighbour falls outside a box.
    std::int64_t neighbour(const std::vector<int>& idx, int axis, int step) const;

    bool operator==(const GridDomain& o) const = default;
};

/// Sampled real function on a grid, with an optional validity mask.
struct ScalarField {
    GridDomain domain;
    std::vector<double> values;
    std::vector<std::uint8_t> mask; // empty = all valid

    void validate() const;
    bool masked_in(std::int64_t f) const { return mask.empty() || mask[f] != 0; }

    static ScalarField sample(const GridDomain& d,
                              const std::function<double(const std::vector<double>&)>& f);
};

/// Sampled Hermitian-matrix field over the interior points of a grid.
struct HermitianField {
    GridDomain domain;
    std::vector<int> interior_lo, interior_hi; // inclusive index bounds per axis
    std::vector<HermitianMatrix> values;       // row-major over interior box
    std::vector<std::int64_t> flat_index;      // grid flat index per entry

    std::size_t size() const { return values.size(); }
};

/// Interior iteration with `margin` cells clipped on box domains (tori keep
/// the full grid). Calls fn(idx, flat).
void for_each_interior(const GridDomain& d, int margin,
                       const std::function<void(const std::vector<int>&, std::int64_t)>& fn);

/// Field file IO. Extension selects encoding: .bin (row-major float64) or
/// .csv (one value per line). Both start with the text header
/// `n, shape..., spacing..., origin..., topology`.
void write_field(const ScalarField& f, const std::string& path);
ScalarField read_field(const std::string& path);

} // namespace kpsh
