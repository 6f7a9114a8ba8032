#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kpsh {

using cplx = std::complex<double>;

/// Thrown when an operation's preconditions are violated.
class contract_error : public std::invalid_argument {
public:
    explicit contract_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an internal cross-check (two computation routes) disagrees.
class consistency_error : public std::runtime_error {
public:
    explicit consistency_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw contract_error(msg);
}

// Coefficients below this magnitude are pruned after form arithmetic.
inline constexpr double kCoeffPrune = 1e-15;

} // namespace kpsh
