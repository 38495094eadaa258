#pragma once

// Reciprocal Lebesgue exponents of the regularity bootstrap:
//   1/l_M = (p-1)/l_{M-1} - 1/n,  1/l_0 = 1/l0,
// iterated until the first strictly negative value (at most 64 steps).

#include "nldirac/types.hpp"

#include <optional>
#include <vector>

namespace nldirac {

struct BootstrapTrace {
    int n = 0;
    Real p = 0.0;
    Real l0 = 0.0;
    std::vector<Real> reciprocals;  // recursion values 1/l_M
    std::vector<Real> closed_form;  // (p-1)^M (1/l0 - 1/(n(p-2))) + 1/(n(p-2))
    std::optional<int> m_star;      // first M with 1/l_M < 0
    Real max_deviation = 0.0;       // max |recursion - closed form| / max(1, |closed form|)
};

inline constexpr int bootstrap_max_steps = 64;

BootstrapTrace bootstrap_exponents(int n, Real p, Real l0);

/// Corrected closed form of the recursion at step M.
Real bootstrap_closed_form(int n, Real p, Real l0, int M);

}  // namespace nldirac
