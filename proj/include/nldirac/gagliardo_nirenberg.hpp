#pragma once

// Empirical lower bounds for Gagliardo-Nirenberg constants: the largest ratio
//   ||u||_target / ( ||u||_{L^2}^{1-theta} ||u||_source^theta )
// observed over seeded random band-limited trial fields. Trial 0 is the
// constant field 1.

#include "nldirac/fields.hpp"

#include <cstdint>

namespace nldirac {

enum class GnVariant { first, second, fractional };

struct GnSpec {
    GnVariant variant = GnVariant::first;
    int n = 2;
    Real p = 4.0;
    Real p_A = 4.0;  // ignored by `first`
};

struct GnExponents {
    Real target = 0.0;  // Lebesgue exponent on the left
    Real theta = 0.0;
};

GnExponents gn_exponents(const GnSpec& spec);

/// One trial ratio for a given field.
Real gn_ratio(const SpinorField& u, const GnSpec& spec);

struct GnEstimate {
    Real value = 0.0;
    int trials = 0;
    bool empirical_lower_bound = true;
};

GnEstimate estimate_gn_ratio(const Grid1D& grid, const GnSpec& spec, int trials, std::uint64_t seed = 0);

}  // namespace nldirac
