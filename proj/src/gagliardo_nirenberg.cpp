#include "nldirac/gagliardo_nirenberg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nldirac {

GnExponents gn_exponents(const GnSpec& spec) {
    if (spec.n < 2) throw Error(ErrorCode::parameter, "dimension parameter n must be >= 2");
    if (!(spec.p >= 2.0)) throw Error(ErrorCode::parameter, "exponent p must be >= 2");
    const Real n = spec.n;
    GnExponents e;
    switch (spec.variant) {
        case GnVariant::first:
            e.target = 2.0 * (spec.p - 1.0);
            e.theta = n / 2.0 * (1.0 - 1.0 / (spec.p - 1.0));
            break;
        case GnVariant::second:
            e.target = spec.p_A;
            e.theta = n / 2.0 - n / spec.p_A;
            break;
        case GnVariant::fractional:
            e.target = 2.0 * spec.p_A / (spec.p_A - spec.p + 2.0);
            e.theta = n * (spec.p - 2.0) / spec.p_A;
            break;
    }
    if (!(e.target > 1.0) || !std::isfinite(e.target) || e.theta < 0.0 || e.theta > 1.0) {
        throw Error(ErrorCode::parameter, "Gagliardo-Nirenberg exponents out of range");
    }
    return e;
}

Real gn_ratio(const SpinorField& u, const GnSpec& spec) {
    const GnExponents e = gn_exponents(spec);
    const Real source = spec.variant == GnVariant::fractional ? slobodeckij_norm(u, 0.5) : w1q_norm(u, 2.0);
    const Real base = l2_norm(u);
    const Real den = std::pow(base, 1.0 - e.theta) * std::pow(source, e.theta);
    if (den == 0.0) return 0.0;
    return lp_norm(u, e.target) / den;
}

GnEstimate estimate_gn_ratio(const Grid1D& grid, const GnSpec& spec, int trials, std::uint64_t seed) {
    if (trials < 1) throw Error(ErrorCode::parameter, "gn trials must be >= 1");
    gn_exponents(spec);
    std::mt19937_64 rng(seed);
    std::normal_distribution<Real> normal(0.0, 1.0);
    const Index band = std::max<Index>(2, std::min<Index>(12, grid.size() / 8));
    const Real base = 2.0 * pi / grid.length();

    GnEstimate out;
    out.trials = trials;
    out.value = gn_ratio(SpinorField::sample(grid, 1, [](Real) { return Complex(1.0); }), spec);
    for (int t = 1; t < trials; ++t) {
        std::vector<Complex> coeff(2 * band + 1);
        for (Index k = -band; k <= band; ++k) {
            coeff[k + band] = Complex(normal(rng), normal(rng)) / (1.0 + std::abs(Real(k)));
        }
        const SpinorField u = SpinorField::sample(grid, 1, [&](Real x) {
            Complex v = 0.0;
            for (Index k = -band; k <= band; ++k) v += coeff[k + band] * std::exp(Complex(0.0, base * k * x));
            return v;
        });
        out.value = std::max(out.value, gn_ratio(u, spec));
    }
    return out;
}

}  // namespace nldirac
