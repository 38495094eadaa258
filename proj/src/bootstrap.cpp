#include "nldirac/bootstrap.hpp"

#include <algorithm>
#include <cmath>

namespace nldirac {

Real bootstrap_closed_form(int n, Real p, Real l0, int M) {
    const Real fixed = 1.0 / (n * (p - 2.0));
    return std::pow(p - 1.0, M) * (1.0 / l0 - fixed) + fixed;
}

BootstrapTrace bootstrap_exponents(int n, Real p, Real l0) {
    if (n < 3) throw Error(ErrorCode::parameter, "bootstrap needs n >= 3");
    const Real p_max = (2.0 * n - 2.0) / (n - 2.0);
    if (!(p > 2.0 && p < p_max)) {
        throw Error(ErrorCode::parameter, "bootstrap needs p in (2, " + std::to_string(p_max) + ")");
    }
    if (!(l0 > 0.0) || !std::isfinite(l0)) throw Error(ErrorCode::parameter, "bootstrap needs l0 > 0");

    BootstrapTrace t;
    t.n = n;
    t.p = p;
    t.l0 = l0;
    Real x = 1.0 / l0;
    for (int m = 0;; ++m) {
        const Real closed = bootstrap_closed_form(n, p, l0, m);
        t.reciprocals.push_back(x);
        t.closed_form.push_back(closed);
        t.max_deviation = std::max(t.max_deviation, std::abs(x - closed) / std::max(1.0, std::abs(closed)));
        if (x < 0.0) {
            t.m_star = m;
            break;
        }
        if (m == bootstrap_max_steps) break;
        x = (p - 1.0) * x - 1.0 / n;
    }
    return t;
}

}  // namespace nldirac
