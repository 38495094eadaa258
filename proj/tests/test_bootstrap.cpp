#include "nldirac/bootstrap.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace nldirac;

namespace {

// Exact rational arithmetic for the hand examples.
struct Rational {
    long long num;
    long long den;

    Rational(long long n, long long d = 1) : num(n), den(d) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    Rational operator*(const Rational& o) const { return {num * o.num, den * o.den}; }
    Rational operator-(const Rational& o) const { return {num * o.den - o.num * den, den * o.den}; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    Real value() const { return Real(num) / Real(den); }
};

std::vector<Rational> exact_sequence(Rational pm1, Rational inv_n, Rational start, int steps) {
    std::vector<Rational> out{start};
    for (int m = 1; m < steps; ++m) out.push_back(pm1 * out.back() - inv_n);
    return out;
}

}  // namespace

TEST(Bootstrap, FourDimensionalExample) {
    const BootstrapTrace t = bootstrap_exponents(4, 8.0 / 3.0, 4.0);
    const auto exact = exact_sequence(Rational(5, 3), Rational(1, 4), Rational(1, 4), 4);
    EXPECT_TRUE(exact[3] == Rational(-11, 54));
    ASSERT_EQ(t.reciprocals.size(), 4u);
    for (std::size_t m = 0; m < 4; ++m) EXPECT_NEAR(t.reciprocals[m], exact[m].value(), 1e-15) << m;
    ASSERT_TRUE(t.m_star);
    EXPECT_EQ(*t.m_star, 3);
    EXPECT_LE(t.max_deviation, 1e-12);
}

TEST(Bootstrap, ThreeDimensionalExample) {
    const BootstrapTrace t = bootstrap_exponents(3, 3.0, 6.0);
    const auto exact = exact_sequence(Rational(2), Rational(1, 3), Rational(1, 6), 3);
    EXPECT_TRUE(exact[1] == Rational(0));
    EXPECT_TRUE(exact[2] == Rational(-1, 3));
    ASSERT_EQ(t.reciprocals.size(), 3u);
    for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(t.reciprocals[m], exact[m].value(), 1e-15);
    ASSERT_TRUE(t.m_star);
    EXPECT_EQ(*t.m_star, 2);
}

TEST(Bootstrap, FixedPointIsConstant) {
    const int n = 5;
    const Real p = 2.5;
    const Real l0 = n * (p - 2.0);
    const BootstrapTrace t = bootstrap_exponents(n, p, l0);
    EXPECT_FALSE(t.m_star);
    EXPECT_EQ(t.reciprocals.size(), std::size_t(bootstrap_max_steps) + 1);
    for (Real r : t.reciprocals) EXPECT_NEAR(r, 1.0 / l0, 1e-12);
}

TEST(Bootstrap, ClosedFormMatchesLongDoubleRecursion) {
    std::mt19937_64 rng(123);
    for (int t = 0; t < 100; ++t) {
        const int n = 3 + int(rng() % 6);
        const Real p_max = (2.0 * n - 2.0) / (n - 2.0);
        const Real p = 2.0 + (p_max - 2.0) * (0.05 + 0.9 * std::uniform_real_distribution<Real>()(rng));
        const Real l0 = 1.0 + 10.0 * std::uniform_real_distribution<Real>()(rng);
        const BootstrapTrace trace = bootstrap_exponents(n, p, l0);
        EXPECT_LE(trace.max_deviation, 1e-12);
        long double r = 1.0L / l0;
        for (std::size_t m = 0; m < trace.reciprocals.size(); ++m) {
            EXPECT_NEAR(trace.reciprocals[m], double(r), 1e-12 * std::max(1.0, std::abs(double(r))));
            EXPECT_NEAR(bootstrap_closed_form(n, p, l0, int(m)), trace.reciprocals[m],
                        1e-12 * std::max(1.0, std::abs(trace.reciprocals[m])));
            r = (p - 1.0L) * r - 1.0L / n;
        }
        if (trace.m_star) {
            EXPECT_LT(trace.reciprocals[*trace.m_star], 0.0);
            for (int m = 0; m < *trace.m_star; ++m) EXPECT_GE(trace.reciprocals[m], 0.0);
        }
    }
}

TEST(Bootstrap, StartBelowFixedPointTurnsNegative) {
    // 1/l0 < 1/(n(p-2)) means the deviation from the fixed point grows with a negative sign.
    const BootstrapTrace t = bootstrap_exponents(3, 3.5, 6.0);
    EXPECT_TRUE(t.m_star);
}

TEST(Bootstrap, Preconditions) {
    EXPECT_THROW(bootstrap_exponents(3, 2.0, 6.0), Error);
    EXPECT_THROW(bootstrap_exponents(2, 3.0, 6.0), Error);
    EXPECT_THROW(bootstrap_exponents(3, 3.0, 0.0), Error);
    EXPECT_THROW(bootstrap_exponents(3, 4.5, 6.0), Error);
    try {
        bootstrap_exponents(3, 1.5, 6.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parameter);
    }
}
