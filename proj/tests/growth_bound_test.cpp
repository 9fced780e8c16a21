#include "arithorb/growth_bound.hpp"
#include "machin_pi.hpp"

#include <gtest/gtest.h>

using namespace arithorb;

namespace {

using reference::exact_bound;
using reference::machin_pi;
using reference::PiBracket;
constexpr unsigned kBits = reference::machin_bits;

Rational to_rational(const BigFloat& x)
{
    Rational q;
    mpfr_get_q(q.backend().data(), x.get());
    return q;
}

double to_double(const BigFloat& x) { return mpfr_get_d(x.get(), MPFR_RNDN); }

/// |float - exact| / exact, bounded above using the oracle interval.
Rational relative_error(const GrowthBoundValue& v)
{
    auto [lo, hi] = exact_bound(v.exact_numerator, v.pi_power);
    Rational f = to_rational(v.float_value);
    Rational err = std::max(boost::multiprecision::abs(f - lo), boost::multiprecision::abs(f - hi));
    return err / lo;
}

} // namespace

TEST(MachinOracle, AgreesWithMpfrPi)
{
    PiBracket pi = machin_pi();
    BigFloat mp = BigFloat::pi(kBits - 32);
    Rational q = to_rational(mp);
    Rational lo(pi.lo, Integer(1) << kBits), hi(pi.hi, Integer(1) << kBits);
    EXPECT_LT(q, hi + Rational(1, Integer(1) << (kBits - 40)));
    EXPECT_GT(q, lo - Rational(1, Integer(1) << (kBits - 40)));
}

TEST(EulerCharBound, Examples)
{
    auto b1 = euler_char_bound(1, 1);
    EXPECT_EQ(b1.exact_numerator, 1);
    EXPECT_EQ(b1.pi_power, 2u);
    EXPECT_NEAR(to_double(b1.float_value), 0.0253302959105844, 1e-15);

    auto b2 = euler_char_bound(2, 1);
    EXPECT_EQ(b2.exact_numerator, 6);
    EXPECT_EQ(b2.pi_power, 6u);
    EXPECT_NEAR(to_double(b2.float_value) / 9.7515138121486e-5, 1.0, 1e-12);

    auto b3 = euler_char_bound(3, 1);
    EXPECT_EQ(b3.exact_numerator, 720); // 1! 3! 5!
    EXPECT_EQ(b3.pi_power, 12u);
}

TEST(EulerCharBound, Errors)
{
    EXPECT_THROW(euler_char_bound(0, 1), std::invalid_argument);
    EXPECT_THROW(euler_char_bound(1, 0), std::invalid_argument);
    EXPECT_THROW(euler_char_bound(1, 1, 32), std::invalid_argument);
}

TEST(EulerCharBound, DegreeIsAnExponent)
{
    for (unsigned r = 1; r <= 12; ++r) {
        auto one = euler_char_bound(r, 1);
        for (unsigned degree = 2; degree <= 3; ++degree) {
            auto v = euler_char_bound(r, degree);
            EXPECT_EQ(v.exact_numerator, boost::multiprecision::pow(one.exact_numerator, degree));
            EXPECT_EQ(v.pi_power, degree * one.pi_power);
        }
        auto sq = euler_char_bound(r, 2);
        BigFloat prod(256);
        mpfr_sqr(prod.get(), one.float_value.get(), MPFR_RNDN);
        Rational rel = boost::multiprecision::abs(to_rational(prod) / to_rational(sq.float_value) - 1);
        EXPECT_LT(rel, Rational(1, Integer(1) << 120)) << "r = " << r;
    }
}

TEST(EulerCharBound, PiPowerIsSumOfEvenExponents)
{
    for (unsigned r = 1; r <= 20; ++r) {
        unsigned long sum = 0;
        for (unsigned i = 1; i <= r; ++i) sum += 2 * i;
        EXPECT_EQ(euler_char_bound(r, 1).pi_power, sum);
    }
}

TEST(EulerCharBound, FloatMatchesExactValue)
{
    for (mpfr_prec_t bits : {64, 128, 256}) {
        Rational tol(1, Integer(1) << static_cast<unsigned>(bits - 8));
        for (unsigned r = 1; r <= 20; ++r) {
            for (unsigned degree = 1; degree <= 3; ++degree) {
                auto v = euler_char_bound(r, degree, bits);
                EXPECT_LT(relative_error(v), tol) << "r = " << r << " degree = " << degree << " bits = " << bits;
            }
        }
    }
}

TEST(EulerCharBound, RatioLaw)
{
    for (unsigned r = 1; r < 20; ++r) {
        auto a = euler_char_bound(r, 1);
        auto b = euler_char_bound(r + 1, 1);
        EXPECT_EQ(b.exact_numerator, a.exact_numerator * factorial(2 * r + 1));
        EXPECT_EQ(b.pi_power, a.pi_power + 2 * r + 2);
    }
}

TEST(Certificate, ThresholdUpToTen)
{
    auto c = superexponential_certificate(10);
    ASSERT_EQ(c.rows.size(), 9u);
    EXPECT_TRUE(c.ratio_identity_all);
    ASSERT_TRUE(c.threshold.has_value());
    EXPECT_EQ(*c.threshold, 8u);
    EXPECT_FALSE(c.normalized_threshold.has_value());
}

TEST(Certificate, MonotonicityMatchesOracle)
{
    auto c = superexponential_certificate(20);
    EXPECT_TRUE(c.ratio_identity_all);
    for (const auto& row : c.rows) {
        unsigned r = row.value.r;
        auto [lo, hi] = exact_bound(factorial(2 * r + 1), 2 * r + 2);
        ASSERT_TRUE(lo > 1 || hi < 1);
        EXPECT_EQ(row.increases, lo > 1) << "r = " << r;
        auto [nlo, nhi] = exact_bound(factorial(2 * r - 1), 2 * r + 2);
        ASSERT_TRUE(nlo > 1 || nhi < 1);
        EXPECT_EQ(row.normalized_increases, nlo > 1) << "r = " << r;
    }
    EXPECT_EQ(*c.threshold, 8u);
    EXPECT_EQ(*c.normalized_threshold, 11u);
}

TEST(Certificate, ThresholdNotReached)
{
    auto c = superexponential_certificate(3);
    EXPECT_FALSE(c.threshold.has_value());
    EXPECT_THROW(superexponential_certificate(2), std::invalid_argument);
}

TEST(TwoPiComparison, DecidesBothWays)
{
    EXPECT_EQ(compare_with_two_pi_power(39, 2), -1); // (2 pi)^2 = 39.478...
    EXPECT_EQ(compare_with_two_pi_power(40, 2), 1);
    EXPECT_EQ(compare_with_two_pi_power(0, 1), -1);
}
