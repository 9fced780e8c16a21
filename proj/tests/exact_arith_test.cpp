#include "arithorb/exact_arith.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace arithorb;

namespace {

const TotallyRealField QQ = TotallyRealField::rationals();
const TotallyRealField Q5 = TotallyRealField::real_quadratic(5);
const TotallyRealField Q2 = TotallyRealField::real_quadratic(2);

FieldElement q5(Rational a, Rational b) { return FieldElement::in(Q5, std::move(a), std::move(b)); }

FieldElement random_element(std::mt19937_64& rng, const TotallyRealField& k)
{
    std::uniform_int_distribution<int> num(-12, 12), den(1, 6);
    for (;;) {
        FieldElement x = FieldElement::in(k, Rational(num(rng), den(rng)),
                                          k.is_rationals() ? Rational(0) : Rational(num(rng), den(rng)));
        if (!x.is_zero()) return x;
    }
}

} // namespace

TEST(SignAt, Examples)
{
    EXPECT_EQ(sign_at(q5(Rational(1, 2), Rational(1, 2)), 0), 1);
    EXPECT_EQ(sign_at(q5(1, 1), 1), -1);
    EXPECT_EQ(sign_at(FieldElement(Rational(-3, 7)), 0), -1);
}

TEST(SignAt, ComparesSquaresExactly)
{
    // 161 - 72 sqrt 5 is about 0.0062, 161^2 - 5*72^2 = 1.
    EXPECT_EQ(sign_at(q5(161, -72), 0), 1);
    EXPECT_EQ(sign_at(q5(-161, 72), 0), -1);
    EXPECT_EQ(sign_at(q5(161, -72), 1), 1);
    EXPECT_EQ(sign_at(q5(0, -1), 0), -1);
    EXPECT_EQ(sign_at(q5(0, -1), 1), 1);
}

TEST(SignAt, Errors)
{
    EXPECT_THROW(sign_at(FieldElement(), 0), std::domain_error);
    EXPECT_THROW(sign_at(FieldElement(3), 1), std::invalid_argument);
    EXPECT_THROW(sign_at(q5(1, 1), 2), std::invalid_argument);
}

TEST(IsSquare, Examples)
{
    EXPECT_TRUE(is_square(FieldElement(Rational(9, 4))));
    EXPECT_TRUE(is_square(FieldElement::in(Q2, 3, 2)));
    EXPECT_FALSE(is_square(q5(0, 1)));
    EXPECT_FALSE(is_square(FieldElement(Rational(-9, 4))));
    EXPECT_FALSE(is_square(FieldElement(Rational(2))));
    // 5 = (sqrt 5)^2 is a square in Q(sqrt 5) but not in Q.
    EXPECT_TRUE(is_square(q5(5, 0)));
    EXPECT_FALSE(is_square(FieldElement(5)));
    EXPECT_THROW(is_square(FieldElement()), std::domain_error);
}

TEST(IsSquare, SqrtFiveHasNoRootBruteForce)
{
    // Oracle: (u + v sqrt 5)^2 = sqrt 5 has no solution with small coordinates.
    FieldElement target = q5(0, 1);
    for (int p = -20; p <= 20; ++p) {
        for (int q = 1; q <= 6; ++q) {
            for (int r = -20; r <= 20; ++r) {
                for (int s = 1; s <= 6; ++s) {
                    FieldElement y = q5(Rational(p, q), Rational(r, s));
                    ASSERT_FALSE(y * y == target);
                }
            }
        }
    }
    EXPECT_FALSE(is_square(target));
}

TEST(IsSquare, AgreesWithBruteForceOnSmallBox)
{
    // Every square of a small element is detected; a non-square is never a product y*y in the box.
    std::vector<FieldElement> squares;
    for (int p = -6; p <= 6; ++p) {
        for (int r = -6; r <= 6; ++r) {
            if (p == 0 && r == 0) continue;
            FieldElement y = q5(Rational(p, 2), Rational(r, 2));
            squares.push_back(y * y);
            EXPECT_TRUE(is_square(y * y));
        }
    }
    for (int a = -8; a <= 8; ++a) {
        for (int b = -8; b <= 8; ++b) {
            if (a == 0 && b == 0) continue;
            FieldElement x = q5(a, b);
            bool in_box = std::find(squares.begin(), squares.end(), x) != squares.end();
            if (in_box) {
                EXPECT_TRUE(is_square(x)) << x;
            }
        }
    }
}

TEST(InKInfinityStar, Examples)
{
    EXPECT_TRUE(in_k_infinity_star(FieldElement(-7), QQ));
    EXPECT_TRUE(in_k_infinity_star(q5(Rational(1, 2), Rational(-1, 2)), Q5));
    EXPECT_FALSE(in_k_infinity_star(FieldElement::in(Q5, -1), Q5));
    EXPECT_FALSE(in_k_infinity_star(FieldElement(-1), Q5));
    // With Id moved to the conjugate place the roles swap.
    auto q5_conj = TotallyRealField::real_quadratic(5, 1);
    EXPECT_FALSE(in_k_infinity_star(q5(Rational(1, 2), Rational(-1, 2)), q5_conj));
    EXPECT_TRUE(in_k_infinity_star(q5(Rational(1, 2), Rational(1, 2)), q5_conj));
    EXPECT_THROW(in_k_infinity_star(FieldElement(), QQ), std::domain_error);
}

TEST(Field, RejectsNonSquarefreeRadicand)
{
    EXPECT_THROW(TotallyRealField::real_quadratic(12), std::invalid_argument);
    EXPECT_THROW(TotallyRealField::real_quadratic(1), std::invalid_argument);
    EXPECT_THROW(FieldElement(1, 1, 8), std::invalid_argument);
    EXPECT_THROW(TotallyRealField::real_quadratic(5, 2), std::invalid_argument);
    EXPECT_THROW(q5(1, 1) + FieldElement::in(Q2, 1, 1), std::invalid_argument);
}

TEST(Field, ArithmeticProperties)
{
    std::mt19937_64 rng(7);
    for (const auto& k : {QQ, Q5, Q2}) {
        for (int i = 0; i < 300; ++i) {
            FieldElement x = random_element(rng, k);
            FieldElement y = random_element(rng, k);
            EXPECT_EQ((x * y) / y, x);
            EXPECT_EQ(x * x.inverse(), FieldElement(1));
            EXPECT_EQ(x - x, FieldElement());
            for (int v : k.places()) {
                EXPECT_EQ(sign_at(x * y, v), sign_at(x, v) * sign_at(y, v));
                if (is_square(x)) {
                    EXPECT_EQ(sign_at(x, v), 1);
                }
            }
            EXPECT_TRUE(is_square(x * x));
            if (in_k_infinity_star(x, k) && in_k_infinity_star(y, k)) {
                EXPECT_TRUE(in_k_infinity_star(x * y, k));
            }
            EXPECT_EQ(in_k_infinity_star(x * y * y, k), in_k_infinity_star(x, k));
        }
    }
}

TEST(SquareClass, GroupProperties)
{
    std::mt19937_64 rng(11);
    for (const auto& k : {QQ, Q5}) {
        for (int i = 0; i < 150; ++i) {
            FieldElement x = random_element(rng, k);
            FieldElement y = random_element(rng, k);
            FieldElement z = random_element(rng, k);
            SquareClass cx(k, x), cy(k, y), cz(k, z);
            EXPECT_EQ(cx, cx);
            EXPECT_EQ(cx == cy, cy == cx);
            if (cx == cy && cy == cz) {
                EXPECT_EQ(cx, cz);
            }
            EXPECT_EQ(cx * cy, SquareClass(k, x * y));
            EXPECT_EQ(SquareClass(k, x * x * y), cy);
            EXPECT_TRUE((cx * cx).is_trivial());
        }
    }
}

TEST(SquareClass, CanonicalRepresentativeOverQ)
{
    EXPECT_EQ(SquareClass(QQ, FieldElement(Rational(18, 5))).to_string(), "10/1");
    EXPECT_EQ(SquareClass(QQ, FieldElement(Rational(-4, 9))).to_string(), "-1/1");
    Integer m61 = (Integer(1) << 61) - 1; // prime
    Integer m31 = (Integer(1) << 31) - 1; // prime
    EXPECT_EQ(SquareClass(QQ, FieldElement(Rational(m61 * m61 * m31 * 12))).to_string(), (m31 * 3).str() + "/1");
    EXPECT_TRUE(SquareClass::trivial(Q5).is_trivial());
}

TEST(SquareClass, QuadraticRepresentativeDropsRationalSquares)
{
    // 12 (1 + sqrt 5)/2 = 4 * 3 * (1 + sqrt 5)/2 ~ 3 (1 + sqrt 5) ... up to squares.
    SquareClass c(Q5, q5(6, 6));
    EXPECT_EQ(c, SquareClass(Q5, q5(Rational(1, 2), Rational(1, 2)) * FieldElement(3)));
    EXPECT_EQ(c.representative().to_string(), "6/1+6/1*sqrt(5)");
    SquareClass d(Q5, q5(Rational(8, 9), Rational(8, 9)));
    EXPECT_EQ(d.representative().to_string(), "2/1+2/1*sqrt(5)");
}

TEST(TextEncoding, Formats)
{
    EXPECT_EQ(q5(Rational(1, 2), Rational(1, 2)).to_string(), "1/2+1/2*sqrt(5)");
    EXPECT_EQ(q5(Rational(1, 2), Rational(-1, 2)).to_string(), "1/2+-1/2*sqrt(5)");
    EXPECT_EQ(FieldElement(Rational(-3, 7)).to_string(), "-3/7");
    EXPECT_EQ(FieldElement(4).to_string(), "4/1");
    EXPECT_EQ(q5(3, 0).to_string(), "3/1+0/1*sqrt(5)");

    EXPECT_EQ(FieldElement::parse("7"), FieldElement(7));
    EXPECT_EQ(FieldElement::parse("-6/4"), FieldElement(Rational(-3, 2)));
    EXPECT_EQ(FieldElement::parse("1/2-1/2*sqrt(5)"), q5(Rational(1, 2), Rational(-1, 2)));
    EXPECT_EQ(FieldElement::parse("-1/2+-1/2*sqrt(5)"), q5(Rational(-1, 2), Rational(-1, 2)));
    EXPECT_EQ(FieldElement::parse("-1-1*sqrt(5)"), q5(-1, -1));

    for (const char* bad : {"", "1/0", "a", "1/2+", "1+1*sqrt(4)", "1+1*sqrt(x)", "1/-2", "1+1*sqrt(5", "--1"}) {
        EXPECT_THROW(FieldElement::parse(bad), std::invalid_argument) << bad;
    }
}

TEST(TextEncoding, RoundTripProperty)
{
    std::mt19937_64 rng(3);
    for (const auto& k : {QQ, Q5, Q2}) {
        for (int i = 0; i < 200; ++i) {
            FieldElement x = random_element(rng, k);
            std::string s = x.to_string();
            FieldElement y = FieldElement::parse(s);
            EXPECT_EQ(y, x);
            EXPECT_EQ(y.to_string(), s);
        }
    }
}
