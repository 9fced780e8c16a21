#pragma once

// Exact arithmetic over Q and real quadratic fields Q(sqrt d).
//
// Every quantity in the library is built on FieldElement, an exact a + b*sqrt(d)
// with rational a, b. Elements of Q carry d == 1 and b == 0; they are promoted
// into Q(sqrt d) when combined with a quadratic element.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arithorb {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Raised when a result contradicts an identity that must hold by construction.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_squarefree(std::int64_t d)
{
    if (d < 0) d = -d;
    if (d == 0) return false;
    for (std::int64_t p = 2; p * p <= d; ++p) {
        if (d % (p * p) == 0) return false;
    }
    return true;
}

inline std::optional<Integer> exact_isqrt(const Integer& n)
{
    if (n < 0) return std::nullopt;
    Integer r = boost::multiprecision::sqrt(n);
    if (r * r != n) return std::nullopt;
    return r;
}

/// Square root in Q, if there is one.
inline std::optional<Rational> rational_sqrt(const Rational& x)
{
    if (x < 0) return std::nullopt;
    auto num = exact_isqrt(boost::multiprecision::numerator(x));
    if (!num) return std::nullopt;
    auto den = exact_isqrt(boost::multiprecision::denominator(x));
    if (!den) return std::nullopt;
    return Rational(*num, *den);
}

/// Brent's variant of Pollard rho on an odd composite n. Returns a proper
/// factor, or nullopt once `budget` iterations have been spent.
inline std::optional<Integer> pollard_rho(const Integer& n, std::uint64_t seed, std::uint64_t budget)
{
    std::mt19937_64 rng(seed);
    std::uint64_t spent = 0;
    while (spent < budget) {
        Integer c = Integer(rng() % 1000003) % n + 1;
        Integer y = Integer(rng()) % n;
        Integer g = 1, q = 1, x, ys;
        std::uint64_t r = 1;
        auto step = [&](const Integer& v) { return (v * v + c) % n; };
        do {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = step(y);
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                ys = y;
                std::uint64_t lim = std::min<std::uint64_t>(128, r - k);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = step(y);
                    q = (q * boost::multiprecision::abs(x - y)) % n;
                }
                g = boost::multiprecision::gcd(q, n);
                k += lim;
            }
            spent += 2 * r;
            r *= 2;
        } while (g == 1 && spent < budget);
        if (g == 1) break;
        if (g == n) {
            do {
                ys = step(ys);
                g = boost::multiprecision::gcd(boost::multiprecision::abs(x - ys), n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
    return std::nullopt;
}

struct Factorization {
    std::map<Integer, unsigned> primes;
    /// Composite cofactors left over when the rho budget ran out.
    std::vector<Integer> unfactored;
};

inline Factorization factor_with_budget(Integer n, std::uint64_t rho_budget)
{
    Factorization out;
    n = boost::multiprecision::abs(n);
    for (unsigned p = 2; p < 1000; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            ++out.primes[Integer(p)];
            n /= p;
        }
    }
    std::vector<Integer> stack{n};
    std::uint64_t seed = 1;
    while (!stack.empty()) {
        Integer m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (boost::multiprecision::miller_rabin_test(m, 32)) {
            ++out.primes[m];
            continue;
        }
        if (auto r = exact_isqrt(m)) {
            stack.push_back(*r);
            stack.push_back(*r);
            continue;
        }
        if (auto f = pollard_rho(m, seed++, rho_budget)) {
            stack.push_back(*f);
            stack.push_back(m / *f);
        } else {
            out.unfactored.push_back(m);
        }
    }
    return out;
}

/// Prime factorisation of |n|, n != 0.
inline std::map<Integer, unsigned> factor(const Integer& n)
{
    if (n == 0) throw std::invalid_argument("cannot factor zero");
    return factor_with_budget(n, std::numeric_limits<std::uint64_t>::max()).primes;
}

/// Iteration budget for the squarefree kernel; enough to split any factor below about 10^18.
inline constexpr std::uint64_t kernel_rho_budget = std::uint64_t{1} << 22;

/// Signed kernel of a nonzero integer, n = kernel * m^2. Squarefree whenever
/// |n| splits within the rho budget; a composite cofactor that does not is kept whole.
inline Integer squarefree_kernel(const Integer& n)
{
    if (n == 0) throw std::invalid_argument("cannot factor zero");
    Integer k = n < 0 ? Integer(-1) : Integer(1);
    Factorization f = factor_with_budget(n, kernel_rho_budget);
    for (const auto& [p, e] : f.primes) {
        if (e % 2 == 1) k *= p;
    }
    for (const auto& c : f.unfactored) k *= c;
    return k;
}

inline std::string to_string(const Rational& x)
{
    return boost::multiprecision::numerator(x).str() + "/" + boost::multiprecision::denominator(x).str();
}

inline Rational parse_rational(std::string_view s)
{
    auto bad = [&] { return std::invalid_argument("malformed rational '" + std::string(s) + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto parse_int = [&](std::string_view t, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !t.empty() && t[0] == '-') i = 1;
        if (i == t.size()) throw bad();
        for (std::size_t j = i; j < t.size(); ++j) {
            if (t[j] < '0' || t[j] > '9') throw bad();
        }
        return Integer(std::string(t));
    };
    Integer num = parse_int(s.substr(0, slash), true);
    Integer den = slash == std::string_view::npos ? Integer(1) : parse_int(s.substr(slash + 1), false);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
}

} // namespace detail

/// A totally real field of degree at most 2, with a distinguished real place Id.
///
/// Place 0 sends sqrt(d) to the positive root, place 1 to the negative one.
class TotallyRealField {
public:
    static TotallyRealField rationals() { return TotallyRealField(1, 0); }

    static TotallyRealField real_quadratic(std::int64_t d, int id_place = 0)
    {
        if (d < 2 || !detail::is_squarefree(d)) {
            throw std::invalid_argument("radicand must be a squarefree integer >= 2, got " + std::to_string(d));
        }
        if (id_place != 0 && id_place != 1) {
            throw std::invalid_argument("id place must be 0 or 1 for a real quadratic field");
        }
        return TotallyRealField(d, id_place);
    }

    bool is_rationals() const noexcept { return d_ == 1; }
    std::int64_t radicand() const noexcept { return d_; }
    int degree() const noexcept { return d_ == 1 ? 1 : 2; }
    int id_place() const noexcept { return id_place_; }

    std::vector<int> places() const
    {
        if (d_ == 1) return {0};
        return {0, 1};
    }

    std::string name() const { return d_ == 1 ? "Q" : "Q(sqrt " + std::to_string(d_) + ")"; }

    bool operator==(const TotallyRealField&) const = default;

private:
    TotallyRealField(std::int64_t d, int id) : d_(d), id_place_(id) {}

    std::int64_t d_;
    int id_place_;
};

class FieldElement {
public:
    FieldElement() = default;
    FieldElement(long long v) : a_(v) {}
    FieldElement(Rational a) : a_(std::move(a)) {}

    FieldElement(Rational a, Rational b, std::int64_t d) : a_(std::move(a)), b_(std::move(b)), d_(d)
    {
        if (d == 1) {
            if (b_ != 0) throw std::invalid_argument("a rational element cannot carry a sqrt term");
        } else if (d < 2 || !detail::is_squarefree(d)) {
            throw std::invalid_argument("radicand must be a squarefree integer >= 2, got " + std::to_string(d));
        }
    }

    /// The element a + b*sqrt(d) of the given field.
    static FieldElement in(const TotallyRealField& k, Rational a, Rational b = 0)
    {
        return FieldElement(std::move(a), std::move(b), k.radicand());
    }

    const Rational& rational_part() const noexcept { return a_; }
    const Rational& sqrt_part() const noexcept { return b_; }
    std::int64_t radicand() const noexcept { return d_; }

    bool is_zero() const noexcept { return a_ == 0 && b_ == 0; }
    bool is_rational() const noexcept { return b_ == 0; }

    /// Lifts this element into k; fails if it lives in a different field.
    FieldElement lifted_to(const TotallyRealField& k) const
    {
        if (d_ != 1 && d_ != k.radicand()) throw std::invalid_argument("element does not belong to " + k.name());
        return FieldElement(a_, b_, k.radicand());
    }

    FieldElement conjugate() const
    {
        FieldElement r = *this;
        r.b_ = -r.b_;
        return r;
    }

    Rational norm() const { return a_ * a_ - b_ * b_ * d_; }
    Rational trace() const { return 2 * a_; }

    FieldElement inverse() const
    {
        if (is_zero()) throw std::domain_error("division by zero");
        Rational n = norm();
        FieldElement r = *this;
        r.a_ = a_ / n;
        r.b_ = -b_ / n;
        return r;
    }

    FieldElement operator-() const
    {
        FieldElement r = *this;
        r.a_ = -r.a_;
        r.b_ = -r.b_;
        return r;
    }

    FieldElement& operator+=(const FieldElement& o)
    {
        d_ = common_radicand(o);
        a_ += o.a_;
        b_ += o.b_;
        return *this;
    }

    FieldElement& operator-=(const FieldElement& o)
    {
        d_ = common_radicand(o);
        a_ -= o.a_;
        b_ -= o.b_;
        return *this;
    }

    FieldElement& operator*=(const FieldElement& o)
    {
        d_ = common_radicand(o);
        if (o.b_ == 0) {
            a_ *= o.a_;
            b_ *= o.a_;
        } else {
            Rational na = a_ * o.a_ + b_ * o.b_ * d_;
            b_ = a_ * o.b_ + b_ * o.a_;
            a_ = std::move(na);
        }
        return *this;
    }

    FieldElement& operator/=(const FieldElement& o)
    {
        if (o.b_ == 0) {
            if (o.a_ == 0) throw std::domain_error("division by zero");
            d_ = common_radicand(o);
            a_ /= o.a_;
            b_ /= o.a_;
            return *this;
        }
        return *this *= o.inverse();
    }

    friend FieldElement operator+(FieldElement x, const FieldElement& y) { return x += y; }
    friend FieldElement operator-(FieldElement x, const FieldElement& y) { return x -= y; }
    friend FieldElement operator*(FieldElement x, const FieldElement& y) { return x *= y; }
    friend FieldElement operator/(FieldElement x, const FieldElement& y) { return x /= y; }

    friend bool operator==(const FieldElement& x, const FieldElement& y)
    {
        if (x.a_ != y.a_ || x.b_ != y.b_) return false;
        return x.b_ == 0 || x.d_ == y.d_;
    }

    /// "p/q" in Q, "p/q+r/s*sqrt(d)" in Q(sqrt d); minus signs sit on numerators.
    std::string to_string() const
    {
        if (d_ == 1) return detail::to_string(a_);
        return detail::to_string(a_) + "+" + detail::to_string(b_) + "*sqrt(" + std::to_string(d_) + ")";
    }

    /// Inverse of to_string. Also accepts bare integers and "a-r/s*sqrt(d)".
    static FieldElement parse(std::string_view s)
    {
        auto bad = [&] { return std::invalid_argument("malformed field element '" + std::string(s) + "'"); };
        constexpr std::string_view marker = "*sqrt(";
        auto star = s.find(marker);
        if (star == std::string_view::npos) return FieldElement(detail::parse_rational(s));
        if (s.back() != ')') throw bad();
        std::string_view head = s.substr(0, star);
        std::string_view radicand = s.substr(star + marker.size(), s.size() - star - marker.size() - 1);
        // The split between a and b is the last '+' or '-' that does not begin the string.
        std::size_t split = std::string_view::npos;
        for (std::size_t i = head.size(); i-- > 1;) {
            if (head[i] == '+' || head[i] == '-') {
                split = i;
                break;
            }
        }
        if (split == std::string_view::npos) throw bad();
        std::size_t a_end = split;
        std::string_view bstr = head.substr(split + 1);
        bool negate = head[split] == '-';
        if (negate && head[split - 1] == '+') {
            // "a+-b": the '-' belongs to b and the '+' separates.
            a_end = split - 1;
            negate = false;
            bstr = head.substr(split);
        }
        Rational a = detail::parse_rational(head.substr(0, a_end));
        Rational b = detail::parse_rational(bstr);
        if (negate) b = -b;
        for (char ch : radicand) {
            if (ch < '0' || ch > '9') throw bad();
        }
        if (radicand.empty() || radicand.size() > 18) throw bad();
        return FieldElement(a, b, std::stoll(std::string(radicand)));
    }

    friend std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.to_string(); }

private:
    std::int64_t common_radicand(const FieldElement& o) const
    {
        if (d_ == o.d_ || o.d_ == 1) return d_;
        if (d_ == 1) return o.d_;
        throw std::invalid_argument("arithmetic between Q(sqrt " + std::to_string(d_) + ") and Q(sqrt " +
                                    std::to_string(o.d_) + ")");
    }

    Rational a_{0};
    Rational b_{0};
    std::int64_t d_ = 1;
};

/// Exact sign of the image of x under the real embedding `place`.
inline int sign_at(const FieldElement& x, int place)
{
    if (x.is_zero()) throw std::domain_error("sign of zero undefined");
    int places = x.radicand() == 1 ? 1 : 2;
    if (place < 0 || place >= places) {
        throw std::invalid_argument("place " + std::to_string(place) + " is not a real embedding of this field");
    }
    const Rational& a = x.rational_part();
    Rational b = place == 0 ? x.sqrt_part() : Rational(-x.sqrt_part());
    int sa = a.sign();
    int sb = b.sign();
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // Opposite signs: the term of larger absolute value wins.
    Rational lhs = a * a;
    Rational rhs = b * b * x.radicand();
    return lhs > rhs ? sa : sb;
}

inline int sign_at(const FieldElement& x, const TotallyRealField& k, int place)
{
    return sign_at(x.lifted_to(k), place);
}

/// True iff x = y^2 for some y in the field of x.
inline bool is_square(const FieldElement& x)
{
    if (x.is_zero()) throw std::domain_error("is_square of zero");
    if (x.radicand() == 1) return detail::rational_sqrt(x.rational_part()).has_value();

    // y = u + v sqrt(d): y^2 = (u^2 + d v^2) + 2uv sqrt(d), N(x) = (u^2 - d v^2)^2.
    auto c = detail::rational_sqrt(x.norm());
    if (!c) return false;
    const Rational& a = x.rational_part();
    Rational abs_b = boost::multiprecision::abs(x.sqrt_part());
    for (const Rational& u2 : {Rational((a + *c) / 2), Rational((a - *c) / 2)}) {
        auto u = detail::rational_sqrt(u2);
        if (!u) continue;
        auto v = detail::rational_sqrt((a - u2) / x.radicand());
        if (!v) continue;
        if (2 * *u * *v == abs_b) return true;
    }
    return false;
}

/// Membership in k_inf^*: positive at every real place other than Id.
inline bool in_k_infinity_star(const FieldElement& x, const TotallyRealField& k)
{
    if (x.is_zero()) throw std::domain_error("zero is not in k^*");
    FieldElement y = x.lifted_to(k);
    for (int v : k.places()) {
        if (v != k.id_place() && sign_at(y, v) != 1) return false;
    }
    return true;
}

/// An element of k^*/(k^*)^2.
///
/// Over Q the reduced representative is the signed squarefree integer of the
/// class; over Q(sqrt d) it is only stripped of its rational square content.
/// Equality is decided by testing whether the quotient is a square.
class SquareClass {
public:
    SquareClass(TotallyRealField k, const FieldElement& representative)
        : field_(std::move(k)), rep_(representative.lifted_to(field_))
    {
        if (rep_.is_zero()) throw std::domain_error("zero has no square class");
    }

    static SquareClass trivial(const TotallyRealField& k) { return SquareClass(k, FieldElement::in(k, 1)); }

    const TotallyRealField& field() const noexcept { return field_; }
    /// Computed on demand: reduction factors the rational content.
    FieldElement representative() const { return reduce(field_, rep_); }

    bool is_trivial() const { return is_square(rep_); }

    /// The sign at every non-Id place is a class invariant, since squares are totally positive.
    bool in_k_infinity_star() const { return arithorb::in_k_infinity_star(rep_, field_); }

    friend bool operator==(const SquareClass& x, const SquareClass& y)
    {
        if (!(x.field_ == y.field_)) return false;
        return is_square(x.rep_ / y.rep_);
    }

    friend SquareClass operator*(const SquareClass& x, const SquareClass& y)
    {
        if (!(x.field_ == y.field_)) throw std::invalid_argument("square classes of different fields");
        return SquareClass(x.field_, x.rep_ * y.rep_);
    }

    std::string to_string() const { return representative().to_string(); }

private:
    static FieldElement reduce(const TotallyRealField& k, const FieldElement& x)
    {
        if (x.is_zero()) throw std::domain_error("zero has no square class");
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        const Rational& a = x.rational_part();
        const Rational& b = x.sqrt_part();
        Integer l = boost::multiprecision::lcm(denominator(a), denominator(b));
        Integer ia = numerator(a) * (l / denominator(a));
        Integer ib = numerator(b) * (l / denominator(b));
        Integer g = boost::multiprecision::gcd(ia, ib);
        // x = (g / l) * (ia/g + ib/g sqrt d), and g/l ~ g*l modulo squares.
        Integer content = detail::squarefree_kernel(g * l);
        if (ib == 0) {
            Integer s = ia.sign() < 0 ? -content : content;
            return FieldElement::in(k, Rational(s));
        }
        return FieldElement::in(k, Rational(content * (ia / g)), Rational(content * (ib / g)));
    }

    TotallyRealField field_;
    FieldElement rep_;
};

} // namespace arithorb
