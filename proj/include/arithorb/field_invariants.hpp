#pragma once

// Class numbers, fundamental units and the restricted 2-class number
//   h_inf_2 = 2^([k:Q]-1) * h_2 / [U : U_inf]
// for Q and real quadratic fields.
//
// The narrow class number of Q(sqrt d) is obtained by partitioning the reduced
// indefinite forms of the fundamental discriminant into cycles under the rho
// step; every comparison against sqrt(D) is done with integer square roots.

#include "arithorb/bigfloat.hpp"
#include "arithorb/exact_arith.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace arithorb {

/// D = d if d = 1 mod 4, else 4d.
inline Integer fundamental_discriminant(std::int64_t d)
{
    if (d < 2 || !detail::is_squarefree(d)) {
        throw std::invalid_argument("radicand must be a squarefree integer >= 2, got " + std::to_string(d));
    }
    return d % 4 == 1 ? Integer(d) : Integer(4 * d);
}

struct BinaryQuadraticForm {
    Integer a, b, c;

    Integer discriminant() const { return b * b - 4 * a * c; }

    bool is_primitive() const { return boost::multiprecision::gcd(boost::multiprecision::gcd(a, b), c) == 1; }

    /// 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b, with isqrt_d = floor(sqrt(D)).
    bool is_reduced(const Integer& isqrt_d) const
    {
        Integer two_a = 2 * boost::multiprecision::abs(a);
        return b > 0 && b <= isqrt_d && two_a + b > isqrt_d && two_a - b <= isqrt_d;
    }

    /// Right neighbour (c, b', c') with b' = -b mod 2|c| and sqrt(D) - 2|c| < b' < sqrt(D).
    BinaryQuadraticForm rho(const Integer& isqrt_d) const
    {
        Integer m = 2 * boost::multiprecision::abs(c);
        Integer r = (isqrt_d + b) % m;
        if (r < 0) r += m;
        Integer nb = isqrt_d - r;
        Integer D = discriminant();
        return {c, nb, (nb * nb - D) / (4 * c)};
    }

    friend bool operator==(const BinaryQuadraticForm& x, const BinaryQuadraticForm& y)
    {
        return x.a == y.a && x.b == y.b && x.c == y.c;
    }

    friend bool operator<(const BinaryQuadraticForm& x, const BinaryQuadraticForm& y)
    {
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
        return x.c < y.c;
    }

    std::string to_string() const { return "(" + a.str() + "," + b.str() + "," + c.str() + ")"; }
};

struct FormCycle {
    std::vector<BinaryQuadraticForm> forms;
};

/// All primitive reduced forms of a positive non-square discriminant D.
inline std::vector<BinaryQuadraticForm> reduced_forms(const Integer& D)
{
    if (D <= 0 || detail::exact_isqrt(D)) throw std::invalid_argument("discriminant must be positive and non-square");
    Integer mod4 = D % 4;
    if (mod4 != 0 && mod4 != 1) throw std::invalid_argument("discriminant must be 0 or 1 mod 4");
    Integer s = boost::multiprecision::sqrt(D);
    std::vector<BinaryQuadraticForm> out;
    for (Integer b = (D % 2 == 0) ? 2 : 1; b <= s; b += 2) {
        Integer ac = (b * b - D) / 4;
        Integer lo = (s - b + 2) / 2; // 2|a| >= s - b + 1
        Integer hi = (s + b) / 2;
        for (Integer abs_a = std::max(lo, Integer(1)); abs_a <= hi; ++abs_a) {
            if (ac % abs_a != 0) continue;
            for (int sign : {1, -1}) {
                BinaryQuadraticForm f{sign * abs_a, b, ac / (sign * abs_a)};
                if (f.is_primitive() && f.is_reduced(s)) out.push_back(f);
            }
        }
    }
    return out;
}

/// Partition of the reduced forms of D into rho-cycles, ordered by their least form.
inline std::vector<FormCycle> form_cycles(const Integer& D)
{
    std::vector<BinaryQuadraticForm> all = reduced_forms(D);
    Integer s = boost::multiprecision::sqrt(D);
    std::set<BinaryQuadraticForm> pending(all.begin(), all.end());
    std::vector<FormCycle> cycles;
    while (!pending.empty()) {
        FormCycle cyc;
        BinaryQuadraticForm start = *pending.begin();
        BinaryQuadraticForm f = start;
        do {
            if (!f.is_reduced(s) || pending.erase(f) != 1) {
                throw InternalError("rho step left the set of reduced forms at " + f.to_string());
            }
            cyc.forms.push_back(f);
            f = f.rho(s);
        } while (f != start);
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

/// Narrow class number h+ of Q(sqrt d): the number of rho-cycles of reduced forms.
inline Integer narrow_class_number(std::int64_t d)
{
    return Integer(form_cycles(fundamental_discriminant(d)).size());
}

/// The fundamental unit eps > 1 of the maximal order of Q(sqrt d).
///
/// Expands a reduced generator x = (P0 + sqrt d)/Q0 of the maximal order as a
/// purely periodic continued fraction. After one period of length L,
/// x = (p x + p')/(q x + q'), so q_{L-1} x + q_{L-2} is a unit of norm (-1)^L.
inline FieldElement fundamental_unit(std::int64_t d)
{
    if (d < 2 || !detail::is_squarefree(d)) {
        throw std::invalid_argument("radicand must be a squarefree integer >= 2, got " + std::to_string(d));
    }
    Integer dd(d);
    Integer s = boost::multiprecision::sqrt(dd);
    Integer P0, Q0;
    if (d % 4 == 1) {
        // Largest odd P0 < sqrt d puts the conjugate of (P0 + sqrt d)/2 in (-1, 0).
        P0 = (s % 2 == 1) ? s : s - 1;
        Q0 = 2;
    } else {
        P0 = s;
        Q0 = 1;
    }
    Integer P = P0, Q = Q0;
    Integer q_prev = 1, q_cur = 0; // q_{-2}, q_{-1}
    for (;;) {
        Integer a = (P + s) / Q; // floor((P + sqrt d)/Q) for Q > 0
        Integer q_next = a * q_cur + q_prev;
        q_prev = q_cur;
        q_cur = q_next;
        P = a * Q - P;
        Q = (dd - P * P) / Q;
        if (P == P0 && Q == Q0) break;
    }
    // eps = q_cur * (P0 + sqrt d)/Q0 + q_prev
    FieldElement eps(Rational(q_cur * P0, Q0) + Rational(q_prev), Rational(q_cur, Q0), d);
    Rational n = eps.norm();
    if (n != 1 && n != -1) throw InternalError("continued fraction produced a non-unit for d = " + std::to_string(d));
    return eps;
}

/// Order of the 2-Sylow subgroup of an abelian group of order h.
inline Integer two_class_number(const Integer& h)
{
    if (h < 1) throw std::invalid_argument("class number must be positive");
    Integer out = 1;
    Integer m = h;
    while (m % 2 == 0) {
        m /= 2;
        out *= 2;
    }
    return out;
}

/// 2^rank over F_2 of the given sign vectors (+1/-1 entries, one per non-Id place).
inline Integer unit_index_from_signs(const std::vector<std::vector<int>>& sign_vectors)
{
    std::vector<std::vector<int>> rows;
    for (const auto& v : sign_vectors) {
        std::vector<int> r;
        for (int s : v) {
            if (s != 1 && s != -1) throw std::invalid_argument("sign vector entries must be +1 or -1");
            r.push_back(s == -1 ? 1 : 0);
        }
        rows.push_back(std::move(r));
    }
    std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("sign vectors of unequal length");
    }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        auto pivot = std::find_if(rows.begin() + rank, rows.end(), [&](const auto& r) { return r[c] == 1; });
        if (pivot == rows.end()) continue;
        std::swap(*pivot, rows[rank]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != rank && rows[i][c] == 1) {
                for (std::size_t j = 0; j < cols; ++j) rows[i][j] ^= rows[rank][j];
            }
        }
        ++rank;
    }
    return Integer(1) << static_cast<unsigned>(rank);
}

inline Integer class_number(const TotallyRealField& k)
{
    if (k.is_rationals()) return 1;
    Integer h_plus = narrow_class_number(k.radicand());
    if (fundamental_unit(k.radicand()).norm() == -1) return h_plus;
    if (h_plus % 2 != 0) throw InternalError("odd narrow class number with a totally positive fundamental unit");
    return h_plus / 2;
}

/// [U : U_inf], the size of the image of U under the signs at the non-Id places.
inline Integer unit_index_infinity(const TotallyRealField& k)
{
    if (k.is_rationals()) return 1;
    FieldElement eps = fundamental_unit(k.radicand());
    std::vector<int> minus_one, eps_signs;
    for (int v : k.places()) {
        if (v == k.id_place()) continue;
        minus_one.push_back(-1);
        eps_signs.push_back(sign_at(eps, v));
    }
    return unit_index_from_signs({minus_one, eps_signs});
}

struct UnitGroupData {
    std::optional<FieldElement> fundamental_unit; // absent for Q
    std::optional<int> unit_norm;
    Integer unit_index_infinity;
};

struct FieldInvariants {
    TotallyRealField field = TotallyRealField::rationals();
    Integer h, h2, h_plus;
    UnitGroupData units;
    Integer h_inf_2;
    bool uniqueness_certified = false;
};

/// 2^(degree-1) * h2 / index, checked to be a positive integer.
inline Integer restricted_two_class_number(int degree, const Integer& h2, const Integer& unit_index)
{
    if (degree < 1) throw std::invalid_argument("degree must be positive");
    Integer num = (Integer(1) << static_cast<unsigned>(degree - 1)) * h2;
    if (unit_index < 1 || num % unit_index != 0) {
        throw InternalError("2^(degree-1) h2 / [U:U_inf] is not an integer: " + num.str() + " / " + unit_index.str());
    }
    return num / unit_index;
}

inline FieldInvariants restricted_class_number(const TotallyRealField& k)
{
    FieldInvariants out;
    out.field = k;
    out.h = class_number(k);
    out.h2 = two_class_number(out.h);
    out.units.unit_index_infinity = unit_index_infinity(k);
    if (k.is_rationals()) {
        out.h_plus = 1;
    } else {
        FieldElement eps = fundamental_unit(k.radicand());
        int n = eps.norm() == 1 ? 1 : -1;
        out.units.fundamental_unit = eps;
        out.units.unit_norm = n;
        out.h_plus = n == -1 ? out.h : 2 * out.h;
    }
    out.h_inf_2 = restricted_two_class_number(k.degree(), out.h2, out.units.unit_index_infinity);
    out.uniqueness_certified = out.h_inf_2 == 1;
    return out;
}

/// Formula-level evaluation for fields of any degree from caller-supplied data.
struct RestrictedClassNumber {
    int degree;
    Integer h, h2, unit_index_infinity, h_inf_2;
    bool uniqueness_certified;
};

/// `fundamental_unit_signs` holds, for each fundamental unit, its signs at the
/// degree-1 places other than Id. The sign vector of -1 is added here.
inline RestrictedClassNumber restricted_class_number(int degree, const Integer& h,
                                                     const std::vector<std::vector<int>>& fundamental_unit_signs)
{
    if (degree < 1) throw std::invalid_argument("degree must be positive");
    if (fundamental_unit_signs.size() != static_cast<std::size_t>(degree - 1)) {
        throw std::invalid_argument("a totally real field of degree n has n-1 fundamental units");
    }
    std::vector<std::vector<int>> signs = fundamental_unit_signs;
    signs.emplace_back(static_cast<std::size_t>(degree - 1), -1);
    RestrictedClassNumber r{degree, h, two_class_number(h), unit_index_from_signs(signs), 0, false};
    r.h_inf_2 = restricted_two_class_number(degree, r.h2, r.unit_index_infinity);
    r.uniqueness_certified = r.h_inf_2 == 1;
    return r;
}

/// Kronecker symbol (D/n) for n >= 1.
inline int kronecker_symbol(std::int64_t D, std::int64_t n)
{
    if (n < 1) throw std::invalid_argument("kronecker symbol needs n >= 1");
    int result = 1;
    while (n % 2 == 0) {
        n /= 2;
        std::int64_t r = ((D % 8) + 8) % 8;
        if (r % 2 == 0) return 0;
        if (r == 3 || r == 5) result = -result;
    }
    // Jacobi symbol (D/n), n odd.
    std::int64_t a = ((D % n) + n) % n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            std::int64_t r = n % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

/// Class number from the analytic class number formula for D > 0:
///   h log(eps) = -1/2 * sum_{a=1}^{D-1} (D/a) log sin(pi a / D).
/// Evaluated at `bits` of precision; the result must lie within 1e-10 of an integer.
inline Integer analytic_class_number_oracle(std::int64_t d, mpfr_prec_t bits = 192)
{
    if (bits < 100) throw std::invalid_argument("oracle needs at least 100 bits (30 decimal digits)");
    Integer Dz = fundamental_discriminant(d);
    auto D = Dz.convert_to<std::int64_t>();
    BigFloat pi = BigFloat::pi(bits);
    BigFloat sum(bits), term(bits), tmp(bits);
    for (std::int64_t a = 1; a < D; ++a) {
        int chi = kronecker_symbol(D, a);
        if (chi == 0) continue;
        mpfr_mul_si(tmp.get(), pi.get(), a, MPFR_RNDN);
        mpfr_div_si(tmp.get(), tmp.get(), D, MPFR_RNDN);
        mpfr_sin(term.get(), tmp.get(), MPFR_RNDN);
        mpfr_log(term.get(), term.get(), MPFR_RNDN);
        if (chi > 0) {
            mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
        } else {
            mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
        }
    }
    FieldElement eps = fundamental_unit(d);
    BigFloat log_eps = BigFloat::from(eps.sqrt_part(), bits);
    mpfr_sqrt_ui(tmp.get(), static_cast<unsigned long>(d), MPFR_RNDN);
    mpfr_mul(log_eps.get(), log_eps.get(), tmp.get(), MPFR_RNDN);
    BigFloat ra = BigFloat::from(eps.rational_part(), bits);
    mpfr_add(log_eps.get(), log_eps.get(), ra.get(), MPFR_RNDN);
    mpfr_log(log_eps.get(), log_eps.get(), MPFR_RNDN);

    BigFloat h(bits);
    mpfr_div(h.get(), sum.get(), log_eps.get(), MPFR_RNDN);
    mpfr_div_si(h.get(), h.get(), -2, MPFR_RNDN);

    BigFloat rounded(bits), residual(bits);
    mpfr_round(rounded.get(), h.get());
    mpfr_sub(residual.get(), h.get(), rounded.get(), MPFR_RNDN);
    mpfr_abs(residual.get(), residual.get(), MPFR_RNDN);
    if (mpfr_cmp_d(residual.get(), 1e-10) >= 0 || mpfr_cmp_ui(rounded.get(), 1) < 0) {
        throw std::runtime_error("insufficient precision in analytic class number for d = " + std::to_string(d));
    }
    Integer out;
    mpfr_get_z(out.backend().data(), rounded.get(), MPFR_RNDN);
    return out;
}

/// Number of distinct primes dividing D.
inline int distinct_prime_count(const Integer& D)
{
    return static_cast<int>(detail::factor(D).size());
}

} // namespace arithorb
