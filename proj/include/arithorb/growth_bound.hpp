#pragma once

// The Euler characteristic lower bound
//   B(r) = ( prod_{i=1}^{r} (2i-1)! / (2 pi)^{2i} )^degree
// (up to a positive constant) held exactly as numerator / (2 pi)^pi_power.

#include "arithorb/bigfloat.hpp"
#include "arithorb/exact_arith.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace arithorb {

struct GrowthBoundValue {
    unsigned r = 0;
    unsigned degree = 0;
    Integer exact_numerator;
    unsigned long pi_power = 0;
    BigFloat float_value{64};
    mpfr_prec_t precision_bits = 64;
};

inline Integer factorial(unsigned long n)
{
    Integer out;
    mpz_fac_ui(out.backend().data(), n);
    return out;
}

/// N / (2 pi)^p to `bits`, computed with 32 guard bits.
inline BigFloat divide_by_two_pi_power(const Integer& numerator, unsigned long pi_power, mpfr_prec_t bits)
{
    mpfr_prec_t work = bits + 32;
    BigFloat two_pi = BigFloat::pi(work);
    mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
    BigFloat denom(work);
    mpfr_pow_ui(denom.get(), two_pi.get(), pi_power, MPFR_RNDN);
    BigFloat q = BigFloat::from(numerator, work);
    mpfr_div(q.get(), q.get(), denom.get(), MPFR_RNDN);
    BigFloat out(bits);
    mpfr_set(out.get(), q.get(), MPFR_RNDN);
    return out;
}

inline GrowthBoundValue euler_char_bound(unsigned r, unsigned degree, mpfr_prec_t precision_bits = 128)
{
    if (r < 1) throw std::invalid_argument("r must be at least 1");
    if (degree < 1) throw std::invalid_argument("degree must be at least 1");
    if (precision_bits < 64) throw std::invalid_argument("precision must be at least 64 bits");
    Integer base = 1;
    for (unsigned i = 1; i <= r; ++i) base *= factorial(2 * i - 1);
    GrowthBoundValue v;
    v.r = r;
    v.degree = degree;
    v.exact_numerator = boost::multiprecision::pow(base, degree);
    v.pi_power = static_cast<unsigned long>(degree) * r * (r + 1);
    v.precision_bits = precision_bits;
    v.float_value = divide_by_two_pi_power(v.exact_numerator, v.pi_power, precision_bits);
    return v;
}

/// Sign of n - (2 pi)^p, decided with directed rounding on both sides.
inline int compare_with_two_pi_power(const Integer& n, unsigned long p)
{
    for (mpfr_prec_t bits = 128;; bits *= 2) {
        BigFloat lo = BigFloat::pi(bits, MPFR_RNDD), hi = BigFloat::pi(bits, MPFR_RNDU);
        mpfr_mul_2ui(lo.get(), lo.get(), 1, MPFR_RNDD);
        mpfr_mul_2ui(hi.get(), hi.get(), 1, MPFR_RNDU);
        mpfr_pow_ui(lo.get(), lo.get(), p, MPFR_RNDD);
        mpfr_pow_ui(hi.get(), hi.get(), p, MPFR_RNDU);
        if (mpfr_cmp_z(hi.get(), n.backend().data()) < 0) return 1;
        if (mpfr_cmp_z(lo.get(), n.backend().data()) > 0) return -1;
        if (bits > (1 << 16)) throw InternalError("cannot separate an integer from a power of 2 pi");
    }
}

struct GrowthCertificateRow {
    GrowthBoundValue value;
    /// B(r+1) (2 pi)^(2r+2) = B(r) (2r+1)!, checked on exact numerators and exponents.
    bool ratio_identity = false;
    /// B(r+1) > B(r).
    bool increases = false;
    /// B(r+1)/(2r+1)! > B(r)/(2r-1)!.
    bool normalized_increases = false;
};

struct GrowthCertificate {
    unsigned r_max = 0;
    std::vector<GrowthCertificateRow> rows; // r = 1 .. r_max - 1
    bool ratio_identity_all = false;
    /// Least r0 with B(r0) < B(r0 + 1) < ... < B(r_max).
    std::optional<unsigned> threshold;
    /// The same threshold for B(r)/(2r-1)!.
    std::optional<unsigned> normalized_threshold;
};

namespace detail {

inline std::optional<unsigned> monotone_tail_start(const std::vector<GrowthCertificateRow>& rows, bool normalized)
{
    std::optional<unsigned> start;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        if (!(normalized ? it->normalized_increases : it->increases)) break;
        start = it->value.r;
    }
    return start;
}

} // namespace detail

/// Degree-1 ratio table for r < r_max, with the monotonicity threshold.
inline GrowthCertificate superexponential_certificate(unsigned r_max, mpfr_prec_t precision_bits = 128)
{
    if (r_max < 3) throw std::invalid_argument("r_max must be at least 3");
    GrowthCertificate c;
    c.r_max = r_max;
    c.ratio_identity_all = true;
    GrowthBoundValue current = euler_char_bound(1, 1, precision_bits);
    for (unsigned r = 1; r < r_max; ++r) {
        GrowthBoundValue next = euler_char_bound(r + 1, 1, precision_bits);
        GrowthCertificateRow row;
        Integer step = factorial(2 * r + 1);
        row.ratio_identity = next.exact_numerator == current.exact_numerator * step &&
                             next.pi_power == current.pi_power + 2 * r + 2;
        row.increases = compare_with_two_pi_power(step, 2 * r + 2) > 0;
        row.normalized_increases = compare_with_two_pi_power(factorial(2 * r - 1), 2 * r + 2) > 0;
        c.ratio_identity_all = c.ratio_identity_all && row.ratio_identity;
        row.value = std::move(current);
        c.rows.push_back(std::move(row));
        current = std::move(next);
    }
    c.threshold = detail::monotone_tail_start(c.rows, false);
    c.normalized_threshold = detail::monotone_tail_start(c.rows, true);
    return c;
}

} // namespace arithorb
