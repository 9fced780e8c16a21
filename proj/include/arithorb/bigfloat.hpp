#pragma once

// Minimal RAII handle over an MPFR value with an explicit bit precision.

#include "arithorb/exact_arith.hpp"

#include <mpfr.h>

#include <string>

namespace arithorb {

class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat& operator=(const BigFloat& o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    static BigFloat pi(mpfr_prec_t bits, mpfr_rnd_t rnd = MPFR_RNDN)
    {
        BigFloat r(bits);
        mpfr_const_pi(r.v_, rnd);
        return r;
    }

    static BigFloat from(const Integer& n, mpfr_prec_t bits, mpfr_rnd_t rnd = MPFR_RNDN)
    {
        BigFloat r(bits);
        mpfr_set_z(r.v_, n.backend().data(), rnd);
        return r;
    }

    static BigFloat from(const Rational& q, mpfr_prec_t bits, mpfr_rnd_t rnd = MPFR_RNDN)
    {
        BigFloat r(bits);
        mpfr_set_q(r.v_, q.backend().data(), rnd);
        return r;
    }

    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

    /// Scientific decimal rendering with `digits` significant digits.
    std::string to_string(int digits) const
    {
        mpfr_exp_t exp = 0;
        char* raw = mpfr_get_str(nullptr, &exp, 10, static_cast<std::size_t>(digits), v_, MPFR_RNDN);
        std::string m(raw);
        mpfr_free_str(raw);
        if (mpfr_zero_p(v_)) return "0";
        std::string sign;
        if (m[0] == '-') {
            sign = "-";
            m.erase(0, 1);
        }
        std::string out = sign + m.substr(0, 1);
        if (m.size() > 1) out += "." + m.substr(1);
        out += "e" + std::to_string(static_cast<long>(exp) - 1);
        return out;
    }

private:
    mpfr_t v_;
};

} // namespace arithorb
