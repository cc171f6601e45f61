#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace dworklab {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::domain_error("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den = 1) {
    return make_rational(Integer(num), Integer(den));
}

// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational rational_from_string(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (r.get_den() == 0) throw std::domain_error("zero denominator");
    r.canonicalize();
    return r;
}

inline Integer ipow(const Integer& b, unsigned long e) {
    Integer out;
    mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), e);
    return out;
}

inline Rational rpow(const Rational& b, long e) {
    if (e < 0) {
        if (b == 0) throw std::domain_error("zero to a negative power");
        return rpow(1 / b, -e);
    }
    return make_rational(ipow(b.get_num(), static_cast<unsigned long>(e)),
                         ipow(b.get_den(), static_cast<unsigned long>(e)));
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

inline Integer floor_div(const Rational& r) {
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return out;
}

inline Integer ceil_div(const Rational& r) {
    Integer out;
    mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return out;
}

// x >= y^(p/d) for positive rationals x, y and a rational exponent p/d > 0.
inline bool ge_rational_power(const Rational& x, const Rational& y, const Rational& e) {
    if (x <= 0 || y <= 0 || e <= 0) throw std::domain_error("ge_rational_power needs positive arguments");
    unsigned long d = e.get_den().get_ui();
    unsigned long p = e.get_num().get_ui();
    return rpow(x, static_cast<long>(d)) >= rpow(y, static_cast<long>(p));
}

}  // namespace dworklab
