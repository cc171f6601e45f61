#pragma once

#include "rational.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dworklab {

// Deterministic trial division; moduli here are small.
inline bool is_prime(std::uint64_t q) {
    if (q < 2) return false;
    if (q % 2 == 0) return q == 2;
    for (std::uint64_t d = 3; d * d <= q; d += 2)
        if (q % d == 0) return false;
    return true;
}

inline std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = lo < 2 ? 2 : lo; p <= hi; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t q) {
    std::uint64_t r = 1 % q;
    a %= q;
    while (e) {
        if (e & 1) r = mulmod(r, a, q);
        a = mulmod(a, a, q);
        e >>= 1;
    }
    return r;
}

inline std::uint64_t invmod(std::uint64_t a, std::uint64_t q) {
    if (a % q == 0) throw std::domain_error("no inverse of 0 mod q");
    return powmod(a, q - 2, q);
}

struct ModulusMismatch : std::invalid_argument {
    ModulusMismatch() : std::invalid_argument("modulus mismatch") {}
};

struct FieldElem {
    std::uint64_t residue = 0;
    std::uint64_t modulus = 0;

    FieldElem() = default;
    FieldElem(std::int64_t value, std::uint64_t q) : modulus(q) {
        if (!is_prime(q)) throw std::invalid_argument("modulus " + std::to_string(q) + " is not prime");
        std::int64_t r = value % static_cast<std::int64_t>(q);
        residue = static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
    }
    // Skips the primality check; for internal use once q is known prime.
    static FieldElem raw(std::uint64_t residue, std::uint64_t q) {
        FieldElem e;
        e.residue = residue;
        e.modulus = q;
        return e;
    }

    bool is_zero() const { return residue == 0; }
    friend bool operator==(const FieldElem& a, const FieldElem& b) {
        return a.modulus == b.modulus && a.residue == b.residue;
    }
    friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }
};

inline void check_same(const FieldElem& a, const FieldElem& b) {
    if (a.modulus != b.modulus) throw ModulusMismatch();
}
inline FieldElem operator+(const FieldElem& a, const FieldElem& b) {
    check_same(a, b);
    std::uint64_t s = a.residue + b.residue;
    return FieldElem::raw(s >= a.modulus ? s - a.modulus : s, a.modulus);
}
inline FieldElem operator-(const FieldElem& a, const FieldElem& b) {
    check_same(a, b);
    return FieldElem::raw(a.residue >= b.residue ? a.residue - b.residue : a.residue + a.modulus - b.residue,
                          a.modulus);
}
inline FieldElem operator-(const FieldElem& a) {
    return FieldElem::raw(a.residue == 0 ? 0 : a.modulus - a.residue, a.modulus);
}
inline FieldElem operator*(const FieldElem& a, const FieldElem& b) {
    check_same(a, b);
    return FieldElem::raw(mulmod(a.residue, b.residue, a.modulus), a.modulus);
}
inline FieldElem inverse(const FieldElem& a) {
    return FieldElem::raw(invmod(a.residue, a.modulus), a.modulus);
}
inline FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * inverse(b); }
inline FieldElem& operator+=(FieldElem& a, const FieldElem& b) { return a = a + b; }
inline FieldElem& operator-=(FieldElem& a, const FieldElem& b) { return a = a - b; }
inline FieldElem& operator*=(FieldElem& a, const FieldElem& b) { return a = a * b; }

struct DenominatorDivisibleByQ : std::domain_error {
    explicit DenominatorDivisibleByQ(std::uint64_t q)
        : std::domain_error("coefficient denominator divisible by " + std::to_string(q)) {}
};

inline FieldElem reduce_rational(const Rational& c, std::uint64_t q) {
    Integer qq(static_cast<unsigned long>(q));
    Integer den = c.get_den() % qq;
    if (den == 0) throw DenominatorDivisibleByQ(q);
    Integer num = c.get_num() % qq;
    if (num < 0) num += qq;
    std::uint64_t n = num.get_ui(), d = den.get_ui();
    return FieldElem::raw(mulmod(n, invmod(d, q), q), q);
}

// Coefficient-domain descriptors used by Polynomial<F>.
struct RationalField {
    using value_type = Rational;
    value_type zero() const { return Rational(0); }
    value_type one() const { return Rational(1); }
    value_type from_int(long v) const { return Rational(v); }
    static bool is_zero(const value_type& v) { return sgn(v) == 0; }
    friend bool operator==(const RationalField&, const RationalField&) { return true; }
    std::string name() const { return "Q"; }
};

struct PrimeField {
    std::uint64_t q = 2;
    PrimeField() = default;
    explicit PrimeField(std::uint64_t modulus) : q(modulus) {
        if (!is_prime(q)) throw std::invalid_argument("modulus " + std::to_string(q) + " is not prime");
    }
    using value_type = FieldElem;
    value_type zero() const { return FieldElem::raw(0, q); }
    value_type one() const { return FieldElem::raw(1 % q, q); }
    value_type from_int(long v) const {
        long r = v % static_cast<long>(q);
        return FieldElem::raw(static_cast<std::uint64_t>(r < 0 ? r + static_cast<long>(q) : r), q);
    }
    static bool is_zero(const value_type& v) { return v.residue == 0; }
    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.q == b.q; }
    std::string name() const { return "F_" + std::to_string(q); }
};

}  // namespace dworklab
