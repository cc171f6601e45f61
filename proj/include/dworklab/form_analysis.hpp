#pragma once

#include "errors.hpp"
#include "groebner.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"
#include "projective.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace dworklab {

// ---------------------------------------------------------------- rank

struct RankReport {
    std::vector<std::vector<std::size_t>> intertwining_sets;  // 1-based, sorted, includes i itself
    std::vector<std::size_t> ranks;
    std::size_t rank = 0;
    std::size_t witness = 0;                // 1-based
    std::vector<std::size_t> permutation;   // new variable j is old variable permutation[j-1]
    Form relabeled;                         // witness first, its set next
};

inline RankReport intertwining_rank(const Form& pk) {
    if (pk.is_zero() || !pk.is_homogeneous()) throw std::invalid_argument("intertwining rank needs a nonzero form");
    if (pk.degree() < 2) throw std::invalid_argument("intertwining rank needs degree >= 2");
    std::size_t n = pk.nvars();
    RankReport rep;
    std::vector<Form> grad;
    for (std::size_t i = 1; i <= n; ++i) grad.push_back(partial_derivative(pk, i));
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<std::size_t> set;
        for (std::size_t j = 1; j <= n; ++j)
            if (j == i || !partial_derivative(grad[i - 1], j).is_zero()) set.push_back(j);
        rep.ranks.push_back(set.size());
        rep.intertwining_sets.push_back(std::move(set));
    }
    rep.rank = n + 1;
    for (std::size_t i = 0; i < n; ++i)
        if (rep.ranks[i] < rep.rank) {
            rep.rank = rep.ranks[i];
            rep.witness = i + 1;
        }
    const auto& ws = rep.intertwining_sets[rep.witness - 1];
    rep.permutation.push_back(rep.witness);
    for (auto j : ws)
        if (j != rep.witness) rep.permutation.push_back(j);
    for (std::size_t j = 1; j <= n; ++j)
        if (std::find(ws.begin(), ws.end(), j) == ws.end()) rep.permutation.push_back(j);
    // x_old = y_new at position j, i.e. A(old, new) = 1.
    RationalMatrix a(n, n);
    for (std::size_t j = 0; j < n; ++j) a(rep.permutation[j] - 1, j) = 1;
    rep.relabeled = change_variables(pk, a);
    return rep;
}

// ---------------------------------------------------------------- nonsingularity

template <class F>
void check_characteristic(const Polynomial<F>& h) {
    if constexpr (std::is_same_v<F, PrimeField>) {
        if (h.degree() > 0 && static_cast<std::uint64_t>(h.degree()) % h.field().q == 0)
            throw Refusal("characteristic " + std::to_string(h.field().q) + " divides the degree " +
                          std::to_string(h.degree()));
    }
}

namespace detail {

// Sound only over F_q: a rational point of the singular locus over F_q or F_{q^2}.
inline bool finite_field_singular_point(const std::vector<FieldPoly>& gens) {
    std::uint64_t q = gens.front().field().q;
    std::size_t n = gens.front().nvars();
    double points = std::pow(static_cast<double>(q * q), static_cast<double>(n - 1));
    if (points > 2e5) return false;
    return find_projective_zero(gens, 1).has_value() || find_projective_zero(gens, 2).has_value();
}

template <class F>
bool nonsingular_unchecked(const Polynomial<F>& h) {
    std::size_t n = h.nvars();
    if (h.is_zero()) return false;
    if (n == 1) return true;
    std::vector<Polynomial<F>> gens{h};
    for (std::size_t i = 1; i <= n; ++i) {
        auto d = partial_derivative(h, i);
        if (!d.is_zero()) gens.push_back(d);
    }
    if constexpr (std::is_same_v<F, PrimeField>) {
        if (finite_field_singular_point(gens)) return false;
    }
    return is_irrelevant(gens);
}

}  // namespace detail

template <class F>
bool is_nonsingular(const Polynomial<F>& h) {
    if (!h.is_homogeneous()) throw std::invalid_argument("nonsingularity needs a homogeneous polynomial");
    if (!h.is_zero() && h.degree() < 1) throw std::invalid_argument("nonsingularity needs degree >= 1");
    check_characteristic(h);
    return detail::nonsingular_unchecked(h);
}

// ---------------------------------------------------------------- Dwork-regularity

struct RegularityVerdict {
    bool dwork_regular = false;
    bool nonsingular = false;
    std::vector<std::size_t> failing_subset;  // empty when regular
    std::string kind;                         // "zero_polynomial" | "singular" | ""
};

// Nonempty subsets of {1..n}, by size then lexicographically.
inline std::vector<std::vector<std::size_t>> ordered_subsets(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t size = 1; size <= n; ++size) {
        std::vector<std::size_t> cur(size);
        for (std::size_t i = 0; i < size; ++i) cur[i] = i + 1;
        for (;;) {
            out.push_back(cur);
            std::size_t i = size;
            while (i > 0 && cur[i - 1] == n - size + i) --i;
            if (i == 0) break;
            ++cur[i - 1];
            for (std::size_t j = i; j < size; ++j) cur[j] = cur[j - 1] + 1;
        }
    }
    return out;
}

template <class F>
RegularityVerdict is_dwork_regular(const Polynomial<F>& h, unsigned threads = 1) {
    if (h.is_zero() || !h.is_homogeneous()) throw std::invalid_argument("Dwork-regularity needs a nonzero form");
    if (h.degree() < 2) throw std::invalid_argument("Dwork-regularity needs degree >= 2");
    check_characteristic(h);
    auto subsets = ordered_subsets(h.nvars());
    // 0 = ok, 1 = zero polynomial, 2 = singular
    std::vector<int> status(subsets.size(), 0);
    Progress progress("dwork-check", subsets.size());
    parallel_for(subsets.size(), threads, [&](std::size_t i) {
        auto hs = restrict_to_subset(h, subsets[i]);
        if (subsets[i].size() == 1) status[i] = hs.is_zero() ? 1 : 0;
        else status[i] = detail::nonsingular_unchecked(hs) ? 0 : 2;
        progress.tick();
    });
    RegularityVerdict v;
    v.nonsingular = status.back() == 0;
    v.dwork_regular = true;
    for (std::size_t i = 0; i < subsets.size(); ++i)
        if (status[i]) {
            v.dwork_regular = false;
            v.failing_subset = subsets[i];
            v.kind = status[i] == 1 ? "zero_polynomial" : "singular";
            break;
        }
    return v;
}

// ---------------------------------------------------------------- bad primes

struct BadPrimeReport {
    std::uint64_t q_max = 0;
    std::vector<std::uint64_t> excluded;
    std::vector<std::uint64_t> bad;
    std::vector<std::uint64_t> good;
    std::optional<std::uint64_t> largest_bad;
};

inline BadPrimeReport bad_primes(const Form& h, std::uint64_t q_max, unsigned threads = 1) {
    if (q_max < 2) throw std::invalid_argument("q_max must be at least 2");
    if (!is_dwork_regular(h, threads).dwork_regular) throw Refusal("input is not Dwork-regular over Q");
    auto primes = primes_in(2, q_max);
    std::uint64_t k = static_cast<std::uint64_t>(h.degree());
    std::vector<int> cls(primes.size(), 0);  // 0 good, 1 excluded, 2 bad
    Progress progress("bad-primes", primes.size());
    parallel_for(primes.size(), threads, [&](std::size_t i) {
        std::uint64_t q = primes[i];
        bool excluded = k % q == 0;
        for (const auto& [e, c] : h.terms())
            if (Integer(c.get_den()) % Integer(static_cast<unsigned long>(q)) == 0) excluded = true;
        if (excluded) {
            cls[i] = 1;
        } else {
            FieldPoly r = reduce_mod(h, q);
            cls[i] = (r.is_zero() || r.degree() != h.degree() || !is_dwork_regular(r).dwork_regular) ? 2 : 0;
        }
        progress.tick();
    });
    BadPrimeReport rep;
    rep.q_max = q_max;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (cls[i] == 0) rep.good.push_back(primes[i]);
        else if (cls[i] == 1) rep.excluded.push_back(primes[i]);
        else {
            rep.bad.push_back(primes[i]);
            rep.largest_bad = primes[i];
        }
    }
    return rep;
}

// ---------------------------------------------------------------- Deligne after specialization

struct DeligneCheck {
    bool deligne = false;
    unsigned degree = 0;
    FieldPoly specialized;   // in the remaining m - r variables
    FieldPoly leading;       // its leading form
};

// verify_precondition = false skips the Dwork-regularity recheck when the caller
// already certified h (exhaustive sweeps over c).
inline DeligneCheck deligne_after_specialization(const FieldPoly& h, const std::vector<FieldElem>& c,
                                                 bool verify_precondition = true) {
    std::size_t m = h.nvars(), r = c.size();
    if (r < 1 || r >= m) throw std::invalid_argument("need 1 <= r <= m - 1 specialized variables");
    if (h.is_zero() || !h.is_homogeneous()) throw std::invalid_argument("need a nonzero form");
    check_characteristic(h);
    if (verify_precondition && !is_dwork_regular(h).dwork_regular) throw Refusal("input is not Dwork-regular over F_" + std::to_string(h.field().q));
    std::map<std::size_t, FieldElem> assign;
    for (std::size_t i = 0; i < r; ++i) {
        if (c[i].modulus != h.field().q) throw ModulusMismatch();
        assign[i + 1] = c[i];
    }
    std::vector<std::size_t> rest;
    for (std::size_t j = r + 1; j <= m; ++j) rest.push_back(j);
    DeligneCheck out;
    out.specialized = compress_variables(specialize(h, assign), rest);
    if (out.specialized.is_zero()) return out;
    out.degree = static_cast<unsigned>(out.specialized.degree());
    out.leading = leading_form(out.specialized);
    out.deligne = out.degree % h.field().q != 0 && detail::nonsingular_unchecked(out.leading);
    return out;
}

// ---------------------------------------------------------------- derivative witness

struct DerivativeWitness {
    std::vector<long> m;
    Rational value;
};

inline DerivativeWitness find_derivative_witness(const Form& pk, std::size_t r, long b_max = 32) {
    std::size_t n = pk.nvars();
    if (r < 1 || r > n) throw std::invalid_argument("rank out of range");
    Form d1 = partial_derivative(pk, 1);
    for (const auto& [e, c] : d1.terms())
        for (std::size_t j = r; j < n; ++j)
            if (e[j]) throw Refusal("x1 intertwines with a variable beyond the first r; relabel first");
    for (long b = 1;; b *= 2) {
        long bound = std::min(b, b_max);
        std::vector<long> m(r, 1);
        for (;;) {
            std::vector<Rational> pt(n, Rational(0));
            for (std::size_t i = 0; i < r; ++i) pt[i] = m[i];
            Rational v = evaluate(d1, pt);
            if (v != 0) return DerivativeWitness{m, v};
            std::size_t i = r;
            while (i > 0 && m[i - 1] == bound) m[--i] = 1;
            if (i == 0) break;
            ++m[i - 1];
        }
        if (bound >= b_max) break;
    }
    throw Refusal("no derivative witness in [1," + std::to_string(b_max) + "]^" + std::to_string(r));
}

// ---------------------------------------------------------------- dispersivity

struct DispersiveReport {
    bool dispersive = false;
    unsigned root_bound = 0;
};

inline DispersiveReport is_dispersive(const Form& p, unsigned threads = 1) {
    Form pk = leading_form(p);
    if (pk.degree() < 2 || !is_dwork_regular(pk, threads).dwork_regular)
        throw Refusal("leading form is not Dwork-regular over Q");
    // Dwork-regular forms are nonsingular, so the gradient of P_k only vanishes at 0,
    // and each one-variable slice carries a nonzero multiple of x^k.
    return DispersiveReport{true, static_cast<unsigned>(pk.degree())};
}

// ---------------------------------------------------------------- example family and formulas

inline Form generate_example(std::size_t n, unsigned k, std::size_t r) {
    if (k < 3 || r < 2 || r > n) throw std::invalid_argument("generate_example needs k >= 3 and 2 <= r <= n");
    Form f(n);
    auto term = [&](std::size_t i, unsigned ei, std::size_t j, unsigned ej) {
        ExponentVec e(n);
        e[i - 1] += ei;
        e[j - 1] += ej;
        f.add_term(e, Rational(1));
    };
    unsigned a = k % 2 ? 1 : 2;
    for (std::size_t i = 1; i <= n; ++i) term(i, k, i, 0);
    for (std::size_t j = 2; j <= r; ++j) term(1, a, j, k - a);
    for (std::size_t i = 2; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) term(i, a, j, k - a);
    return f;
}

inline Rational delta_threshold(long n, long k, long r) {
    if (n < 2 || k < 2 || r < 1 || r > n) throw std::invalid_argument("delta needs n >= 2, k >= 2, 1 <= r <= n");
    return make_rational(n - r, 4 * ((k - 1) * (n - r + 1) + 1));
}

inline std::pair<Integer, Integer> codimensions(unsigned long n, unsigned long k) {
    if (n < 2 || k < 2) throw std::invalid_argument("codimensions need n >= 2, k >= 2");
    return {binomial(n + k - 3, n - 1), binomial(n + k - 1, n - 1) - binomial(n + k - 2, n - 2) - 1};
}

inline Rational corollary_threshold(long n, long k) {
    if (n < 2 || k < 2) throw std::invalid_argument("corollary threshold needs n >= 2, k >= 2");
    return make_rational(1, 4) + make_rational(n, 4 * ((k - 1) * (n + 2) + 2));
}

}  // namespace dworklab
