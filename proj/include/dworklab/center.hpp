#pragma once

#include "matrix.hpp"
#include "polynomial.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dworklab {

struct CenterBasis {
    std::size_t n = 0;
    std::vector<RationalMatrix> basis;
    std::size_t dimension() const { return basis.size(); }
};

enum class Decomposability { decomposable, indecomposable_over_Q, inconclusive };

inline std::string to_string(Decomposability d) {
    switch (d) {
        case Decomposability::decomposable: return "decomposable";
        case Decomposability::indecomposable_over_Q: return "indecomposable-over-Q";
        case Decomposability::inconclusive: return "inconclusive";
    }
    return "?";
}

struct DecomposabilityVerdict {
    std::size_t center_dimension = 0;
    bool central = false;
    std::optional<RationalMatrix> idempotent;
    Decomposability verdict = Decomposability::inconclusive;
};

using PolyMatrix = std::vector<std::vector<Form>>;

// A^T H - H A as a matrix of polynomials.
inline PolyMatrix commutator_defect(const RationalMatrix& a, const PolyMatrix& h) {
    std::size_t n = h.size();
    std::size_t nv = n ? h[0][0].nvars() : 0;
    PolyMatrix out(n, std::vector<Form>(n, Form(nv)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) {
                if (a(l, i) != 0) out[i][j] += a(l, i) * h[l][j];
                if (a(l, j) != 0) out[i][j] -= a(l, j) * h[i][l];
            }
    return out;
}

inline bool in_center(const RationalMatrix& a, const PolyMatrix& h) {
    for (const auto& row : commutator_defect(a, h))
        for (const auto& e : row)
            if (!e.is_zero()) return false;
    return true;
}

inline void check_center_input(const Form& f) {
    if (f.is_zero() || !f.is_homogeneous()) throw std::invalid_argument("center needs a nonzero homogeneous form");
    if (f.degree() < 3) throw std::invalid_argument("center needs degree >= 3");
}

inline CenterBasis compute_center(const Form& f) {
    check_center_input(f);
    std::size_t n = f.nvars();
    PolyMatrix h = hessian(f);

    // Unknown a(p, q) sits in column q * n + p. Rows indexed by (i, j, monomial) with i < j; the
    // diagonal of the defect vanishes identically.
    std::map<std::pair<std::size_t, std::size_t>, std::map<ExponentVec, std::vector<Rational>, GrlexGreater>> rows;
    auto row = [&](std::size_t i, std::size_t j, const ExponentVec& e) -> std::vector<Rational>& {
        auto [it, fresh] = rows[{i, j}].try_emplace(e);
        if (fresh) it->second.assign(n * n, Rational(0));
        return it->second;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) {
                for (const auto& [e, c] : h[l][j].terms()) row(i, j, e)[i * n + l] += c;
                for (const auto& [e, c] : h[i][l].terms()) row(i, j, e)[j * n + l] -= c;
            }
    std::size_t count = 0;
    for (const auto& [ij, by_mono] : rows) count += by_mono.size();
    RationalMatrix sys(count, n * n);
    std::size_t r = 0;
    for (const auto& [ij, by_mono] : rows)
        for (const auto& [e, coeffs] : by_mono) {
            for (std::size_t c = 0; c < n * n; ++c) sys(r, c) = coeffs[c];
            ++r;
        }

    CenterBasis out;
    out.n = n;
    for (const auto& v : sys.nullspace()) {
        RationalMatrix a(n, n);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) a(p, q) = v[q * n + p];
        out.basis.push_back(std::move(a));
    }
    auto id = RationalMatrix::identity(n);
    for (std::size_t i = 0; i < out.basis.size(); ++i)
        if (out.basis[i] == id) {
            std::rotate(out.basis.begin(), out.basis.begin() + i, out.basis.begin() + i + 1);
            break;
        }
    for (const auto& a : out.basis)
        if (!in_center(a, h)) throw std::logic_error("center basis element fails the Hessian identity");
    if (out.basis.empty()) throw std::logic_error("identity missing from center");
    return out;
}

// Degenerate means some nonzero v has sum_i v_i dF/dx_i = 0.
inline bool is_nondegenerate(const Form& f) {
    std::size_t n = f.nvars();
    std::vector<Form> grad;
    std::map<ExponentVec, std::size_t, GrlexGreater> index;
    for (std::size_t i = 1; i <= n; ++i) {
        grad.push_back(partial_derivative(f, i));
        for (const auto& [e, c] : grad.back().terms()) index.try_emplace(e, index.size());
    }
    RationalMatrix m(index.size(), n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [e, c] : grad[i].terms()) m(index.at(e), i) = c;
    return m.rank() == n;
}

namespace detail {

inline std::optional<Rational> rational_sqrt(const Rational& x) {
    if (x < 0) return std::nullopt;
    const Integer& p = x.get_num();
    const Integer& q = x.get_den();
    if (!mpz_perfect_square_p(p.get_mpz_t()) || !mpz_perfect_square_p(q.get_mpz_t())) return std::nullopt;
    Integer sp, sq;
    mpz_sqrt(sp.get_mpz_t(), p.get_mpz_t());
    mpz_sqrt(sq.get_mpz_t(), q.get_mpz_t());
    return Rational(sp, sq);
}

// Rational roots of a t^2 + b t + c; nullopt when the polynomial is identically zero.
inline std::optional<std::vector<Rational>> rational_roots(const Rational& a, const Rational& b, const Rational& c) {
    if (a == 0) {
        if (b == 0) {
            if (c == 0) return std::nullopt;
            return std::vector<Rational>{};
        }
        return std::vector<Rational>{-c / b};
    }
    auto s = rational_sqrt(b * b - 4 * a * c);
    if (!s) return std::vector<Rational>{};
    Rational r1 = (-b - *s) / (2 * a), r2 = (-b + *s) / (2 * a);
    if (r1 == r2) return std::vector<Rational>{r1};
    return std::vector<Rational>{r1, r2};
}

inline bool is_nontrivial_idempotent(const RationalMatrix& a) {
    std::size_t n = a.rows();
    return a * a == a && !a.is_zero() && !(a == RationalMatrix::identity(n));
}

// Nontrivial idempotents alpha I + beta B with beta != 0.
inline std::optional<RationalMatrix> idempotent_in_pencil(const RationalMatrix& b) {
    std::size_t n = b.rows();
    RationalMatrix b2 = b * b;
    auto id = RationalMatrix::identity(n);
    auto build = [&](const Rational& al, const Rational& be) -> std::optional<RationalMatrix> {
        if (be == 0) return std::nullopt;
        RationalMatrix a = al * id + be * b;
        if (is_nontrivial_idempotent(a)) return a;
        return std::nullopt;
    };

    // Off-diagonal entries of A^2 = A, after dividing by beta: 2 B_ij alpha + (B^2)_ij beta = B_ij.
    std::vector<std::array<Rational, 3>> lin;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && (b(i, j) != 0 || b2(i, j) != 0)) lin.push_back({2 * b(i, j), b2(i, j), b(i, j)});
    RationalMatrix aug(lin.size(), 3);
    for (std::size_t r = 0; r < lin.size(); ++r)
        for (std::size_t c = 0; c < 3; ++c) aug(r, c) = lin[r][c];
    auto piv = aug.rref();
    if (!piv.empty() && piv.back() == 2) return std::nullopt;

    if (piv.size() == 2) return build(aug(0, 2), aug(1, 2));

    if (piv.size() == 1) {
        // Line (alpha, beta) = p + t d; substitute into the diagonal quadratics.
        Rational pa, pb, da, db;
        if (piv[0] == 0) {
            pa = aug(0, 2), pb = 0, da = -aug(0, 1), db = 1;
        } else {
            pa = 0, pb = aug(0, 2), da = 1, db = 0;
        }
        std::optional<std::vector<Rational>> cand;
        for (std::size_t i = 0; i < n && !cand; ++i) {
            // alpha^2 + 2 B_ii alpha beta + (B^2)_ii beta^2 - alpha - B_ii beta
            const Rational &bi = b(i, i), &ci = b2(i, i);
            Rational qa = da * da + 2 * bi * da * db + ci * db * db;
            Rational qb = 2 * pa * da + 2 * bi * (pa * db + pb * da) + 2 * ci * pb * db - da - bi * db;
            Rational qc = pa * pa + 2 * bi * pa * pb + ci * pb * pb - pa - bi * pb;
            cand = rational_roots(qa, qb, qc);
        }
        if (!cand) {
            // Every t works; avoid beta = 0.
            for (long t = 1; t <= 3; ++t)
                if (auto a = build(pa + t * da, pb + t * db)) return a;
            return std::nullopt;
        }
        for (const auto& t : *cand)
            if (auto a = build(pa + t * da, pb + t * db)) return a;
        return std::nullopt;
    }

    // B diagonal: each alpha + beta B_ii must be 0 or 1.
    std::vector<Rational> vals;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(vals.begin(), vals.end(), b(i, i)) == vals.end()) vals.push_back(b(i, i));
    if (vals.size() < 2) return std::nullopt;
    for (int s0 = 1; s0 >= 0; --s0)
        for (int s1 = 1; s1 >= 0; --s1) {
            if (s0 == s1) continue;
            Rational be = Rational(s0 - s1) / (vals[0] - vals[1]);
            Rational al = s0 - be * vals[0];
            if (auto a = build(al, be)) return a;
        }
    return std::nullopt;
}

}  // namespace detail

struct DecomposabilityOptions {
    long height = 20;
    std::size_t random_trials = 20000;
    std::uint64_t seed = 0;
};

inline DecomposabilityVerdict decide_decomposability(const Form& f, const DecomposabilityOptions& opt = {}) {
    check_center_input(f);
    if (!is_nondegenerate(f)) throw std::invalid_argument("form is degenerate");
    CenterBasis z = compute_center(f);
    std::size_t n = f.nvars();
    auto id = RationalMatrix::identity(n);

    DecomposabilityVerdict v;
    v.center_dimension = z.dimension();
    v.central = v.center_dimension == 1;
    if (v.central) {
        v.verdict = Decomposability::indecomposable_over_Q;
        return v;
    }

    auto found = [&](RationalMatrix a) {
        v.idempotent = std::move(a);
        v.verdict = Decomposability::decomposable;
        return v;
    };

    if (v.center_dimension == 2) {
        const RationalMatrix& b = z.basis[0] == id ? z.basis[1] : z.basis[0];
        if (auto a = detail::idempotent_in_pencil(b)) return found(*a);
        v.verdict = Decomposability::indecomposable_over_Q;
        return v;
    }

    // d >= 3: not decided in general. Basis elements and pencils through I first, then bounded search.
    for (const auto& b : z.basis) {
        if (detail::is_nontrivial_idempotent(b)) return found(b);
        if (b == id) continue;
        if (auto a = detail::idempotent_in_pencil(b)) return found(*a);
    }
    std::size_t d = z.dimension();
    auto combo = [&](const std::vector<Rational>& c) {
        RationalMatrix a(n, n);
        for (std::size_t i = 0; i < d; ++i)
            if (c[i] != 0) a = a + c[i] * z.basis[i];
        return a;
    };
    std::vector<long> odo(d, -2);
    for (;;) {
        std::vector<Rational> c(odo.begin(), odo.end());
        auto a = combo(c);
        if (detail::is_nontrivial_idempotent(a)) return found(a);
        std::size_t i = 0;
        while (i < d && ++odo[i] > 2) odo[i++] = -2;
        if (i == d) break;
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<long> num(-opt.height, opt.height), den(1, opt.height);
    for (std::size_t t = 0; t < opt.random_trials; ++t) {
        std::vector<Rational> c(d);
        for (auto& x : c) x = make_rational(num(rng), den(rng));
        auto a = combo(c);
        if (detail::is_nontrivial_idempotent(a)) return found(a);
    }
    v.verdict = Decomposability::inconclusive;
    return v;
}

}  // namespace dworklab
