#pragma once

#include "polynomial.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dworklab {

template <class F>
struct Ideal {
    std::vector<Polynomial<F>> generators;
};

template <class F>
struct GroebnerBasis {
    std::vector<Polynomial<F>> basis;  // reduced, monic, sorted by leading monomial (grevlex, increasing)
    std::size_t nvars = 0;
    static constexpr const char* order = "grevlex";
};

namespace gb {

constexpr std::size_t kMaxVars = 12;

struct Mono {
    std::array<std::uint16_t, kMaxVars> e{};
    std::uint32_t deg = 0;

    friend bool operator==(const Mono& a, const Mono& b) { return a.deg == b.deg && a.e == b.e; }
};

inline int grevlex_cmp(const Mono& a, const Mono& b, std::size_t n) {
    if (a.deg != b.deg) return a.deg > b.deg ? 1 : -1;
    for (std::size_t i = n; i-- > 0;)
        if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? 1 : -1;
    return 0;
}
inline bool divides(const Mono& a, const Mono& b, std::size_t n) {
    if (a.deg > b.deg) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (a.e[i] > b.e[i]) return false;
    return true;
}
inline Mono lcm(const Mono& a, const Mono& b, std::size_t n) {
    Mono m;
    for (std::size_t i = 0; i < n; ++i) {
        m.e[i] = std::max(a.e[i], b.e[i]);
        m.deg += m.e[i];
    }
    return m;
}
inline Mono quotient(const Mono& a, const Mono& b, std::size_t n) {
    Mono m;
    for (std::size_t i = 0; i < n; ++i) m.e[i] = static_cast<std::uint16_t>(a.e[i] - b.e[i]);
    m.deg = a.deg - b.deg;
    return m;
}
inline Mono product(const Mono& a, const Mono& b, std::size_t n) {
    Mono m;
    for (std::size_t i = 0; i < n; ++i) m.e[i] = static_cast<std::uint16_t>(a.e[i] + b.e[i]);
    m.deg = a.deg + b.deg;
    return m;
}
inline bool coprime(const Mono& a, const Mono& b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a.e[i] && b.e[i]) return false;
    return true;
}

// Integer coefficients, fraction-free reduction, primitive representatives.
struct IntegerOps {
    using C = Integer;
    static bool zero(const C& c) { return c == 0; }
    C mul(const C& a, const C& b) const { return a * b; }
    C sub(const C& a, const C& b) const { return a - b; }
    // p <- s*p - u*t*g eliminates the leading term.
    void factors(const C& a, const C& b, C& s, C& u) const {
        C g = gcd(a, b);
        s = b / g;
        u = a / g;
    }
    bool unit_scale(const C& s) const { return s == 1; }
};

struct ModularOps {
    using C = std::uint64_t;
    std::uint64_t q;
    static bool zero(const C& c) { return c == 0; }
    C mul(const C& a, const C& b) const { return mulmod(a, b, q); }
    C sub(const C& a, const C& b) const { return a >= b ? a - b : a + q - b; }
    void factors(const C& a, const C& b, C& s, C& u) const {
        s = 1;
        u = mulmod(a, invmod(b, q), q);
    }
    bool unit_scale(const C& s) const { return s == 1; }
};

template <class Ops>
struct Engine {
    using C = typename Ops::C;
    struct Term {
        Mono m;
        C c;
    };
    using Poly = std::vector<Term>;  // grevlex-descending

    struct Pair {
        std::size_t i, j;
        Mono lcm;
        std::uint32_t sugar;
    };

    std::size_t n;
    Ops ops;
    std::vector<Poly> polys;
    std::vector<std::uint32_t> sugar;
    std::vector<std::size_t> basis;  // indices into polys
    std::vector<Pair> pairs;

    Engine(std::size_t nv, Ops o) : n(nv), ops(o) {
        if (n > kMaxVars) throw std::invalid_argument("too many variables for the Groebner engine");
    }

    void sort_poly(Poly& p) const {
        std::sort(p.begin(), p.end(), [&](const Term& a, const Term& b) { return grevlex_cmp(a.m, b.m, n) > 0; });
    }

    // s*p - u*t*g, all sorted.
    Poly combine(const Poly& p, const C& s, const C& u, const Mono& t, const Poly& g) const {
        Poly out;
        out.reserve(p.size() + g.size());
        std::size_t i = 0, j = 0;
        const bool unit = ops.unit_scale(s);
        while (i < p.size() || j < g.size()) {
            if (j == g.size()) {
                out.push_back({p[i].m, unit ? p[i].c : ops.mul(s, p[i].c)});
                ++i;
                continue;
            }
            Mono gm = product(g[j].m, t, n);
            int c = i == p.size() ? -1 : grevlex_cmp(p[i].m, gm, n);
            if (c > 0) {
                out.push_back({p[i].m, unit ? p[i].c : ops.mul(s, p[i].c)});
                ++i;
            } else if (c < 0) {
                out.push_back({gm, ops.sub(C(0), ops.mul(u, g[j].c))});
                ++j;
            } else {
                C v = ops.sub(unit ? p[i].c : ops.mul(s, p[i].c), ops.mul(u, g[j].c));
                if (!Ops::zero(v)) out.push_back({gm, v});
                ++i;
                ++j;
            }
        }
        return out;
    }

    const Poly* find_reducer(const Mono& m) const {
        for (auto idx : basis)
            if (divides(polys[idx].front().m, m, n)) return &polys[idx];
        return nullptr;
    }

    // Full normal form. scale collects the factor applied to the input (Q only).
    Poly reduce(Poly p, Rational* scale = nullptr) const {
        Poly r;
        while (!p.empty()) {
            const Poly* g = find_reducer(p.front().m);
            if (!g) {
                r.push_back(p.front());
                p.erase(p.begin());
                continue;
            }
            C s, u;
            ops.factors(p.front().c, g->front().c, s, u);
            Mono t = quotient(p.front().m, g->front().m, n);
            p = combine(p, s, u, t, *g);
            if (!ops.unit_scale(s)) {
                for (auto& term : r) term.c = ops.mul(s, term.c);
                if constexpr (std::is_same_v<C, Integer>)
                    if (scale) *scale *= Rational(s);
            }
            if constexpr (std::is_same_v<C, Integer>) strip_content(r, p, scale);
        }
        return r;
    }

    void strip_content(Poly& r, Poly& p, Rational* scale) const {
        if constexpr (std::is_same_v<C, Integer>) {
            Integer g = 0;
            for (const auto& t : r) {
                g = gcd(g, t.c);
                if (g == 1) return;
            }
            for (const auto& t : p) {
                g = gcd(g, t.c);
                if (g == 1) return;
            }
            if (g == 0 || g == 1) return;
            for (auto& t : r) t.c /= g;
            for (auto& t : p) t.c /= g;
            if (scale) *scale /= Rational(g);
        }
    }

    void normalize(Poly& p) const {
        if (p.empty()) return;
        if constexpr (std::is_same_v<C, Integer>) {
            Integer g = 0;
            for (const auto& t : p) g = gcd(g, t.c);
            if (p.front().c < 0) g = -g;
            for (auto& t : p) t.c /= g;
        } else {
            C inv = invmod(p.front().c, ops.q);
            for (auto& t : p) t.c = ops.mul(inv, t.c);
        }
    }

    Poly spoly(std::size_t i, std::size_t j, const Mono& l) const {
        const Poly& f = polys[i];
        const Poly& g = polys[j];
        // lc(g)*(l/lm f)*f - lc(f)*(l/lm g)*g, with common factors removed.
        C s, u;
        ops.factors(f.front().c, g.front().c, s, u);
        Mono tf = quotient(l, f.front().m, n);
        Mono tg = quotient(l, g.front().m, n);
        Poly fs;
        fs.reserve(f.size());
        for (const auto& t : f) fs.push_back({product(t.m, tf, n), t.c});
        return combine(fs, s, u, tg, g);
    }

    void update(std::size_t h) {
        const Mono& lh = polys[h].front().m;
        std::vector<Pair> c, d;
        for (auto g : basis) {
            Mono l = lcm(lh, polys[g].front().m, n);
            std::uint32_t sg = std::max(sugar[h] - lh.deg, sugar[g] - polys[g].front().m.deg) + l.deg;
            c.push_back({h, g, l, sg});
        }
        for (std::size_t k = 0; k < c.size(); ++k) {
            const Pair& p = c[k];
            bool keep = coprime(lh, polys[p.j].front().m, n);
            if (!keep) {
                keep = true;
                for (std::size_t k2 = k + 1; k2 < c.size() && keep; ++k2)
                    if (divides(c[k2].lcm, p.lcm, n)) keep = false;
                for (std::size_t k2 = 0; k2 < d.size() && keep; ++k2)
                    if (divides(d[k2].lcm, p.lcm, n)) keep = false;
            }
            if (keep) d.push_back(p);
        }
        std::vector<Pair> e;
        for (const auto& p : d)
            if (!coprime(lh, polys[p.j].front().m, n)) e.push_back(p);
        std::vector<Pair> kept;
        for (const auto& p : pairs) {
            bool drop = divides(lh, p.lcm, n) && !(lcm(polys[p.i].front().m, lh, n) == p.lcm) &&
                        !(lcm(polys[p.j].front().m, lh, n) == p.lcm);
            if (!drop) kept.push_back(p);
        }
        for (const auto& p : e) kept.push_back(p);
        pairs = std::move(kept);
        std::vector<std::size_t> nb;
        for (auto g : basis)
            if (!divides(lh, polys[g].front().m, n)) nb.push_back(g);
        nb.push_back(h);
        basis = std::move(nb);
    }

    std::size_t add_poly(Poly p, std::uint32_t sg) {
        polys.push_back(std::move(p));
        sugar.push_back(sg);
        return polys.size() - 1;
    }

    void run(const std::vector<Poly>& gens) {
        for (const auto& g0 : gens) {
            Poly g = reduce(g0);
            if (g.empty()) continue;
            normalize(g);
            std::uint32_t sg = 0;
            for (const auto& t : g0) sg = std::max(sg, t.m.deg);
            update(add_poly(std::move(g), sg));
        }
        while (!pairs.empty()) {
            auto best = pairs.begin();
            for (auto it = pairs.begin(); it != pairs.end(); ++it) {
                if (it->sugar < best->sugar ||
                    (it->sugar == best->sugar && grevlex_cmp(it->lcm, best->lcm, n) < 0))
                    best = it;
            }
            Pair p = *best;
            pairs.erase(best);
            Poly h = reduce(spoly(p.i, p.j, p.lcm));
            if (h.empty()) continue;
            normalize(h);
            update(add_poly(std::move(h), p.sugar));
        }
        interreduce();
    }

    void interreduce() {
        std::vector<std::size_t> minimal;
        for (auto i : basis) {
            bool redundant = false;
            for (auto j : basis) {
                if (i == j) continue;
                const Mono& mi = polys[i].front().m;
                const Mono& mj = polys[j].front().m;
                if (divides(mj, mi, n) && (!(mi == mj) || j < i)) {
                    redundant = true;
                    break;
                }
            }
            if (!redundant) minimal.push_back(i);
        }
        std::vector<Poly> reduced;
        for (auto i : minimal) {
            basis.clear();
            for (auto j : minimal)
                if (j != i) basis.push_back(j);
            Poly out = reduce_tail_only(polys[i]);
            normalize(out);
            reduced.push_back(std::move(out));
        }
        polys = std::move(reduced);
        sugar.assign(polys.size(), 0);
        basis.clear();
        for (std::size_t i = 0; i < polys.size(); ++i) basis.push_back(i);
        std::sort(basis.begin(), basis.end(), [&](std::size_t a, std::size_t b) {
            return grevlex_cmp(polys[a].front().m, polys[b].front().m, n) < 0;
        });
        std::vector<Poly> ordered;
        for (auto i : basis) ordered.push_back(polys[i]);
        polys = std::move(ordered);
        for (std::size_t i = 0; i < polys.size(); ++i) basis[i] = i;
    }

    // Reduces every non-leading term, keeping the leading monomial.
    Poly reduce_tail_only(const Poly& f) const {
        Poly r{f.front()};
        Poly p(f.begin() + 1, f.end());
        while (!p.empty()) {
            const Poly* g = find_reducer(p.front().m);
            if (!g) {
                r.push_back(p.front());
                p.erase(p.begin());
                continue;
            }
            C s, u;
            ops.factors(p.front().c, g->front().c, s, u);
            Mono t = quotient(p.front().m, g->front().m, n);
            p = combine(p, s, u, t, *g);
            if (!ops.unit_scale(s))
                for (auto& term : r) term.c = ops.mul(s, term.c);
            strip_content(r, p, nullptr);
        }
        return r;
    }
};

inline Mono to_mono(const ExponentVec& e) {
    Mono m;
    for (std::size_t i = 0; i < e.size(); ++i) {
        m.e[i] = static_cast<std::uint16_t>(e[i]);
        m.deg += e[i];
    }
    return m;
}
inline ExponentVec to_exponents(const Mono& m, std::size_t n) {
    ExponentVec e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = m.e[i];
    return e;
}

inline Engine<IntegerOps>::Poly to_engine(const Form& f, Integer* denominator_lcm = nullptr) {
    Integer l = 1;
    for (const auto& [e, c] : f.terms()) l = lcm(l, Integer(c.get_den()));
    Engine<IntegerOps>::Poly p;
    for (const auto& [e, c] : f.terms()) {
        Rational v = c * Rational(l);
        p.push_back({to_mono(e), Integer(v.get_num())});
    }
    if (denominator_lcm) *denominator_lcm = l;
    return p;
}
inline Engine<ModularOps>::Poly to_engine(const FieldPoly& f) {
    Engine<ModularOps>::Poly p;
    for (const auto& [e, c] : f.terms()) p.push_back({to_mono(e), c.residue});
    return p;
}

inline Form from_engine(const Engine<IntegerOps>::Poly& p, std::size_t n, const Rational& divide_by = 1) {
    Form f(n);
    for (const auto& t : p) f.add_term(to_exponents(t.m, n), Rational(t.c) / divide_by);
    return f;
}
inline FieldPoly from_engine(const Engine<ModularOps>::Poly& p, std::size_t n, std::uint64_t q) {
    FieldPoly f(n, PrimeField(q));
    for (const auto& t : p) f.add_term(to_exponents(t.m, n), FieldElem::raw(t.c, q));
    return f;
}

template <class F>
struct Traits;
template <>
struct Traits<RationalField> {
    using E = Engine<IntegerOps>;
    static E make(const Form& f) { return E(f.nvars(), IntegerOps{}); }
    static Form make_monic(const E::Poly& p, std::size_t n, const RationalField&) {
        return from_engine(p, n, Rational(p.front().c));
    }
};
template <>
struct Traits<PrimeField> {
    using E = Engine<ModularOps>;
    static E make(const FieldPoly& f) { return E(f.nvars(), ModularOps{f.field().q}); }
    static FieldPoly make_monic(const E::Poly& p, std::size_t n, const PrimeField& fld) {
        return from_engine(p, n, fld.q);
    }
};

}  // namespace gb

template <class F>
GroebnerBasis<F> buchberger(const Ideal<F>& ideal) {
    if (ideal.generators.empty()) throw std::invalid_argument("empty generator list");
    const auto& g0 = ideal.generators.front();
    std::size_t n = g0.nvars();
    auto eng = gb::Traits<F>::make(g0);
    std::vector<typename gb::Traits<F>::E::Poly> gens;
    for (const auto& g : ideal.generators) {
        if (g.nvars() != n) throw VariableCountMismatch();
        if (!(g.field() == g0.field())) throw ModulusMismatch();
        if (g.is_zero()) throw std::invalid_argument("zero generator");
        auto p = gb::to_engine(g);
        eng.sort_poly(p);
        gens.push_back(std::move(p));
    }
    eng.run(gens);
    GroebnerBasis<F> out;
    out.nvars = n;
    for (const auto& p : eng.polys) out.basis.push_back(gb::Traits<F>::make_monic(p, n, g0.field()));
    return out;
}

template <class F>
GroebnerBasis<F> buchberger(const std::vector<Polynomial<F>>& gens) {
    return buchberger(Ideal<F>{gens});
}

inline Form normal_form(const Form& f, const GroebnerBasis<RationalField>& g) {
    if (f.nvars() != g.nvars) throw VariableCountMismatch();
    gb::Engine<gb::IntegerOps> eng(f.nvars(), gb::IntegerOps{});
    for (const auto& b : g.basis) {
        auto p = gb::to_engine(b);
        eng.sort_poly(p);
        eng.basis.push_back(eng.add_poly(std::move(p), 0));
    }
    Integer den;
    auto p = gb::to_engine(f, &den);
    eng.sort_poly(p);
    Rational scale = Rational(den);
    auto r = eng.reduce(p, &scale);
    return gb::from_engine(r, f.nvars(), scale);
}

inline FieldPoly normal_form(const FieldPoly& f, const GroebnerBasis<PrimeField>& g) {
    if (f.nvars() != g.nvars) throw VariableCountMismatch();
    gb::Engine<gb::ModularOps> eng(f.nvars(), gb::ModularOps{f.field().q});
    for (const auto& b : g.basis) {
        if (!(b.field() == f.field())) throw ModulusMismatch();
        auto p = gb::to_engine(b);
        eng.sort_poly(p);
        eng.basis.push_back(eng.add_poly(std::move(p), 0));
    }
    auto p = gb::to_engine(f);
    eng.sort_poly(p);
    return gb::from_engine(eng.reduce(p), f.nvars(), f.field().q);
}

// Leading monomials of a Groebner basis contain a pure power of each variable.
template <class F>
bool leading_terms_cover_all_variables(const GroebnerBasis<F>& g) {
    std::size_t n = g.nvars;
    std::vector<bool> hit(n, false);
    for (const auto& b : g.basis) {
        // Grevlex leading term of a basis element (stored under grlex in Polynomial).
        gb::Mono best;
        bool first = true;
        for (const auto& [e, c] : b.terms()) {
            gb::Mono m = gb::to_mono(e);
            if (first || gb::grevlex_cmp(m, best, n) > 0) best = m;
            first = false;
        }
        if (best.deg == 0) return true;  // unit ideal
        std::size_t nz = 0, which = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (best.e[i]) {
                ++nz;
                which = i;
            }
        if (nz == 1) hit[which] = true;
    }
    for (bool h : hit)
        if (!h) return false;
    return true;
}

template <class F>
bool is_irrelevant(const Ideal<F>& ideal) {
    for (const auto& g : ideal.generators)
        if (!g.is_homogeneous()) throw std::invalid_argument("irrelevance test needs homogeneous generators");
    std::vector<Polynomial<F>> nz;
    for (const auto& g : ideal.generators)
        if (!g.is_zero()) nz.push_back(g);
    if (ideal.generators.empty()) throw std::invalid_argument("empty generator list");
    std::size_t n = ideal.generators.front().nvars();
    if (nz.empty()) return n == 0;
    return leading_terms_cover_all_variables(buchberger(Ideal<F>{nz}));
}

template <class F>
bool is_irrelevant(const std::vector<Polynomial<F>>& gens) {
    return is_irrelevant(Ideal<F>{gens});
}

}  // namespace dworklab
