#pragma once

#include "matrix.hpp"
#include "prime_field.hpp"
#include "rational.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dworklab {

struct ExponentVec {
    std::vector<std::uint32_t> e;

    ExponentVec() = default;
    explicit ExponentVec(std::size_t n) : e(n, 0) {}
    ExponentVec(std::initializer_list<std::uint32_t> v) : e(v) {}
    explicit ExponentVec(std::vector<std::uint32_t> v) : e(std::move(v)) {}

    std::size_t size() const { return e.size(); }
    std::uint32_t operator[](std::size_t i) const { return e[i]; }
    std::uint32_t& operator[](std::size_t i) { return e[i]; }
    unsigned degree() const {
        unsigned d = 0;
        for (auto x : e) d += x;
        return d;
    }
    friend bool operator==(const ExponentVec& a, const ExponentVec& b) { return a.e == b.e; }
    friend ExponentVec operator+(const ExponentVec& a, const ExponentVec& b) {
        ExponentVec out = a;
        for (std::size_t i = 0; i < out.size(); ++i) out.e[i] += b.e[i];
        return out;
    }
};

// Graded lex, larger first: higher total degree, then larger exponent of x1, x2, ...
struct GrlexGreater {
    bool operator()(const ExponentVec& a, const ExponentVec& b) const {
        unsigned da = a.degree(), db = b.degree();
        if (da != db) return da > db;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] > b[i];
        return false;
    }
};

struct VariableCountMismatch : std::invalid_argument {
    VariableCountMismatch() : std::invalid_argument("variable-count mismatch") {}
};

template <class F>
class Polynomial {
public:
    using Field = F;
    using Coeff = typename F::value_type;
    using TermMap = std::map<ExponentVec, Coeff, GrlexGreater>;

    Polynomial() = default;
    explicit Polynomial(std::size_t n, F field = F{}) : n_(n), field_(field) {}

    static Polynomial constant(std::size_t n, const Coeff& c, F field = F{}) {
        Polynomial p(n, field);
        p.add_term(ExponentVec(n), c);
        return p;
    }
    // x_i with 1-based i.
    static Polynomial variable(std::size_t n, std::size_t i, F field = F{}) {
        if (i < 1 || i > n) throw std::out_of_range("variable index out of range");
        Polynomial p(n, field);
        ExponentVec e(n);
        e[i - 1] = 1;
        p.add_term(e, field.one());
        return p;
    }

    std::size_t nvars() const { return n_; }
    const F& field() const { return field_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    int degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.begin()->first.degree()); }
    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        unsigned d = terms_.begin()->first.degree();
        for (const auto& [e, c] : terms_)
            if (e.degree() != d) return false;
        return true;
    }

    Coeff coeff(const ExponentVec& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? field_.zero() : it->second;
    }

    void add_term(const ExponentVec& e, const Coeff& c) {
        if (e.size() != n_) throw VariableCountMismatch();
        if (F::is_zero(c)) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second = it->second + c;
            if (F::is_zero(it->second)) terms_.erase(it);
        }
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.n_ == b.n_ && a.field_ == b.field_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        check(a, b);
        Polynomial out = a;
        for (const auto& [e, c] : b.terms_) out.add_term(e, c);
        return out;
    }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial out(a.n_, a.field_);
        for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, a.field_.zero() - c);
        return out;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        check(a, b);
        Polynomial out(a.n_, a.field_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) out.add_term(ea + eb, ca * cb);
        return out;
    }
    friend Polynomial operator*(const Coeff& s, const Polynomial& a) {
        Polynomial out(a.n_, a.field_);
        if (F::is_zero(s)) return out;
        for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, s * c);
        return out;
    }
    Polynomial& operator+=(const Polynomial& b) { return *this = *this + b; }
    Polynomial& operator-=(const Polynomial& b) { return *this = *this - b; }
    Polynomial& operator*=(const Polynomial& b) { return *this = *this * b; }

    Polynomial pow(unsigned e) const {
        Polynomial out = constant(n_, field_.one(), field_);
        Polynomial base = *this;
        while (e) {
            if (e & 1) out = out * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return out;
    }

private:
    static void check(const Polynomial& a, const Polynomial& b) {
        if (a.n_ != b.n_) throw VariableCountMismatch();
        if (!(a.field_ == b.field_)) throw ModulusMismatch();
    }

    std::size_t n_ = 0;
    F field_{};
    TermMap terms_;
};

using Form = Polynomial<RationalField>;
using FieldPoly = Polynomial<PrimeField>;

template <class F>
Polynomial<F> add(const Polynomial<F>& a, const Polynomial<F>& b) { return a + b; }
template <class F>
Polynomial<F> mul(const Polynomial<F>& a, const Polynomial<F>& b) { return a * b; }

// 1-based variable index.
template <class F>
Polynomial<F> partial_derivative(const Polynomial<F>& f, std::size_t i) {
    if (i < 1 || i > f.nvars()) throw std::out_of_range("derivative index out of range");
    Polynomial<F> out(f.nvars(), f.field());
    for (const auto& [e, c] : f.terms()) {
        std::uint32_t p = e[i - 1];
        if (p == 0) continue;
        ExponentVec d = e;
        d[i - 1] = p - 1;
        out.add_term(d, f.field().from_int(static_cast<long>(p)) * c);
    }
    return out;
}

template <class F>
typename F::value_type evaluate_generic(const Polynomial<F>& f, const std::vector<typename F::value_type>& pt) {
    if (pt.size() != f.nvars()) throw std::invalid_argument("point length does not match variable count");
    auto acc = f.field().zero();
    for (const auto& [e, c] : f.terms()) {
        auto t = c;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::uint32_t k = 0; k < e[i]; ++k) t = t * pt[i];
        acc = acc + t;
    }
    return acc;
}

inline Rational evaluate(const Form& f, const std::vector<Rational>& pt) { return evaluate_generic(f, pt); }

inline FieldElem evaluate_mod(const FieldPoly& f, const std::vector<FieldElem>& pt) {
    for (const auto& v : pt)
        if (v.modulus != f.field().q) throw ModulusMismatch();
    return evaluate_generic(f, pt);
}

// Substitutes x_i = value for the given 1-based indices; ambient n is kept.
template <class F>
Polynomial<F> specialize(const Polynomial<F>& f, const std::map<std::size_t, typename F::value_type>& assign) {
    for (const auto& [i, v] : assign)
        if (i < 1 || i > f.nvars()) throw std::out_of_range("specialization index out of range");
    Polynomial<F> out(f.nvars(), f.field());
    for (const auto& [e, c] : f.terms()) {
        ExponentVec rest = e;
        auto t = c;
        for (const auto& [i, v] : assign) {
            for (std::uint32_t k = 0; k < e[i - 1]; ++k) t = t * v;
            rest[i - 1] = 0;
        }
        out.add_term(rest, t);
    }
    return out;
}

template <class F>
Polynomial<F> homogeneous_part(const Polynomial<F>& f, unsigned d) {
    Polynomial<F> out(f.nvars(), f.field());
    for (const auto& [e, c] : f.terms())
        if (e.degree() == d) out.add_term(e, c);
    return out;
}

template <class F>
Polynomial<F> leading_form(const Polynomial<F>& f) {
    if (f.is_zero()) throw std::domain_error("zero polynomial has no leading form");
    return homogeneous_part(f, static_cast<unsigned>(f.degree()));
}

template <class F>
std::vector<std::vector<Polynomial<F>>> hessian(const Polynomial<F>& f) {
    std::size_t n = f.nvars();
    std::vector<Polynomial<F>> grad;
    for (std::size_t i = 1; i <= n; ++i) grad.push_back(partial_derivative(f, i));
    std::vector<std::vector<Polynomial<F>>> h(n, std::vector<Polynomial<F>>(n, Polynomial<F>(n, f.field())));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            h[i][j] = partial_derivative(grad[i], j + 1);
            h[j][i] = h[i][j];
        }
    return h;
}

inline FieldPoly reduce_mod(const Form& f, std::uint64_t q) {
    PrimeField fq(q);
    FieldPoly out(f.nvars(), fq);
    for (const auto& [e, c] : f.terms()) out.add_term(e, reduce_rational(c, q));
    return out;
}

// f(A y): x_i -> sum_j a_ij y_j.
inline Form change_variables(const Form& f, const RationalMatrix& a) {
    std::size_t n = f.nvars();
    if (a.rows() != n || a.cols() != n) throw std::invalid_argument("change of variables needs an n x n matrix");
    if (a.det() == 0) throw std::domain_error("singular change-of-variables matrix");
    std::vector<Form> lin;
    for (std::size_t i = 0; i < n; ++i) {
        Form l(n);
        for (std::size_t j = 0; j < n; ++j) {
            ExponentVec e(n);
            e[j] = 1;
            l.add_term(e, a(i, j));
        }
        lin.push_back(l);
    }
    std::vector<std::map<std::uint32_t, Form>> powers(n);
    auto power = [&](std::size_t i, std::uint32_t p) -> const Form& {
        auto it = powers[i].find(p);
        if (it != powers[i].end()) return it->second;
        return powers[i].emplace(p, lin[i].pow(p)).first->second;
    };
    Form out(n);
    for (const auto& [e, c] : f.terms()) {
        Form t = Form::constant(n, c);
        for (std::size_t i = 0; i < n; ++i)
            if (e[i]) t = t * power(i, e[i]);
        out += t;
    }
    return out;
}

// Keeps only the listed (1-based, increasing) variables; the others must be absent.
template <class F>
Polynomial<F> compress_variables(const Polynomial<F>& f, const std::vector<std::size_t>& keep) {
    Polynomial<F> out(keep.size(), f.field());
    std::vector<bool> kept(f.nvars(), false);
    for (auto k : keep) kept.at(k - 1) = true;
    for (const auto& [e, c] : f.terms()) {
        ExponentVec d(keep.size());
        for (std::size_t i = 0; i < f.nvars(); ++i)
            if (!kept[i] && e[i]) throw std::invalid_argument("dropped variable still occurs");
        for (std::size_t j = 0; j < keep.size(); ++j) d[j] = e[keep[j] - 1];
        out.add_term(d, c);
    }
    return out;
}

// Restriction H_S: variables outside S set to zero, then expressed in the S-variables.
template <class F>
Polynomial<F> restrict_to_subset(const Polynomial<F>& f, const std::vector<std::size_t>& subset) {
    std::map<std::size_t, typename F::value_type> zeros;
    std::vector<bool> in(f.nvars() + 1, false);
    for (auto s : subset) in.at(s) = true;
    for (std::size_t i = 1; i <= f.nvars(); ++i)
        if (!in[i]) zeros[i] = f.field().zero();
    return compress_variables(specialize(f, zeros), subset);
}

inline Form to_form(const FieldPoly& f) {
    Form out(f.nvars());
    for (const auto& [e, c] : f.terms()) out.add_term(e, Rational(static_cast<unsigned long>(c.residue)));
    return out;
}

}  // namespace dworklab
