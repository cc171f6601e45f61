#pragma once

#include "double_double.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"
#include "prime_field.hpp"
#include "rational.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dworklab {

using ComplexValue = std::complex<double>;

// exp(2 pi i r / d) for r in [0, d), computed in long double.
class RootTable {
public:
    explicit RootTable(std::uint64_t d) : d_(d), w_(d) {
        if (d == 0) throw std::invalid_argument("root table of size 0");
        const long double two_pi = 2.0L * std::acos(-1.0L);
        for (std::uint64_t r = 0; r < d; ++r) {
            // Reflect into [0, d/2] so symmetric entries are exact conjugates.
            std::uint64_t s = 2 * r <= d ? r : d - r;
            long double t = two_pi * static_cast<long double>(s) / static_cast<long double>(d);
            double c = static_cast<double>(std::cos(t)), sn = static_cast<double>(std::sin(t));
            w_[r] = ComplexValue(c, s == r ? sn : -sn);
        }
        w_[0] = ComplexValue(1, 0);
    }
    std::uint64_t size() const { return d_; }
    const ComplexValue& operator[](std::uint64_t r) const { return w_[r]; }

private:
    std::uint64_t d_;
    std::vector<ComplexValue> w_;
};

// sum_r counts[r] * table[r], compensated, in increasing r.
inline ComplexValue combine_counts(const std::vector<std::uint64_t>& counts, const RootTable& table) {
    CompensatedSum re, im;
    for (std::uint64_t r = 0; r < counts.size(); ++r) {
        if (!counts[r]) continue;
        double c = static_cast<double>(counts[r]);
        re.add(c * table[r].real());
        im.add(c * table[r].imag());
    }
    return {re.value(), im.value()};
}

namespace detail {

// Residue-level evaluator for a FieldPoly on all of F_q^m.
struct ModEvaluator {
    std::uint64_t q;
    std::size_t m;
    std::vector<std::pair<std::vector<unsigned>, std::uint64_t>> terms;

    explicit ModEvaluator(const FieldPoly& f) : q(f.field().q), m(f.nvars()) {
        for (const auto& [e, c] : f.terms()) {
            std::vector<unsigned> ex(m);
            for (std::size_t i = 0; i < m; ++i) ex[i] = e[i];
            terms.push_back({std::move(ex), c.residue});
        }
    }
    std::uint64_t operator()(const std::vector<std::uint64_t>& x) const {
        std::uint64_t acc = 0;
        for (const auto& [ex, c] : terms) {
            std::uint64_t t = c;
            for (std::size_t i = 0; i < m; ++i)
                for (unsigned k = 0; k < ex[i]; ++k) t = mulmod(t, x[i], q);
            acc = (acc + t) % q;
        }
        return acc;
    }
};

inline bool next_point(std::vector<std::uint64_t>& x, std::uint64_t q) {
    for (std::size_t i = x.size(); i-- > 0;) {
        if (++x[i] < q) return true;
        x[i] = 0;
    }
    return false;
}

inline std::uint64_t checked_pow(std::uint64_t q, std::size_t e, std::uint64_t cap) {
    std::uint64_t out = 1;
    for (std::size_t i = 0; i < e; ++i) {
        if (out > cap / q) throw std::length_error("q^e exceeds the size cap");
        out *= q;
    }
    return out;
}

}  // namespace detail

// T(a, b; q) = sum over x in F_q^m of e(2 pi (a f(x) + b.x) / q).
inline ComplexValue complete_sum(const FieldPoly& f, const FieldElem& a, const std::vector<FieldElem>& b) {
    std::uint64_t q = f.field().q;
    std::size_t m = f.nvars();
    if (b.size() != m) throw std::invalid_argument("complete_sum: b has wrong dimension");
    if (a.modulus != q) throw ModulusMismatch();
    for (const auto& bi : b)
        if (bi.modulus != q) throw ModulusMismatch();
    detail::checked_pow(q, m, std::uint64_t(1) << 40);
    detail::ModEvaluator ev(f);
    std::vector<std::uint64_t> counts(q, 0), x(m, 0);
    do {
        std::uint64_t ph = mulmod(a.residue, ev(x), q);
        for (std::size_t i = 0; i < m; ++i) ph = (ph + mulmod(b[i].residue, x[i], q)) % q;
        ++counts[ph];
    } while (detail::next_point(x, q));
    return combine_counts(counts, RootTable(q));
}

struct SumTable {
    std::uint64_t q = 0;
    std::size_t m = 0;
    unsigned k = 0;
    FieldPoly poly;
    std::vector<ComplexValue> values;  // row-major (a, b_1, ..., b_m)

    std::uint64_t index(std::uint64_t a, const std::vector<std::uint64_t>& b) const {
        std::uint64_t idx = a;
        for (auto bi : b) idx = idx * q + bi;
        return idx;
    }
    const ComplexValue& at(std::uint64_t a, const std::vector<std::uint64_t>& b) const { return values.at(index(a, b)); }
    // Inverse of index(): (a, b) for a flat position.
    std::pair<std::uint64_t, std::vector<std::uint64_t>> pair_at(std::uint64_t idx) const {
        std::vector<std::uint64_t> b(m);
        for (std::size_t i = m; i-- > 0;) {
            b[i] = idx % q;
            idx /= q;
        }
        return {idx, b};
    }
    // Accumulation error model: 10 q^m machine epsilons per entry.
    double tolerance() const {
        return 10.0 * std::pow(static_cast<double>(q), static_cast<double>(m)) * std::numeric_limits<double>::epsilon();
    }
};

struct ScanOptions {
    unsigned threads = 1;
    std::uint64_t memory_cap_bytes = std::uint64_t(1) << 30;
};

struct MemoryCapExceeded : std::length_error {
    using std::length_error::length_error;
};

// All T(a, b; q) as the (m+1)-dimensional DFT of N(u, x) = 1{f(x) = u}, one naive
// length-q transform per axis line.
inline SumTable scan_all_pairs(const FieldPoly& f, const ScanOptions& opt = {}) {
    SumTable t;
    t.q = f.field().q;
    t.m = f.nvars();
    t.k = f.is_zero() ? 0 : static_cast<unsigned>(f.degree());
    t.poly = f;
    std::uint64_t q = t.q;
    std::uint64_t total;
    try {
        total = detail::checked_pow(q, t.m + 1, opt.memory_cap_bytes / sizeof(ComplexValue));
    } catch (const std::length_error&) {
        throw MemoryCapExceeded("q^(m+1) table exceeds the memory cap");
    }
    std::vector<ComplexValue> data(total, ComplexValue(0, 0));
    detail::ModEvaluator ev(f);
    std::vector<std::uint64_t> x(t.m, 0);
    std::uint64_t qm = total / q;
    do {
        std::uint64_t flat = 0;
        for (auto xi : x) flat = flat * q + xi;
        data[ev(x) * qm + flat] += 1.0;
    } while (detail::next_point(x, q));

    RootTable w(q);
    Progress progress("scan q=" + std::to_string(q), t.m + 1);
    for (std::size_t axis = 0; axis <= t.m; ++axis) {
        std::uint64_t stride = detail::checked_pow(q, t.m - axis, total);
        std::uint64_t lines = total / q;
        parallel_for(lines, opt.threads, [&](std::size_t line) {
            std::uint64_t outer = line / stride, inner = line % stride;
            std::uint64_t base = outer * stride * q + inner;
            std::vector<ComplexValue> in(q), out(q);
            for (std::uint64_t j = 0; j < q; ++j) in[j] = data[base + j * stride];
            for (std::uint64_t kk = 0; kk < q; ++kk) {
                CompensatedSum re, im;
                std::uint64_t ph = 0;
                for (std::uint64_t j = 0; j < q; ++j) {
                    if (in[j] != ComplexValue(0, 0)) {
                        ComplexValue p = in[j] * w[ph];
                        re.add(p.real());
                        im.add(p.imag());
                    }
                    ph += kk;
                    if (ph >= q) ph -= q;
                }
                out[kk] = {re.value(), im.value()};
            }
            for (std::uint64_t j = 0; j < q; ++j) data[base + j * stride] = out[j];
        });
        progress.tick();
    }
    t.values = std::move(data);
    return t;
}

// Naive enumeration of every T(a, b; q); the oracle for scan_all_pairs.
inline SumTable naive_table(const FieldPoly& f) {
    SumTable t;
    t.q = f.field().q;
    t.m = f.nvars();
    t.k = f.is_zero() ? 0 : static_cast<unsigned>(f.degree());
    t.poly = f;
    std::uint64_t total = detail::checked_pow(t.q, t.m + 1, std::uint64_t(1) << 26);
    t.values.resize(total);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        auto [a, b] = t.pair_at(idx);
        std::vector<FieldElem> be;
        for (auto bi : b) be.push_back(FieldElem::raw(bi, t.q));
        t.values[idx] = complete_sum(f, FieldElem::raw(a, t.q), be);
    }
    return t;
}

struct TableCheck {
    double parseval_sum = 0;
    double parseval_expected = 0;
    double parseval_relative_error = 0;
    double max_conjugate_defect = 0;
    double origin_defect = 0;
};

inline TableCheck check_table(const SumTable& t) {
    TableCheck c;
    CompensatedSum s;
    for (const auto& v : t.values) s.add(std::norm(v));
    c.parseval_sum = s.value();
    c.parseval_expected = std::pow(static_cast<double>(t.q), static_cast<double>(2 * t.m + 1));
    c.parseval_relative_error = std::fabs(c.parseval_sum - c.parseval_expected) / c.parseval_expected;
    std::vector<std::uint64_t> zero(t.m, 0);
    c.origin_defect = std::abs(t.at(0, zero) - std::pow(static_cast<double>(t.q), static_cast<double>(t.m)));
    for (std::uint64_t idx = 0; idx < t.values.size(); ++idx) {
        auto [a, b] = t.pair_at(idx);
        std::uint64_t na = (t.q - a) % t.q;
        for (auto& bi : b) bi = (t.q - bi) % t.q;
        c.max_conjugate_defect = std::max(c.max_conjugate_defect, std::abs(t.at(na, b) - std::conj(t.values[idx])));
    }
    return c;
}

inline double weil_bound(unsigned k, std::size_t m, std::uint64_t q) {
    return std::pow(static_cast<double>(k - 1), static_cast<double>(m)) *
           std::pow(static_cast<double>(q), static_cast<double>(m) / 2);
}

struct WeilCertificate {
    double bound = 0;
    double max_ratio = 0;  // max over a != 0 of |T| / bound
    bool certified = false;
};

inline WeilCertificate certify_weil(const SumTable& t) {
    WeilCertificate w;
    w.bound = weil_bound(t.k, t.m, t.q);
    std::uint64_t qm = t.values.size() / t.q;
    for (std::uint64_t idx = qm; idx < t.values.size(); ++idx)
        w.max_ratio = std::max(w.max_ratio, std::abs(t.values[idx]) / w.bound);
    w.certified = w.max_ratio <= 1 + 1e-9;
    return w;
}

// Smallest q with (1/4)(k-1)^(-2m) q^(m+1) >= 2, i.e. q^(m+1) >= 8 (k-1)^(2m).
inline std::uint64_t density_threshold_K2(unsigned k, std::size_t m) {
    Integer target = 8 * ipow(Integer(k - 1), 2 * m);
    std::uint64_t q = 1;
    while (ipow(Integer(static_cast<unsigned long>(q)), m + 1) < target) ++q;
    return q;
}

inline Rational default_alpha2(unsigned k, std::size_t m) { return Rational(1) / (8 * ipow(Integer(k - 1), 2 * m)); }

struct DensityError : Refusal {
    using Refusal::Refusal;
};

struct GoodPairSet {
    std::uint64_t q = 0;
    std::size_t m = 0;
    unsigned k = 0;
    Rational alpha1, alpha2;
    std::vector<std::pair<std::uint64_t, std::vector<std::uint64_t>>> pairs;
    std::size_t count = 0;
    Integer required;             // ceil(alpha2 q^(m+1))
    std::uint64_t threshold = 0;  // max(k, K2); density is only guaranteed above it
    bool density_ok = false;
};

struct GoodPairOptions {
    std::optional<Rational> alpha1, alpha2;
    bool enforce_density = true;
};

// Pairs with alpha1 q^(m/2) <= |T| <= (k-1)^m q^(m/2), both sides widened by the table tolerance.
inline GoodPairSet good_pairs(const SumTable& t, const GoodPairOptions& opt = {}) {
    GoodPairSet g;
    g.q = t.q;
    g.m = t.m;
    g.k = t.k;
    g.alpha1 = opt.alpha1.value_or(make_rational(1, 2));
    g.alpha2 = opt.alpha2.value_or(default_alpha2(t.k, t.m));
    double root = std::pow(static_cast<double>(t.q), static_cast<double>(t.m) / 2);
    double lo = g.alpha1.get_d() * root - t.tolerance();
    double hi = weil_bound(t.k, t.m, t.q) + t.tolerance();
    for (std::uint64_t idx = 0; idx < t.values.size(); ++idx) {
        double v = std::abs(t.values[idx]);
        if (v >= lo && v <= hi) g.pairs.push_back(t.pair_at(idx));
    }
    g.count = g.pairs.size();
    Integer qm1 = ipow(Integer(static_cast<unsigned long>(t.q)), t.m + 1);
    g.required = ceil_div(g.alpha2 * Rational(qm1));
    g.threshold = std::max<std::uint64_t>(t.k, density_threshold_K2(t.k, t.m));
    g.density_ok = Integer(static_cast<unsigned long>(g.count)) >= g.required;
    if (opt.enforce_density && !g.density_ok && t.q > g.threshold)
        throw DensityError("good-pair density below alpha2 q^(m+1) at q=" + std::to_string(t.q) +
                           "; input is likely not Deligne mod q");
    return g;
}

struct IncompleteSumReport {
    ComplexValue value;
    double magnitude = 0;
    double ratio = 0;           // |sum| / (q^(n/2) (log q)^|I|)
    double explicit_bound = 0;  // (k-1)^n prod_{i in I} (3 + 2 log q) / log q
    std::size_t incomplete_count = 0;
};

// Coordinates in J run over 1..q, the others over 1..H_i.
inline IncompleteSumReport incomplete_sum_check(const FieldPoly& f, const std::vector<std::size_t>& J,
                                                const std::vector<std::uint64_t>& H) {
    std::uint64_t q = f.field().q;
    std::size_t n = f.nvars();
    if (H.size() != n) throw std::invalid_argument("H needs one cutoff per coordinate");
    std::vector<bool> complete(n, false);
    for (auto j : J) {
        if (j < 1 || j > n) throw std::out_of_range("J index out of range");
        complete[j - 1] = true;
    }
    std::vector<std::uint64_t> hi(n);
    std::size_t incomplete = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (complete[i]) {
            hi[i] = q;
        } else {
            if (H[i] < 1 || H[i] > q) throw std::out_of_range("H_i must lie in [1, q]");
            hi[i] = H[i];
            ++incomplete;
        }
    }
    detail::ModEvaluator ev(f);
    std::vector<std::uint64_t> counts(q, 0), m(n, 1), res(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) res[i] = m[i] % q;
        ++counts[ev(res)];
        std::size_t i = n;
        while (i-- > 0) {
            if (++m[i] <= hi[i]) break;
            m[i] = 1;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    IncompleteSumReport r;
    r.value = combine_counts(counts, RootTable(q));
    r.magnitude = std::abs(r.value);
    r.incomplete_count = incomplete;
    double lq = std::log(static_cast<double>(q));
    r.ratio = r.magnitude / (std::pow(static_cast<double>(q), n / 2.0) * std::pow(lq, static_cast<double>(incomplete)));
    unsigned k = f.is_zero() ? 1 : static_cast<unsigned>(f.degree());
    r.explicit_bound = std::pow(static_cast<double>(k - 1), static_cast<double>(n)) *
                       std::pow((3 + 2 * lq) / lq, static_cast<double>(incomplete));
    return r;
}

// 2 pi * exact + perturbation, with exact a rational.
struct RationalAngle {
    Rational exact;
    double perturbation = 0;

    static RationalAngle of(std::int64_t num, std::int64_t den, double perturbation = 0) {
        return {make_rational(num, den), perturbation};
    }
    long double radians() const {
        return 2.0L * std::acos(-1.0L) * static_cast<long double>(exact.get_d()) + perturbation;
    }
};

namespace detail {

inline __int128 to_i128(const Integer& z) {
    if (mpz_sizeinbase(z.get_mpz_t(), 2) > 120) throw std::overflow_error("integer exceeds 120 bits");
    Integer a = abs(z);
    unsigned __int128 v = 0;
    std::size_t limbs = mpz_size(a.get_mpz_t());
    for (std::size_t i = limbs; i-- > 0;) v = (v << 64) | static_cast<std::uint64_t>(mpz_getlimbn(a.get_mpz_t(), i));
    return z < 0 ? -static_cast<__int128>(v) : static_cast<__int128>(v);
}

inline std::uint64_t mod_i128(__int128 v, std::uint64_t d) {
    __int128 r = v % static_cast<__int128>(d);
    if (r < 0) r += d;
    return static_cast<std::uint64_t>(r);
}

// Exact split of an integer below 2^106 into two doubles.
inline DoubleDouble split_i128(__int128 v) {
    double hi = static_cast<double>(v);
    double lo = static_cast<double>(v - static_cast<__int128>(hi));
    return {hi, lo};
}

struct IntPolyEvaluator {
    std::size_t m = 0;
    std::vector<std::pair<std::vector<unsigned>, __int128>> terms;

    IntPolyEvaluator() = default;
    explicit IntPolyEvaluator(const Form& g) : m(g.nvars()) {
        for (const auto& [e, c] : g.terms()) {
            if (c.get_den() != 1) throw std::invalid_argument("phase polynomial needs integer coefficients");
            std::vector<unsigned> ex(m);
            for (std::size_t i = 0; i < m; ++i) ex[i] = e[i];
            terms.push_back({std::move(ex), to_i128(c.get_num())});
        }
    }
    __int128 operator()(const std::vector<std::int64_t>& x) const {
        __int128 acc = 0;
        for (const auto& [ex, c] : terms) {
            __int128 t = c;
            for (std::size_t i = 0; i < m; ++i)
                for (unsigned k = 0; k < ex[i]; ++k) t *= x[i];
            acc += t;
        }
        return acc;
    }
};

}  // namespace detail

// G(m) = P_k(M_1 R/L, ..., M_r R/L, m_{r+1}, ..., m_n) as a polynomial in the last n - r variables.
inline Form specialized_symbol(const Form& pk, const std::vector<Integer>& M, const Integer& rl) {
    std::size_t n = pk.nvars(), r = M.size();
    if (r == 0 || r >= n) throw std::invalid_argument("need 1 <= r < n");
    std::map<std::size_t, Rational> assign;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < r; ++i) assign[i + 1] = Rational(M[i] * rl);
    for (std::size_t i = r + 1; i <= n; ++i) keep.push_back(i);
    return compress_variables(specialize(pk, assign), keep);
}

struct RealSumSpec {
    Form pk;                          // integral leading form in n variables
    std::vector<Integer> M;           // witness, length r
    Integer rl;                       // R / L
    std::vector<Rational> u;          // exclusive upper bounds, length n - r
    std::vector<RationalAngle> y;     // (y_1, y_{r+1}, ..., y_n)
    double s = 0;
};

namespace detail {

inline void check_real_sum(const RealSumSpec& in, std::size_t m) {
    if (in.rl < 1) throw std::invalid_argument("R/L must be a positive integer");
    if (in.u.size() != m) throw std::invalid_argument("u needs n - r entries");
    if (in.y.size() != m + 1) throw std::invalid_argument("y needs n - r + 1 angles");
}

// Number of integers in [rl, u).
inline Integer range_count(const Integer& rl, const Rational& u) {
    Integer c = ceil_div(u) - rl;
    return c < 0 ? Integer(0) : c;
}

}  // namespace detail

// S = sum over rl <= m_j < u_j of e(m.y + G(m)(y_1 + s)). Exact rational angles go through an
// integer phase mod the common denominator; perturbations through double-double reduction mod 2 pi.
inline ComplexValue real_sum(const RealSumSpec& in) {
    std::size_t m = in.pk.nvars() - in.M.size();
    detail::check_real_sum(in, m);
    Form g = specialized_symbol(in.pk, in.M, in.rl);
    detail::IntPolyEvaluator ev(g);

    std::vector<std::int64_t> lo(m), hi(m);
    Integer umax = in.rl;
    for (std::size_t j = 0; j < m; ++j) {
        Integer top = ceil_div(in.u[j]);
        if (top <= in.rl) return {0, 0};
        if (top > Integer(1) << 40) throw std::overflow_error("summation range too large");
        lo[j] = in.rl.get_si();
        hi[j] = Integer(top - 1).get_si();
        umax = std::max(umax, Integer(top));
    }
    // |G| <= sum |c| umax^deg must stay below 2^100 for the 128-bit path.
    Integer gbound = 0;
    for (const auto& [e, c] : g.terms()) gbound += abs(c.get_num()) * ipow(umax, e.degree());
    if (mpz_sizeinbase(gbound.get_mpz_t(), 2) > 100) throw std::overflow_error("phase polynomial exceeds 2^100");

    Integer den = 1;
    for (const auto& a : in.y) den = lcm(den, a.exact.get_den());
    if (den > Integer(1) << 31) throw std::invalid_argument("common angle denominator exceeds 2^31");
    std::uint64_t d = den.get_ui();
    auto residue = [&](const Rational& x) {
        Integer v = x.get_num() * (den / x.get_den());
        Integer r;
        mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), den.get_mpz_t());
        return r.get_ui();
    };
    std::uint64_t A = residue(in.y[0].exact);
    std::vector<std::uint64_t> B(m);
    for (std::size_t j = 0; j < m; ++j) B[j] = residue(in.y[j + 1].exact);

    bool perturbed = in.s != 0;
    for (const auto& a : in.y) perturbed = perturbed || a.perturbation != 0;
    DoubleDouble theta1 = DoubleDouble::two_sum(in.y[0].perturbation, in.s);

    RootTable table(d);
    std::vector<std::int64_t> x = lo;
    std::vector<std::uint64_t> counts;
    if (!perturbed) counts.assign(d, 0);
    CompensatedSum re, im;
    for (;;) {
        __int128 gv = ev(x);
        std::uint64_t ph = mulmod(A, detail::mod_i128(gv, d), d);
        for (std::size_t j = 0; j < m; ++j)
            ph = (ph + mulmod(B[j], static_cast<std::uint64_t>(x[j]) % d, d)) % d;
        if (!perturbed) {
            ++counts[ph];
        } else {
            DoubleDouble t = theta1 * detail::split_i128(gv);
            for (std::size_t j = 0; j < m; ++j)
                t = t + DoubleDouble::two_prod(in.y[j + 1].perturbation, static_cast<double>(x[j]));
            double ang = reduce_two_pi(t);
            ComplexValue z = table[ph] * ComplexValue(std::cos(ang), std::sin(ang));
            re.add(z.real());
            im.add(z.imag());
        }
        std::size_t j = m;
        while (j-- > 0) {
            if (++x[j] <= hi[j]) break;
            x[j] = lo[j];
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
    if (!perturbed) return combine_counts(counts, table);
    return {re.value(), im.value()};
}

struct DecompositionReport {
    ComplexValue S;
    ComplexValue T;
    double main = 0;            // prod floor(N_i / q) |T(a, b; q)|
    double measured_error = 0;  // | |S| - main |
    double VN = 0;
    double general_bound = 0;      // VN prod floor(N_i/q) q^(m/2) + max_{|J|<m} prod_J floor(N_j/q) q^(m/2) (log q)^(m-|J|)
    std::optional<double> simple_bound;  // floor(N/q)^m q^(m/2) (VN + floor(N/q)^(-1) (log q)^m), when floor(N/q) >= 1
    double constant = 0;
    double budget = 0;  // constant * (simple bound if defined, else general bound)
};

struct HypothesisViolation : Refusal {
    using Refusal::Refusal;
};

// Default scaling of the error budget: 2^m (k-1)^m (2 + 3 / log 3)^m.
inline double default_budget_constant(unsigned k, std::size_t m) {
    return std::pow(2.0 * (k - 1) * (2 + 3 / std::log(3.0)), static_cast<double>(m));
}

inline DecompositionReport decompose_sum(const RealSumSpec& in, std::uint64_t q, std::uint64_t a,
                                         const std::vector<std::uint64_t>& b, double V,
                                         std::optional<double> constant = std::nullopt) {
    std::size_t m = in.pk.nvars() - in.M.size();
    detail::check_real_sum(in, m);
    if (!is_prime(q)) throw std::invalid_argument("q must be prime");
    if (a < 1 || a >= q) throw std::invalid_argument("need 1 <= a < q");
    if (b.size() != m) throw std::invalid_argument("b needs n - r entries");
    if (V < 0) throw std::invalid_argument("V must be nonnegative");
    if (in.y[0].exact != make_rational(static_cast<long>(a), static_cast<long>(q)) || in.y[0].perturbation + in.s != 0)
        throw std::invalid_argument("y_1 + s must equal 2 pi a / q exactly");
    const long double two_pi = 2.0L * std::acos(-1.0L);
    for (std::size_t j = 0; j < m; ++j) {
        Rational diff = in.y[j + 1].exact - make_rational(static_cast<long>(b[j]), static_cast<long>(q));
        diff -= Rational(floor_div(diff + make_rational(1, 2)));
        long double off = two_pi * static_cast<long double>(diff.get_d()) + in.y[j + 1].perturbation;
        if (std::fabs(off) > static_cast<long double>(V) * (1 + 1e-12L))
            throw std::invalid_argument("y_j is not within V of 2 pi b_j / q");
    }

    std::vector<Integer> N(m);
    Integer nmax = 0;
    for (std::size_t j = 0; j < m; ++j) {
        N[j] = detail::range_count(in.rl, in.u[j]);
        nmax = std::max(nmax, N[j]);
    }
    DecompositionReport r;
    r.VN = V * nmax.get_d();
    if (r.VN > 1) throw HypothesisViolation("V N = " + std::to_string(r.VN) + " exceeds 1");

    Form g = specialized_symbol(in.pk, in.M, in.rl);
    FieldPoly gq = reduce_mod(g, q);
    std::vector<FieldElem> be;
    for (auto bj : b) be.push_back(FieldElem::raw(bj % q, q));
    r.T = complete_sum(gq, FieldElem::raw(a, q), be);
    r.S = real_sum(in);

    std::vector<double> fl(m);
    double prod = 1;
    for (std::size_t j = 0; j < m; ++j) {
        fl[j] = Integer(N[j] / q).get_d();
        prod *= fl[j];
    }
    r.main = prod * std::abs(r.T);
    r.measured_error = std::fabs(std::abs(r.S) - r.main);

    double lq = std::log(static_cast<double>(q));
    double root = std::pow(static_cast<double>(q), m / 2.0);
    double sup = 0;
    for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t(1) << m); ++mask) {
        double p = 1;
        std::size_t size = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (mask >> j & 1) {
                p *= fl[j];
                ++size;
            }
        sup = std::max(sup, p * std::pow(lq, static_cast<double>(m - size)));
    }
    r.general_bound = r.VN * prod * root + sup * root;
    double fN = Integer(nmax / q).get_d();
    if (fN >= 1) r.simple_bound = std::pow(fN, static_cast<double>(m)) * root * (r.VN + std::pow(lq, static_cast<double>(m)) / fN);
    unsigned k = static_cast<unsigned>(in.pk.degree());
    r.constant = constant.value_or(default_budget_constant(k, m));
    r.budget = r.constant * r.simple_bound.value_or(r.general_bound);
    return r;
}

}  // namespace dworklab
