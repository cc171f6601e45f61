#pragma once

#include "box_union.hpp"
#include "expsum.hpp"
#include "form_analysis.hpp"
#include "parallel.hpp"
#include "phi_profile.hpp"
#include "sum_cache.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace dworklab {

// ---------------------------------------------------------------- parameter plan

struct Relation {
    std::string name;
    Rational lhs, rhs;
    std::string sense;  // ">=", "<=", ">", "<", "="
    bool holds = false;
    bool equality = false;
};

struct ParamPlan {
    long n = 0, k = 0, r = 0;
    Integer D, modulus;
    Rational sigma, kappa, lambda, Delta0, delta, s_threshold;
    std::vector<Relation> relations;

    long m() const { return n - r; }
    // sigma/2 + m/2 - (kappa + lambda) m/2, the largest admissible s.
    Rational exponent_bound() const {
        return sigma / 2 + Rational(m()) / 2 - (kappa + lambda) * m() / 2;
    }
    bool consistent() const {
        return std::all_of(relations.begin(), relations.end(), [](const Relation& r) { return r.holds; });
    }
};

namespace detail {
inline Relation relation(std::string name, Rational lhs, std::string sense, Rational rhs) {
    Relation r{std::move(name), lhs, rhs, sense, false, lhs == rhs};
    if (sense == ">=") r.holds = lhs >= rhs;
    else if (sense == "<=") r.holds = lhs <= rhs;
    else if (sense == ">") r.holds = lhs > rhs;
    else if (sense == "<") r.holds = lhs < rhs;
    else r.holds = lhs == rhs;
    return r;
}
}  // namespace detail

inline ParamPlan solve_parameters(long n, long k, long r) {
    if (n < 2 || k < 2 || r < 1 || r > n) throw std::invalid_argument("parameters need n >= 2, k >= 2, 1 <= r <= n");
    if (r == n)
        throw Refusal("r = n leaves no arithmetic variables: the sum over m is empty and the threshold "
                      "degenerates to s < 1/4 with sigma = 1/2, so there is no plan to solve");
    ParamPlan p;
    p.n = n;
    p.k = k;
    p.r = r;
    long m = n - r;
    p.D = Integer((k - 1) * (m + 1) + 1);
    p.modulus = 2 * p.D;
    p.sigma = make_rational(1, 2);
    p.kappa = Rational(Integer(m), p.modulus);
    p.kappa.canonicalize();
    p.lambda = 1 - Rational(Integer(m + 1), p.modulus);
    p.lambda.canonicalize();
    p.Delta0 = make_rational(1, m);
    p.delta = delta_threshold(n, k, r);
    p.s_threshold = make_rational(1, 4) + p.delta;
    using detail::relation;
    auto& R = p.relations;
    R.push_back(relation("kappa + k lambda >= k - 1 + sigma", p.kappa + k * p.lambda, ">=", Rational(k - 1) + p.sigma));
    R.push_back(relation("(n-r+1)/(n-r) kappa + lambda >= 1", make_rational(m + 1, m) * p.kappa + p.lambda, ">=", Rational(1)));
    R.push_back(relation("lambda <= 1 - kappa (1 + Delta0)", p.lambda, "<=", 1 - p.kappa * (1 + p.Delta0)));
    R.push_back(relation("lambda > (k-1)/k", p.lambda, ">", make_rational(k - 1, k)));
    R.push_back(relation("sigma <= 1/2", p.sigma, "<=", make_rational(1, 2)));
    R.push_back(relation("kappa > 0", p.kappa, ">", Rational(0)));
    R.push_back(relation("kappa < 1", p.kappa, "<", Rational(1)));
    R.push_back(relation("lambda > 0", p.lambda, ">", Rational(0)));
    R.push_back(relation("lambda < 1", p.lambda, "<", Rational(1)));
    R.push_back(relation("sigma/2 + m/2 - (kappa+lambda) m/2 = 1/4 + delta", p.exponent_bound(), "=", p.s_threshold));
    return p;
}

// ---------------------------------------------------------------- constants

struct Constants {
    double c0 = 0.1, c1 = 0.01, c2 = 0.01, c3 = 0.01, c4 = 0.5, c5 = 0.5;

    void validate() const {
        if (!(c0 > 0 && c0 < 0.5)) throw std::invalid_argument("need 0 < c0 < 1/2");
        if (!(c1 > 0 && c1 < 0.5) || !(c2 > 0 && c2 < 0.5)) throw std::invalid_argument("need 0 < c1, c2 < 1/2");
        if (!(c3 > 0 && c3 < 1)) throw std::invalid_argument("need 0 < c3 < 1");
        if (!(c4 > 0 && c4 < 1) || !(c5 > 0 && c5 < 1)) throw std::invalid_argument("need 0 < c4, c5 < 1");
    }
    double delta0() const { return PhiProfile::standard().delta0(c0); }
};

// ---------------------------------------------------------------- instances

inline double log2q(const Rational& x) {
    if (x <= 0) throw std::domain_error("log2 of a nonpositive rational");
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, x.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, x.get_den_mpz_t());
    return std::log2(mn) - std::log2(md) + static_cast<double>(en - ed);
}

inline double to_double(const Rational& x) { return x.get_d(); }

inline Rational pow2(long e) {
    return e >= 0 ? Rational(ipow(Integer(2), static_cast<unsigned long>(e)))
                  : Rational(Integer(1), ipow(Integer(2), static_cast<unsigned long>(-e)));
}

struct ConstraintCheck {
    std::string name;
    bool holds = false;
    double log2_lhs = 0, log2_rhs = 0;
};

struct Instance {
    ParamPlan plan;
    std::optional<long> j;
    Rational R, L, Q, S1, Delta0;
    Integer rl;  // R / L (valid when the integrality check holds)
    std::vector<ConstraintCheck> checks;

    bool feasible() const {
        return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.holds; });
    }
    const ConstraintCheck* first_violation() const {
        for (const auto& c : checks)
            if (!c.holds) return &c;
        return nullptr;
    }
};

struct InfeasibleInstance : Refusal {
    std::string constraint;
    InfeasibleInstance(const std::string& name, const std::string& what) : Refusal(what), constraint(name) {}
};

// Evaluates R/L integrality and the three scale conditions with unit implied constants.
inline Instance evaluate_instance(const ParamPlan& plan, const Rational& R, const Rational& L, const Rational& Q,
                                  const Rational& S1, std::optional<Rational> Delta0 = std::nullopt,
                                  std::optional<long> j = std::nullopt) {
    if (R <= 0 || L <= 0 || Q <= 0 || S1 <= 0) throw std::invalid_argument("R, L, Q, S1 must be positive");
    Instance in;
    in.plan = plan;
    in.j = j;
    in.R = R;
    in.L = L;
    in.Q = Q;
    in.S1 = S1;
    in.Delta0 = Delta0.value_or(plan.Delta0);
    if (in.Delta0 <= 0 || in.Delta0 > plan.Delta0) throw std::invalid_argument("need 0 < Delta0 <= 1/(n-r)");
    long k = plan.k, m = plan.m();
    Rational rl = R / L;
    in.rl = rl.get_den() == 1 ? rl.get_num() : Integer(0);
    in.checks.push_back({"R/L integral", rl.get_den() == 1, log2q(rl), log2q(rl)});
    // 1/Q <= L^k / (S1 R^(k-1))  <=>  S1 R^(k-1) <= Q L^k
    Rational lhs1 = S1 * rpow(R, k - 1), rhs1 = Q * rpow(L, k);
    in.checks.push_back({"constraint 1: 1/Q <= L^k/(S1 R^(k-1))", lhs1 <= rhs1, -log2q(Q), log2q(rpow(L, k) / (S1 * rpow(R, k - 1)))});
    // Q^(-1-1/(n-r)) <= (R/L)^(-1)  <=>  (R/L)^m <= Q^(m+1)
    in.checks.push_back({"constraint 2: R/L <= Q^(1+1/(n-r))", rpow(rl, m) <= rpow(Q, m + 1), log2q(rl),
                         log2q(Q) * (1 + 1.0 / m)});
    in.checks.push_back({"constraint 3: R/L >= Q^(1+Delta0)",
                         rl >= 1 && Q >= 1 ? ge_rational_power(rl, Q, 1 + in.Delta0) : rl >= Q,
                         log2q(rl), log2q(Q) * (1 + in.Delta0.get_d())});
    return in;
}

inline Instance require_feasible(Instance in) {
    if (const auto* v = in.first_violation()) throw InfeasibleInstance(v->name, "infeasible instance, violates " + v->name);
    return in;
}

// R = 2^j on the progression j = 0 mod 2D; L = R^lambda, Q = R^kappa, S1 = R^sigma are then powers of two.
inline Instance feasible_instance(const ParamPlan& plan, long j) {
    if (j <= 0) throw std::invalid_argument("j must be positive");
    if (Integer(j) % plan.modulus != 0)
        throw std::invalid_argument("j = " + std::to_string(j) + " is not on the progression j = 0 mod " + plan.modulus.get_str());
    auto power = [&](const Rational& e) {
        Rational x = e * j;
        if (x.get_den() != 1) throw std::logic_error("exponent not integral on the progression");
        return pow2(x.get_num().get_si());
    };
    return require_feasible(evaluate_instance(plan, pow2(j), power(plan.lambda), power(plan.kappa), power(plan.sigma),
                                              plan.Delta0, j));
}

inline Instance feasible_instance(const ParamPlan& plan, const Rational& R, const Rational& L, const Rational& Q,
                                  const Rational& S1, std::optional<Rational> Delta0 = std::nullopt) {
    return require_feasible(evaluate_instance(plan, R, L, Q, S1, Delta0));
}

// ---------------------------------------------------------------- symbol geometry

// P(u + v) as a polynomial in v.
inline Form taylor_shift(const Form& p, const std::vector<Rational>& u) {
    std::size_t n = p.nvars();
    if (u.size() != n) throw std::invalid_argument("shift point has wrong dimension");
    Form out(n);
    for (const auto& [e, c] : p.terms()) {
        std::vector<std::pair<ExponentVec, Rational>> parts{{ExponentVec(n), c}};
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<ExponentVec, Rational>> next;
            for (const auto& [b, coef] : parts)
                for (std::uint32_t t = 0; t <= e[i]; ++t) {
                    ExponentVec nb = b;
                    nb[i] = t;
                    next.push_back({nb, coef * Rational(binomial(e[i], t)) * rpow(u[i], e[i] - t)});
                }
            parts = std::move(next);
        }
        for (const auto& [b, coef] : parts) out.add_term(b, coef);
    }
    return out;
}

// (M o R, R~) with R~ = L (ceil(2R/L) - 1) in each of the last n - r coordinates.
inline std::vector<Rational> anchor_point(const Instance& in, const std::vector<long>& M) {
    std::size_t n = static_cast<std::size_t>(in.plan.n), r = static_cast<std::size_t>(in.plan.r);
    if (M.size() != r) throw std::invalid_argument("witness M needs r entries");
    std::vector<Rational> u(n);
    for (std::size_t i = 0; i < r; ++i) u[i] = Rational(M[i]) * in.R;
    Rational tilde = in.L * (Rational(ceil_div(2 * in.R / in.L)) - 1);
    for (std::size_t i = r; i < n; ++i) u[i] = tilde;
    return u;
}

inline std::vector<Rational> anchor_gradient(const Instance& in, const Form& pk, const std::vector<long>& M) {
    auto u = anchor_point(in, M);
    std::vector<Rational> g;
    for (std::size_t i = 1; i <= pk.nvars(); ++i) g.push_back(evaluate(partial_derivative(pk, i), u));
    return g;
}

inline void check_symbol(const Instance& in, const Form& pk, const std::vector<long>& M) {
    if (pk.nvars() != static_cast<std::size_t>(in.plan.n)) throw std::invalid_argument("form has wrong variable count");
    if (pk.is_zero() || !pk.is_homogeneous() || static_cast<long>(pk.degree()) != in.plan.k)
        throw std::invalid_argument("P_k must be a form of degree k");
    for (const auto& [e, c] : pk.terms())
        if (c.get_den() != 1) throw std::invalid_argument("P_k needs integral coefficients");
    if (M.size() != static_cast<std::size_t>(in.plan.r)) throw std::invalid_argument("witness M needs r entries");
    for (long v : M)
        if (v < 1) throw std::invalid_argument("witness entries must be >= 1");
}

// ---------------------------------------------------------------- t-window

struct TWindow {
    long double d1P = 0;      // (d_1 P_k)(M o R, R~)
    long double A1 = 0;       // L^k / d1P, the x_1 -> y_1 rescaling
    long double tau_max = 0;  // c2 delta0 / (S1 R^(k-1))
    long double t_cap = 0;    // c3 / R^(k-1)
    long double compat = 0;   // c1 / (2 d1P) - tau_max
    double delta0 = 0;
    std::vector<std::pair<std::string, bool>> checks;

    std::optional<std::string> violated() const {
        for (const auto& [name, ok] : checks)
            if (!ok) return name;
        return std::nullopt;
    }
};

struct TWindowEmpty : Refusal {
    using Refusal::Refusal;
};

// s_max: the largest |s| = |L^k tau| a caller needs (c4 / q for a whole box).
inline TWindow t_window(const Instance& in, const Form& pk, const std::vector<long>& M, const Constants& c,
                        double s_max) {
    check_symbol(in, pk, M);
    TWindow w;
    w.delta0 = c.delta0();
    auto grad = anchor_gradient(in, pk, M);
    long k = in.plan.k;
    long double Rk1 = to_double(rpow(in.R, k - 1)), Lk = to_double(rpow(in.L, k)), S1 = to_double(in.S1),
                L = to_double(in.L);
    w.d1P = to_double(grad[0]);
    w.A1 = w.d1P != 0 ? Lk / w.d1P : 0;
    w.tau_max = c.c2 * w.delta0 / (S1 * Rk1);
    w.t_cap = c.c3 / Rk1;
    w.compat = c.c1 / (2 * w.d1P) - w.tau_max;
    const long double two_pi = 2 * M_PIl;
    auto& C = w.checks;
    C.push_back({"(d_1 P_k)(M o R, R~) > 0", w.d1P > 0});
    C.push_back({"c1 < delta0 / 4", c.c1 < w.delta0 / 4});
    C.push_back({"c1/(2 d_1P) - c2 delta0/(S1 R^(k-1)) > 0", w.d1P > 0 && w.compat > 0});
    C.push_back({"|s| / L^k <= c2 delta0/(S1 R^(k-1))", s_max / Lk <= w.tau_max});
    C.push_back({"c1/d_1P + c2 delta0/(S1 R^(k-1)) <= c3/R^(k-1)", c.c1 / w.d1P + w.tau_max <= w.t_cap});
    C.push_back({"c1/d_1P + c2 delta0/(S1 R^(k-1)) < 1", c.c1 / w.d1P + w.tau_max < 1});
    bool grad_small = true, ratio_small = true;
    for (std::size_t j = 0; j < grad.size(); ++j) {
        long double gj = std::fabs(static_cast<long double>(to_double(grad[j])));
        if (!(c.c2 * gj / Rk1 < 0.5L)) grad_small = false;
        if (j > 0 && !(c.c1 * gj / w.d1P < w.delta0 / 4)) ratio_small = false;
    }
    C.push_back({"c2 |d_j P_k| / R^(k-1) < 1/2 for all j", grad_small});
    C.push_back({"c1 |d_j P_k / d_1 P_k| < delta0/4 for j >= 2", ratio_small});
    C.push_back({"L^k c1 / (2 d_1P) >= 2 pi (every y_1 has a preimage)", w.A1 * c.c1 / 2 >= two_pi});
    C.push_back({"2 c1 L >= 2 pi (every y_j has a preimage)", 2 * c.c1 * L >= two_pi});
    return w;
}

// Smallest L = 2^e (R = rl L, S1 the largest power of two <= sqrt R) that makes the scale conditions and
// the whole t-window hold for every box with denominator in [Q/2, Q]. Delta0 is the largest p/100 <= 1/(n-r)
// with R/L >= Q^(1 + Delta0).
inline Instance desk_instance(const ParamPlan& plan, const Form& pk, const std::vector<long>& M, const Integer& rl,
                              const Rational& Q, const Constants& c) {
    if (rl < 2) throw std::invalid_argument("R/L must be at least 2");
    auto primes = primes_in(ceil_div(Q / 2).get_ui(), floor_div(Q).get_ui());
    if (primes.empty()) throw Refusal("no primes in [Q/2, Q]");
    Rational delta0;
    for (long p = 100 / plan.m(); p >= 1; --p) {
        Rational d = make_rational(p, 100);
        if (d <= plan.Delta0 && ge_rational_power(Rational(rl), Q, 1 + d)) {
            delta0 = d;
            break;
        }
    }
    if (delta0 == 0) throw Refusal("R/L is below Q^(1 + 1/100)");
    long lrl = static_cast<long>(mpz_sizeinbase(rl.get_mpz_t(), 2)) - 1;
    for (long e = 1; e <= 600; ++e) {
        Rational L = pow2(e), R = Rational(rl) * L;
        Instance in = evaluate_instance(plan, R, L, Q, pow2((e + lrl) / 2), delta0);
        for (std::size_t i = 2; i < in.checks.size(); ++i)
            if (!in.checks[i].holds) throw InfeasibleInstance(in.checks[i].name, "infeasible instance, violates " + in.checks[i].name);
        if (!in.feasible()) continue;
        if (!t_window(in, pk, M, c, c.c4 / static_cast<double>(primes.front())).violated()) return in;
    }
    throw Refusal("no L <= 2^600 opens the t-window");
}

// ---------------------------------------------------------------- test function

struct TestFunction {
    long Mstar = 2;
    double C = 0;  // annulus constant 2 M* sqrt(n)
    double inner_radius = 0, outer_radius = 0;  // R / C and C R
    bool annulus_ok = false;                    // S1 <= R / 2 puts the Fourier support in the annulus
    double phi_norm = 0;
    double norm_lower = 0, norm_upper = 0;      // S1^(-1/2) floor/ceil(R/L)^((n-r)/2) ||phi||^n
    double log_norm_upper = 0;
};

inline TestFunction make_test_function(const Instance& in, const std::vector<long>& M) {
    TestFunction tf;
    for (long v : M) tf.Mstar = std::max(tf.Mstar, v);
    long n = in.plan.n, m = in.plan.m();
    tf.C = 2.0 * tf.Mstar * std::sqrt(static_cast<double>(n));
    double R = to_double(in.R);
    tf.inner_radius = R / tf.C;
    tf.outer_radius = tf.C * R;
    tf.annulus_ok = in.S1 <= in.R / 2;
    tf.phi_norm = PhiProfile::standard().norm_l2();
    Rational q = in.R / in.L;
    double lo = to_double(Rational(floor_div(q))), hi = to_double(Rational(ceil_div(q)));
    double base = std::pow(tf.phi_norm, static_cast<double>(n)) / std::sqrt(to_double(in.S1));
    tf.norm_lower = base * std::pow(lo, m / 2.0);
    tf.norm_upper = base * std::pow(hi, m / 2.0);
    tf.log_norm_upper = n * std::log(tf.phi_norm) - 0.5 * log2q(in.S1) * M_LN2 + m / 2.0 * std::log(hi);
    return tf;
}

// ---------------------------------------------------------------- boxes

struct PrimeBoxes {
    std::uint64_t q = 0;
    GoodPairSet good;
    double half_width_a = 0;  // c4 / q
    double half_width_b = 0;  // c5 q^(-1-1/(n-r))
    double box_measure = 0;   // including the slab factor c1^(r-1)
};

struct BoxSetOptions {
    unsigned threads = 1;
    const SumTableCache* cache = nullptr;
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t seed = 0;
    bool enforce_density = true;
};

struct BoxSet {
    Rational Q;
    std::size_t n = 0, r = 0, m = 0;
    Constants constants;
    std::vector<std::uint64_t> primes;
    std::vector<PrimeBoxes> per_prime;
    std::size_t box_count = 0;
    double slab_factor = 1;   // c1^(r-1)
    double sum_measure = 0;   // sum of box measures
    double union_measure = 0;
    double union_stderr = 0;  // Monte Carlo only
    bool exact = true;
    std::size_t overlapping_pairs = 0;
    // Pre-image in x-coordinates over (-c1, -c1/2] x [-c1, c1]^(n-1).
    double jacobian = 0;  // A1 L^(n-r)
    double x_region_measure = 0;
    double omega_star_measure = 0;
    double periods_y1 = 0, periods_y = 0;  // full periods covered by the x-region

    double union_times_logQ() const { return union_measure * std::log(to_double(Q)); }
};

namespace detail {

// Projected boxes (y_1, y_{r+1}, ..., y_n) on the torus [0, 2 pi)^(m+1).
inline BoxList projected_boxes(const BoxSet& bs) {
    const long double two_pi = 2 * M_PIl;
    BoxList out(bs.m + 1);
    std::size_t id = 0;
    std::vector<long double> lo(bs.m + 1), hi(bs.m + 1);
    for (const auto& pb : bs.per_prime) {
        long double q = static_cast<long double>(pb.q);
        for (const auto& [a, b] : pb.good.pairs) {
            long double ca = two_pi * a / q;
            lo[0] = ca - pb.half_width_a;
            hi[0] = ca + pb.half_width_a;
            for (std::size_t j = 0; j < bs.m; ++j) {
                long double cb = two_pi * b[j] / q;
                lo[j + 1] = cb - pb.half_width_b;
                hi[j + 1] = cb + pb.half_width_b;
            }
            add_wrapped(out, lo, hi, id++, two_pi);
        }
    }
    return out;
}

inline BoxList clip(const BoxList& b, const std::vector<std::pair<long double, long double>>& region) {
    BoxList out(b.d);
    std::vector<long double> lo(b.d), hi(b.d);
    for (std::size_t i = 0; i < b.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < b.d && keep; ++j) {
            lo[j] = std::max(b.lo[i * b.d + j], region[j].first);
            hi[j] = std::min(b.hi[i * b.d + j], region[j].second);
            keep = hi[j] > lo[j];
        }
        if (keep) out.add(lo.data(), hi.data(), b.id[i]);
    }
    return out;
}

// Measure of {y in prod [lo_i, hi_i] : y mod 2 pi in the union}, splitting each range into full periods
// and one partial piece.
inline long double periodic_preimage(const BoxList& boxes, long double full_union, const std::vector<long double>& lo,
                                     const std::vector<long double>& hi) {
    const long double two_pi = 2 * M_PIl;
    std::size_t d = boxes.d;
    std::vector<long double> nfull(d);
    std::vector<std::vector<std::pair<long double, long double>>> partial(d);
    for (std::size_t i = 0; i < d; ++i) {
        long double len = hi[i] - lo[i];
        nfull[i] = std::floor(len / two_pi);
        long double rem = len - nfull[i] * two_pi;
        if (rem <= 0) continue;
        long double start = std::fmod(lo[i], two_pi);
        if (start < 0) start += two_pi;
        if (start + rem <= two_pi) {
            partial[i].push_back({start, start + rem});
        } else {
            partial[i].push_back({start, two_pi});
            partial[i].push_back({0, start + rem - two_pi});
        }
    }
    long double total = 0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask) {
        long double weight = 1;
        bool empty = false;
        std::size_t combos = 1;
        for (std::size_t i = 0; i < d; ++i) {
            if (mask >> i & 1) {
                weight *= nfull[i];
            } else {
                if (partial[i].empty()) empty = true;
                combos *= std::max<std::size_t>(1, partial[i].size());
            }
        }
        if (empty || weight == 0) continue;
        if (mask + 1 == (std::size_t(1) << d)) {
            total += weight * full_union;
            continue;
        }
        for (std::size_t code = 0; code < combos; ++code) {
            std::vector<std::pair<long double, long double>> region(d);
            std::size_t x = code;
            for (std::size_t i = 0; i < d; ++i) {
                if (mask >> i & 1) {
                    region[i] = {0, two_pi};
                } else {
                    region[i] = partial[i][x % partial[i].size()];
                    x /= partial[i].size();
                }
            }
            total += weight * union_measure(clip(boxes, region));
        }
    }
    return total;
}

}  // namespace detail

inline BoxSet build_boxes(const Instance& in, const Form& pk, const std::vector<long>& M, const Constants& c,
                          const BoxSetOptions& opt = {}) {
    c.validate();
    check_symbol(in, pk, M);
    if (in.rl < 1) throw std::invalid_argument("R/L must be a positive integer");
    BoxSet bs;
    bs.Q = in.Q;
    bs.n = static_cast<std::size_t>(in.plan.n);
    bs.r = static_cast<std::size_t>(in.plan.r);
    bs.m = bs.n - bs.r;
    bs.constants = c;
    Integer qlo = ceil_div(in.Q / 2), qhi = floor_div(in.Q);
    if (qhi > Integer(1) << 20) throw std::invalid_argument("Q too large for desk enumeration");
    bs.primes = primes_in(qlo.get_ui(), qhi.get_ui());
    if (bs.primes.empty()) throw Refusal("no primes in [Q/2, Q] for Q = " + in.Q.get_str());

    std::vector<Integer> Mi(M.begin(), M.end());
    for (auto& v : Mi) v = Integer(v);
    Form g = specialized_symbol(pk, Mi, in.rl);
    bs.per_prime.resize(bs.primes.size());
    bs.slab_factor = std::pow(c.c1, static_cast<double>(bs.r - 1));
    parallel_for(bs.primes.size(), opt.threads, [&](std::size_t i) {
        std::uint64_t q = bs.primes[i];
        FieldPoly gq = reduce_mod(g, q);
        FieldPoly lead = gq.is_zero() ? gq : leading_form(gq);
        if (gq.is_zero() || static_cast<long>(gq.degree()) != in.plan.k || gq.degree() % q == 0 ||
            !detail::nonsingular_unchecked(lead))
            throw Refusal("specialized polynomial is not Deligne modulo " + std::to_string(q));
        SumTable t = cached_scan(gq, opt.cache, ScanOptions{1});
        GoodPairOptions gopt;
        gopt.enforce_density = opt.enforce_density;
        PrimeBoxes& pb = bs.per_prime[i];
        pb.q = q;
        pb.good = good_pairs(t, gopt);
        double qd = static_cast<double>(q);
        pb.half_width_a = c.c4 / qd;
        pb.half_width_b = c.c5 * std::pow(qd, -1 - 1.0 / bs.m);
        pb.box_measure = 2 * pb.half_width_a * std::pow(2 * pb.half_width_b, static_cast<double>(bs.m)) * bs.slab_factor;
    });
    for (const auto& pb : bs.per_prime) {
        bs.box_count += pb.good.count;
        bs.sum_measure += pb.good.count * pb.box_measure;
    }

    BoxList boxes = detail::projected_boxes(bs);
    bs.overlapping_pairs = BoxGrid(boxes).overlapping_pairs();
    long double proj_union;
    if (bs.overlapping_pairs == 0) {
        // Pairwise disjoint: the union is the sum, with no rounding in between.
        proj_union = bs.sum_measure / bs.slab_factor;
    } else if (bs.m + 1 <= 3) {
        proj_union = union_measure(boxes);
    } else {
        auto mc = monte_carlo_union(boxes, 2 * M_PIl, opt.mc_samples, opt.seed);
        proj_union = mc.measure;
        bs.union_stderr = static_cast<double>(mc.stderr_) * bs.slab_factor;
        bs.exact = false;
    }
    bs.union_measure = std::min(static_cast<double>(proj_union) * bs.slab_factor, bs.sum_measure);

    // Pre-image: y_1 = -A1 x_1 with x_1 in (-c1, -c1/2], y_j = L x_j with x_j in [-c1, c1], slab coordinates
    // y_j = x_j in [0, c1].
    TWindow w = t_window(in, pk, M, c, 0);
    long double L = to_double(in.L);
    std::vector<long double> lo(bs.m + 1), hi(bs.m + 1);
    lo[0] = w.A1 * c.c1 / 2;
    hi[0] = w.A1 * c.c1;
    for (std::size_t j = 1; j <= bs.m; ++j) {
        lo[j] = -L * c.c1;
        hi[j] = L * c.c1;
    }
    bs.periods_y1 = static_cast<double>((hi[0] - lo[0]) / (2 * M_PIl));
    bs.periods_y = static_cast<double>((hi[1] - lo[1]) / (2 * M_PIl));
    bs.jacobian = static_cast<double>(w.A1 * std::pow(L, static_cast<long double>(bs.m)));
    bs.x_region_measure = c.c1 / 2 * std::pow(2 * c.c1, static_cast<double>(bs.n - 1));
    if (bs.exact && w.A1 > 0) {
        long double pre = detail::periodic_preimage(boxes, proj_union, lo, hi);
        bs.omega_star_measure = static_cast<double>(pre / (w.A1 * std::pow(L, static_cast<long double>(bs.m)))) * bs.slab_factor;
    } else {
        // Density of the projected union times the x-region in the rescaled coordinates.
        long double dens = proj_union / std::pow(2 * M_PIl, static_cast<long double>(bs.m + 1));
        bs.omega_star_measure = static_cast<double>(dens) * c.c1 / 2 * std::pow(2 * c.c1, static_cast<double>(bs.m)) * bs.slab_factor;
    }
    return bs;
}

// ---------------------------------------------------------------- lower-bound chain

struct ChainPoint {
    std::uint64_t q = 0, a = 0;
    std::vector<std::uint64_t> b;
    double dy1 = 0;          // y_1 - 2 pi a / q, |dy1| <= c4 / q
    std::vector<double> dy;  // y_j - 2 pi b_j / q, |dy_j| <= c5 q^(-1-1/(n-r))
};

struct ChainReport {
    ChainPoint point;
    DecompositionReport dec;
    TWindow window;
    double s = 0;
    long double tau = 0, t = 0;
    std::vector<long double> x;
    std::vector<RationalAngle> y;  // (y_1, y_{r+1}, ..., y_n)
    double V = 0;
    double S_abs = 0, main = 0, E2 = 0, budget = 0;
    double threshold = 0;   // (1/2) floor(R/(Lq))^(n-r) q^((n-r)/2)
    double main_floor = 0;  // 2^(-(n-r)-1) (R/(L Q^(1/2)))^(n-r)
    std::optional<double> sup_partial;  // sup_u |S(u; w, t)|
    double E1_estimate = 0;             // c3 sup_u |S(u)|, unit implied constant
    double pointwise_lower = 0;         // (1-c0)^n |S| - E1_estimate
    bool certified = false, e2_half_main = false, e2_within_budget = false, main_above_floor = false;
};

namespace detail {

// All partial sums S(u) for integer u in (rl, 2 rl]^m at a box point, via m-dimensional prefix sums.
inline std::optional<double> sup_partial_sums(const Form& g, const Integer& rl, std::uint64_t q, std::uint64_t a,
                                              const std::vector<std::uint64_t>& b, const std::vector<double>& dy,
                                              std::uint64_t cap = std::uint64_t(1) << 24) {
    std::size_t m = b.size();
    std::uint64_t N = rl.get_ui(), total = 1;
    for (std::size_t j = 0; j < m; ++j) {
        if (total > cap / N) return std::nullopt;
        total *= N;
    }
    IntPolyEvaluator ev(g);
    RootTable roots(q);
    std::vector<std::complex<long double>> val(total);
    std::vector<std::int64_t> x(m, static_cast<std::int64_t>(N));
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t rest = idx;
        for (std::size_t j = m; j-- > 0;) {
            x[j] = static_cast<std::int64_t>(N + rest % N);
            rest /= N;
        }
        std::uint64_t ph = mulmod(a, mod_i128(ev(x), q), q);
        long double drift = 0;
        for (std::size_t j = 0; j < m; ++j) {
            ph = (ph + mulmod(b[j], static_cast<std::uint64_t>(x[j]) % q, q)) % q;
            drift += static_cast<long double>(dy[j]) * x[j];
        }
        auto z = roots[ph];
        val[idx] = std::complex<long double>(z.real(), z.imag()) * std::polar(1.0L, drift);
    }
    std::uint64_t stride = 1;
    for (std::size_t j = m; j-- > 0;) {
        for (std::uint64_t idx = 0; idx < total; ++idx)
            if ((idx / stride) % N != 0) val[idx] += val[idx - stride];
        stride *= N;
    }
    long double best = 0;
    for (const auto& v : val) best = std::max(best, std::abs(v));
    return static_cast<double>(best);
}

}  // namespace detail

inline ChainReport lower_bound_chain(const Instance& in, const Form& pk, const std::vector<long>& M,
                                     const ChainPoint& p, const Constants& c) {
    c.validate();
    check_symbol(in, pk, M);
    std::size_t n = static_cast<std::size_t>(in.plan.n), r = static_cast<std::size_t>(in.plan.r), m = n - r;
    if (!is_prime(p.q)) throw std::invalid_argument("q must be prime");
    if (Rational(static_cast<unsigned long>(p.q)) * 2 < in.Q || Rational(static_cast<unsigned long>(p.q)) > in.Q)
        throw std::invalid_argument("q must lie in [Q/2, Q]");
    if (p.a < 1 || p.a >= p.q) throw std::invalid_argument("need 1 <= a < q");
    if (p.b.size() != m || p.dy.size() != m) throw std::invalid_argument("b and dy need n - r entries");
    double qd = static_cast<double>(p.q);
    ChainReport rep;
    rep.point = p;
    rep.V = c.c5 * std::pow(qd, -1 - 1.0 / m);
    if (std::fabs(p.dy1) > c.c4 / qd * (1 + 1e-12)) throw std::invalid_argument("y_1 is outside the box");
    for (double d : p.dy)
        if (std::fabs(d) > rep.V * (1 + 1e-12)) throw std::invalid_argument("y_j is outside the box");

    rep.s = -p.dy1;
    rep.window = t_window(in, pk, M, c, std::fabs(rep.s));
    if (auto v = rep.window.violated()) throw TWindowEmpty("t-window empty: violates " + *v);

    // Lift y to the x-region and read off t = (Y_1 + s) / L^k.
    const long double two_pi = 2 * M_PIl;
    long double Lk = to_double(rpow(in.L, in.plan.k)), L = to_double(in.L);
    long double y1 = two_pi * p.a / qd + p.dy1;
    long double lo1 = rep.window.A1 * c.c1 / 2;
    long double Y1 = y1 + two_pi * std::ceil((lo1 - y1) / two_pi);
    rep.x.assign(n, c.c1 / 2);
    rep.x[0] = -Y1 / rep.window.A1;
    rep.tau = rep.s / Lk;
    rep.t = (Y1 + rep.s) / Lk;
    for (std::size_t j = 0; j < m; ++j) {
        long double yj = two_pi * p.b[j] / qd + p.dy[j];
        rep.x[r + j] = (yj - two_pi * std::nearbyint(yj / two_pi)) / L;
    }

    rep.y.push_back(RationalAngle{make_rational(static_cast<long>(p.a), static_cast<long>(p.q)), p.dy1});
    for (std::size_t j = 0; j < m; ++j)
        rep.y.push_back(RationalAngle{make_rational(static_cast<long>(p.b[j]), static_cast<long>(p.q)), p.dy[j]});
    RealSumSpec spec;
    spec.pk = pk;
    for (long v : M) spec.M.push_back(Integer(v));
    spec.rl = in.rl;
    spec.u.assign(m, Rational(2 * in.rl));
    spec.y = rep.y;
    spec.s = rep.s;
    rep.dec = decompose_sum(spec, p.q, p.a, p.b, rep.V);

    rep.S_abs = std::abs(rep.dec.S);
    rep.main = rep.dec.main;
    rep.E2 = rep.dec.measured_error;
    rep.budget = rep.dec.budget;
    double fl = Integer(in.rl / static_cast<unsigned long>(p.q)).get_d();
    rep.threshold = 0.5 * std::pow(fl, static_cast<double>(m)) * std::pow(qd, m / 2.0);
    rep.main_floor = std::pow(2.0, -static_cast<double>(m) - 1) *
                     std::pow(in.rl.get_d() / std::sqrt(to_double(in.Q)), static_cast<double>(m));
    rep.certified = rep.S_abs >= rep.threshold * (1 - 1e-12);
    rep.e2_half_main = rep.E2 <= rep.main / 2;
    rep.e2_within_budget = rep.E2 <= rep.budget;
    rep.main_above_floor = rep.main >= rep.main_floor * (1 - 1e-12);

    Form g = specialized_symbol(pk, spec.M, in.rl);
    rep.sup_partial = detail::sup_partial_sums(g, in.rl, p.q, p.a, p.b, p.dy);
    double sup = rep.sup_partial.value_or(std::numeric_limits<double>::quiet_NaN());
    rep.E1_estimate = c.c3 * sup;
    rep.pointwise_lower = std::pow(1 - c.c0, static_cast<double>(n)) * rep.S_abs - rep.E1_estimate;
    return rep;
}

struct ChainScanReport {
    std::size_t points = 0, certified = 0, e2_half_main = 0, e2_within_budget = 0, main_above_floor = 0;
    std::size_t positive_lower = 0;  // (1-c0)^n |S| - c3 sup |S(u)| > 0
    double min_certificate_ratio = std::numeric_limits<double>::infinity();  // |S| / threshold
    double max_e2_over_main = 0;
    std::vector<ChainReport> failures;  // certification failures, capped
};

// Every good pair at the box center and at the 2^(m+1) corners (dy1 = +-c4/q, dy_j = +-V).
inline ChainScanReport scan_chain(const Instance& in, const Form& pk, const std::vector<long>& M, const Constants& c,
                                  const BoxSet& bs, unsigned threads = 1, std::size_t keep_failures = 16) {
    struct Task {
        std::uint64_t q, a;
        const std::vector<std::uint64_t>* b;
    };
    std::vector<Task> tasks;
    for (const auto& pb : bs.per_prime)
        for (const auto& [a, b] : pb.good.pairs) tasks.push_back({pb.q, a, &b});
    std::size_t m = bs.m;
    std::vector<ChainScanReport> parts(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t i) {
        const Task& t = tasks[i];
        double qd = static_cast<double>(t.q), V = c.c5 * std::pow(qd, -1 - 1.0 / m);
        ChainScanReport& out = parts[i];
        for (std::size_t corner = 0; corner <= (std::size_t(1) << (m + 1)); ++corner) {
            ChainPoint p{t.q, t.a, *t.b, 0.0, std::vector<double>(m, 0.0)};
            if (corner > 0) {
                std::size_t bits = corner - 1;
                p.dy1 = (bits & 1 ? 1 : -1) * c.c4 / qd;
                for (std::size_t j = 0; j < m; ++j) p.dy[j] = (bits >> (j + 1) & 1 ? 1 : -1) * V;
            }
            ChainReport rep = lower_bound_chain(in, pk, M, p, c);
            ++out.points;
            out.certified += rep.certified;
            out.e2_half_main += rep.e2_half_main;
            out.e2_within_budget += rep.e2_within_budget;
            out.main_above_floor += rep.main_above_floor;
            out.positive_lower += rep.pointwise_lower > 0;
            out.min_certificate_ratio = std::min(out.min_certificate_ratio, rep.S_abs / rep.threshold);
            out.max_e2_over_main = std::max(out.max_e2_over_main, rep.E2 / rep.main);
            if (!rep.certified) out.failures.push_back(std::move(rep));
        }
    });
    ChainScanReport total;
    for (auto& p : parts) {
        total.points += p.points;
        total.certified += p.certified;
        total.e2_half_main += p.e2_half_main;
        total.e2_within_budget += p.e2_within_budget;
        total.main_above_floor += p.main_above_floor;
        total.positive_lower += p.positive_lower;
        total.min_certificate_ratio = std::min(total.min_certificate_ratio, p.min_certificate_ratio);
        total.max_e2_over_main = std::max(total.max_e2_over_main, p.max_e2_over_main);
        for (auto& f : p.failures)
            if (total.failures.size() < keep_failures) total.failures.push_back(std::move(f));
    }
    return total;
}

// ---------------------------------------------------------------- operator evaluation

struct QuadratureNonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OperatorOptions {
    unsigned min_log2_nodes = 3;
    unsigned max_log2_nodes = 7;
    double rel_tol = 1e-6;
    std::complex<double> amplitude = 1;  // evaluate for amplitude * f
};

struct OperatorValue {
    ComplexValue S;          // S(2R/L; w, t)
    std::complex<double> integral;  // (2 pi)^-n int Phi-hat e(linear + nonlinear phase)
    double value = 0;        // |S| |integral|
    double phi_limit = 0;    // Phi_n((S1, 1, ..., 1) o [x + t grad P_k(M o R, R~)])
    std::size_t nodes = 0;   // per axis at convergence
    double last_change = 0;  // relative change between the last two orders
};

namespace detail {

inline std::complex<double> operator_integral(const Instance& in, const Form& pk, const std::vector<long>& M,
                                              const std::vector<long double>& x, long double t,
                                              const OperatorOptions& opt, OperatorValue& out) {
    std::size_t n = static_cast<std::size_t>(in.plan.n);
    auto u = anchor_point(in, M);
    Form shifted = taylor_shift(pk, u);
    std::vector<long double> z(n, 0);
    struct Term {
        std::vector<std::uint32_t> e;
        long double coef;
    };
    std::vector<Term> nonlinear;
    for (const auto& [e, cf] : shifted.terms()) {
        if (e.degree() == 1) {
            for (std::size_t i = 0; i < n; ++i)
                if (e[i]) z[i] = static_cast<long double>(to_double(cf)) * t;
        } else if (e.degree() >= 2) {
            nonlinear.push_back({e.e, static_cast<long double>(to_double(cf)) * t});
        }
    }
    for (std::size_t i = 0; i < n; ++i) z[i] += x[i];
    const PhiProfile& phi = PhiProfile::standard();
    long double S1 = to_double(in.S1);
    out.phi_limit = phi.phi(static_cast<double>(S1 * z[0]));
    for (std::size_t i = 1; i < n; ++i) out.phi_limit *= phi.phi(static_cast<double>(z[i]));

    std::complex<double> prev;
    for (unsigned lg = opt.min_log2_nodes; lg <= opt.max_log2_nodes; ++lg) {
        std::size_t N = std::size_t(1) << lg;
        const auto& [nodes, weights] = gauss_legendre(N);
        std::vector<double> wphi(N);
        for (std::size_t i = 0; i < N; ++i) wphi[i] = weights[i] * phi.phi_hat(nodes[i]);
        std::vector<std::size_t> idx(n, 0);
        std::vector<long double> zeta(n);
        long double re = 0, im = 0;
        for (;;) {
            long double w = 1;
            for (std::size_t i = 0; i < n; ++i) w *= wphi[idx[i]];
            if (w != 0) {
                for (std::size_t i = 0; i < n; ++i) zeta[i] = nodes[idx[i]];
                zeta[0] *= S1;
                long double ph = 0;
                for (std::size_t i = 0; i < n; ++i) ph += z[i] * zeta[i];
                for (const auto& term : nonlinear) {
                    long double v = term.coef;
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::uint32_t k = 0; k < term.e[i]; ++k) v *= zeta[i];
                    ph += v;
                }
                re += w * std::cos(ph);
                im += w * std::sin(ph);
            }
            std::size_t i = 0;
            while (i < n && ++idx[i] == N) idx[i++] = 0;
            if (i == n) break;
        }
        long double norm = std::pow(2 * M_PIl, static_cast<long double>(n));
        std::complex<double> cur(static_cast<double>(re / norm), static_cast<double>(im / norm));
        if (lg > opt.min_log2_nodes) {
            double change = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
            out.last_change = change;
            if (change < opt.rel_tol || std::abs(cur - prev) < 1e-15) {
                out.nodes = N;
                return cur;
            }
        }
        prev = cur;
    }
    throw QuadratureNonConvergence("quadrature did not converge at 2^" + std::to_string(opt.max_log2_nodes) +
                                   " nodes per axis");
}

inline OperatorValue evaluate_operator_core(const Instance& in, const Form& pk, const std::vector<long>& M,
                                            const std::vector<long double>& x, long double t,
                                            const std::vector<RationalAngle>& y, double s, const OperatorOptions& opt) {
    OperatorValue out;
    out.integral = operator_integral(in, pk, M, x, t, opt, out);
    RealSumSpec spec;
    spec.pk = pk;
    for (long v : M) spec.M.push_back(Integer(v));
    spec.rl = in.rl;
    spec.u.assign(static_cast<std::size_t>(in.plan.m()), Rational(2 * in.rl));
    spec.y = y;
    spec.s = s;
    out.S = real_sum(spec) * opt.amplitude;
    out.value = std::abs(out.S) * std::abs(out.integral);
    return out;
}

}  // namespace detail

// Main term of T_t f(x) after partial summation: S(2R/L; w, t) times the xi, eta integral with the
// nonlinear part of the Taylor expansion at (M o R, R~) kept. The factor e((M o R) . v) is dropped.
// y-coordinates are formed in long double from (x, t); use the ChainReport overload at large R.
inline OperatorValue evaluate_operator(const Instance& in, const Form& pk, const std::vector<long>& M,
                                       const std::vector<long double>& x, long double t,
                                       const OperatorOptions& opt = {}) {
    check_symbol(in, pk, M);
    if (x.size() != static_cast<std::size_t>(in.plan.n)) throw std::invalid_argument("x has wrong dimension");
    std::size_t r = static_cast<std::size_t>(in.plan.r);
    const long double two_pi = 2 * M_PIl;
    auto reduce = [&](long double v) { return static_cast<double>(v - two_pi * std::nearbyint(v / two_pi)); };
    long double Lk = to_double(rpow(in.L, in.plan.k)), L = to_double(in.L);
    std::vector<RationalAngle> y{RationalAngle{Rational(0), reduce(Lk * t)}};
    for (std::size_t j = r; j < x.size(); ++j) y.push_back(RationalAngle{Rational(0), reduce(L * x[j])});
    return detail::evaluate_operator_core(in, pk, M, x, t, y, 0, opt);
}

inline OperatorValue evaluate_operator(const Instance& in, const Form& pk, const std::vector<long>& M,
                                       const ChainReport& at, const OperatorOptions& opt = {}) {
    check_symbol(in, pk, M);
    return detail::evaluate_operator_core(in, pk, M, at.x, at.t, at.y, at.s, opt);
}

// ---------------------------------------------------------------- growth experiment

struct GrowthRow {
    long j = 0;
    bool feasible = false;
    std::string reason;
    double log2R = 0, log2L = 0, log2Q = 0;
    std::size_t primes = 0, boxes = 0;
    double omega_measure = 0, omega_star_measure = 0, union_times_logQ = 0;
    double pointwise_lower = 0;  // (1/2)(1-c0)^n 2^(-(n-r)-1) (R/(L Q^(1/2)))^(n-r)
    double lower_bound = 0;      // |Omega*| pointwise_lower
    double f_norm_lower = 0, f_norm_upper = 0;
    double log_ratio = 0;        // ln(lower_bound / (R^s ||f||_upper))
    double ratio = 0;
    std::optional<std::string> t_window_issue;
};

struct GrowthReport {
    ParamPlan plan;
    double s = 0;
    std::vector<GrowthRow> rows;
    double analytic_exponent = 0;  // sigma/2 + m/2 - (kappa+lambda) m/2 - s
    double fitted_slope = 0;       // least squares of ln ratio against ln R
    double fitted_slope_log_corrected = 0;  // same for ratio * ln Q
    bool increasing = false, nonincreasing = false;
    std::size_t feasible_rows = 0;
};

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

inline GrowthReport growth_experiment(const ParamPlan& plan, const Form& pk, const std::vector<long>& M,
                                      const std::vector<long>& js, double s, const Constants& c,
                                      const BoxSetOptions& opt = {}) {
    GrowthReport rep;
    rep.plan = plan;
    rep.s = s;
    rep.analytic_exponent = plan.exponent_bound().get_d() - s;
    long n = plan.n, m = plan.m();
    std::vector<double> lx, ly, lyc;
    for (long j : js) {
        GrowthRow row;
        row.j = j;
        try {
            Instance in = feasible_instance(plan, j);
            row.log2R = log2q(in.R);
            row.log2L = log2q(in.L);
            row.log2Q = log2q(in.Q);
            BoxSet bs = build_boxes(in, pk, M, c, opt);
            TestFunction tf = make_test_function(in, M);
            auto pmin = bs.primes.front();
            if (auto v = t_window(in, pk, M, c, c.c4 / static_cast<double>(pmin)).violated()) row.t_window_issue = *v;
            row.primes = bs.primes.size();
            row.boxes = bs.box_count;
            row.omega_measure = bs.union_measure;
            row.omega_star_measure = bs.omega_star_measure;
            row.union_times_logQ = bs.union_times_logQ();
            double lnR = row.log2R * M_LN2, lnL = row.log2L * M_LN2, lnQ = row.log2Q * M_LN2;
            double ln_point = std::log(0.5) + n * std::log(1 - c.c0) - (m + 1) * M_LN2 + m * (lnR - lnL - 0.5 * lnQ);
            row.pointwise_lower = std::exp(ln_point);
            row.lower_bound = bs.omega_star_measure * row.pointwise_lower;
            row.f_norm_lower = tf.norm_lower;
            row.f_norm_upper = tf.norm_upper;
            row.log_ratio = std::log(bs.omega_star_measure) + ln_point - s * lnR - tf.log_norm_upper;
            row.ratio = std::exp(row.log_ratio);
            row.feasible = true;
            lx.push_back(lnR);
            ly.push_back(row.log_ratio);
            lyc.push_back(row.log_ratio + std::log(lnQ));
        } catch (const Refusal& e) {
            row.reason = e.what();
        }
        rep.rows.push_back(row);
    }
    rep.feasible_rows = lx.size();
    rep.fitted_slope = least_squares_slope(lx, ly);
    rep.fitted_slope_log_corrected = least_squares_slope(lx, lyc);
    rep.increasing = rep.nonincreasing = lx.size() >= 2;
    for (std::size_t i = 1; i < ly.size(); ++i) {
        if (!(ly[i] > ly[i - 1])) rep.increasing = false;
        if (ly[i] > ly[i - 1]) rep.nonincreasing = false;
    }
    return rep;
}

}  // namespace dworklab
