// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status counts criteria whose outcome differs from the expectation; without
// --known-failures every criterion is expected to pass.

#include "support.hpp"

#include <dworklab/center.hpp>
#include <dworklab/counterexample.hpp>
#include <dworklab/expsum.hpp>
#include <dworklab/form_analysis.hpp>
#include <dworklab/groebner.hpp>
#include <dworklab/projective.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace dworklab;

namespace {

constexpr double kParsevalRel = 1e-6;
constexpr double kWeilSlack = 1e-9;
constexpr double kDftAbs = 1e-9;
constexpr double kOmegaConstant = 2e-3;
constexpr double kSlopeTol = 0.02;
constexpr double kLimit1 = 10, kLimit2 = 120, kLimit4 = 300, kLimit7 = 60;
// Desk constant for the counterexample criteria: the default c5 = 1/2 leaves no t-window at R/L <= 1024.
constexpr double kDeskC5 = 0.2;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611);
    return g;
}

// ---------------------------------------------------------------- 1

Outcome parseval() {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::size_t tables = 0;
    for (int i = 0; i < 20; ++i) {
        std::size_t m = 1 + i % 2;
        Form f = testsupport::random_form(rng(), m, 4, 3 + i % 4);
        for (std::uint64_t q : {5, 7, 11, 13, 17}) {
            auto c = check_table(scan_all_pairs(reduce_mod(f, q)));
            worst = std::max(worst, c.parseval_relative_error);
            ++tables;
        }
    }
    double t = seconds_since(t0);
    return {worst <= kParsevalRel && t < kLimit1,
            fmt("%zu tables, max relative error %.2e (tol %.0e), %.2f s (limit %.0f s)", tables, worst, kParsevalRel, t,
                kLimit1)};
}

// ---------------------------------------------------------------- 2, 3

struct CorpusEntry {
    std::size_t n, r;
    unsigned k;
    std::uint64_t q;
    std::uint64_t K1;
    SumTable table;
};

std::vector<CorpusEntry>& weil_corpus(double* seconds = nullptr) {
    static std::vector<CorpusEntry> corpus;
    static double elapsed = 0;
    if (corpus.empty()) {
        auto t0 = std::chrono::steady_clock::now();
        for (auto [n, r] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 2}, {4, 3}, {4, 2}})
            for (unsigned k : {3u, 4u}) {
                Form pk = generate_example(n, k, r);
                auto bp = bad_primes(pk, 61);
                std::uint64_t K1 = bp.largest_bad.value_or(0);
                for (auto q : bp.good) {
                    if (q < 11) continue;
                    FieldPoly h = reduce_mod(pk, q);
                    std::vector<FieldElem> c(r, h.field().one());
                    auto d = deligne_after_specialization(h, c, false);
                    if (!d.deligne) continue;
                    corpus.push_back({n, r, k, q, K1, scan_all_pairs(d.specialized, {default_threads()})});
                }
            }
        elapsed = seconds_since(t0);
    }
    if (seconds) *seconds = elapsed;
    return corpus;
}

Outcome weil() {
    double t = 0;
    auto& corpus = weil_corpus(&t);
    double worst = 0;
    bool ok = !corpus.empty();
    for (const auto& e : corpus) {
        auto w = certify_weil(e.table);
        worst = std::max(worst, w.max_ratio);
        ok = ok && w.max_ratio <= 1 + kWeilSlack;
    }
    return {ok && t < kLimit2, fmt("%zu (form, q) instances, max |T|/((k-1)^m q^(m/2)) = %.6f, %.2f s (limit %.0f s)",
                                   corpus.size(), worst, t, kLimit2)};
}

Outcome density() {
    auto& corpus = weil_corpus();
    std::size_t tested = 0, failed = 0;
    double min_ratio = 1e300;
    for (const auto& e : corpus) {
        GoodPairOptions opt;
        opt.enforce_density = false;
        auto g = good_pairs(e.table, opt);
        std::uint64_t floor_q = std::max<std::uint64_t>({e.k, e.K1, density_threshold_K2(e.k, e.table.m)});
        if (e.q <= floor_q) continue;
        ++tested;
        if (Integer(static_cast<unsigned long>(g.count)) < g.required) ++failed;
        min_ratio = std::min(min_ratio, static_cast<double>(g.count) / g.required.get_d());
    }
    return {tested > 0 && failed == 0,
            fmt("%zu instances above max{k, K1, K2}, %zu below alpha2 q^(m+1); min count/required %.2f", tested, failed,
                min_ratio)};
}

// ---------------------------------------------------------------- 4

Form adjacent_counterexample(std::size_t n, unsigned k) {
    Form f(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        ExponentVec e(n);
        e[i] = k;
        f.add_term(e, Rational(1));
    }
    ExponentVec e(n);
    e[n - 2] = 1;
    e[n - 1] = k - 1;
    f.add_term(e, Rational(1));
    return f;
}

Outcome dwork() {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t regular = 0, total = 0, flagged = 0, total_bad = 0;
    for (std::size_t n = 2; n <= 4; ++n)
        for (unsigned k = 3; k <= 5; ++k) {
            for (std::size_t r = 2; r <= n; ++r) {
                ++total;
                if (is_dwork_regular(generate_example(n, k, r), default_threads()).dwork_regular) ++regular;
            }
            ++total_bad;
            auto v = is_dwork_regular(adjacent_counterexample(n, k), default_threads());
            if (!v.dwork_regular && v.failing_subset == std::vector<std::size_t>{n}) ++flagged;
        }
    double t = seconds_since(t0);
    return {regular == total && flagged == total_bad && t < kLimit4,
            fmt("example family %zu/%zu regular, adjacent forms %zu/%zu fail at {n}, %.2f s (limit %.0f s)", regular,
                total, flagged, total_bad, t, kLimit4)};
}

// ---------------------------------------------------------------- 5

Outcome center() {
    auto z = compute_center(generate_example(2, 3, 2));
    bool family = z.dimension() == 2;
    // Every [[a - 9b, b], [3b, a]] is central and the basis spans exactly that family.
    for (long a = -2; a <= 2 && family; ++a)
        for (long b = -2; b <= 2 && family; ++b) {
            RationalMatrix m{{Rational(a - 9 * b), Rational(b)}, {Rational(3 * b), Rational(a)}};
            family = in_center(m, hessian(generate_example(2, 3, 2)));
        }
    for (const auto& m : z.basis) family = family && m(0, 0) - m(1, 1) == -9 * m(0, 1) && m(1, 0) == 3 * m(0, 1);
    auto d = decide_decomposability(generate_example(2, 3, 2));
    bool indec = d.verdict == Decomposability::indecomposable_over_Q;
    auto q5 = compute_center(generate_example(3, 5, 2));
    return {family && indec && q5.dimension() == 1,
            fmt("P3 center dim %zu with the [[a-9b,b],[3b,a]] family: %s, verdict %s; (3,5,2) center dim %zu",
                z.dimension(), family ? "yes" : "no", to_string(d.verdict).c_str(), q5.dimension())};
}

// ---------------------------------------------------------------- 6

Outcome parameters() {
    std::size_t triples = 0, bad = 0;
    for (long n = 2; n <= 5; ++n)
        for (long k = 2; k <= 5; ++k)
            for (long r = 1; r < n; ++r) {
                ++triples;
                auto p = solve_parameters(n, k, r);
                long m = n - r;
                Rational D((k - 1) * (m + 1) + 1);
                bool ok = p.sigma == make_rational(1, 2) && p.kappa == Rational(m) / (2 * D) &&
                          p.lambda == 1 - Rational(m + 1) / (2 * D) && p.delta == delta_threshold(n, k, r) &&
                          p.s_threshold == make_rational(1, 4) + p.delta && p.consistent();
                if (r == 1) ok = ok && p.delta == make_rational(n - 1, 4 * ((k - 1) * n + 1));
                for (std::size_t i = 0; i < p.relations.size(); ++i) {
                    const auto& rel = p.relations[i];
                    // the three constraints are tight; strict bounds are not; sigma <= 1/2 is tight at sigma = 1/2
                    bool strict = rel.sense == ">" || rel.sense == "<";
                    bool tight = i < 3 || rel.sense == "=" || rel.name == "sigma <= 1/2";
                    ok = ok && rel.holds && rel.equality == (rel.lhs == rel.rhs) && (!strict || !rel.equality) &&
                         (!tight || rel.equality);
                }
                if (!ok) ++bad;
            }
    return {triples >= 20 && bad == 0, fmt("%zu triples, %zu mismatches", triples, bad)};
}

// ---------------------------------------------------------------- 7

Outcome chain() {
    auto t0 = std::chrono::steady_clock::now();
    auto plan = solve_parameters(3, 3, 2);
    Form pk = generate_example(3, 3, 2);
    auto M = find_derivative_witness(pk, 2).m;
    Constants c;
    c.c5 = kDeskC5;
    std::size_t points = 0, certified = 0, half = 0;
    double min_cert = 1e300, max_e2 = 0;
    std::ostringstream per;
    for (auto [rl, Q] : std::vector<std::pair<long, long>>{{256, 16}, {512, 23}, {1024, 32}}) {
        Instance in = desk_instance(plan, pk, M, Integer(rl), Rational(Q), c);
        BoxSetOptions bo;
        bo.threads = default_threads();
        BoxSet bs = build_boxes(in, pk, M, c, bo);
        auto sc = scan_chain(in, pk, M, c, bs, default_threads());
        points += sc.points;
        certified += sc.certified;
        half += sc.e2_half_main;
        min_cert = std::min(min_cert, sc.min_certificate_ratio);
        max_e2 = std::max(max_e2, sc.max_e2_over_main);
        per << fmt(" [R/L=%ld q in {", rl);
        for (std::size_t i = 0; i < bs.primes.size(); ++i) per << (i ? "," : "") << bs.primes[i];
        per << fmt("}: %zu/%zu]", sc.certified, sc.points);
    }
    double t = seconds_since(t0);
    return {certified == points && half == points && t < kLimit7,
            fmt("certified %zu/%zu points, min |S|/threshold %.4f, E2 <= main/2 at %zu/%zu (max E2/main %.3f), %.2f s "
                "(limit %.0f s);",
                certified, points, min_cert, half, points, max_e2, t, kLimit7) +
                per.str()};
}

// ---------------------------------------------------------------- 8

Outcome omega() {
    auto plan = solve_parameters(3, 3, 2);
    Form pk = generate_example(3, 3, 2);
    auto M = find_derivative_witness(pk, 2).m;
    Constants c;
    bool ok = true;
    std::ostringstream out;
    for (long j : {40, 50, 60}) {
        Instance in = feasible_instance(plan, j);
        BoxSetOptions bo;
        bo.threads = default_threads();
        BoxSet bs = build_boxes(in, pk, M, c, bo);
        double v = bs.union_times_logQ();
        ok = ok && bs.exact && bs.union_measure <= bs.sum_measure && v > kOmegaConstant;
        out << fmt("Q=%s: union %.4e <= sum %.4e, union*lnQ %.4e; ", bs.Q.get_str().c_str(), bs.union_measure,
                   bs.sum_measure, v);
    }
    out << fmt("constant %.0e", kOmegaConstant);
    return {ok, out.str()};
}

// ---------------------------------------------------------------- 9

Outcome growth() {
    auto plan = solve_parameters(3, 3, 2);
    Form pk = generate_example(3, 3, 2);
    auto M = find_derivative_witness(pk, 2).m;
    Constants c;
    c.c5 = kDeskC5;
    BoxSetOptions bo;
    bo.threads = default_threads();
    std::vector<long> js{40, 50, 60, 70, 80};
    double s_star = plan.s_threshold.get_d();
    auto below = growth_experiment(plan, pk, M, js, s_star - 0.05, c, bo);
    auto above = growth_experiment(plan, pk, M, js, s_star + 0.05, c, bo);
    auto row = [&](const GrowthReport& g) {
        std::string s;
        for (const auto& r : g.rows) s += r.feasible ? fmt(" %.3f", r.log_ratio) : std::string(" -");
        return s;
    };
    bool slopes = std::fabs(below.fitted_slope - below.analytic_exponent) <= kSlopeTol &&
                  std::fabs(above.fitted_slope - above.analytic_exponent) <= kSlopeTol;
    bool ok = below.feasible_rows >= 3 && above.feasible_rows >= 3 && below.increasing && above.nonincreasing && slopes;
    return {ok, fmt("s*-0.05: increasing %s, slope %.4f vs %.4f (lnQ-corrected %.4f), ln ratio%s; "
                    "s*+0.05: nonincreasing %s, slope %.4f vs %.4f (lnQ-corrected %.4f), ln ratio%s; tol %.2f",
                    below.increasing ? "yes" : "no", below.fitted_slope, below.analytic_exponent,
                    below.fitted_slope_log_corrected, row(below).c_str(), above.nonincreasing ? "yes" : "no",
                    above.fitted_slope, above.analytic_exponent, above.fitted_slope_log_corrected, row(above).c_str(),
                    kSlopeTol)};
}

// ---------------------------------------------------------------- 10

FieldPoly random_homogeneous_mod(std::size_t n, unsigned d, std::size_t terms, std::uint64_t q) {
    FieldPoly f(n, PrimeField(q));
    std::uniform_int_distribution<std::size_t> var(0, n - 1);
    std::uniform_int_distribution<long> c(1, static_cast<long>(q) - 1);
    for (std::size_t t = 0; t < terms; ++t) {
        ExponentVec e(n);
        for (unsigned k = 0; k < d; ++k) e[var(rng())] += 1;
        f.add_term(e, f.field().from_int(c(rng())));
    }
    return f;
}

Outcome oracles() {
    double worst = 0;
    std::size_t tables = 0;
    for (std::size_t m : {1u, 2u})
        for (std::uint64_t q : {5, 7, 11, 13}) {
            Form f = testsupport::random_form(rng(), m, 4, 4);
            FieldPoly fq = reduce_mod(f, q);
            auto a = scan_all_pairs(fq), b = naive_table(fq);
            for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
            ++tables;
        }
    std::size_t ideals = 0, contradictions = 0, zeros = 0;
    while (ideals < 50) {
        std::uint64_t q = ideals % 2 ? 5 : 7;
        std::size_t n = 2 + ideals % 2;
        std::vector<FieldPoly> gens;
        for (std::size_t i = 0; i < 1 + ideals % 3; ++i) {
            auto g = random_homogeneous_mod(n, 1 + (ideals + i) % 4, 2 + i, q);
            if (!g.is_zero()) gens.push_back(g);
        }
        if (gens.empty()) continue;
        ++ideals;
        bool zero = find_projective_zero(gens, 1) || find_projective_zero(gens, 2);
        zeros += zero;
        if (zero && is_irrelevant(gens)) ++contradictions;
    }
    return {worst <= kDftAbs && contradictions == 0,
            fmt("DFT vs naive on %zu tables: max |diff| %.2e (tol %.0e); %zu ideals, %zu with a point over F_q or F_q^2, "
                "%zu contradictions",
                tables, worst, kDftAbs, ideals, zeros, contradictions)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--known-failures") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) known.insert(std::stoi(tok));
        } else {
            std::cerr << "usage: acceptance [--known-failures 7,9]\n";
            return 2;
        }
    }
    progress_to_stderr() = false;
    std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, parseval}, {2, weil},   {3, density}, {4, dwork},  {5, center},
        {6, parameters}, {7, chain}, {8, omega},   {9, growth}, {10, oracles},
    };
    int unexpected = 0;
    for (auto& [id, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        bool expected_pass = !known.count(id);
        if (o.pass != expected_pass) ++unexpected;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << (expected_pass ? "" : " (known)")
                  << "  " << o.detail << std::endl;
    }
    std::cout << (unexpected ? "unexpected outcomes: " + std::to_string(unexpected) : std::string("all outcomes as expected"))
              << std::endl;
    return unexpected ? 1 : 0;
}
