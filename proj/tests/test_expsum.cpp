#include "support.hpp"

#include <dworklab/expsum.hpp>
#include <dworklab/form_analysis.hpp>
#include <dworklab/parser.hpp>
#include <dworklab/sum_cache.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace dworklab;

namespace {
FieldPoly FP(const std::string& s, std::uint64_t q, std::size_t n = 0) {
    return reduce_mod(n ? parse_form(s, n) : parse_form(s), q);
}

// Direct evaluation of every T(a, b; q) with std::polar; shares nothing with the library path.
std::vector<std::complex<long double>> brute_table(const Form& f, std::uint64_t q) {
    std::size_t m = f.nvars();
    std::uint64_t qm = 1;
    for (std::size_t i = 0; i < m; ++i) qm *= q;
    std::vector<std::complex<long double>> out(qm * q);
    const long double two_pi = 2.0L * std::acos(-1.0L);
    for (std::uint64_t idx = 0; idx < qm * q; ++idx) {
        std::uint64_t rest = idx;
        std::vector<long> b(m);
        for (std::size_t i = m; i-- > 0;) {
            b[i] = static_cast<long>(rest % q);
            rest /= q;
        }
        long a = static_cast<long>(rest);
        std::complex<long double> acc = 0;
        for (std::uint64_t xi = 0; xi < qm; ++xi) {
            std::uint64_t r = xi;
            std::vector<Rational> x(m);
            long lin = 0;
            for (std::size_t i = m; i-- > 0;) {
                x[i] = static_cast<long>(r % q);
                lin += b[i] * static_cast<long>(r % q);
                r /= q;
            }
            Rational v = evaluate(f, x) * a + lin;
            Integer num = v.get_num() % Integer(static_cast<unsigned long>(q));
            long ph = num.get_si();
            acc += std::polar(1.0L, two_pi * ph / q);
        }
        out[idx] = acc;
    }
    return out;
}

Form quadratic_corpus_form(std::mt19937_64& rng, std::size_t m, unsigned deg) {
    Form f(m);
    std::uniform_int_distribution<long> c(-9, 9);
    std::uniform_int_distribution<unsigned> e(0, deg);
    for (int t = 0; t < 4; ++t) {
        ExponentVec x(m);
        unsigned left = deg;
        for (std::size_t i = 0; i < m; ++i) {
            unsigned ei = std::min(e(rng), left);
            x[i] = ei;
            left -= ei;
        }
        f.add_term(x, c(rng));
    }
    ExponentVec top(m);
    top[0] = deg;
    f.add_term(top, 1);
    return f;
}
}  // namespace

TEST(CompleteSum, GaussSum) {
    auto t = complete_sum(FP("x1^2", 5), FieldElem(1, 5), {FieldElem(0, 5)});
    std::complex<long double> oracle = 0;
    for (int x = 0; x < 5; ++x) oracle += std::polar(1.0L, 2.0L * std::acos(-1.0L) * (x * x % 5) / 5);
    EXPECT_NEAR(std::abs(t), 2.2360680, 1e-7);
    EXPECT_NEAR(t.real(), static_cast<double>(oracle.real()), 1e-12);
    EXPECT_NEAR(t.imag(), static_cast<double>(oracle.imag()), 1e-12);
}

TEST(CompleteSum, CharacterOrthogonality) {
    FieldPoly f = FP("x1^3 + x1*x2^2 + x2^3", 7);
    EXPECT_NEAR(std::abs(complete_sum(f, FieldElem(0, 7), {FieldElem(2, 7), FieldElem(0, 7)})), 0, 1e-12);
    EXPECT_EQ(complete_sum(f, FieldElem(0, 7), {FieldElem(0, 7), FieldElem(0, 7)}), ComplexValue(49, 0));
    EXPECT_THROW(complete_sum(f, FieldElem(1, 7), {FieldElem(0, 7)}), std::invalid_argument);
    EXPECT_THROW(complete_sum(f, FieldElem(1, 5), {FieldElem(0, 7), FieldElem(0, 7)}), ModulusMismatch);
}

TEST(Scan, QuadraticTable) {
    auto t = scan_all_pairs(FP("x1^2", 5));
    ASSERT_EQ(t.values.size(), 25u);
    int at_bound = 0;
    for (std::uint64_t a = 1; a < 5; ++a)
        for (std::uint64_t b = 0; b < 5; ++b) {
            EXPECT_NEAR(std::abs(t.at(a, {b})), std::sqrt(5.0), 1e-12);
            ++at_bound;
        }
    EXPECT_EQ(at_bound, 20);
    auto c = check_table(t);
    EXPECT_NEAR(c.parseval_sum, 125, 1e-9);
    EXPECT_EQ(t.at(0, {0}), ComplexValue(5, 0));
}

TEST(Scan, CubicWeil) {
    auto t = scan_all_pairs(FP("x1^3", 7));
    for (std::uint64_t a = 1; a < 7; ++a)
        for (std::uint64_t b = 0; b < 7; ++b) EXPECT_LE(std::abs(t.at(a, {b})), 2 * std::sqrt(7.0) * (1 + 1e-9));
    EXPECT_TRUE(certify_weil(t).certified);
}

TEST(Scan, MemoryCap) {
    ScanOptions opt;
    opt.memory_cap_bytes = 1000;
    EXPECT_THROW(scan_all_pairs(FP("x1^2 + x2^2", 11), opt), MemoryCapExceeded);
}

TEST(ScanProperties, MatchesBruteForce) {
    std::mt19937_64 rng(51);
    for (std::uint64_t q : {5, 7, 13}) {
        for (std::size_t m = 1; m <= 2; ++m) {
            Form f = quadratic_corpus_form(rng, m, 2 + static_cast<unsigned>(q % 3));
            auto oracle = brute_table(f, q);
            auto t = scan_all_pairs(reduce_mod(f, q));
            auto naive = naive_table(reduce_mod(f, q));
            for (std::size_t i = 0; i < oracle.size(); ++i) {
                EXPECT_NEAR(t.values[i].real(), static_cast<double>(oracle[i].real()), 1e-9);
                EXPECT_NEAR(t.values[i].imag(), static_cast<double>(oracle[i].imag()), 1e-9);
                EXPECT_NEAR(std::abs(naive.values[i] - t.values[i]), 0, 1e-9);
            }
        }
    }
}

TEST(ScanProperties, ParsevalAndSymmetry) {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 10; ++trial) {
        std::uint64_t q = std::vector<std::uint64_t>{5, 7, 11, 13, 17}[trial % 5];
        std::size_t m = 1 + trial % 2;
        Form f = quadratic_corpus_form(rng, m, 1 + trial % 4);
        auto t = scan_all_pairs(reduce_mod(f, q), {2, std::uint64_t(1) << 30});
        auto c = check_table(t);
        EXPECT_LT(c.parseval_relative_error, 1e-6);
        EXPECT_LT(c.max_conjugate_defect, 1e-9);
        EXPECT_EQ(c.origin_defect, 0);
    }
}

TEST(ScanProperties, ThreadCountIsDeterministic) {
    FieldPoly f = FP("x1^3 + 2*x1*x2 + x2^3", 11);
    auto a = scan_all_pairs(f, {1, std::uint64_t(1) << 30});
    auto b = scan_all_pairs(f, {3, std::uint64_t(1) << 30});
    EXPECT_EQ(a.values, b.values);
}

TEST(Weil, ExampleFamilySpecializations) {
    // (3,3,2) and (3,4,2) at x1 = x2 = 1; (4,3,2) at x1 = x2 = 1 leaves two variables.
    for (auto [n, k, r] : std::vector<std::tuple<std::size_t, unsigned, std::size_t>>{{3, 3, 2}, {3, 4, 2}, {4, 3, 2}}) {
        Form g = specialized_symbol(generate_example(n, k, r), std::vector<Integer>(r, 1), 1);
        auto rep = bad_primes(generate_example(n, k, r), 23);
        for (auto q : rep.good) {
            if (q < 11) continue;
            FieldPoly gq = reduce_mod(g, q);
            ASSERT_TRUE(is_nonsingular(leading_form(gq)));
            auto w = certify_weil(scan_all_pairs(gq));
            EXPECT_TRUE(w.certified) << n << k << r << " q=" << q << " ratio " << w.max_ratio;
        }
    }
}

TEST(GoodPairs, Examples) {
    auto g = good_pairs(scan_all_pairs(FP("x1^2", 5)));
    EXPECT_EQ(g.count, 20u);
    EXPECT_EQ(g.required, 4);
    EXPECT_EQ(g.alpha2, make_rational(1, 8));
    EXPECT_TRUE(g.density_ok);

    Form g3 = specialized_symbol(generate_example(3, 3, 2), {1, 1}, 1);
    EXPECT_EQ(g3, parse_form("x1^3 + x1^2 + 3", 1));
    auto t = scan_all_pairs(reduce_mod(g3, 11));
    auto gp = good_pairs(t);
    EXPECT_EQ(gp.alpha2, make_rational(1, 32));
    EXPECT_EQ(gp.required, 4);
    // Oracle: count the two-sided bound directly from the brute-force table.
    auto oracle = brute_table(g3, 11);
    std::size_t count = 0;
    for (const auto& v : oracle) {
        long double a = std::abs(v);
        if (a >= 0.5L * std::sqrt(11.0L) - 1e-12L && a <= 2 * std::sqrt(11.0L) + 1e-12L) ++count;
    }
    EXPECT_EQ(gp.count, count);
    EXPECT_GE(gp.count, 4u);
    for (const auto& [a, b] : gp.pairs) EXPECT_FALSE(a == 0 && b[0] == 0);
}

TEST(GoodPairs, ThresholdAndDensityFailure) {
    EXPECT_EQ(density_threshold_K2(3, 1), 6u);
    EXPECT_EQ(density_threshold_K2(2, 1), 3u);
    EXPECT_EQ(density_threshold_K2(4, 2), 9u);
    // x1^2 in two variables is not Deligne: every a != 0 gives |T| = 0 or q^(3/2).
    auto t = scan_all_pairs(FP("x1^2", 5, 2));
    EXPECT_THROW(good_pairs(t), DensityError);
    GoodPairOptions lax;
    lax.enforce_density = false;
    EXPECT_FALSE(good_pairs(t, lax).density_ok);
}

TEST(Incomplete, Boundaries) {
    FieldPoly f = FP("x1^3 + x2^3", 13);
    auto full = incomplete_sum_check(f, {}, {13, 13});
    auto comp = complete_sum(f, FieldElem(1, 13), {FieldElem(0, 13), FieldElem(0, 13)});
    EXPECT_NEAR(std::abs(full.value - comp), 0, 1e-9);
    auto all = incomplete_sum_check(f, {1, 2}, {1, 1});
    EXPECT_NEAR(std::abs(all.value - comp), 0, 1e-9);
    EXPECT_LE(all.ratio, 4 * (1 + 1e-9));
    EXPECT_THROW(incomplete_sum_check(f, {}, {0, 13}), std::out_of_range);
    EXPECT_THROW(incomplete_sum_check(f, {3}, {1, 1}), std::out_of_range);
}

TEST(Incomplete, PartialRange) {
    FieldPoly f = FP("x1^3 + x2^3", 13);
    auto r = incomplete_sum_check(f, {2}, {6, 13});
    std::complex<long double> oracle = 0;
    for (long a = 1; a <= 6; ++a)
        for (long b = 1; b <= 13; ++b)
            oracle += std::polar(1.0L, 2.0L * std::acos(-1.0L) * ((a * a * a + b * b * b) % 13) / 13);
    EXPECT_NEAR(r.magnitude, static_cast<double>(std::abs(oracle)), 1e-9);
    EXPECT_EQ(r.incomplete_count, 1u);
    EXPECT_LE(r.ratio, r.explicit_bound);
}

TEST(IncompleteProperties, RatioBelowExplicitConstant) {
    for (std::uint64_t q : {7, 13, 19})
        for (std::uint64_t h = 1; h <= q; h += 3) {
            auto r = incomplete_sum_check(FP("x1^3 + x1*x2^2 + x2^3", q), {1}, {q, h});
            EXPECT_LE(r.ratio, r.explicit_bound) << q << " " << h;
        }
}

namespace {
RealSumSpec example_spec(long rl, long upper, RationalAngle y1, RationalAngle y3, double s = 0) {
    RealSumSpec in;
    in.pk = generate_example(3, 3, 2);
    in.M = {1, 1};
    in.rl = rl;
    in.u = {Rational(upper)};
    in.y = {y1, y3};
    in.s = s;
    return in;
}

// Direct long double evaluation; exact part reduced with integers first.
std::complex<long double> real_sum_oracle(const RealSumSpec& in) {
    Form g = specialized_symbol(in.pk, in.M, in.rl);
    const long double two_pi = 2.0L * std::acos(-1.0L);
    std::complex<long double> acc = 0;
    for (long m = in.rl.get_si(); m < ceil_div(in.u[0]).get_si(); ++m) {
        Rational gv = evaluate(g, {Rational(m)});
        Rational exact = gv * in.y[0].exact + Rational(m) * in.y[1].exact;
        exact -= Rational(floor_div(exact));
        long double pert = static_cast<long double>(gv.get_d()) * (static_cast<long double>(in.y[0].perturbation) + in.s) +
                           static_cast<long double>(m) * in.y[1].perturbation;
        acc += std::polar(1.0L, two_pi * static_cast<long double>(exact.get_d()) + std::fmod(pert, two_pi));
    }
    return acc;
}
}  // namespace

TEST(RealSum, ZeroAngles) {
    auto s = real_sum(example_spec(16, 40, RationalAngle::of(0, 1), RationalAngle::of(0, 1)));
    EXPECT_EQ(s, ComplexValue(24, 0));
    RealSumSpec two = example_spec(4, 9, RationalAngle::of(0, 1), RationalAngle::of(0, 1));
    two.pk = parse_form("x1^3 + x2^3 + x3^3 + x4^3", 4);
    two.M = {1, 1};
    two.u = {Rational(9), make_rational(15, 2)};
    two.y.push_back(RationalAngle::of(0, 1));
    EXPECT_EQ(real_sum(two), ComplexValue(5 * 4, 0));
}

TEST(RealSum, FullPeriodsGiveExactMultiple) {
    const std::uint64_t q = 11;
    Form g = specialized_symbol(generate_example(3, 3, 2), {1, 1}, 22);
    FieldPoly gq = reduce_mod(g, q);
    for (long nu : {1, 2, 4}) {
        auto in = example_spec(22, 22 + nu * q, RationalAngle::of(3, q), RationalAngle::of(5, q));
        ComplexValue s = real_sum(in);
        ComplexValue t = complete_sum(gq, FieldElem(3, q), {FieldElem(5, q)});
        EXPECT_EQ(s, static_cast<double>(nu) * t) << nu;
        EXPECT_EQ(real_sum(in), s);
    }
}

TEST(RealSum, PerturbedMatchesOracle) {
    std::vector<RealSumSpec> cases = {
        example_spec(64, 128, RationalAngle::of(3, 11, 1e-4), RationalAngle::of(5, 11, -2e-3), -1e-4),
        example_spec(64, 128, RationalAngle::of(1, 13, 3e-5), RationalAngle::of(2, 7, 1e-3), 2e-5),
        example_spec(256, 512, RationalAngle::of(4, 13, 0), RationalAngle::of(9, 13, 4e-4), 1e-6),
    };
    for (const auto& in : cases) {
        ComplexValue s = real_sum(in);
        auto o = real_sum_oracle(in);
        EXPECT_NEAR(s.real(), static_cast<double>(o.real()), 1e-8);
        EXPECT_NEAR(s.imag(), static_cast<double>(o.imag()), 1e-8);
    }
    EXPECT_THROW(real_sum(example_spec(0, 10, RationalAngle::of(0, 1), RationalAngle::of(0, 1))), std::invalid_argument);
}

TEST(Decompose, ExactFullPeriods) {
    auto in = example_spec(22, 22 + 2 * 11, RationalAngle::of(3, 11), RationalAngle::of(5, 11));
    auto d = decompose_sum(in, 11, 3, {5}, 0);
    EXPECT_EQ(d.measured_error, 0);
    EXPECT_EQ(d.VN, 0);
    EXPECT_NEAR(d.main, 2 * std::abs(d.T), 0);
}

TEST(Decompose, IncompleteRemainderWithinBudget) {
    for (long upper : {22 + 5, 22 + 17, 22 + 30, 22 + 100}) {
        auto in = example_spec(22, upper, RationalAngle::of(3, 11), RationalAngle::of(5, 11));
        auto d = decompose_sum(in, 11, 3, {5}, 0);
        EXPECT_LE(d.measured_error, d.budget) << upper;
        EXPECT_GT(d.measured_error, 0) << upper;
    }
}

TEST(Decompose, PerturbedWindow) {
    const std::uint64_t q = 13;
    const long rl = 169;
    double V = 0.5 * std::pow(13.0, -2.0);
    for (double frac : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        auto in = example_spec(rl, 2 * rl, RationalAngle::of(4, q), RationalAngle::of(9, q, frac * V));
        auto d = decompose_sum(in, q, 4, {9}, V);
        EXPECT_LE(d.VN, 1);
        EXPECT_LE(d.measured_error, d.budget);
        auto o = real_sum_oracle(in);
        EXPECT_NEAR(std::abs(d.S), static_cast<double>(std::abs(o)), 1e-8);
    }
    auto far = example_spec(rl, 2 * rl, RationalAngle::of(4, q), RationalAngle::of(9, q, 0.1));
    EXPECT_THROW(decompose_sum(far, q, 4, {9}, 0.5 * std::pow(13.0, -2.0)), std::invalid_argument);
    auto big = example_spec(rl, 2 * rl, RationalAngle::of(4, q), RationalAngle::of(9, q));
    EXPECT_THROW(decompose_sum(big, q, 4, {9}, 0.01), HypothesisViolation);
    auto off = example_spec(rl, 2 * rl, RationalAngle::of(4, q, 1e-3), RationalAngle::of(9, q));
    EXPECT_THROW(decompose_sum(off, q, 4, {9}, 0), std::invalid_argument);
}

TEST(Cache, RoundTrip) {
    auto dir = std::filesystem::temp_directory_path() / ("dworklab_cache_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    SumTableCache cache(dir);
    FieldPoly f = FP("x1^3 + x1*x2 + x2^3", 7);
    EXPECT_FALSE(cache.load(f));
    SumTable t = cached_scan(f, &cache);
    auto path = cache.path_for(f);
    ASSERT_TRUE(std::filesystem::exists(path));
    EXPECT_EQ(std::filesystem::file_size(path), 4u + 16u + 32u + 343u * 16u);
    auto back = cache.load(f);
    ASSERT_TRUE(back);
    EXPECT_EQ(back->values, t.values);
    EXPECT_EQ(back->k, 3u);
    {
        std::ifstream in(path, std::ios::binary);
        char head[8];
        in.read(head, 8);
        EXPECT_EQ(std::string(head, 4), "DWXS");
        EXPECT_EQ(head[4], 1);
        EXPECT_EQ(head[5], 0);
    }
    EXPECT_FALSE(cache.load(FP("x1^3 + x1*x2 + 2*x2^3", 7)));
    std::filesystem::resize_file(path, 100);
    EXPECT_FALSE(cache.load(f));
    EXPECT_EQ(hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::filesystem::remove_all(dir);
}
