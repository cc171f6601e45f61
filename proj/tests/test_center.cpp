#include "support.hpp"

#include <dworklab/center.hpp>
#include <dworklab/form_analysis.hpp>
#include <dworklab/parser.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace dworklab;

namespace {
Form P(const std::string& s, std::size_t n = 0) {
    return n ? parse_form(s, n) : parse_form(s);
}

bool in_span(const std::vector<RationalMatrix>& basis, const RationalMatrix& a) {
    std::size_t n = a.rows();
    RationalMatrix m(n * n, basis.size() + 1);
    for (std::size_t k = 0; k <= basis.size(); ++k) {
        const RationalMatrix& b = k < basis.size() ? basis[k] : a;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i * n + j, k) = b(i, j);
    }
    RationalMatrix without(n * n, basis.size());
    for (std::size_t r = 0; r < n * n; ++r)
        for (std::size_t k = 0; k < basis.size(); ++k) without(r, k) = m(r, k);
    return m.rank() == without.rank();
}

Form embed(const Form& f, std::size_t n, std::size_t offset) {
    Form out(n);
    for (const auto& [e, c] : f.terms()) {
        ExponentVec x(n);
        for (std::size_t i = 0; i < f.nvars(); ++i) x[offset + i] = e[i];
        out.add_term(x, c);
    }
    return out;
}
}  // namespace

TEST(Center, DiagonalCubic) {
    auto z = compute_center(P("x1^3 + x2^3"));
    EXPECT_EQ(z.dimension(), 2u);
    EXPECT_TRUE(in_span(z.basis, RationalMatrix{{1, 0}, {0, 0}}));
    EXPECT_TRUE(in_span(z.basis, RationalMatrix::identity(2)));
}

TEST(Center, CubicP3Family) {
    Form p3 = generate_example(2, 3, 2);
    ASSERT_EQ(p3, P("x1^3 + x2^3 + x1*x2^2"));
    auto z = compute_center(p3);
    ASSERT_EQ(z.dimension(), 2u);
    EXPECT_EQ(z.basis[0], RationalMatrix::identity(2));
    EXPECT_EQ(z.basis[1], (RationalMatrix{{-9, 1}, {3, 0}}));
    // The family [[alpha - 9 beta, beta], [3 beta, alpha]] for a few (alpha, beta).
    PolyMatrix h = hessian(p3);
    for (int al = -2; al <= 2; ++al)
        for (int be = -2; be <= 2; ++be) {
            RationalMatrix a{{Rational(al - 9 * be), Rational(be)}, {Rational(3 * be), Rational(al)}};
            EXPECT_TRUE(in_center(a, h));
            EXPECT_TRUE(in_span(z.basis, a));
        }
    EXPECT_FALSE(in_center(RationalMatrix{{1, 0}, {0, 0}}, h));
}

TEST(Center, QuinticFamilyIsCentral) {
    auto z = compute_center(generate_example(3, 5, 2));
    EXPECT_EQ(z.dimension(), 1u);
    EXPECT_EQ(z.basis[0], RationalMatrix::identity(3));
}

TEST(Center, Errors) {
    EXPECT_THROW(compute_center(P("x1^2 + x2^2")), std::invalid_argument);
    EXPECT_THROW(compute_center(P("x1^3 + x2")), std::invalid_argument);
    EXPECT_THROW(compute_center(Form(2)), std::invalid_argument);
    EXPECT_THROW(decide_decomposability(P("x1^3 + x2^3", 3)), std::invalid_argument);
    EXPECT_THROW(decide_decomposability(P("(x1 + x2)^3")), std::exception);
}

TEST(Nondegenerate, Examples) {
    EXPECT_TRUE(is_nondegenerate(P("x1^3 + x2^3")));
    EXPECT_FALSE(is_nondegenerate(P("x1^3 + x2^3", 3)));
    // Depends on x1 - x2 only: the derivative along (1, 1) vanishes.
    EXPECT_FALSE(is_nondegenerate(P("x1^3 - 3*x1^2*x2 + 3*x1*x2^2 - x2^3")));
}

TEST(Decomposability, Examples) {
    auto d = decide_decomposability(P("x1^3 + x2^3"));
    EXPECT_EQ(d.verdict, Decomposability::decomposable);
    ASSERT_TRUE(d.idempotent);
    EXPECT_EQ(*d.idempotent, (RationalMatrix{{1, 0}, {0, 0}}));
    EXPECT_FALSE(d.central);

    auto p = decide_decomposability(generate_example(2, 3, 2));
    EXPECT_EQ(p.verdict, Decomposability::indecomposable_over_Q);
    EXPECT_FALSE(p.central);
    EXPECT_EQ(p.center_dimension, 2u);
    EXPECT_FALSE(p.idempotent);

    auto c = decide_decomposability(generate_example(3, 5, 2));
    EXPECT_EQ(c.verdict, Decomposability::indecomposable_over_Q);
    EXPECT_TRUE(c.central);
    EXPECT_EQ(to_string(c.verdict), "indecomposable-over-Q");
}

TEST(Decomposability, P3IdempotentsAreIrrational) {
    // Hand elimination: off-diagonals give alpha = (1 + 9 beta) / 2, the (2,2) entry then gives 93 beta^2 = 1.
    RationalMatrix b{{-9, 1}, {3, 0}};
    RationalMatrix b2 = b * b;
    EXPECT_EQ(b2, (RationalMatrix{{84, -9}, {-27, 3}}));
    EXPECT_FALSE(detail::rational_sqrt(Rational(93)));
    for (double be : {1 / std::sqrt(93.0), -1 / std::sqrt(93.0)}) {
        double al = (1 + 9 * be) / 2;
        double a[2][2] = {{al - 9 * be, be}, {3 * be, al}};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double sq = a[i][0] * a[0][j] + a[i][1] * a[1][j];
                EXPECT_NEAR(sq, a[i][j], 1e-12);
            }
    }
    EXPECT_FALSE(detail::idempotent_in_pencil(b));
}

TEST(Decomposability, ThreeDiagonalBlocks) {
    auto d = decide_decomposability(P("x1^3 + x2^3 + x3^3"));
    EXPECT_EQ(d.center_dimension, 3u);
    EXPECT_EQ(d.verdict, Decomposability::decomposable);
    ASSERT_TRUE(d.idempotent);
    EXPECT_EQ(*d.idempotent * *d.idempotent, *d.idempotent);
}

TEST(CenterProperties, IdentityInSpanAndExactness) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 12; ++t) {
        Form f = testsupport::random_homogeneous(rng, 2 + t % 3, 3 + t % 2, 6);
        if (f.is_zero()) continue;
        auto z = compute_center(f);
        ASSERT_GE(z.dimension(), 1u);
        EXPECT_TRUE(in_span(z.basis, RationalMatrix::identity(f.nvars())));
        PolyMatrix h = hessian(f);
        for (const auto& a : z.basis) EXPECT_TRUE(in_center(a, h));
    }
}

TEST(CenterProperties, DefectIsSkew) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 10; ++t) {
        std::size_t n = 2 + t % 3;
        Form f = testsupport::random_homogeneous(rng, n, 3, 6);
        PolyMatrix h = hessian(f);
        RationalMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = testsupport::random_rational(rng, 5, 3);
        auto b = commutator_defect(a, h);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_TRUE(b[i][i].is_zero());
            for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(b[i][j], -b[j][i]);
        }
    }
}

TEST(CenterProperties, ExampleFamilyIsCentralExceptP3) {
    for (std::size_t n = 2; n <= 4; ++n)
        for (unsigned k = 3; k <= 5; ++k)
            for (std::size_t r = 2; r <= n; ++r) {
                auto z = compute_center(generate_example(n, k, r));
                EXPECT_EQ(z.dimension(), (n == 2 && k == 3) ? 2u : 1u) << n << k << r;
            }
}

TEST(CenterProperties, DecomposedSumsYieldBlockProjection) {
    std::vector<std::pair<Form, Form>> parts = {
        {generate_example(2, 3, 2), P("x1^3", 1)},
        {generate_example(3, 4, 2), generate_example(2, 4, 2)},
        {generate_example(2, 5, 2), generate_example(3, 5, 3)},
        {P("x1^3", 1), generate_example(3, 3, 2)},
    };
    for (const auto& [f, g] : parts) {
        std::size_t m = f.nvars(), n = m + g.nvars();
        Form sum = embed(f, n, 0) + embed(g, n, m);
        auto d = decide_decomposability(sum);
        ASSERT_EQ(d.verdict, Decomposability::decomposable) << print_form(sum);
        const RationalMatrix& e = *d.idempotent;
        EXPECT_TRUE(detail::is_nontrivial_idempotent(e));
        EXPECT_TRUE(in_center(e, hessian(sum)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if ((i < m) != (j < m)) {
                    EXPECT_EQ(e(i, j), 0);
                }
    }
}
