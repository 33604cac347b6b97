#include <hochster/formulae.hpp>
#include <hochster/oracle.hpp>

#include "support/random_sheaf.hpp"

#include <gtest/gtest.h>

using namespace hochster;

namespace {

const auto Q = CoefficientRing::rationals();
const auto F2 = CoefficientRing::prime_field(2);
const auto F3 = CoefficientRing::prime_field(3);

Face f(std::initializer_list<int> one_based)
{
    std::vector<int> v;
    for (int x : one_based)
        v.push_back(x - 1);
    return Face::from_vertices(v);
}

Sheaf boundary_triangle(CoefficientRing ring = Q)
{
    return constant_on(SRComplex::from_facets(3, {f({1, 2}), f({1, 3}), f({2, 3})}), ring);
}

SRComplex projective_plane()
{
    return SRComplex::from_facets(6, {f({1, 2, 3}), f({1, 3, 4}), f({1, 4, 5}), f({1, 5, 6}), f({1, 2, 6}),
                                      f({2, 3, 5}), f({3, 4, 6}), f({2, 4, 5}), f({3, 5, 6}), f({2, 4, 6})});
}

} // namespace

TEST(LCFormula, BoundaryTriangleExamples)
{
    auto s = boundary_triangle();
    EXPECT_EQ(lc_formula(s, 2, Multidegree{0, 0, 0}).free_rank, 1u);
    EXPECT_EQ(lc_formula(s, 2, Multidegree{-1, -2, 0}).free_rank, 1u);
    EXPECT_TRUE(lc_formula(s, 2, Multidegree{1, 0, 0}).is_zero());
    EXPECT_TRUE(lc_formula(s, 3, Multidegree{-1, -1, -1}).is_zero());
}

TEST(LCFormula, TermCarriesCofactor)
{
    HochsterEvaluator ev(boundary_triangle());
    auto t = ev.lc_term(2, Multidegree{-1, -2, 0});
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(t->p, f({1, 2}));
    EXPECT_TRUE(t->cofactor.dim(Multidegree{-1, -2, 0}) == 1);
    EXPECT_FALSE(ev.lc_term(2, Multidegree{0, 1, 0}).has_value());
}

TEST(LCFormula, AgreesWithCechOnAllSmallComplexes)
{
    for (const auto& ring : {Q, F2}) {
        for (int n = 1; n <= 3; ++n) {
            for (const auto& k : enumerate_complexes(n)) {
                HochsterEvaluator ev(constant_on(k, ring));
                for (const auto& a : Window::cube(n, -n - 1, 1).points()) {
                    auto oracle = cech_local_cohomology_all(ev.sheaf(), a);
                    for (int i = 0; i <= n; ++i)
                        ASSERT_EQ(ev.lc(i, a), oracle[static_cast<std::size_t>(i)])
                            << ring.name() << " " << k.to_string() << " " << a.to_string() << " i=" << i;
                }
            }
        }
    }
}

TEST(LCFormula, AgreesWithCechOnRandomSheaves)
{
    std::mt19937 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const auto& ring = trial % 2 ? F3 : Q;
        HochsterEvaluator ev(fixtures::random_sheaf(rng, ring));
        for (const auto& a : Window::cube(3, -3, 1).points()) {
            auto oracle = cech_local_cohomology_all(ev.sheaf(), a);
            for (int i = 0; i <= 3; ++i)
                ASSERT_EQ(ev.lc(i, a), oracle[static_cast<std::size_t>(i)]) << "trial " << trial << " " << a.to_string();
        }
    }
}

TEST(LCFormula, IntegerTorsionOnProjectivePlane)
{
    auto k = projective_plane();
    EXPECT_EQ(lc_formula(constant_on(k, Q), 3, Multidegree(std::vector<int>(6, 0))).free_rank, 0u);
    EXPECT_EQ(lc_formula(constant_on(k, F2), 3, Multidegree(std::vector<int>(6, 0))).free_rank, 1u);

    auto z = constant_on(k, CoefficientRing::integers());
    const Multidegree zero(std::vector<int>(6, 0));
    auto h3 = lc_formula(z, 3, zero);
    EXPECT_EQ(h3.free_rank, 0u);
    EXPECT_EQ(h3.torsion, (std::vector<mpz_class>{2}));
    EXPECT_EQ(cech_local_cohomology(z, 3, zero), h3);
    EXPECT_EQ(h3.to_string(), "0 [2]");
}

TEST(ExtFormula, CorrectedBoundaryTriangleValues)
{
    auto s = boundary_triangle();
    EXPECT_TRUE(ext_formula(s, 2, 2, Multidegree{-2, 0, 0}).is_zero());
    EXPECT_EQ(ext_formula(s, 2, 2, Multidegree{-1, 0, 0}).free_rank, 1u);
    EXPECT_EQ(koszul_ext(s, 2, 2, Multidegree{-1, 0, 0}).free_rank, 1u);
}

TEST(ExtFormula, PolynomialRingDualBox)
{
    // Ext^n(R/m_l, R) is the k-dual of R/m_l, living on the box [-l, -1]^n
    for (int n = 1; n <= 3; ++n) {
        auto s = constant_on(SRComplex::full_simplex(n), Q);
        for (int l = 1; l <= 2; ++l)
            for (const auto& a : Window::cube(n, -l - 1, 1).points()) {
                bool inside = true;
                for (int k = 0; k < n; ++k)
                    inside = inside && a[k] >= -l && a[k] <= -1;
                EXPECT_EQ(ext_formula(s, l, n, a).free_rank, inside ? 1u : 0u) << a.to_string();
            }
    }
}

TEST(ExtFormula, TermIdentifiesInterval)
{
    HochsterEvaluator ev(boundary_triangle());
    auto t = ev.ext_term(3, 2, Multidegree{-1, -3, 0});
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(t->p, f({1}));
    EXPECT_EQ(t->q, f({1, 2}));
    EXPECT_EQ(t->cofactor.dim(Multidegree{-1, -3, 0}), 1u);
    EXPECT_FALSE(ev.ext_term(3, 2, Multidegree{-4, 0, 0}).has_value());
    EXPECT_THROW(ev.ext(0, 1, Multidegree{0, 0, 0}), Error);
}

TEST(ExtFormula, AgreesWithKoszulOnAllSmallComplexes)
{
    for (const auto& ring : {Q, F2})
        for (int n = 1; n <= 3; ++n)
            for (const auto& k : enumerate_complexes(n)) {
                HochsterEvaluator ev(constant_on(k, ring));
                for (int l = 1; l <= 3; ++l)
                    for (const auto& a : Window::cube(n, -l - 1, 1).points()) {
                        auto oracle = koszul_ext_all(ev.sheaf(), l, a);
                        for (int i = 0; i <= n; ++i)
                            ASSERT_EQ(ev.ext(l, i, a), oracle[static_cast<std::size_t>(i)])
                                << ring.name() << " " << k.to_string() << " l=" << l << " " << a.to_string() << " i=" << i;
                    }
            }
}

TEST(ExtFormula, AgreesWithKoszulOnRandomSheaves)
{
    std::mt19937 rng(77);
    for (int trial = 0; trial < 12; ++trial) {
        HochsterEvaluator ev(fixtures::random_sheaf(rng, trial % 2 ? F3 : Q));
        for (int l = 1; l <= 3; ++l)
            for (const auto& a : Window::cube(3, -l - 1, 1).points()) {
                auto oracle = koszul_ext_all(ev.sheaf(), l, a);
                for (int i = 0; i <= 3; ++i)
                    ASSERT_EQ(ev.ext(l, i, a), oracle[static_cast<std::size_t>(i)])
                        << "trial " << trial << " l=" << l << " " << a.to_string() << " i=" << i;
            }
    }
}

TEST(HilbertSeries, Examples)
{
    EXPECT_EQ(hilbert_series(boundary_triangle(), 2).coarse_string(), "1 + 3u + 3u^2");
    for (int n = 1; n <= 4; ++n) {
        auto s = hilbert_series(constant_on(SRComplex::full_simplex(n), Q), n);
        EXPECT_EQ(s.coarse_string(), n == 1 ? "u" : "u^" + std::to_string(n));
        EXPECT_EQ(s.fine_string(), [&] {
            std::string m;
            for (int v = 1; v <= n; ++v)
                m += (v > 1 ? "*u" : "u") + std::to_string(v);
            return m;
        }());
    }
    EXPECT_EQ(hilbert_series(boundary_triangle(), 0).coarse_string(), "0");
}

TEST(HilbertSeries, ExpansionMatchesDegreeSums)
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        HochsterEvaluator ev(fixtures::random_sheaf(rng, Q));
        for (int i = 0; i <= 3; ++i) {
            auto series = ev.hilbert_series(i);
            for (int d = 0; d <= 4; ++d) {
                mpz_class total = 0;
                for (const auto& a : Window::cube(3, -d, 0).points())
                    if (a.total() == -d)
                        total += static_cast<unsigned long>(cech_local_cohomology(ev.sheaf(), i, a).free_rank);
                EXPECT_EQ(series.coarse_expansion(d), total) << "i=" << i << " d=" << d;
            }
            for (const auto& a : Window::cube(3, -3, 1).points())
                EXPECT_EQ(series.coefficient(a), ev.lc(i, a).free_rank);
        }
    }
}

TEST(MultMap, BoundaryTriangleExample)
{
    auto s = boundary_triangle();
    const Multidegree a{-1, 0, 0};
    auto m = lc_mult_map(s, 2, a, 0);
    EXPECT_EQ(m.shape(), "1x1");
    EXPECT_EQ(rank(m), cech_mult_map(s, 2, a, 0));
    EXPECT_EQ(rank(m), 1u);
}

TEST(MultMap, FullSimplexShift)
{
    auto s = constant_on(SRComplex::full_simplex(2), Q);
    EXPECT_EQ(rank(lc_mult_map(s, 2, Multidegree{-2, -1}, 0)), 1u);
    EXPECT_EQ(rank(lc_mult_map(s, 2, Multidegree{-1, -1}, 0)), 0u);
    EXPECT_THROW(lc_mult_map(constant_on(SRComplex::full_simplex(2), CoefficientRing::integers()), 2, Multidegree{-2, -1}, 0),
                 Error);
}

TEST(MultMap, RanksAgreeWithCech)
{
    std::vector<Sheaf> sheaves;
    for (const auto& k : enumerate_complexes(3))
        sheaves.push_back(constant_on(k, F2));
    std::mt19937 rng(8);
    for (int trial = 0; trial < 12; ++trial)
        sheaves.push_back(fixtures::random_sheaf(rng, trial % 2 ? F3 : Q));
    for (const auto& s : sheaves) {
        HochsterEvaluator ev(s);
        for (const auto& a : Window::cube(3, -2, 0).points())
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i <= 3; ++i)
                    ASSERT_EQ(rank(ev.lc_mult_map(i, a, j)), cech_mult_map(s, i, a, j))
                        << a.to_string() << " i=" << i << " j=" << j + 1;
    }
}
