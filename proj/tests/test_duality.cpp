#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bcp/closedform.hpp"
#include "bcp/duality.hpp"
#include "bcp/recursions.hpp"
#include "bcp/simulate.hpp"

using namespace bcp;

TEST(WMoments, NoCoalescenceIsPowerSequence)
{
    const auto w = solve_w_moments(LambdaMeasure::zero(), {1, 1, 1});
    const double r = (3 - std::sqrt(5.0)) / 2;
    EXPECT_EQ(w.w[0], 1.0);
    for (std::size_t n = 1; n < w.w.size(); ++n) EXPECT_NEAR(w.w[n], std::pow(r, double(n)), 1e-10) << n;
}

TEST(WMoments, CompletelyMonotone)
{
    for (const auto& m : {LambdaMeasure::kingman(2), LambdaMeasure::uniform(), LambdaMeasure::beta(2, 2)}) {
        const auto w = solve_w_moments(m, {1, 0.5, 0.7});
        EXPECT_TRUE(w.completely_monotone);
        EXPECT_EQ(w.w[0], 1.0);
        std::vector<double> d(w.w.begin(), w.w.begin() + 13);
        for (int order = 0; order <= 12; ++order) {
            for (std::size_t k = 0; k + order <= 12 && k < d.size(); ++k) EXPECT_GE(d[k], -1e-10) << order << ' ' << k;
            for (std::size_t k = 0; k + 1 < d.size(); ++k) d[k] = d[k] - d[k + 1];
            d.pop_back();
        }
    }
}

TEST(WMoments, StableUnderDoubling)
{
    const auto m = LambdaMeasure::uniform();
    const ModelParams p{1, 0.5, 0.5};
    const auto w = solve_w_moments(m, p);
    const auto w2 = solve_w_moments_fixed_K(m, p, 2 * w.truncation_K);
    for (int n = 0; n <= w.truncation_K / 4; ++n) EXPECT_NEAR(w.w[n], w2[n], 1e-10) << n;
}

TEST(WMoments, KingmanAgainstKilledAsg)
{
    const auto king = LambdaMeasure::kingman(2);
    const ModelParams p{1, 1, 1};
    const auto w = solve_w_moments(king, p);
    for (int n = 1; n <= 3; ++n) {
        const auto e = sim::simulate_killed_asg(king, p, n, 40000, 300 + n);
        EXPECT_NEAR(e.frequency, w.w[n], 3 * e.std_error) << n;
    }
}

TEST(WMoments, RequiresBothMutations)
{
    EXPECT_THROW(solve_w_moments(LambdaMeasure::uniform(), {1, 0, 1}), DomainError);
}

TEST(BsGenerating, KernelIdentity)
{
    double s = 0;
    for (int k = 1; k < 200; ++k) s += std::pow(0.5, k) / (k * (k + 1.0));
    EXPECT_NEAR(bs_phi(0.5), 1 - std::log(2.0), 1e-15);
    EXPECT_NEAR(bs_phi(0.5), s, 1e-15);
}

TEST(BsGenerating, TaylorHeadMatchesRecursion)
{
    const ModelParams p{1, 0.5, 0.5};
    const auto w = solve_w_moments(LambdaMeasure::uniform(), p);
    const auto g = bs_w_generating(p, {}, 10);
    EXPECT_EQ(g.taylor[0], 1.0);
    for (int n = 1; n <= 10; ++n) EXPECT_NEAR(g.taylor[n], w.w[n], 1e-5) << n;
}

TEST(BsGenerating, ValuesIncreasingConvexAndMatchSeries)
{
    const ModelParams p{1, 0.5, 0.5};
    const double s2 = bs_singular_point(p);
    ASSERT_GT(s2, 0);
    ASSERT_LT(s2, 1);
    std::vector<double> s;
    for (int i = 0; i <= 20; ++i) s.push_back(s2 * i / 21.0);
    const auto g = bs_w_generating(p, s);
    EXPECT_EQ(g.values[0], 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(g.values[i], g.values[i - 1]);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) EXPECT_GE(g.values[i + 1] - 2 * g.values[i] + g.values[i - 1], -1e-12);
    const auto w = solve_w_moments(LambdaMeasure::uniform(), p);
    double ser = 0;
    for (std::size_t n = 1; n < w.w.size(); ++n) ser += w.w[n] * std::pow(0.3, double(n));
    const auto one = bs_w_generating(p, std::vector<double>{0.3});
    EXPECT_NEAR(one.values[0], ser, 1e-8);
    const double h = p.theta() * s2 - p.theta1 * s2 * s2 - p.sigma * (1 - s2) - (1 - s2) * std::log1p(-s2);
    EXPECT_NEAR(h, 0.0, 1e-13);
    EXPECT_THROW(bs_w_generating(p, std::vector<double>{s2 + 1e-3}), DomainError);
}

TEST(BsGenerating, StieltjesWrapper)
{
    const ModelParams p{1, 0.5, 0.5};
    const double t = 1.5 / bs_singular_point(p);
    const auto g = bs_w_generating(p, std::vector<double>{1 / t});
    EXPECT_NEAR(bs_stieltjes(p, t), (g.values[0] + 1) / t, 1e-12);
}

TEST(Absorption, BolthausenSznitman)
{
    EXPECT_EQ(bs_absorption(0, 1.3), 1.0);
    EXPECT_EQ(bs_absorption(1, 1.3), 0.0);
    EXPECT_NEAR(bs_absorption(0.5, std::log(2.0)), 1.0 / 3, 1e-15);
    for (double x = 0; x <= 1; x += 0.05)
        for (double sigma : {0.1, 1.0, 5.0}) {
            const double rho = 1 - std::exp(-sigma);
            EXPECT_NEAR(bs_absorption(x, sigma), (1 - rho) * (1 - x) / (1 - rho * (1 - x)), 1e-15);
            EXPECT_NEAR(bs_absorption(x, sigma), bs_absorption_geometric(x, sigma), 1e-13);
        }
}

TEST(Absorption, Kimura)
{
    EXPECT_EQ(kimura_fixation(0, 1, 2), 0.0);
    EXPECT_EQ(kimura_fixation(1, 1, 2), 1.0);
    EXPECT_NEAR(kimura_fixation(0.5, 1, 2), 0.6224593312018546, 1e-15);
    for (double x = 0.05; x < 1; x += 0.1) EXPECT_NEAR(kimura_fixation(x, 1.5, 1), kimura_fixation_poisson(x, 1.5, 1), 1e-12);
}

TEST(Absorption, Moran)
{
    EXPECT_EQ(moran_fixation(7, 7, 0.3), 1.0);
    EXPECT_NEAR(moran_fixation(1, 2, 1), 2.0 / 3, 1e-15);
    EXPECT_NEAR(moran_fixation(10, 100000, 0.01), -std::expm1(10 * std::log1p(-0.01 / 1.01)), 1e-12);
    const auto est = sim::moran_fixation_frequency({5, 0.5, 0, 0}, 2, 100000, 55);
    EXPECT_NEAR(est.frequency, moran_fixation(2, 5, 0.5), 3 * est.std_error);
}

TEST(AncestralType, TwoPathsAgree)
{
    const ModelParams p{1, 1, 0};
    const auto ck = crow_kimura_geometric(p, 200);
    const auto g = pgf_from_pmf(ck.pmf, "crow-kimura");
    EXPECT_NEAR(ancestral_type_h(g, 1), 1.0, 1e-15);
    EXPECT_NEAR(ancestral_type_h(g, 0), 0.0, 1e-14);
    for (double x = 0.05; x < 1; x += 0.1) {
        const double closed = 1 - 0.5 * (1 - x) / (1 - 0.5 * (1 - x));
        EXPECT_NEAR(ancestral_type_h(g, x), closed, 1e-12);
        EXPECT_NEAR(ancestral_type_h_tails(ck.pmf, x), closed, 1e-12);
    }
    const auto wf = wf_closed(2, {1, 0.5, 0.5});
    for (double x = 0.1; x < 1; x += 0.2)
        EXPECT_NEAR(ancestral_type_h(wf.pgf, x), ancestral_type_h_tails(wf.pmf, x), 1e-8);
}
