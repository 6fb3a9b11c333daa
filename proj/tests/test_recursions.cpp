#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bcp/closedform.hpp"
#include "bcp/recursions.hpp"

using namespace bcp;

namespace {

void expect_valid_pmf(const StationaryPmf& pmf)
{
    double sum = 0;
    for (double p : pmf.probs) {
        EXPECT_GE(p, 0.0);
        sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    const auto a = pmf.tails();
    ASSERT_FALSE(a.empty());
    EXPECT_NEAR(a[0], 1.0, 1e-12);
    for (std::size_t n = 1; n < a.size(); ++n) EXPECT_LE(a[n], a[n - 1] + 1e-15);
}

}  // namespace

TEST(Moran, TwoStateBalance)
{
    const MoranParams p{2, 1, 0, 0};
    for (const auto& pmf : {solve_moran(p), solve_moran_shooting(p), solve_moran_nullspace(p)}) {
        ASSERT_EQ(pmf.size(), 2);
        EXPECT_NEAR(pmf.p(1), 2.0 / 3, 1e-14);
        EXPECT_NEAR(pmf.p(2), 1.0 / 3, 1e-14);
    }
}

TEST(Moran, MatchesClosedFormWithoutBeneficialMutation)
{
    const MoranParams p{10, 0.5, 0, 0.2};
    EXPECT_LE(sup_distance(solve_moran(p).probs, moran_closed(p).pmf.probs), 1e-10);
}

TEST(Moran, SolverAgreesWithNullspace)
{
    const MoranParams p{3, 1, 0.5, 0.5};
    EXPECT_LE(sup_distance(solve_moran(p).probs, solve_moran_nullspace(p).probs), 1e-12);
}

TEST(Moran, RandomGridAgainstNullspace)
{
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> N(2, 200);
    std::uniform_real_distribution<double> s(0.05, 3), u(0, 1);
    for (int i = 0; i < 30; ++i) {
        const MoranParams p{N(rng), s(rng), u(rng), u(rng)};
        const auto a = solve_moran(p), b = solve_moran_nullspace(p);
        EXPECT_LE(sup_distance(a.probs, b.probs), 1e-10) << p.N << ' ' << p.s << ' ' << p.u0 << ' ' << p.u1;
        EXPECT_LT(a.residual, 1e-12);
        EXPECT_LT(moran_pmf_residual(p, a.probs), 1e-12);
        expect_valid_pmf(a);
    }
}

TEST(Moran, ShootingAgreesOnSmallN)
{
    for (int N : {2, 5, 12}) {
        const MoranParams p{N, 0.7, 0.2, 0.1};
        EXPECT_LE(sup_distance(solve_moran_shooting(p).probs, solve_moran(p).probs), 1e-10) << N;
    }
}

TEST(Moran, ShootingReportsAmplification)
{
    EXPECT_THROW(solve_moran_shooting({60, 0.7, 0.2, 0.1}), InstabilityDetected);
}

TEST(Moran, NullspaceStationarity)
{
    const MoranParams p{8, 0.6, 0.3, 0.4};
    const auto pi = solve_moran_nullspace(p);
    for (int j = 1; j <= p.N; ++j) {
        double flow = 0;
        for (int i = 1; i <= p.N; ++i) {
            if (i == j) continue;
            flow += pi.p(i) * moran_rate(p, i, j) - pi.p(j) * moran_rate(p, j, i);
        }
        EXPECT_NEAR(flow, 0.0, 1e-12) << j;
    }
}

TEST(Gth, SerialAndParallelIdentical)
{
    const MoranParams p{60, 0.4, 0.05, 0.1};
    std::vector<double> Q(p.N * p.N, 0.0);
    for (int i = 1; i <= p.N; ++i)
        for (int j = 1; j <= p.N; ++j)
            if (i != j) Q[(i - 1) * p.N + (j - 1)] = moran_rate(p, i, j);
    EXPECT_EQ(gth_stationary(Q, p.N, par::Exec::Serial), gth_stationary(Q, p.N, par::Exec::Parallel));
}

TEST(LambdaTruncated, NoCoalescenceIsGeometric)
{
    const ModelParams p{1, 1, 0};
    const auto pmf = solve_lambda_truncated(LambdaMeasure::zero(), p);
    for (int n = 1; n <= 30; ++n) EXPECT_NEAR(pmf.p(n), std::pow(0.5, n), 1e-12) << n;
}

TEST(LambdaTruncated, UniformIsGeometric)
{
    const double rho = 1 - std::exp(-1.0);
    const auto pmf = solve_lambda_truncated(LambdaMeasure::uniform(), {1, 0, 0});
    for (int n = 1; n <= 30; ++n) EXPECT_NEAR(pmf.p(n), (1 - rho) * std::pow(rho, n - 1), 1e-10) << n;
    expect_valid_pmf(pmf);
}

TEST(LambdaTruncated, KingmanMatchesClosedForm)
{
    const ModelParams p{1, 0, 0.5};
    EXPECT_LE(sup_distance(solve_lambda_truncated(LambdaMeasure::kingman(2), p).probs, wf_closed(2, p).pmf.probs), 1e-8);
}

TEST(LambdaTruncated, StableUnderDoubling)
{
    const auto m = LambdaMeasure::beta(2, 3);
    const ModelParams p{1.2, 0.3, 0.4};
    LambdaSolveOptions opt;
    opt.tol = 1e-11;
    const auto pmf = solve_lambda_truncated(m, p, opt);
    const auto twice = solve_lambda_fixed_K(m, p, 2 * pmf.truncation_K);
    EXPECT_LE(sup_distance(pmf.probs, twice.probs), opt.tol);
    expect_valid_pmf(pmf);
}

TEST(LambdaTruncated, AgreesWithCrowKimura)
{
    for (const ModelParams& p : {ModelParams{1, 1, 1}, ModelParams{0.5, 0.2, 1.5}, ModelParams{2, 0, 3}}) {
        const auto ck = crow_kimura_geometric(p, 200);
        const auto pmf = solve_lambda_truncated(LambdaMeasure::zero(), p);
        EXPECT_LE(sup_distance(pmf.probs, ck.pmf.probs), 1e-10) << p.sigma;
    }
}

TEST(LambdaTruncated, SerialAndParallelIdentical)
{
    const auto m = LambdaMeasure::beta(1.5, 2.5);
    const ModelParams p{1, 0.5, 0.5};
    EXPECT_EQ(solve_lambda_fixed_K(m, p, 128, par::Exec::Serial).probs,
              solve_lambda_fixed_K(m, p, 128, par::Exec::Parallel).probs);
}

TEST(LambdaTruncated, CapReached)
{
    LambdaSolveOptions opt;
    opt.K = 16;
    opt.K_cap = 32;
    opt.tol = 1e-300;
    EXPECT_THROW(solve_lambda_truncated(LambdaMeasure::uniform(), {5, 0, 0}, opt), NoConvergence);
}

TEST(Star, ClosedTailsHandValue)
{
    const auto pmf = solve_star({1, 0, 0}, 1);
    EXPECT_NEAR(pmf.p(1), 0.5, 1e-14);
    EXPECT_NEAR(pmf.tails()[0], 1.0, 1e-15);
    EXPECT_EQ(pmf.solver_tag, SolverTag::StarClosedTails);
}

TEST(Star, ClosedTailsMatchProductFormula)
{
    const ModelParams p{0.8, 0.6, 0};
    const double m1 = 1.3;
    const auto pmf = solve_star(p, m1);
    const auto a = pmf.tails();
    const double q = p.sigma / (p.sigma + p.theta0), c = m1 / (p.sigma + p.theta0);
    double an = 1;
    for (int n = 1; n <= 40; ++n) {
        an *= n * q / (1 + c + n - 1);
        EXPECT_NEAR(a[n], an, 1e-12) << n;
    }
}

TEST(Star, MutationBothWaysMatchesTruncated)
{
    const ModelParams p{1, 0.5, 0.5};
    const auto star = solve_star(p, 1);
    expect_valid_pmf(star);
    EXPECT_LE(sup_distance(star.probs, solve_lambda_truncated(LambdaMeasure::star(1), p).probs), 1e-7);
}

TEST(Star, ForwardInstabilityIsReportedWithoutFallback)
{
    StarOptions opt;
    opt.allow_fallback = false;
    EXPECT_THROW(solve_star({1, 1, 1}, 1, opt), InstabilityDetected);
}

TEST(CrowKimura, Parameter)
{
    EXPECT_NEAR(crow_kimura_p({1, 1, 0}), 0.5, 1e-15);
    EXPECT_NEAR(crow_kimura_p({1, 0, 2}), 0.5, 1e-15);
    EXPECT_NEAR(crow_kimura_p({1, 1, 1}), (3 - std::sqrt(5.0)) / 2, 1e-15);
    EXPECT_THROW(crow_kimura_p({2, 0, 1}), NotPositiveRecurrent);
}

TEST(CrowKimura, PmfIsGeometric)
{
    const auto ck = crow_kimura_geometric({1, 1, 0}, 50);
    for (int n = 1; n <= 50; ++n) EXPECT_NEAR(ck.pmf.p(n), 0.5 * std::pow(0.5, n - 1), 1e-15);
}

TEST(Finalize, ClipsTinyNegatives)
{
    std::vector<double> p{0.5, -1e-14, 0.5};
    finalize_probabilities(p);
    EXPECT_EQ(p[1], 0.0);
    std::vector<double> bad{0.5, -1e-6, 0.5};
    EXPECT_THROW(finalize_probabilities(bad), NegativeMass);
}
