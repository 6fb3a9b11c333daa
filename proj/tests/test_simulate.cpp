#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "bcp/measures.hpp"
#include "bcp/recursions.hpp"
#include "bcp/simulate.hpp"

using namespace bcp;
using namespace bcp::sim;

namespace {

double rate_to(const RateRow& r, int target)
{
    double prev = 0, total = 0;
    for (std::size_t i = 0; i < r.targets.size(); ++i) {
        if (r.targets[i] == target) total += r.cumulative[i] - prev;
        prev = r.cumulative[i];
    }
    return total;
}

}  // namespace

TEST(Rates, MoranTwoStates)
{
    const MoranParams p{2, 1, 0, 0};
    const auto r1 = moran_L_rates(p, 1);
    EXPECT_NEAR(r1.total(), 0.5, 1e-15);
    EXPECT_NEAR(rate_to(r1, 2), 0.5, 1e-15);
    const auto r2 = moran_L_rates(p, 2);
    EXPECT_NEAR(rate_to(r2, 1), 1.0, 1e-15);
    EXPECT_NEAR(r2.total(), 1.0, 1e-15);
}

TEST(Rates, KingmanExitRate)
{
    const auto r = lambda_L_rates(LambdaMeasure::kingman(2), {0.5, 0, 0}, 3);
    EXPECT_NEAR(r.total(), 7.5, 1e-14);
    EXPECT_NEAR(rate_to(r, 4), 1.5, 1e-14);
    EXPECT_NEAR(rate_to(r, 2), 6.0, 1e-14);
}

TEST(Rates, StarOnlyFullMerger)
{
    const auto r = lambda_L_rates(LambdaMeasure::star(1), {1, 0, 0}, 4);
    EXPECT_NEAR(rate_to(r, 1), 1.0, 1e-15);
    EXPECT_NEAR(rate_to(r, 5), 4.0, 1e-15);
    EXPECT_NEAR(rate_to(r, 3) + rate_to(r, 2), 0.0, 1e-15);
}

TEST(Rates, NoCoalescenceIsBirthDeath)
{
    const ModelParams p{1.5, 0, 0.7};
    for (int k = 1; k <= 6; ++k) {
        const auto r = lambda_L_rates(LambdaMeasure::zero(), p, k);
        EXPECT_NEAR(rate_to(r, k + 1), 1.5 * k, 1e-14);
        if (k > 1) {
            EXPECT_NEAR(rate_to(r, k - 1), 0.7 * (k - 1), 1e-14);
        }
        EXPECT_NEAR(r.total(), 1.5 * k + 0.7 * (k - 1), 1e-14);
    }
}

TEST(Rates, TotalExitRateIdentity)
{
    const auto m = LambdaMeasure::beta(1.2, 0.8);
    const ModelParams p{0.9, 0.4, 0.6};
    for (int k = 1; k <= 25; ++k) {
        double coal = 0;
        for (int j = 2; j <= k; ++j) coal += merge_rate(m, k, j);
        const double expect = k * p.sigma + (k - 1) * (p.theta0 + p.theta1) + coal;
        const auto r = lambda_L_rates(m, p, k);
        EXPECT_NEAR(r.total(), expect, 1e-12 * expect + 1e-15) << k;
        for (std::size_t i = 1; i < r.cumulative.size(); ++i) EXPECT_GE(r.cumulative[i], r.cumulative[i - 1]);
    }
}

TEST(Simulate, ZeroEventsGivesSingleState)
{
    const auto path = simulate_moran_L({5, 0.5, 0.1, 0.1}, 3, 0, 1);
    EXPECT_EQ(path.states.size(), 1u);
    EXPECT_EQ(path.states[0], 3);
    EXPECT_EQ(path.n_jumps(), 0);
}

TEST(Simulate, MoranHoldingTimeInStateOne)
{
    const auto path = simulate_moran_L({2, 1, 0, 0}, 1, 200000, 99);
    double sum = 0, sq = 0;
    long visits = 0;
    for (std::size_t i = 0; i + 1 < path.states.size(); ++i)
        if (path.states[i] == 1) {
            sum += path.holding_times[i];
            sq += path.holding_times[i] * path.holding_times[i];
            ++visits;
        }
    ASSERT_GT(visits, 50000);
    const double mean = sum / visits, se = std::sqrt((sq / visits - mean * mean) / visits);
    EXPECT_NEAR(mean, 2.0, 3 * se);
}

TEST(Simulate, DeterministicForFixedSeed)
{
    const auto m = LambdaMeasure::uniform();
    const ModelParams p{1, 0.5, 0.5};
    const auto a = simulate_lambda_L(m, p, 4, 5000, 1234), b = simulate_lambda_L(m, p, 4, 5000, 1234);
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(a.holding_times, b.holding_times);
    EXPECT_EQ(a.rng, kRngName);
    EXPECT_EQ(a.seed, 1234u);
    const auto c = simulate_lambda_L(m, p, 4, 5000, 1235);
    EXPECT_NE(a.states, c.states);
}

TEST(Simulate, HoldingTimesPositive)
{
    const auto path = simulate_killed_asg_path(LambdaMeasure::kingman(2), {1, 1, 1}, 3, 100000, 5);
    ASSERT_TRUE(path.absorbed);
    for (std::size_t i = 0; i + 1 < path.holding_times.size(); ++i) EXPECT_GT(path.holding_times[i], 0);
    EXPECT_TRUE(std::isinf(path.holding_times.back()));
    EXPECT_TRUE(path.states.back() == 0 || path.states.back() == kCemetery);
}

TEST(KilledAsg, CompetingExponentials)
{
    const auto est = simulate_killed_asg(LambdaMeasure::zero(), {0, 1, 1}, 1, 100000, 17);
    EXPECT_NEAR(est.frequency, 0.5, 3 * est.std_error);
}

TEST(KilledAsg, GeometricMoment)
{
    const auto est = simulate_killed_asg(LambdaMeasure::zero(), {1, 1, 1}, 1, 100000, 21);
    EXPECT_NEAR(est.frequency, (3 - std::sqrt(5.0)) / 2, 3 * est.std_error);
}

TEST(KilledAsg, StrongKillingAbsorbsRarely)
{
    const auto est = simulate_killed_asg(LambdaMeasure::uniform(), {1, 1000, 0.01}, 3, 20000, 4);
    EXPECT_LT(est.frequency, 1e-3);
}

TEST(KilledAsg, SerialAndParallelAgree)
{
    const auto a = simulate_killed_asg(LambdaMeasure::kingman(2), {1, 1, 1}, 2, 4000, 8, par::Exec::Serial);
    const auto b = simulate_killed_asg(LambdaMeasure::kingman(2), {1, 1, 1}, 2, 4000, 8, par::Exec::Parallel);
    EXPECT_EQ(a.hits, b.hits);
}

TEST(MoranX, AbsorbedAtZero)
{
    const auto path = simulate_moran_X({4, 0.5, 0, 0}, 0, 100, 3);
    EXPECT_TRUE(path.absorbed);
    EXPECT_EQ(path.states.size(), 1u);
}

TEST(MoranX, FixationFrequency)
{
    const auto est = moran_fixation_frequency({2, 1, 0, 0}, 1, 100000, 12);
    EXPECT_NEAR(est.frequency, 2.0 / 3, 3 * est.std_error);
}

TEST(MoranX, StationaryOccupancy)
{
    const MoranParams p{6, 0.5, 0.2, 0.3};
    const auto pi = moran_X_stationary(p);
    const auto path = simulate_moran_X(p, 3, 400000, 77);
    const auto occ = occupancy(path);
    for (int k = 0; k <= p.N; ++k) EXPECT_NEAR(occ.fraction(k), pi[k], 0.01) << k;
}

TEST(Occupancy, TrivialPaths)
{
    JumpPath one;
    one.states = {4};
    one.holding_times = {2.5};
    const auto o1 = occupancy(one, 0);
    EXPECT_DOUBLE_EQ(o1.fraction(4), 1.0);

    JumpPath two;
    two.states = {1, 2, 1, 2};
    two.holding_times = {1, 2, 1, 0};
    const auto o2 = occupancy(two, 0);
    EXPECT_DOUBLE_EQ(o2.fraction(1), 0.5);
    EXPECT_DOUBLE_EQ(o2.fraction(2), 0.5);
}

TEST(Occupancy, EmptyPathRaises)
{
    EXPECT_THROW(occupancy(JumpPath{}), EmptyPath);
}

TEST(Occupancy, MoranMatchesSolver)
{
    const MoranParams p{10, 0.5, 0.1, 0.1};
    const auto occ = occupancy(simulate_moran_L(p, 1, 1000000, 2024));
    EXPECT_LE(tv_distance(occ, solve_moran(p)), 0.01);
}

TEST(KilledAsg, FirstJumpLawMatchesBlockCountingChain)
{
    // With theta = 0 both chains share their jump law; compare first jumps by chi-square.
    const auto m = LambdaMeasure::beta(2, 2);
    const ModelParams p{0.8, 0, 0};
    for (int k = 2; k <= 10; k += 4) {
        std::map<int, long> a, b;
        const long reps = 20000;
        for (long r = 0; r < reps; ++r) {
            ++a[simulate_lambda_L(m, p, k, 1, 1000 + r).states.back()];
            ++b[simulate_killed_asg_path(m, p, k, 1, 500000 + r).states.back()];
        }
        double chi2 = 0;
        int cells = 0;
        std::map<int, long> all = a;
        for (auto [s, c] : b) all[s] += 0;
        for (auto [s, unused] : all) {
            (void)unused;
            const double x = a[s], y = b[s];
            if (x + y == 0) continue;
            chi2 += (x - y) * (x - y) / (x + y);
            ++cells;
        }
        ASSERT_GT(cells, 1);
        const boost::math::chi_squared dist(cells - 1);
        EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 1e-3) << k;
    }
}
