#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "bcp/closedform.hpp"
#include "bcp/geomfix.hpp"
#include "bcp/recursions.hpp"

using namespace bcp;

TEST(Mobius, IteratesHandValues)
{
    EXPECT_EQ(phi_iterate(0.3, 0.4, 0), 0.4);
    EXPECT_NEAR(phi_iterate(0.5, 0.5, 1), 1.0 / 3, 1e-16);
    EXPECT_NEAR(phi_iterate(0.5, 0.5, 1), phi_small(0.5, 0.5), 1e-16);
}

TEST(Mobius, IteratesCompose)
{
    for (double rho : {0.1, 0.5, 0.9})
        for (double x = 0.05; x < 1; x += 0.1) {
            EXPECT_NEAR(phi_iterate(rho, phi_iterate(rho, x, 5), -5), x, 1e-13);
            double y = x;
            for (int k = 1; k <= 6; ++k) {
                y = phi_small(rho, y);
                EXPECT_NEAR(phi_iterate(rho, x, k), y, 1e-14);
            }
            EXPECT_NEAR(phi_iterate_complement(rho, x, -7), 1 - phi_iterate(rho, x, -7), 1e-14);
        }
}

TEST(Mobius, BigMapIsInvolution)
{
    for (double rho : {0.2, 0.6, 0.95})
        for (double x = 0; x <= 1.0001; x += 0.05) EXPECT_NEAR(phi_big(rho, phi_big(rho, x)), x, 1e-14);
}

TEST(Mobius, ComplementIdentity)
{
    for (double rho : {0.25, 0.5, 0.8})
        for (double x0 = 0.1; x0 < 1; x0 += 0.2)
            for (int i = -5; i <= 5; ++i) {
                const double q = 1 - rho;
                const double lhs = 1 - rho * phi_iterate(rho, x0, i);
                const double rhs = (1 - x0 * (1 - std::pow(q, i + 1))) / (1 - x0 * (1 - std::pow(q, i)));
                EXPECT_NEAR(lhs, rhs, 1e-13) << rho << ' ' << x0 << ' ' << i;
            }
}

TEST(CheckGeometric, UniformAtItsRho)
{
    const ModelParams p{1, 0.5, 0.5};
    const auto g = check_geometric(LambdaMeasure::uniform(), bs_rho(p), p, 30);
    EXPECT_TRUE(g.geometric());
    EXPECT_LT(g.cg3a_max, 1e-8);
    EXPECT_LT(std::abs(g.cg3b_residual), 1e-8);
    EXPECT_TRUE(g.cg1_pass);
    EXPECT_TRUE(g.dust_free);
}

TEST(CheckGeometric, AtomsAtEndpointsFail)
{
    const ModelParams p{1, 0.5, 0.5};
    const auto k = check_geometric(LambdaMeasure::kingman(1), 0.4, p);
    EXPECT_FALSE(k.m0_zero);
    EXPECT_FALSE(k.geometric());
    const auto s = check_geometric(LambdaMeasure::star(1), 0.4, p);
    EXPECT_FALSE(s.m1_zero);
    EXPECT_FALSE(s.geometric());
}

TEST(CheckGeometric, WrongRhoIsDetected)
{
    const ModelParams p{1, 0.5, 0.5};
    const double rho = bs_rho(p);
    for (double d : {-0.05, -1e-3, 1e-3, 0.05}) {
        const auto g = check_geometric(LambdaMeasure::uniform(), rho + d, p);
        EXPECT_GE(std::abs(g.cg3b_residual), 1e-4) << d;
        EXPECT_FALSE(g.geometric());
    }
}

TEST(CheckGeometric, OtherBetaMeasuresAreNotGeometric)
{
    const ModelParams p{1, 0.5, 0.5};
    for (const auto& m : {LambdaMeasure::beta(2, 1), LambdaMeasure::beta(1, 2), LambdaMeasure::beta(3, 1)})
        for (double rho = 0.05; rho < 1; rho += 0.1) EXPECT_FALSE(check_geometric(m, rho, p).geometric()) << rho;
}

TEST(OperatorS, ZeroAndSingleAtom)
{
    EXPECT_TRUE(apply_S(AtomicMeasure{}, 0.5).atoms.empty());
    AtomicMeasure mu;
    mu.atoms.push_back({0, 0.4, 0.6, 2.0});
    const auto s = apply_S(mu, 0.5);
    ASSERT_EQ(s.atoms.size(), 2u);
    std::vector<double> xs{s.atoms[0].x, s.atoms[1].x};
    std::sort(xs.begin(), xs.end());
    EXPECT_NEAR(xs[0], phi_small(0.5, 0.4), 1e-16);
    EXPECT_NEAR(xs[1], 0.4, 1e-16);
    EXPECT_NEAR(s.total_mass(), 0.5 * 0.4 * (2 - 0.5 * 0.4) * 2 + 0.5 * 2, 1e-15);
}

TEST(OperatorS, ContinuousFixedDensity)
{
    for (double rho : {0.3, 0.7}) {
        const std::function<double(double)> h = [rho](double y) { return continuous_fixed_density(rho, y); };
        const auto Sh = apply_S(h, rho);
        for (double y = 0.01; y < 1; y += 0.03) EXPECT_NEAR(Sh(y), h(y), 1e-12 * h(y)) << y;
    }
}

TEST(FixedPoint, CentralMassAndTail)
{
    const auto mu = build_discrete_fixed_point(0.5, 0.3, 0.05, 200);
    const auto it = std::find_if(mu.atoms.begin(), mu.atoms.end(), [](const IndexedAtom& a) { return a.k == 0; });
    ASSERT_NE(it, mu.atoms.end());
    EXPECT_DOUBLE_EQ(it->mass, 0.05);
    EXPECT_LT(mu.tail_bound, 1e-10);
    // ordered by k, so locations fall; near 1 only the complement resolves them
    for (std::size_t i = 1; i < mu.atoms.size(); ++i) {
        const auto &a = mu.atoms[i - 1], &b = mu.atoms[i];
        if (b.x < 0.5)
            EXPECT_LT(b.x, a.x);
        else
            EXPECT_GT(b.one_minus_x, a.one_minus_x);
    }
}

TEST(FixedPoint, InvariantUnderS)
{
    const double rho = 0.5;
    const auto mu = build_discrete_fixed_point(rho, 0.3, 0.05);
    const auto s = apply_S(mu, rho);
    for (const auto& a : s.atoms) {
        if (std::abs(a.k) >= mu.truncation_index_K) continue;
        const auto it = std::find_if(mu.atoms.begin(), mu.atoms.end(), [&](const IndexedAtom& b) { return b.k == a.k; });
        ASSERT_NE(it, mu.atoms.end());
        EXPECT_NEAR(a.mass, it->mass, 1e-12 * it->mass) << a.k;
    }
    EXPECT_NEAR(s.total_mass(), mu.total_mass(), 2 * mu.tail_bound + 1e-14);
}

TEST(FixedPoint, ClosedMassesMatchRatioRecursion)
{
    const int K = 40;
    const auto mu = build_discrete_fixed_point(0.4, 0.6, 0.1, K);
    const auto rec = fixed_point_masses_recursive(0.4, 0.6, 0.1, K);
    ASSERT_EQ(rec.size(), mu.atoms.size());
    for (std::size_t i = 0; i < rec.size(); ++i) EXPECT_NEAR(rec[i], mu.atoms[i].mass, 1e-14 * rec[i]) << i;
}

TEST(RhoStar, RootAndPrecondition)
{
    const ModelParams p{1, 0, 0};
    const double x0 = 0.5, m = 0.1;
    const double r = rho_star(x0, m, p);
    const double res = m * std::pow(1 - r * x0, 2) - x0 * (1 - x0) * (p.theta1 * r * r - (p.sigma + p.theta()) * r + p.sigma);
    EXPECT_LT(std::abs(res), 1e-14);
    EXPECT_THROW(rho_star(0.5, 0.25, p), PreconditionViolated);
}

TEST(RhoStar, SmallMassLimit)
{
    const ModelParams p{1, 0.3, 0.6};
    EXPECT_NEAR(rho_star(0.4, 1e-12, p), crow_kimura_p(p), 1e-9);
}

TEST(Pushforward, InvolutionAndSumIdentity)
{
    const ModelParams p{1, 0.2, 0.2};
    const double x0 = 0.3, m = 0.05;
    const double rs = rho_star(x0, m, p);
    const auto mu = build_discrete_fixed_point(rs, x0, m);
    const auto twice = pushforward_atoms(pushforward_atoms(mu, rs), rs);
    ASSERT_EQ(twice.atoms.size(), mu.atoms.size());
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        EXPECT_NEAR(twice.atoms[i].x, mu.atoms[i].x, 1e-14);
        EXPECT_EQ(twice.atoms[i].mass, mu.atoms[i].mass);
    }
    const auto id = fixed_point_sum_identity(mu, rs, x0, m);
    EXPECT_NEAR(id.numeric, id.closed, 1e-10);
}

TEST(Pushforward, EndToEndGeometric)
{
    const ModelParams p{1, 0.2, 0.2};
    const double x0 = 0.3, m = 0.05;
    const double rs = rho_star(x0, m, p);
    const auto lam = pushforward_to_lambda(build_discrete_fixed_point(rs, x0, m), rs);
    const auto pmf = solve_lambda_truncated(lam, p);
    for (int n = 1; n <= 25; ++n) EXPECT_NEAR(pmf.p(n), (1 - rs) * std::pow(rs, n - 1), 1e-6) << n;
    EXPECT_TRUE(check_geometric(lam, rs, p, 20, 1e-6).geometric());
}
