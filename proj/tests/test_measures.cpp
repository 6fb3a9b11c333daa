#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "bcp/measures.hpp"
#include "bcp/specfun.hpp"

using namespace bcp;

TEST(LambdaRate, AtomsAtTheEndpoints)
{
    const auto k = LambdaMeasure::kingman(2.5);
    EXPECT_EQ(lambda_rate(k, 5, 2), 2.5);
    EXPECT_EQ(lambda_rate(k, 5, 3), 0.0);
    const auto s = LambdaMeasure::star(1.5);
    EXPECT_EQ(lambda_rate(s, 5, 5), 1.5);
    EXPECT_EQ(lambda_rate(s, 5, 4), 0.0);
}

TEST(LambdaRate, UniformIsBetaFunction)
{
    EXPECT_NEAR(lambda_rate(LambdaMeasure::uniform(), 4, 3), 1.0 / 6, 1e-15);
    for (int k = 2; k <= 30; ++k)
        for (int j = 2; j <= k; ++j)
            EXPECT_NEAR(lambda_rate(LambdaMeasure::uniform(), k, j), beta_fn(j - 1, k - j + 1),
                        1e-12 * beta_fn(j - 1, k - j + 1));
}

TEST(LambdaRate, BetaClosedFormMatchesQuadrature)
{
    const double a = 1.7, b = 0.6;
    const auto beta = LambdaMeasure::beta(a, b);
    CustomDensity c{[&](double x) { return std::exp((a - 1) * std::log(x) + (b - 1) * std::log1p(-x) - log_beta(a, b)); },
                    a - 1, b - 1, "beta"};
    const LambdaMeasure custom(0, 0, c);
    for (int k = 2; k <= 50; k += 3)
        for (int j = 2; j <= k; j += 2) {
            const double ref = lambda_rate(beta, k, j);
            EXPECT_NEAR(lambda_rate(custom, k, j), ref, 1e-12 * ref + 1e-300) << k << ' ' << j;
        }
}

TEST(LambdaRate, AtomicInterior)
{
    const auto m = LambdaMeasure::atoms({{0.5, 2.0}});
    // 2 * x^{j-2} (1-x)^{k-j} at x = 1/2
    EXPECT_NEAR(lambda_rate(m, 6, 3), 2 * std::pow(0.5, 4), 1e-15);
    EXPECT_NEAR(merge_rate(m, 6, 3), 20 * 2 * std::pow(0.5, 4), 1e-13);
}

TEST(SigmaLambda, Examples)
{
    EXPECT_EQ(sigma_lambda(LambdaMeasure::zero()).value, 0.0);
    EXPECT_TRUE(std::isinf(sigma_lambda(LambdaMeasure::uniform()).value));
    EXPECT_NEAR(sigma_lambda(LambdaMeasure::atoms({{0.5, 1.0}})).value, 4 * std::log(2.0), 1e-14);
    const auto k = sigma_lambda(LambdaMeasure::kingman(1));
    EXPECT_TRUE(std::isinf(k.value));
    EXPECT_TRUE(k.atom_at_zero);
    const auto s = sigma_lambda(LambdaMeasure::star(1));
    EXPECT_TRUE(s.atom_at_one);
}

TEST(SigmaLambda, IntegrableBetaIsFinite)
{
    // beta(3,1): int -log(1-x) 3 x^2 / x^2 dx = 3
    EXPECT_NEAR(sigma_lambda(LambdaMeasure::beta(3, 1)).value, 3.0, 1e-10);
}

TEST(Recurrence, Clauses)
{
    EXPECT_TRUE(is_positive_recurrent(LambdaMeasure::beta(2, 3), {1, 0.1, 0}).positive());
    const auto r = is_positive_recurrent(LambdaMeasure::zero(), {2, 0, 1});
    EXPECT_EQ(r.verdict, Recurrence::Verdict::NotPositiveRecurrent);
    for (double sigma : {0.1, 1.0, 10.0})
        EXPECT_TRUE(is_positive_recurrent(LambdaMeasure::uniform(), {sigma, 0, 0}).positive());
}

TEST(Cnk, ClosedForms)
{
    EXPECT_NEAR(cnk(LambdaMeasure::uniform(), 2, 5), 1.0 / 3, 1e-12);
    EXPECT_NEAR(cnk(LambdaMeasure::beta(3, 1), 1, 4), 3.0 / 5, 1e-12);
    EXPECT_EQ(cnk(LambdaMeasure::kingman(1), 2, 5), 0.0);
    EXPECT_EQ(cnk(LambdaMeasure::zero(), 2, 5), 0.0);
}

TEST(Cnk, UniformGrid)
{
    const auto u = LambdaMeasure::uniform();
    for (int n = 1; n <= 20; ++n)
        for (int k = n + 1; k <= 60; ++k) EXPECT_NEAR(cnk(u, n, k), 1.0 / (k - n), 1e-10) << n << ' ' << k;
}

TEST(Cnk, RowMatchesPointwise)
{
    const auto m = LambdaMeasure::beta(1.5, 2.5);
    std::vector<double> row(40);
    cnk_row(m, 3, 43, row.data());
    for (int k = 4; k <= 43; ++k) EXPECT_NEAR(row[k - 4], cnk(m, 3, k), 1e-13) << k;
}

TEST(Cnk, NonnegativeAndNonincreasing)
{
    for (const auto& m : {LambdaMeasure::beta(0.5, 1.5), LambdaMeasure::beta(2, 2), LambdaMeasure::atoms({{0.3, 1}, {0.8, 0.5}})})
        for (int n = 1; n <= 10; ++n) {
            double prev = std::numeric_limits<double>::infinity();
            for (int k = n + 1; k <= 50; ++k) {
                const double c = cnk(m, n, k);
                EXPECT_GE(c, 0.0);
                EXPECT_LE(c, prev * (1 + 1e-12) + 1e-300);
                prev = c;
            }
        }
}

TEST(Measure, ValidationRejectsBadInput)
{
    EXPECT_THROW(LambdaMeasure(-1, 0, InteriorZero{}), DomainError);
    EXPECT_THROW(LambdaMeasure::atoms({{0.5, 1}, {0.4, 1}}), DomainError);
    EXPECT_THROW(LambdaMeasure::atoms({{1.0, 1}}), DomainError);
    EXPECT_THROW(LambdaMeasure::atoms({{0.5, -1}}), DomainError);
    std::vector<Atom> many(kMaxAtoms + 1);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = {(i + 1.0) / (many.size() + 1), 1};
    EXPECT_THROW(LambdaMeasure::atoms(many), CoarseningError);
}

TEST(Measure, TotalMass)
{
    const LambdaMeasure m(0.5, 0.25, BetaDensity{2, 3, 2});
    EXPECT_DOUBLE_EQ(m.total_mass(), 2.75);
}

TEST(Params, Validation)
{
    EXPECT_THROW((ModelParams{-1, 0, 0}).validate(), DomainError);
    EXPECT_THROW((MoranParams{1, 1, 0, 0}).validate(), DomainError);
    EXPECT_THROW((MoranParams{5, 0, 0, 0}).validate(), DomainError);
    EXPECT_NO_THROW((MoranParams{5, 0.5, 0.1, 0.2}).validate());
}
