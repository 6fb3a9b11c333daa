#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bcp/quadrature.hpp"
#include "bcp/specfun.hpp"

using namespace bcp;

TEST(RisingFactorial, HandValues)
{
    EXPECT_EQ(rising_factorial(3.7, 0), 1.0);
    EXPECT_EQ(rising_factorial(1, 4), 24.0);
    EXPECT_EQ(rising_factorial(2, 3), 24.0);
    EXPECT_EQ(falling_factorial(5, 3), 60.0);
}

TEST(RisingFactorial, OverflowIsFlagged)
{
    bool overflow = false;
    const double v = rising_factorial(1e200, 3, &overflow);
    EXPECT_TRUE(overflow);
    EXPECT_TRUE(std::isinf(v));
}

TEST(Gauss2F1, HandValues)
{
    EXPECT_EQ(gauss_2f1(0.3, 0.7, 1.9, 0.0).value, 1.0);
    const auto t = gauss_2f1(1, -2, 3, 1);
    EXPECT_NEAR(t.value, 0.5, 1e-15);
    EXPECT_EQ(t.tail_bound, 0.0);
    EXPECT_EQ(t.terms_used, 3u);
    EXPECT_NEAR(gauss_2f1(1, 1, 2, 0.5).value, 2 * std::log(2.0), 1e-14);
}

TEST(Gauss2F1, LogIdentityOnGrid)
{
    for (double z = -0.9; z <= 0.9; z += 0.1) {
        if (std::abs(z) < 1e-12) continue;
        EXPECT_NEAR(gauss_2f1(1, 1, 2, z).value, -std::log1p(-z) / z, 1e-13) << z;
    }
}

TEST(Gauss2F1, ComplexArgumentMatchesRealOnAxis)
{
    const auto c = gauss_2f1(0.5, 1.5, 2.5, std::complex<double>(0.4, 0.0));
    EXPECT_NEAR(c.value.real(), gauss_2f1(0.5, 1.5, 2.5, 0.4).value, 1e-14);
    EXPECT_NEAR(c.value.imag(), 0.0, 1e-15);
}

TEST(Gauss2F1, DivergentArgumentRaises)
{
    EXPECT_THROW(gauss_2f1(0.5, 0.5, 1.5, 1.2), DomainError);
    EXPECT_THROW(gauss_2f1(0.5, 0.5, -2.0, 0.2), PoleError);
}

TEST(Gauss2F1, SeriesMatchesEulerIntegral)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 40; ++i) {
        const double b = 0.2 + 2 * u(rng), c = b + 0.2 + 2 * u(rng), a = -1 + 3 * u(rng), z = -0.9 + 1.8 * u(rng);
        const double s = gauss_2f1(a, b, c, z).value;
        EXPECT_NEAR(gauss_2f1_integral(a, b, c, z), s, 1e-10 * std::max(1.0, std::abs(s)))
            << a << ' ' << b << ' ' << c << ' ' << z;
    }
}

TEST(Kummer1F1, HandValues)
{
    EXPECT_EQ(kummer_1f1(0.4, 1.3, 0).value, 1.0);
    EXPECT_NEAR(kummer_1f1(1, 1, 1).value, std::numbers::e, 1e-15);
    EXPECT_NEAR(kummer_1f1(1, 2, 1).value, std::numbers::e - 1, 1e-15);
}

TEST(Kummer1F1, SeriesMatchesEulerIntegral)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 40; ++i) {
        const double a = 0.1 + 3 * u(rng), c = a + 0.1 + 3 * u(rng), z = -10 + 20 * u(rng);
        const double s = kummer_1f1(a, c, z).value;
        EXPECT_NEAR(kummer_1f1_integral(a, c, z), s, 1e-10 * std::max(1.0, std::abs(s))) << a << ' ' << c << ' ' << z;
    }
}

TEST(Hyper3F2, HandValues)
{
    EXPECT_EQ(hyper_3f2(1, 2, 3, 4, 5, 0).value, 1.0);
    EXPECT_NEAR(hyper_3f2(1, 1, -1, 2, 1, 1).value, 0.5, 1e-15);
    EXPECT_NEAR(hyper_3f2(2, 1, -2, 3, 1, 1).value, 1.0 / 6, 1e-15);
    EXPECT_EQ(hyper_3f2(2, 1, -2, 3, 1, 1).tail_bound, 0.0);
}

TEST(Hypergeometric, TerminatingEqualsFiniteSum)
{
    // 2F1(-4, b; c; z) as an explicit polynomial
    const double b = 1.3, c = 2.7, z = 0.8;
    double t = 1, sum = 1;
    for (int k = 0; k < 4; ++k) {
        t *= (-4.0 + k) * (b + k) / ((c + k) * (k + 1)) * z;
        sum += t;
    }
    const auto r = gauss_2f1(-4, b, c, z);
    EXPECT_DOUBLE_EQ(r.value, sum);
    EXPECT_EQ(r.tail_bound, 0.0);
}

TEST(AppellF1, Reductions)
{
    EXPECT_EQ(appell_f1(0.5, 0.7, 1.1, 2.3, 0, 0).value, 1.0);
    EXPECT_NEAR(appell_f1(0.5, 0.7, 1.1, 2.3, 0.4, 0).value, gauss_2f1(0.5, 0.7, 2.3, 0.4).value, 1e-14);
}

TEST(AppellF1, MatchesIndependentQuadrature)
{
    // Gamma(3)/(Gamma(1)Gamma(2)) int (1-t) (1-0.3t)^-1 (1-0.5t)^-1 dt
    auto g = [](double t) { return 2 * (1 - t) / ((1 - 0.3 * t) * (1 - 0.5 * t)); };
    const double ref = quad::integrate(g, 0.0, 1.0).value;
    EXPECT_NEAR(appell_f1(1, 1, 1, 3, 0.3, 0.5).value, ref, 1e-10);
    EXPECT_NEAR(appell_f1_integral(1, 1, 1, 3, 0.3, 0.5), ref, 1e-10);
}

TEST(AppellF1, SeriesMatchesIntegralOnDiagonal)
{
    for (double z : {-0.6, -0.2, 0.1, 0.5, 0.7}) {
        const double s = appell_f1(0.8, 0.6, 1.2, 2.5, z, z).value;
        EXPECT_NEAR(appell_f1_integral(0.8, 0.6, 1.2, 2.5, z, z), s, 1e-10) << z;
        // F1(a; b, c; d; z, z) = 2F1(a, b + c; d; z)
        EXPECT_NEAR(gauss_2f1(0.8, 1.8, 2.5, z).value, s, 1e-12) << z;
    }
}

TEST(LambertW, HandValues)
{
    EXPECT_EQ(lambert_w(0), 0.0);
    EXPECT_NEAR(lambert_w(std::numbers::e), 1.0, 1e-15);
    EXPECT_NEAR(lambert_w(2 * std::exp(2.0)), 2.0, 1e-15);
    EXPECT_THROW(lambert_w(-1), DomainError);
}

TEST(LambertW, InverseProperty)
{
    for (double lx = -12; lx <= 6; lx += 0.25) {
        const double x = std::pow(10.0, lx), w = lambert_w(x);
        EXPECT_NEAR(w * std::exp(w), x, 1e-13 * x) << x;
    }
    EXPECT_NEAR(lambert_w(1e6) * std::exp(lambert_w(1e6)), 1e6, 1e-7);
}

TEST(IntegralI, HandValues)
{
    EXPECT_NEAR(integral_I(1, 1, 1, 1, 1), 1.5 - 2 * std::log(2.0), 1e-14);
    EXPECT_EQ(integral_I(1, 1, 1, 1, 0), 0.0);
    EXPECT_NEAR(integral_I(2, 3, 1.5, 0.7, 1), integral_I_at_one(2, 3, 1.5, 0.7), 1e-12);
}

TEST(IntegralI, QuadratureMatchesGaussFormAtOne)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng), g = u(rng), nu = u(rng);
        const double q = integral_I(a, b, g, nu, 1), c = integral_I_at_one(a, b, g, nu);
        EXPECT_NEAR(q, c, 1e-9 * std::max(1.0, std::abs(c))) << a << ' ' << b << ' ' << g << ' ' << nu;
    }
}

TEST(IntegralI, QuadratureMatchesAppellFormInsideDisk)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 5);
    for (int i = 0; i < 40; ++i) {
        const double a = u(rng), b = u(rng), g = u(rng), nu = u(rng);
        const double zmax = std::min(1.0, nu / std::sqrt(nu * nu + 2 * nu));
        const double z = 0.8 * zmax;
        const double q = integral_I(a, b, g, nu, z), c = integral_I_appell(a, b, g, nu, z);
        EXPECT_NEAR(q, c, 1e-9 * std::max(1.0, std::abs(c))) << a << ' ' << b << ' ' << g << ' ' << nu;
    }
}

TEST(IntegralI, SingularExponents)
{
    // int_0^1 y^-1/2 (1-y)^-1/2 dy = pi
    EXPECT_NEAR(integral_I(-0.5, -0.5, 0, 1, 1), std::numbers::pi, 1e-12);
    EXPECT_NEAR(beta_fn(0.5, 0.5), std::numbers::pi, 1e-13);
}
