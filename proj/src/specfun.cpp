#include "bcp/specfun.hpp"

#include <array>
#include <cmath>

#include "bcp/quadrature.hpp"

namespace bcp {

double rising_factorial(double alpha, unsigned n, bool* overflow)
{
    double r = 1.0;
    for (unsigned k = 0; k < n; ++k) r *= alpha + k;
    if (overflow) *overflow = !std::isfinite(r);
    return r;
}

double falling_factorial(double alpha, unsigned n, bool* overflow)
{
    double r = 1.0;
    for (unsigned k = 0; k < n; ++k) r *= alpha - k;
    if (overflow) *overflow = !std::isfinite(r);
    return r;
}

SeriesResult<double> gauss_2f1(double a, double b, double c, double z)
{
    const std::array<double, 2> num{a, b};
    const std::array<double, 1> den{c};
    return hypergeometric_pfq<double, double>(num, den, z);
}

SeriesResult<std::complex<double>> gauss_2f1(double a, double b, double c, std::complex<double> z)
{
    const std::array<double, 2> num{a, b};
    const std::array<double, 1> den{c};
    return hypergeometric_pfq<std::complex<double>, double>(num, den, z);
}

SeriesResult<double> kummer_1f1(double a, double c, double z)
{
    const std::array<double, 1> num{a};
    const std::array<double, 1> den{c};
    return hypergeometric_pfq<double, double>(num, den, z);
}

SeriesResult<double> hyper_3f2(double a1, double a2, double a3, double b1, double b2, double z)
{
    const std::array<double, 3> num{a1, a2, a3};
    const std::array<double, 2> den{b1, b2};
    return hypergeometric_pfq<double, double>(num, den, z);
}

SeriesResult<double> appell_f1(double a, double b, double c, double d, double z, double w)
{
    if (detail::nonpositive_integer(d)) throw PoleError("appell_f1: d is a nonpositive integer");
    long ma = -1, mb = -1;
    const bool term_a = detail::nonpositive_integer(a, &ma);
    const bool term_b = detail::nonpositive_integer(b, &mb);
    const bool outer_finite = term_a || term_b;
    long outer_last = -1;
    if (term_a) outer_last = ma;
    if (term_b && (outer_last < 0 || mb < outer_last)) outer_last = mb;
    if (!outer_finite && z != 0 && !(std::abs(z) < 1))
        throw DomainError("appell_f1: |z| >= 1 and the outer series does not terminate");

    const double eps = std::numeric_limits<double>::epsilon();
    detail::KahanSum<double> acc;
    double coef = 1.0;  // (a)_m (b)_m / ((d)_m m!) z^m
    double tail = 0.0;
    std::size_t terms = 0;
    int small_run = 0;
    long m = 0;
    double last = 0.0;
    for (;; ++m) {
        if (m > 200000) throw NoConvergence("appell_f1: outer series term limit");
        auto inner = gauss_2f1(a + m, c, d + m, w);
        const double t = coef * inner.value;
        acc.add(t);
        tail += std::abs(coef) * inner.tail_bound;
        terms += inner.terms_used;
        last = t;
        if (outer_finite && m >= outer_last) break;
        if (!outer_finite) {
            if (std::abs(t) <= eps * std::abs(acc.sum)) {
                if (++small_run >= 3) break;
            } else {
                small_run = 0;
            }
        }
        coef *= (a + m) * (b + m) / ((d + m) * (m + 1.0)) * z;
        if (coef == 0.0 && !outer_finite) break;
    }
    if (!outer_finite) {
        double r = std::abs((a + m) * (b + m) / ((d + m) * (m + 1.0))) * std::abs(z);
        r = std::max(r, std::abs(z));
        tail += r < 1 ? std::abs(last) * r / (1 - r) : std::numeric_limits<double>::infinity();
    }
    return {acc.sum, terms, tail};
}

namespace {
double gamma_ratio_prefactor(double num, double d1, double d2)
{
    return std::exp(std::lgamma(num) - std::lgamma(d1) - std::lgamma(d2));
}
}  // namespace

double gauss_2f1_integral(double a, double b, double c, double z)
{
    if (!(c > b && b > 0)) throw DomainError("gauss_2f1_integral requires c > b > 0");
    if (!(z < 1)) throw DomainError("gauss_2f1_integral requires z < 1");
    auto f = [&](double t) {
        return std::pow(t, b - 1) * std::pow(1 - t, c - b - 1) * std::pow(1 - z * t, -a);
    };
    auto r = quad::integrate_endpoints(f, 0.0, 1.0, b - 1, c - b - 1);
    return gamma_ratio_prefactor(c, b, c - b) * r.value;
}

double kummer_1f1_integral(double a, double c, double z)
{
    if (!(c > a && a > 0)) throw DomainError("kummer_1f1_integral requires c > a > 0");
    auto f = [&](double t) {
        return std::exp(t * z) * std::pow(t, a - 1) * std::pow(1 - t, c - a - 1);
    };
    auto r = quad::integrate_endpoints(f, 0.0, 1.0, a - 1, c - a - 1);
    return gamma_ratio_prefactor(c, a, c - a) * r.value;
}

double appell_f1_integral(double a, double b, double c, double d, double z, double w)
{
    if (!(d > a && a > 0)) throw DomainError("appell_f1_integral requires d > a > 0");
    if (!(z < 1 && w < 1)) throw DomainError("appell_f1_integral requires z, w < 1");
    auto f = [&](double t) {
        return std::pow(t, a - 1) * std::pow(1 - t, d - a - 1) * std::pow(1 - z * t, -b) *
               std::pow(1 - w * t, -c);
    };
    auto r = quad::integrate_endpoints(f, 0.0, 1.0, a - 1, d - a - 1);
    return gamma_ratio_prefactor(d, a, d - a) * r.value;
}

double lambert_w(double x)
{
    if (!(x >= 0)) throw DomainError("lambert_w: x must be nonnegative");
    if (x == 0) return 0.0;
    if (std::isinf(x)) return x;
    double w = std::log1p(x);
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1;
        const double step = f / (ew * wp1 - (w + 2) * f / (2 * wp1));
        w -= step;
        if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(w)))
            break;
    }
    return w;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

double integral_I(double alpha, double beta, double gamma, double nu, double z)
{
    if (!(alpha > -1 && beta > -1 && nu > 0))
        throw DomainError("integral_I: requires alpha, beta > -1 and nu > 0");
    if (!(z >= 0 && z <= 1)) throw DomainError("integral_I: z must lie in [0, 1]");
    if (z == 0) return 0.0;
    auto f = [&](double y) {
        return std::exp(alpha * std::log(y) + beta * std::log1p(-y) - gamma * std::log(y + nu));
    };
    auto r = quad::integrate_endpoints(f, 0.0, z, alpha, z == 1 ? beta : 0.0);
    return r.value;
}

double integral_I_at_one(double alpha, double beta, double gamma, double nu)
{
    if (!(alpha > -1 && beta > -1 && nu > 0))
        throw DomainError("integral_I_at_one: requires alpha, beta > -1 and nu > 0");
    const double logpre = (1 + alpha - gamma) * std::log(nu) - (1 + alpha) * std::log1p(nu) +
                          log_beta(1 + alpha, 1 + beta);
    auto f = gauss_2f1(2 + alpha + beta - gamma, 1 + alpha, 2 + alpha + beta, 1 / (1 + nu));
    return std::exp(logpre) * f.value;
}

double integral_I_appell(double alpha, double beta, double gamma, double nu, double z)
{
    if (!(alpha > -1 && beta > -1 && nu > 0))
        throw DomainError("integral_I_appell: requires alpha, beta > -1 and nu > 0");
    if (!(z > 0 && z < nu / std::sqrt(nu * nu + 2 * nu)))
        throw DomainError("integral_I_appell: z outside the convergence disk");
    const double Z = z / (z + nu);
    const double W = (1 + nu) * z / (z + nu);
    auto f = appell_f1(1 + alpha, 2 + alpha + beta - gamma, -beta, 2 + alpha, Z, W);
    return std::pow(nu, alpha - gamma + 1) / (1 + alpha) * std::pow(Z, 1 + alpha) * f.value;
}

}  // namespace bcp
