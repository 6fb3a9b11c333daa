#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bcp/errors.hpp"

namespace bcp {

template <class T>
struct SeriesResult {
    T value{};
    std::size_t terms_used = 1;
    double tail_bound = 0.0;  // estimated truncation error, 0 for polynomials
};

namespace detail {

template <class R>
bool nonpositive_integer(const R& a, long* m = nullptr)
{
    using std::floor;
    if (a > 0 || floor(a) != a) return false;
    if (m) *m = -static_cast<long>(static_cast<double>(a));
    return true;
}

template <class R>
R abs_value(const R& x)
{
    using std::abs;
    return abs(x);
}
template <class R>
R abs_value(const std::complex<R>& x)
{
    return std::abs(x);
}

// Compensated accumulator usable with real, complex and multiprecision types.
template <class T>
struct KahanSum {
    T sum{};
    T comp{};
    void add(const T& x)
    {
        T y = x - comp;
        T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

// Generalised hypergeometric series pFq(a; b; z) summed term by term.
// Stops once three consecutive terms fall below eps * |partial sum|, or
// after the last nonzero term when a numerator parameter is a nonpositive
// integer. R is the parameter type, T the argument type (R or complex<R>).
template <class T, class R>
SeriesResult<T> hypergeometric_pfq(std::span<const R> a, std::span<const R> b, const T& z,
                                   std::size_t max_terms = 200000)
{
    using detail::abs_value;
    for (const R& bj : b) {
        if (detail::nonpositive_integer(bj))
            throw PoleError("hypergeometric series: bottom parameter is a nonpositive integer");
    }
    long terminate_at = -1;
    for (const R& ai : a) {
        long m = 0;
        if (detail::nonpositive_integer(ai, &m) && (terminate_at < 0 || m < terminate_at))
            terminate_at = m;
    }
    const auto az = abs_value(z);
    const bool terminating = terminate_at >= 0;
    const std::size_t p = a.size(), q = b.size();
    if (!terminating && az != 0) {
        if (p > q + 1) throw DomainError("hypergeometric series diverges (p > q + 1)");
        if (p == q + 1 && !(az < 1))
            throw DomainError("hypergeometric series: |z| >= 1 and the series does not terminate");
    }

    const R eps = std::numeric_limits<R>::epsilon();
    detail::KahanSum<T> acc;
    T term = T(1);
    acc.add(term);
    SeriesResult<T> out;
    std::size_t k = 0;
    int small_run = 0;
    for (;;) {
        if (terminating && static_cast<long>(k) >= terminate_at) break;
        if (k + 1 >= max_terms) throw NoConvergence("hypergeometric series: term limit reached");
        R ratio_num = R(1), ratio_den = R(k + 1);
        for (const R& ai : a) ratio_num *= ai + R(k);
        for (const R& bj : b) ratio_den *= bj + R(k);
        term = term * T(ratio_num / ratio_den) * z;
        acc.add(term);
        ++k;
        if (!terminating) {
            if (abs_value(term) <= eps * abs_value(acc.sum)) {
                if (++small_run >= 3) break;
            } else {
                small_run = 0;
            }
        }
    }
    out.value = acc.sum;
    out.terms_used = k + 1;
    if (!terminating) {
        R ratio_num = R(1), ratio_den = R(k + 1);
        for (const R& ai : a) ratio_num *= ai + R(k);
        for (const R& bj : b) ratio_den *= bj + R(k);
        R r = abs_value(ratio_num / ratio_den) * az;
        if (p == q + 1 && r < az) r = az;
        const double rd = static_cast<double>(r);
        const double tl = static_cast<double>(abs_value(term));
        out.tail_bound = rd < 1 ? tl * rd / (1 - rd) : std::numeric_limits<double>::infinity();
    }
    return out;
}

// (alpha)_n rising factorial; overflow, if any, yields +-inf and sets *overflow.
double rising_factorial(double alpha, unsigned n, bool* overflow = nullptr);
double falling_factorial(double alpha, unsigned n, bool* overflow = nullptr);

SeriesResult<double> gauss_2f1(double a, double b, double c, double z);
SeriesResult<std::complex<double>> gauss_2f1(double a, double b, double c, std::complex<double> z);
SeriesResult<double> kummer_1f1(double a, double c, double z);
SeriesResult<double> hyper_3f2(double a1, double a2, double a3, double b1, double b2, double z);

// Appell F1(a; b, c; d; z, w), summed as an outer series in z whose
// coefficients are Gauss functions in w.
SeriesResult<double> appell_f1(double a, double b, double c, double d, double z, double w);

// Euler-type integral representations, evaluated by adaptive quadrature.
double gauss_2f1_integral(double a, double b, double c, double z);
double kummer_1f1_integral(double a, double c, double z);
double appell_f1_integral(double a, double b, double c, double d, double z, double w);

// Principal real branch W0 on [0, inf).
double lambert_w(double x);

double log_beta(double a, double b);
double beta_fn(double a, double b);

// I(alpha, beta, gamma, nu; z) = int_0^z y^alpha (1-y)^beta (y+nu)^-gamma dy.
// alpha, beta > -1, nu > 0, z in [0, 1].
double integral_I(double alpha, double beta, double gamma, double nu, double z);
// Closed form at z = 1 through a Gauss function at 1/(1+nu).
double integral_I_at_one(double alpha, double beta, double gamma, double nu);
// Closed form through Appell F1; requires |z| < nu / sqrt(nu^2 + 2 nu).
double integral_I_appell(double alpha, double beta, double gamma, double nu, double z);

}  // namespace bcp
