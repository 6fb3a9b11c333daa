#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bcp/errors.hpp"

namespace bcp::quad {

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-13;
    unsigned max_depth = 16;
    // Error estimate above which the result is rejected (relative to L1 norm).
    double fail_rel = 1e-6;
};

template <class K>
struct Result {
    K value{};
    double error = 0;
    double l1 = 0;
};

namespace detail {
inline double mag(double x) { return std::abs(x); }
inline double mag(const std::complex<double>& x) { return std::abs(x); }
}  // namespace detail

// Adaptive 15-point Gauss-Kronrod with bisection down to an absolute tolerance.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {})
    -> Result<decltype(f(0.0))>
{
    using K = decltype(f(0.0));
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    Result<K> r;
    if (a == b) return r;
    double err0 = 0, l10 = 0;
    K coarse = GK::integrate(f, a, b, 0, 1.0, &err0, &l10);
    double scale = std::max(detail::mag(coarse), 1e-300);
    double tol = std::max(opt.rel_tol, opt.abs_tol / scale);
    tol = std::min(tol, 1e-6);
    r.value = GK::integrate(f, a, b, opt.max_depth, tol, &r.error, &r.l1);
    if (!std::isfinite(detail::mag(r.value)))
        throw QuadratureFailure("quadrature produced a non-finite value");
    if (r.error > std::max(opt.abs_tol, opt.fail_rel * r.l1))
        throw QuadratureFailure("quadrature error estimate " + std::to_string(r.error) +
                                " exceeds tolerance");
    return r;
}

// Integral over [a, b] of an integrand behaving like (x-a)^ea near a and
// (b-x)^eb near b, split at the midpoint. Each half is integrated in the
// distance t to its endpoint with tanh-sinh, which absorbs algebraic endpoint
// behaviour of any order.
template <class F>
auto integrate_endpoints(F&& f, double a, double b, double ea, double eb, const Options& opt = {})
    -> Result<decltype(f(0.0))>
{
    using K = decltype(f(0.0));
    if (!(ea > -1) || !(eb > -1))
        throw IntegrabilityError("endpoint exponent <= -1: integral diverges");
    if (a == b) return {};
    const double h = 0.5 * (b - a);
    // When a +- t rounds, f is evaluated at the representable point and
    // rescaled to distance t with the declared endpoint power.
    auto left = [&](double t) -> K {
        double x = a + t;
        if (x <= a) x = std::nextafter(a, b);
        const double tr = x - a;
        return tr == t || ea == 0 ? f(x) : f(x) * std::pow(t / tr, ea);
    };
    auto right = [&](double t) -> K {
        double x = b - t;
        if (x >= b) x = std::nextafter(b, a);
        const double tr = b - x;
        return tr == t || eb == 0 ? f(x) : f(x) * std::pow(t / tr, eb);
    };
    boost::math::quadrature::tanh_sinh<double> ts(opt.max_depth);
    auto half = [&](auto&& g) {
        Result<K> r;
        const double tol = std::max(opt.rel_tol, 1e-15);
        r.value = ts.integrate(g, 0.0, h, tol, &r.error, &r.l1);
        if (!std::isfinite(detail::mag(r.value)))
            throw QuadratureFailure("quadrature produced a non-finite value");
        if (r.error > std::max(opt.abs_tol, opt.fail_rel * r.l1))
            throw QuadratureFailure("quadrature error estimate " + std::to_string(r.error) +
                                    " exceeds tolerance");
        return r;
    };
    auto l = half(left);
    auto rr = half(right);
    Result<K> out;
    out.value = l.value + rr.value;
    out.error = l.error + rr.error;
    out.l1 = l.l1 + rr.l1;
    return out;
}

}  // namespace bcp::quad
