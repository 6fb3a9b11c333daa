#pragma once

#include <cmath>
#include <functional>

#include "bcp/quadrature.hpp"

namespace bcp::detail {

// Integral of exp(ey log y + e1 log(1-y) + smooth(y) - shift) over (0, 1),
// split at the interior maximum of the log integrand so that sharply peaked
// integrands (large population sizes) are resolved.
struct LogIntegrand {
    double ey = 0, e1 = 0;
    std::function<double(double)> smooth;
    double operator()(double y) const { return ey * std::log(y) + e1 * std::log1p(-y) + smooth(y); }
};

inline double argmax_on_grid(const LogIntegrand& f, int n = 4096)
{
    double best = -INFINITY, arg = 0.5;
    for (int j = 0; j < n; ++j) {
        const double y = (j + 0.5) / n;
        const double v = f(y);
        if (v > best) {
            best = v;
            arg = y;
        }
    }
    return arg;
}

inline double scaled_integral(const LogIntegrand& f, double shift, double split)
{
    quad::Options opt;
    opt.abs_tol = 1e-17;
    opt.rel_tol = 2e-14;
    auto g = [&](double y) { return std::exp(f(y) - shift); };
    // right piece in u = 1 - y so that points near y = 1 keep full precision
    auto g1 = [&](double u) {
        return std::exp(f.ey * std::log1p(-u) + f.e1 * std::log(u) + f.smooth(1 - u) - shift);
    };
    const double left = quad::integrate_endpoints(g, 0.0, split, f.ey, 0.0, opt).value;
    const double right = quad::integrate_endpoints(g1, 0.0, 1.0 - split, f.e1, 0.0, opt).value;
    return left + right;
}

// Solution of a first-order linear pgf ODE by variation of constants:
//   g(z) = pref * int_0^z (r - xi) exp(Phi(xi) - Phi(z)) w(xi) / (1 - xi) dxi
// with Phi(x) = a log x + b log(1-x) + psi(x), integrand ~ xi^a at 0 and
// (1-xi)^(b-1) at 1. For z <= r every term is positive on [0, z]; beyond r
// the vanishing of the full integral is used to integrate over [z, 1]
// instead, where every term is negative.
struct VariationOfConstants {
    double pref = 1, r = 0.5, a = 0, b = 1;
    std::function<double(double)> psi;  // smooth part of Phi
    std::function<double(double)> w;    // smooth weight

    double operator()(double z) const
    {
        if (z <= 0) return 0.0;
        if (z >= 1) return 1.0;
        quad::Options opt;
        opt.abs_tol = 1e-15;
        opt.rel_tol = 1e-13;
        const double psi_z = psi(z);
        if (z <= r) {
            auto f = [&](double t) {
                const double xi = z * t;
                const double e = a * std::log(t) + b * (std::log1p(-xi) - std::log1p(-z)) + psi(xi) - psi_z;
                return (r - xi) * std::exp(e) * w(xi) / (1 - xi);
            };
            return pref * z * quad::integrate_endpoints(f, 0.0, 1.0, a, 0.0, opt).value;
        }
        auto f = [&](double t) {
            const double xi = 1 - (1 - z) * t;
            const double e = a * (std::log(xi) - std::log(z)) + (b - 1) * std::log(t) + psi(xi) - psi_z;
            return (xi - r) * std::exp(e) * w(xi);
        };
        return pref * quad::integrate_endpoints(f, 0.0, 1.0, b - 1, 0.0, opt).value;
    }
};

}  // namespace bcp::detail
