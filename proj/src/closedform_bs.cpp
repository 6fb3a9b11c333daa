#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "bcp/closedform.hpp"
#include "bcp/specfun.hpp"

namespace bcp {

namespace {

void check_bs(const ModelParams& p)
{
    p.validate();
    if (!(p.sigma > 0)) throw DomainError("Bolthausen-Sznitman rho needs sigma > 0");
}

}  // namespace

// With t = log(1 - rho) the root condition becomes
//   h(t) = sigma + t - theta1 (1 - e^t) - theta0 (e^{-t} - 1) = 0,  t < 0,
// and h is strictly increasing with h(0) = sigma > 0.
double bs_rho(const ModelParams& p)
{
    check_bs(p);
    auto h = [&](double t) { return p.sigma + t + p.theta1 * std::expm1(t) - p.theta0 * std::expm1(-t); };
    double lo = -1;
    while (h(lo) >= 0) {
        lo *= 2;
        if (lo < -1e6) throw NoConvergence("bs_rho: failed to bracket the root");
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(h, lo, 0.0, h(lo), p.sigma,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    const double t = 0.5 * (r.first + r.second);
    return -std::expm1(t);
}

double bs_rho_lambert(const ModelParams& p)
{
    check_bs(p);
    if (p.theta0 == 0 && p.theta1 == 0) return -std::expm1(-p.sigma);
    if (p.theta0 == 0) return 1 - lambert_w(p.theta1 * std::exp(p.theta1 - p.sigma)) / p.theta1;
    if (p.theta1 == 0) return 1 - p.theta0 / lambert_w(p.theta0 * std::exp(p.theta0 + p.sigma));
    return std::numeric_limits<double>::quiet_NaN();
}

double bs_rho_identity_residual(const ModelParams& p, double rho)
{
    const double lhs = -std::log1p(-rho) / rho;
    const double rhs = (p.theta1 * rho * rho - (p.sigma + p.theta()) * rho + p.sigma) / (rho * (1 - rho));
    return lhs - rhs;
}

}  // namespace bcp
