#include <array>
#include <cmath>
#include <variant>

#include <boost/math/differentiation/finite_difference.hpp>

#include "bcp/closedform.hpp"
#include "bcp/quadrature.hpp"
#include "bcp/specfun.hpp"
#include "interior_view.hpp"

namespace bcp {

namespace {

quad::Options inner_opts()
{
    quad::Options o;
    o.abs_tol = 1e-13;
    o.rel_tol = 1e-12;
    o.max_depth = 10;  // integrands may themselves be quadratures with ~1e-13 noise
    return o;
}

double derivative(const PgfEvaluator& g, double z)
{
    auto f = [&](double x) { return g(x); };
    return boost::math::differentiation::finite_difference_derivative<decltype(f), double, 4>(f, z);
}

// int_0^z (u - g(u)) / (u (1 - u)) du
double star_integral(const PgfEvaluator& g, double z)
{
    auto f = [&](double u) { return (u - g(u)) / (u * (1 - u)); };
    return quad::integrate(f, 0.0, z, inner_opts()).value;
}

double poly(const ModelParams& p, double z) { return p.sigma * z * z - p.theta() * z - p.sigma * z + p.theta1; }

MasterEquation pick(const LambdaMeasure& m)
{
    if (m.is_zero()) return MasterEquation::CrowKimura;
    if (m.interior_is_zero() && m.m1() == 0) return MasterEquation::WrightFisherOde;
    if (m.interior_is_zero() && m.m0() == 0) return MasterEquation::StarDess;
    if (m.m0() == 0 && m.m1() == 0 && std::holds_alternative<UniformScaled>(m.interior()))
        return MasterEquation::Carleman;
    return MasterEquation::MasterII;
}

// Bracket of the interior merger term divided by xi^2.
double bracket_over_xi2(const PgfEvaluator& g, double z, double xi)
{
    auto phi = [&](double u) { return (u - g(u)) / (u * (1 - u)); };
    auto psi = [&](double u) { return (1 - g(u)) / (1 - u); };
    const auto o = inner_opts();
    const double lo = z * (1 - xi);
    const double A = quad::integrate(phi, lo, z, o).value;
    const double B = quad::integrate(psi, lo, xi + lo, o).value;
    const double C = quad::integrate(psi, 0.0, xi, o).value;
    return (A - B + C) / (xi * xi);
}

double interior_term(const PgfEvaluator& g, const LambdaMeasure& m, double z)
{
    constexpr double xi_min = 1e-3;
    const double v1 = bracket_over_xi2(g, z, xi_min), v2 = bracket_over_xi2(g, z, 2 * xi_min);
    auto b = [&](double xi) {
        if (xi >= xi_min) return bracket_over_xi2(g, z, xi);
        return v1 + (xi - xi_min) * (v2 - v1) / xi_min;
    };
    const auto iv = detail::view(m);
    if (iv.is_atomic()) {
        double s = 0;
        for (const auto& a : iv.atoms) s += a.mass * b(a.x);
        return s;
    }
    auto f = [&](double xi) { return iv.density(xi) * b(xi); };
    quad::Options o;
    o.abs_tol = 1e-11;
    o.rel_tol = 1e-10;
    return quad::integrate_endpoints(f, 0.0, 1.0, std::min(iv.e0, 0.0), std::min(iv.e1, 0.0), o).value;
}

double residual_at(const PgfEvaluator& g, const LambdaMeasure& m, const ModelParams& p, MasterEquation eq,
                   double z)
{
    const double gz = g(z), p1 = g.p1, P = poly(p, z), w = z * (1 - z);
    switch (eq) {
    case MasterEquation::CrowKimura:
        return P * gz - z * (p.theta1 * p1 * (1 - z) - p.theta0 * z);
    case MasterEquation::WrightFisherOde:
        return 0.5 * m.m0() * w * derivative(g, z) + P * gz - (0.5 * m.m0() + p.theta1) * p1 * w +
               p.theta0 * z * z;
    case MasterEquation::StarDess:
        return m.m1() * w * star_integral(g, z) + P * gz - p.theta1 * p1 * w + p.theta0 * z * z;
    case MasterEquation::Carleman: {
        const double c = std::get<UniformScaled>(m.interior()).c;
        const double x = z;
        auto rho = [&](double t) { return g(t) / t; };
        const double alpha =
            p.sigma + c * (std::log1p(-x) - std::log(x)) - p.theta1 / x + p.theta0 / (1 - x);
        const double f = p.theta0 / (1 - x) - p.theta1 * p1 / x;
        return alpha * rho(x) - c * principal_value(rho, x) - f;
    }
    case MasterEquation::MasterII:
    case MasterEquation::Auto: {
        double lhs = P * gz - (0.5 * m.m0() + p.theta1) * p1 * w + p.theta0 * z * z;
        if (m.m0() > 0) lhs += 0.5 * m.m0() * w * derivative(g, z);
        if (m.m1() > 0) lhs += m.m1() * w * star_integral(g, z);
        if (!m.interior_is_zero()) lhs += w * interior_term(g, m, z);
        return lhs;
    }
    }
    return NAN;
}

}  // namespace

std::string to_string(MasterEquation e)
{
    switch (e) {
    case MasterEquation::Auto: return "auto";
    case MasterEquation::CrowKimura: return "crow_kimura";
    case MasterEquation::WrightFisherOde: return "wright_fisher_ode";
    case MasterEquation::StarDess: return "star_dess";
    case MasterEquation::Carleman: return "carleman";
    case MasterEquation::MasterII: return "master_ii";
    }
    return "unknown";
}

MasterCheck verify_master_equation(const PgfEvaluator& g, const LambdaMeasure& m, const ModelParams& p,
                                   std::span<const double> z_grid, MasterEquation eq)
{
    MasterCheck out;
    out.equation = eq == MasterEquation::Auto ? pick(m) : eq;
    if (out.equation == MasterEquation::Carleman && !std::holds_alternative<UniformScaled>(m.interior()))
        throw DomainError("the Carleman equation applies to a uniform interior measure only");
    for (double z : z_grid) {
        if (!(z > 0 && z < 1)) throw DomainError("master equation grid points must lie in (0, 1)");
        const double r = residual_at(g, m, p, out.equation, z);
        out.residuals.push_back(r);
        out.max_residual = std::max(out.max_residual, std::abs(r));
    }
    return out;
}

MasterCheck verify_moran_ode(const PgfEvaluator& g, const MoranParams& p, std::span<const double> z_grid)
{
    p.validate();
    MasterCheck out;
    out.equation = MasterEquation::Auto;
    for (double z : z_grid) {
        if (!(z > 0 && z < 1)) throw DomainError("grid points must lie in (0, 1)");
        const double w = z * (1 - z);
        const double r = w * (1 + p.s * z) * derivative(g, z) +
                         p.N * (p.s * z * z - (p.s + p.u()) * z + p.u1) * g(z) -
                         (1 + p.N * p.u1) * g.p1 * w + p.N * p.u0 * z * z;
        out.residuals.push_back(r);
        out.max_residual = std::max(out.max_residual, std::abs(r));
    }
    return out;
}

double principal_value(const std::function<double(double)>& f, double x)
{
    if (!(x > 0 && x < 1)) throw DomainError("principal value needs x in (0, 1)");
    const double delta = std::min(x, 1 - x);
    quad::Options o;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-13;
    // Outer part beyond the symmetric window [x - delta, x + delta].
    auto g = [&](double t) { return f(t) / (t - x); };
    double outer = 0;
    if (x - delta > 0) outer += quad::integrate(g, 0.0, x - delta, o).value;
    if (x + delta < 1) outer += quad::integrate(g, x + delta, 1.0, o).value;
    // Symmetric window with the excision radius eps folded onto (eps, delta).
    auto sym = [&](double s) { return (f(x + s) - f(x - s)) / s; };
    auto excised = [&](double eps) { return outer + quad::integrate(sym, eps, delta, o).value; };
    std::array<double, 3> eps{1e-2, 1e-3, 1e-4}, val{};
    for (int i = 0; i < 3; ++i) {
        eps[i] = std::min(eps[i], 0.5 * delta * std::pow(10.0, -i));
        val[i] = excised(eps[i]);
    }
    // Fit I(eps) = PV + c1 eps + c3 eps^3 through the three radii.
    const double e0 = eps[0], e1 = eps[1], e2 = eps[2];
    const double d01 = (val[0] - val[1]) / (e0 - e1);
    const double d12 = (val[1] - val[2]) / (e1 - e2);
    // d_ij = c1 + c3 (ei^2 + ei ej + ej^2)
    const double s01 = e0 * e0 + e0 * e1 + e1 * e1, s12 = e1 * e1 + e1 * e2 + e2 * e2;
    const double c3 = (d01 - d12) / (s01 - s12);
    const double c1 = d01 - c3 * s01;
    return val[2] - c1 * e2 - c3 * e2 * e2 * e2;
}

PgfEvaluator pgf_from_pmf(const StationaryPmf& pmf, std::string tag)
{
    PgfEvaluator g;
    g.model_tag = std::move(tag);
    g.p1 = pmf.p(1);
    g.p2 = pmf.p(2);
    const auto probs = pmf.probs;
    g.evaluate = [probs](double z) {
        double v = 0;
        for (std::size_t i = probs.size(); i-- > 0;) v = (v + probs[i]) * z;
        return v;
    };
    return g;
}

}  // namespace bcp
