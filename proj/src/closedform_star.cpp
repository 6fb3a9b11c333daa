#include <cmath>

#include "bcp/closedform.hpp"
#include "bcp/quadrature.hpp"
#include "bcp/specfun.hpp"

namespace bcp {

namespace {

StarRoots roots_unchecked(const ModelParams& p)
{
    const double th = p.theta();
    StarRoots r;
    r.d = std::sqrt((p.sigma + th) * (p.sigma + th) - 4 * p.sigma * p.theta1);
    // x- from the product of the roots to avoid cancellation
    r.x_minus = 2 * p.theta1 / (p.sigma + th + r.d);
    r.x_plus = (p.sigma + th + r.d) / (2 * p.sigma);
    return r;
}

void check_star(const ModelParams& p, double m1)
{
    p.validate();
    if (!(p.sigma > 0)) throw DomainError("star-shaped model needs sigma > 0");
    if (!(m1 > 0)) throw DomainError("star-shaped model needs m1 > 0");
}

quad::Options star_quad()
{
    quad::Options o;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-13;
    return o;
}

// f(z) = (x+ - z)^{e-1} int_0^1 (1-t)^e (x+ - z - (x- - z) t)^{-e} dt, e = m1/d.
quad::Result<double> f_integral(const StarRoots& r, double m1, double z)
{
    const double e = m1 / r.d;
    const double A = r.x_plus - z, B = r.x_minus - z;
    auto g = [&](double t) { return std::pow(1 - t, e) * std::pow(A - B * t, -e); };
    auto res = quad::integrate_endpoints(g, 0.0, 1.0, 0.0, e, star_quad());
    const double pre = std::pow(A, e - 1);
    res.value *= pre;
    res.error *= pre;
    return res;
}

}  // namespace

StarRoots star_roots(const ModelParams& p)
{
    p.validate();
    if (!(p.sigma > 0) || !(p.theta1 > 0)) throw DomainError("star roots need sigma > 0 and theta1 > 0");
    const StarRoots r = roots_unchecked(p);
    if (!(r.x_minus > 0 && r.x_minus < 1) || !(r.x_plus > 1))
        throw RootOrderViolation("roots do not satisfy 0 < x- < 1 < x+ (theta0 = 0 with theta1 >= sigma?)");
    return r;
}

StarP1 star_p1(const ModelParams& p, double m1)
{
    check_star(p, m1);
    if (p.theta1 == 0) {
        return {(p.theta0 + m1) / (p.sigma + p.theta0 + m1), 0.0};
    }
    const StarRoots r = roots_unchecked(p);
    const auto f0 = f_integral(r, m1, 0.0);
    return {1 - f0.value, f0.error};
}

StarP1 star_p1_direct(const ModelParams& p, double m1)
{
    check_star(p, m1);
    const StarRoots r = star_roots(p);
    const double e = m1 / r.d;
    auto g = [&](double u) { return std::pow((1 - u / r.x_minus) / (1 - u / r.x_plus), e); };
    const auto res = quad::integrate_endpoints(g, 0.0, r.x_minus, 0.0, e, star_quad());
    return {1 - p.sigma / p.theta1 * res.value, p.sigma / p.theta1 * res.error};
}

double star_f(const ModelParams& p, double m1, double z)
{
    check_star(p, m1);
    if (p.theta1 == 0) {
        // f = r/(1+x) 2F1(2, 1; 2+x; rz) in Euler form
        const double x = m1 / (p.sigma + p.theta0), r = p.sigma / (p.sigma + p.theta0);
        auto h = [&](double u) {
            const double q = 1 - r * z * (1 - u);
            return r * std::pow(u, x) / (q * q);
        };
        return quad::integrate_endpoints(h, 0.0, 1.0, x, 0.0, star_quad()).value;
    }
    return f_integral(roots_unchecked(p), m1, z).value;
}

ClosedForm star_closed(double m1, const ModelParams& p)
{
    check_star(p, m1);
    ClosedForm out;
    out.pgf.model_tag = "star";
    out.pgf.params = {{"m1", m1}, {"sigma", p.sigma}, {"theta0", p.theta0}, {"theta1", p.theta1}};

    if (p.theta1 == 0) {
        const double sth = p.sigma + p.theta0;
        const double x = m1 / sth, r = p.sigma / sth;
        std::vector<double> probs;
        double a_prev = 1;  // a_{n-1} = (n-1)!/(1+x)_{n-1} r^{n-1}
        for (int n = 1; n < (1 << 22); ++n) {
            probs.push_back((n * p.theta0 + m1) / (n * sth + m1) * a_prev);
            a_prev *= n * r / (x + n);
            if (a_prev < 1e-17) break;
        }
        out.pmf.probs = std::move(probs);
        out.pmf.truncation_K = out.pmf.size();
        out.pmf.tail_bound = a_prev;
        out.pmf.solver_tag = SolverTag::StarClosedTails;
        if (a_prev > 1e-12) out.pmf.warnings.push_back("pmf truncated with tail mass " + std::to_string(a_prev));
        out.pmf.residual = lambda_pmf_residual(LambdaMeasure::star(m1), p, out.pmf.probs,
                                               std::min(out.pmf.size() - 1, 200));
        out.pgf.p1 = out.pmf.p(1);
        out.pgf.evaluate = [x, r](double z) {
            if (z <= 0) return 0.0;
            if (z >= 1) return 1.0;
            // 1 - (1-z) 2F1(1,1;1+x;rz) with the Euler integral for the 2F1, u = 1 - t
            auto h = [&](double u) { return x * std::pow(u, x - 1) * (1 - z) / (1 - r * z * (1 - u)); };
            quad::Options o;
            o.abs_tol = 1e-15;
            o.rel_tol = 1e-13;
            return 1 - quad::integrate_endpoints(h, 0.0, 1.0, x - 1, 0.0, o).value;
        };
        return out;
    }

    const StarRoots r = star_roots(p);
    const StarP1 p1 = star_p1(p, m1);
    StarOptions opt;
    opt.p1 = p1.value;
    out.pmf = solve_star(p, m1, opt);
    out.pgf.p1 = p1.value;
    out.pgf.evaluate = [r, m1](double z) {
        if (z <= 0) return 0.0;
        if (z >= 1) return 1.0;
        return z * (1 - (1 - z) * f_integral(r, m1, z).value);
    };
    return out;
}

std::vector<double> star_series_f(const ModelParams& p, double m1, int K)
{
    check_star(p, m1);
    const StarRoots r = star_roots(p);
    if (!(2 * r.x_minus < r.x_plus))
        throw DomainError("series expansion at 0 requires 2 x- < x+");
    const double e = m1 / r.d, w = r.x_minus / r.x_plus;
    std::vector<double> f(K);
    // f_k = (2)_k / ((e+1)(e+2)_k) x+^{-k-1} 2F1(e, 1+k; e+2+k; x-/x+)
    double c = 1 / ((e + 1) * r.x_plus);
    for (int k = 0; k < K; ++k) {
        f[k] = c * gauss_2f1(e, 1 + k, e + 2 + k, w).value;
        c *= (2.0 + k) / ((e + 2 + k) * r.x_plus);
    }
    return f;
}

StationaryPmf star_series_pmf(const ModelParams& p, double m1, int K)
{
    const auto f = star_series_f(p, m1, K);
    StationaryPmf out;
    out.solver_tag = SolverTag::StarSeries;
    out.probs.resize(K);
    out.probs[0] = 1 - f[0];
    for (int k = 1; k < K; ++k) out.probs[k] = f[k - 1] - f[k];
    out.truncation_K = K;
    out.tail_bound = f[K - 1];
    return out;
}

}  // namespace bcp
