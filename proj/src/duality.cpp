#include "bcp/duality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace bcp {

// ---- stationary moments

std::vector<double> solve_w_moments_fixed_K(const LambdaMeasure& m, const ModelParams& p, int K)
{
    if (K < 1) throw DomainError("K must be positive");
    const double sigma = p.sigma, theta1 = p.theta1;

    // Row n:  d_n w_n = theta1 w_{n-1} + sigma w_{n+1} + sum_{l<n} r_{n,l} w_l,
    // r_{n,l} = binom(n, n-l+1) lambda_{n,n-l+1} / n, w_0 = 1, w_{K+1} = 0.
    // Eliminated from the bottom: w_n = alpha_n + sum_{1<=l<n} beta_{n,l} w_l.
    // Strict diagonal dominance (theta0 > 0) keeps every quantity nonnegative.
    std::vector<double> alpha(K + 1, 0.0);
    std::vector<std::vector<double>> beta(K + 1);
    for (int n = K; n >= 1; --n) {
        std::vector<double> c(n, 0.0);  // c[l] multiplies w_l, l = 0..n-1
        double d = p.theta() + sigma;
        for (int l = 1; l < n; ++l) {
            const double r = merge_rate(m, n, n - l + 1) / n;
            c[l] += r;
            d += r;
        }
        c[n - 1] += theta1;
        double a = 0;
        if (n < K) {
            const auto& b = beta[n + 1];
            a = sigma * alpha[n + 1];
            d -= sigma * b[n];
            for (int l = 1; l < n; ++l) c[l] += sigma * b[l];
        }
        alpha[n] = (a + c[0]) / d;
        c[0] = 0;
        for (auto& x : c) x /= d;
        beta[n] = std::move(c);
    }
    std::vector<double> w(K + 1);
    w[0] = 1;
    for (int n = 1; n <= K; ++n) {
        double v = alpha[n];
        for (int l = 1; l < n; ++l) v += beta[n][l] * w[l];
        w[n] = v;
    }
    return w;
}

namespace {

double moment_residual(const LambdaMeasure& m, const ModelParams& p, const std::vector<double>& w, int n_max)
{
    double worst = 0;
    const int K = static_cast<int>(w.size()) - 1;
    for (int n = 1; n <= std::min(n_max, K); ++n) {
        double lhs = p.theta() + p.sigma, rhs = p.theta1 * w[n - 1] + (n < K ? p.sigma * w[n + 1] : 0.0);
        for (int l = 1; l < n; ++l) {
            const double r = merge_rate(m, n, n - l + 1) / n;
            lhs += r;
            rhs += r * w[l];
        }
        worst = std::max(worst, std::abs(lhs * w[n] - rhs));
    }
    return worst;
}

}  // namespace

MomentSequence solve_w_moments(const LambdaMeasure& m, const ModelParams& p, const MomentOptions& opt)
{
    p.validate();
    if (!(p.theta0 > 0 && p.theta1 > 0)) throw DomainError("stationary moments need theta0 > 0 and theta1 > 0");
    int K = std::max(opt.K, 8);
    auto prev = solve_w_moments_fixed_K(m, p, K);
    for (;;) {
        if (2 * K > opt.K_cap) throw NoConvergence("moment recursion did not stabilise below the K cap");
        auto cur = solve_w_moments_fixed_K(m, p, 2 * K);
        const int head = K / 2;  // a quarter of the larger truncation
        double diff = 0;
        for (int n = 0; n <= head; ++n) diff = std::max(diff, std::abs(cur[n] - prev[n]));
        if (diff < opt.tol) {
            MomentSequence out;
            out.truncation_K = 2 * K;
            out.closure_sensitivity = diff;
            out.residual = moment_residual(m, p, cur, 2 * K);
            out.w.assign(cur.begin(), cur.begin() + head + 1);
            // Hausdorff: (-Delta)^n w_k >= 0 for n + k <= 12
            const int len = static_cast<int>(out.w.size());
            for (int k = 0; k <= 12 && k < len; ++k) {
                std::vector<double> d(out.w.begin() + k, out.w.end());
                for (int n = 1; n + k <= 12 && n < len - k; ++n) {
                    for (int i = 0; i + n < len - k; ++i) d[i] -= d[i + 1];
                    out.monotonicity_defect = std::min(out.monotonicity_defect, d[0]);
                }
            }
            out.completely_monotone = out.monotonicity_defect >= -1e-10;
            return out;
        }
        prev = std::move(cur);
        K *= 2;
    }
}

// ---- generating function for the uniform measure

double bs_phi(double s)
{
    if (s == 0) return 0;
    if (s == 1) return 1;
    return 1 + (1 - s) * std::log1p(-s) / s;
}

namespace {

struct BsOde {
    double sigma, theta, theta1;
    template <class T>
    T h(T s) const
    {
        return theta * s - theta1 * s * s - sigma * (1.0 - s) - (1.0 - s) * log1m(s);
    }
    // With w = s v:  h v' = N v + theta1,  N(s) = 2 theta1 s - theta - sigma - log(1-s).
    template <class T>
    T N(T s) const
    {
        return 2 * theta1 * s - theta - sigma - log1m(s);
    }
    static double log1m(double s) { return std::log1p(-s); }
    static std::complex<double> log1m(std::complex<double> s) { return std::log(1.0 - s); }
};

void check_bs_gen(const ModelParams& p)
{
    p.validate();
    if (!(p.theta0 > 0 && p.theta1 > 0)) throw DomainError("generating function needs theta0 > 0 and theta1 > 0");
    if (!(p.sigma > 0)) throw DomainError("generating function needs sigma > 0");
}

// Analytic solution of h v' = N v + theta1 at s2 as a power series in s - s2.
struct SeriesAtS2 {
    std::vector<double> c;
    double radius = 0;
    double operator()(double s) const
    {
        const double t = s - center;
        double v = 0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
        return v;
    }
    double center = 0;
};

SeriesAtS2 series_at_s2(const BsOde& o, double s2)
{
    const double u = 1 - s2;
    constexpr int kMax = 400;
    std::vector<double> h(kMax + 2, 0.0), N(kMax + 2, 0.0);
    h[1] = o.theta - 2 * o.theta1 * s2 + o.sigma + std::log1p(-s2) + 1;
    h[2] = -o.theta1 - 0.5 / u;
    for (int k = 3; k <= kMax + 1; ++k) h[k] = -1.0 / (double(k) * (k - 1) * std::pow(u, k - 1));
    N[0] = o.N(s2);
    N[1] = 2 * o.theta1 + 1 / u;
    for (int k = 2; k <= kMax + 1; ++k) N[k] = 1.0 / (k * std::pow(u, k));

    SeriesAtS2 out;
    out.center = s2;
    out.radius = 0.25 * std::min(s2, u);
    auto& c = out.c;
    for (int k = 0; k < kMax; ++k) {
        double rhs = k == 0 ? o.theta1 : 0.0;
        for (int j = 1; j <= k; ++j) rhs += N[j] * c[k - j];
        for (int j = 2; j <= k + 1; ++j) rhs -= h[j] * (k + 1 - j) * c[k + 1 - j];
        const double den = h[1] * k - N[0];
        if (std::abs(den) < 1e-12) throw NoConvergence("resonant exponent at the singular point");
        c.push_back(rhs / den);
        if (k > 8 && std::abs(c[k]) * std::pow(out.radius, k) < 1e-18 * std::abs(c[0])) break;
    }
    if (std::abs(c.back()) * std::pow(out.radius, c.size() - 1) > 1e-12 * std::abs(c[0]))
        throw NoConvergence("series at the singular point did not converge");
    return out;
}

}  // namespace

double bs_singular_point(const ModelParams& p)
{
    check_bs_gen(p);
    const BsOde o{p.sigma, p.theta(), p.theta1};
    auto h = [&](double s) { return o.h(s); };
    std::uintmax_t iters = 200;
    const double hi = 1 - 1e-15;
    const auto r = boost::math::tools::toms748_solve(h, 0.0, hi, h(0.0), h(hi),
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

BsGenerating bs_w_generating(const ModelParams& p, std::span<const double> s_grid, int n_taylor)
{
    check_bs_gen(p);
    const BsOde o{p.sigma, p.theta(), p.theta1};
    BsGenerating out;
    out.s2 = bs_singular_point(p);
    for (double s : s_grid)
        if (!(s >= 0 && s < out.s2)) throw DomainError("generating function is evaluated on [0, s2)");
    const auto ser = series_at_s2(o, out.s2);
    const double s_start = out.s2 - ser.radius;

    namespace oi = boost::numeric::odeint;
    using State = std::array<double, 1>;
    auto rhs = [&](const State& v, State& dv, double s) { dv[0] = (o.N(s) * v[0] + o.theta1) / o.h(s); };
    auto v_at = [&](double s) {
        if (std::abs(s - out.s2) <= ser.radius) return ser(s);
        const double s0 = s < out.s2 ? s_start : out.s2 + ser.radius;
        State v{ser(s0)};
        auto stepper = oi::make_controlled(1e-14, 1e-12, oi::runge_kutta_dopri5<State>());
        oi::integrate_adaptive(stepper, rhs, v, s0, s, s < s0 ? -1e-3 : 1e-3);
        return v[0];
    };

    out.s.assign(s_grid.begin(), s_grid.end());
    for (double s : s_grid) out.values.push_back(s * v_at(s));

    // Taylor head by a trapezoidal Cauchy integral of v on |s| = R, R in (s2, 1),
    // the ODE being continued along the circle from the real point R.
    out.taylor.push_back(1.0);
    if (n_taylor <= 0) return out;
    const int M = 128;
    const double R = 0.5 * (1 + out.s2);
    using C2 = std::array<double, 2>;
    auto crhs = [&](const C2& y, C2& dy, double phi) {
        const std::complex<double> e = std::polar(1.0, phi), s = R * e, v(y[0], y[1]);
        const std::complex<double> d = (o.N(s) * v + o.theta1) / o.h(s) * std::complex<double>(0, R) * e;
        dy[0] = d.real();
        dy[1] = d.imag();
    };
    std::vector<std::complex<double>> vs(M);
    C2 y{v_at(R), 0.0};
    vs[0] = y[0];
    auto cstep = oi::make_controlled(1e-14, 1e-12, oi::runge_kutta_dopri5<C2>());
    const double dphi = 2 * M_PI / M;
    for (int j = 1; j <= M; ++j) {
        oi::integrate_adaptive(cstep, crhs, y, (j - 1) * dphi, j * dphi, 1e-3);
        if (j < M) vs[j] = {y[0], y[1]};
    }
    out.contour_closure = std::abs(std::complex<double>(y[0], y[1]) - vs[0]);
    std::vector<double> c;
    for (int k = 0; k < n_taylor; ++k) {
        std::complex<double> acc = 0;
        for (int j = 0; j < M; ++j) acc += vs[j] * std::polar(1.0, -k * j * dphi);
        c.push_back(acc.real() / M / std::pow(R, k));
    }
    for (int n = 1; n <= n_taylor; ++n) out.taylor.push_back(c[n - 1]);
    return out;
}

double bs_stieltjes(const ModelParams& p, double t)
{
    const double s2 = bs_singular_point(p);
    if (!(t > 1 / s2)) throw DomainError("Stieltjes transform needs t > 1/s2");
    const double s = 1 / t;
    const auto g = bs_w_generating(p, std::span<const double>(&s, 1), 0);
    return (1 + g.values[0]) / t;
}

// ---- absorption and fixation

double bs_absorption(double x, double sigma)
{
    if (!(x >= 0 && x <= 1)) throw DomainError("x must lie in [0, 1]");
    if (!(sigma > 0)) throw DomainError("sigma must be positive");
    const double e = std::exp(-sigma);
    return (1 - x) * e / (x + (1 - x) * e);
}

double bs_absorption_geometric(double x, double sigma)
{
    if (!(x >= 0 && x <= 1)) throw DomainError("x must lie in [0, 1]");
    const double rho = -std::expm1(-sigma);
    return (1 - rho) * (1 - x) / (1 - rho * (1 - x));
}

double kimura_fixation(double x, double sigma, double m0)
{
    if (!(x >= 0 && x <= 1)) throw DomainError("x must lie in [0, 1]");
    if (!(sigma > 0 && m0 > 0)) throw DomainError("sigma and m0 must be positive");
    const double lam = 2 * sigma / m0;
    return std::expm1(-lam * x) / std::expm1(-lam);
}

double kimura_fixation_poisson(double x, double sigma, double m0)
{
    if (!(x >= 0 && x <= 1)) throw DomainError("x must lie in [0, 1]");
    if (!(sigma > 0 && m0 > 0)) throw DomainError("sigma and m0 must be positive");
    const double lam = 2 * sigma / m0;
    // E[(1-x)^L; L > 0] summed term by term
    double term = std::exp(-lam), sum = 0;
    for (int k = 1; k < 100000; ++k) {
        term *= lam * (1 - x) / k;
        sum += term;
        if (term < 1e-18 * sum || term == 0) break;
    }
    return 1 - sum / -std::expm1(-lam);
}

double moran_fixation(int k, int N, double s)
{
    if (N < 1 || k < 1 || k > N) throw DomainError("moran_fixation needs 1 <= k <= N");
    if (!(s > 0)) throw DomainError("s must be positive");
    const double L = std::log1p(s);
    return std::expm1(-k * L) / std::expm1(-N * L);
}

double ancestral_type_h(const PgfEvaluator& g, double x)
{
    if (!(x >= 0 && x <= 1)) throw DomainError("x must lie in [0, 1]");
    return 1 - g(1 - x);
}

double ancestral_type_h_tails(const StationaryPmf& pmf, double x)
{
    if (!(x >= 0 && x <= 1)) throw DomainError("x must lie in [0, 1]");
    const auto a = pmf.tails();
    double s = 0, q = 1;
    for (double an : a) {
        s += x * q * an;
        q *= 1 - x;
    }
    return s;
}

}  // namespace bcp
