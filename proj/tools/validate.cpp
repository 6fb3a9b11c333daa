#include "validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>

#include <fmt/format.h>

#include "bcp/closedform.hpp"
#include "bcp/duality.hpp"
#include "bcp/geomfix.hpp"
#include "bcp/measures.hpp"
#include "bcp/recursions.hpp"
#include "bcp/simulate.hpp"
#include "bcp/specfun.hpp"

namespace bcp::validate {

namespace {

using Clock = std::chrono::steady_clock;

Result start(int id, std::string title)
{
    Result r;
    r.id = id;
    r.title = std::move(title);
    return r;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sup(const std::vector<double>& a, const std::vector<double>& b) { return sup_distance(a, b); }

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::vector<double> geometric_pmf(double rho, double floor = 1e-18)
{
    std::vector<double> p;
    double v = 1 - rho;
    while (v > floor || p.empty()) {
        p.push_back(v);
        v *= rho;
    }
    return p;
}

std::vector<double> z_grid(int n)
{
    std::vector<double> z;
    for (int i = 1; i <= n; ++i) z.push_back(double(i) / (n + 1));
    return z;
}

// E[(L - shift)_n falling] computed directly from a pmf
double falling_moment(const StationaryPmf& pmf, int n, int shift)
{
    double s = 0;
    for (int L = 1; L <= pmf.size(); ++L) {
        double f = 1;
        for (int i = 0; i < n; ++i) f *= L - shift - i;
        s += f * pmf.p(L);
    }
    return s;
}

std::vector<MoranParams> moran_grid(int count)
{
    std::mt19937_64 eng(20240611);
    std::uniform_int_distribution<int> N(2, 50);
    std::uniform_real_distribution<double> s(0.1, 2.0), u(0.0, 1.0);
    std::vector<MoranParams> out;
    for (int i = 0; i < count; ++i) {
        MoranParams p;
        p.N = N(eng);
        p.s = s(eng);
        p.u0 = u(eng);
        p.u1 = u(eng);
        if (i % 5 == 1) p.u0 = 0;
        if (i % 5 == 2) p.u1 = 0;
        out.push_back(p);
    }
    return out;
}

std::vector<ModelParams> cube_grid()
{
    std::vector<ModelParams> out;
    for (double a : {0.5, 1.0, 2.0})
        for (double b : {0.5, 1.0, 2.0})
            for (double c : {0.5, 1.0, 2.0}) out.push_back({a, b, c});
    return out;
}

// Runs f(i) for i in [0, n); the first exception is rethrown after the loop.
template <class F>
void for_each_index(int n, par::Exec exec, F&& f)
{
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (exec == par::Exec::Parallel)
    for (int i = 0; i < n; ++i) {
        try {
            f(i);
        } catch (...) {
#pragma omp critical(bcp_validate_err)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

const std::vector<std::pair<std::string, LambdaMeasure>>& negative_models()
{
    static const std::vector<std::pair<std::string, LambdaMeasure>> models{
        {"Kingman", LambdaMeasure::kingman(2)}, {"star", LambdaMeasure::star(1)},
        {"beta(2,1)", LambdaMeasure::beta(2, 1)}, {"beta(1,2)", LambdaMeasure::beta(1, 2)},
        {"beta(3,1)", LambdaMeasure::beta(3, 1)}};
    return models;
}

std::vector<int> negative_rho_grid(int step)
{
    std::vector<int> g;
    for (int i = 1; i <= 99; i += step) g.push_back(i);
    return g;
}

// ---- criteria

Result c1_moran_triple(Suite s)
{
    Result r = start(1, "Moran triple agreement");
    const auto t0 = Clock::now();
    const int count = s == Suite::Full ? 50 : 15;
    const double worst = moran_grid_sweep(count);
    r.seconds = since(t0);
    r.pass = worst <= 1e-9 && r.seconds < 5;
    r.detail = fmt::format("{} sets, max pairwise sup {:.3g} (tol 1e-9), {:.2f} s (limit 5)", count, worst,
                           r.seconds);
    return r;
}

Result c2_moran_simulation(Suite s)
{
    Result r = start(2, "Moran simulation occupancy");
    const auto t0 = Clock::now();
    const MoranParams p{10, 0.5, 0.1, 0.1};
    const long events = s == Suite::Full ? 1'000'000 : 200'000;
    const auto path = sim::simulate_moran_L(p, 1, events, 42);
    const auto occ = sim::occupancy(path, 0.2);
    const double tv = sim::tv_distance(occ, solve_moran(p));
    r.seconds = since(t0);
    r.pass = tv <= 0.01 && r.seconds < 10;
    r.detail = fmt::format("{} events, TV {:.4f} (tol 0.01), {:.2f} s (limit 10)", events, tv, r.seconds);
    return r;
}

Result c3_kingman(Suite)
{
    Result r = start(3, "Kingman recursion vs closed form");
    const auto t0 = Clock::now();
    double worst = 0, worst_poisson = 0;
    for (const auto& p : cube_grid()) {
        const auto a = solve_lambda_truncated(LambdaMeasure::kingman(2), p).probs;
        const auto b = wf_closed(2, p).pmf.probs;
        worst = std::max(worst, sup(a, b));
    }
    for (double sigma : {0.5, 1.0, 2.0}) {
        const auto c = wf_closed(2, {sigma, 0, 0}).pmf;
        std::vector<double> poisson;
        for (int n = 1; n <= std::max(c.size(), 60); ++n)
            poisson.push_back(std::exp(n * std::log(sigma) - sigma - std::lgamma(n + 1.0)) / -std::expm1(-sigma));
        worst_poisson = std::max(worst_poisson, sup(c.probs, poisson));
    }
    r.seconds = since(t0);
    r.pass = worst <= 1e-8 && worst_poisson <= 1e-12;
    r.detail = fmt::format("27 sets sup {:.3g} (tol 1e-8); theta=0 vs conditioned Poisson {:.3g} (tol 1e-12)", worst,
                           worst_poisson);
    return r;
}

Result c4_moran_to_wf(Suite)
{
    Result r = start(4, "Moran to Wright-Fisher convergence");
    const auto t0 = Clock::now();
    const ModelParams p{1, 0.5, 0.5};
    const auto limit = wf_closed(2, p).pmf.probs;
    std::vector<double> d;
    for (int N : {100, 1000, 10000}) {
        const MoranParams q{N, p.sigma / N, p.theta0 / N, p.theta1 / N};
        d.push_back(sup(solve_moran(q).probs, limit));
    }
    r.seconds = since(t0);
    r.pass = d[1] < d[0] && d[2] < d[1];
    r.detail = fmt::format("sup distance N=1e2 {:.3g}, 1e3 {:.3g}, 1e4 {:.3g} (strictly decreasing)", d[0], d[1], d[2]);
    return r;
}

Result c5_bs_geometry(Suite)
{
    Result r = start(5, "Bolthausen-Sznitman geometric law");
    const auto t0 = Clock::now();
    const ModelParams p{1, 0.5, 0.5};
    const double rho = bs_rho(p);
    const auto pmf = solve_lambda_truncated(LambdaMeasure::uniform(), p);
    const double d = sup(pmf.probs, geometric_pmf(rho));
    const auto g = check_geometric(LambdaMeasure::uniform(), rho, p, 50);
    const double geo = std::max({g.cg3a_max, std::abs(g.cg3b_residual), g.cg1_max});
    double lam = 0;
    for (double sigma : {0.25, 0.5, 1.0, 2.0, 4.0})
        for (double th : {0.0, 0.3, 1.0, 3.0}) {
            for (const ModelParams q : {ModelParams{sigma, 0, th}, ModelParams{sigma, th, 0}})
                lam = std::max(lam, std::abs(bs_rho(q) - bs_rho_lambert(q)));
        }
    r.seconds = since(t0);
    r.pass = d <= 1e-6 && geo <= 1e-8 && lam <= 1e-12;
    r.detail = fmt::format("rho {:.10f}; pmf vs geometric {:.3g} (tol 1e-6, K={}); condition residuals {:.3g} "
                           "(tol 1e-8); Lambert cases {:.3g} (tol 1e-12)",
                           rho, d, pmf.truncation_K, geo, lam);
    return r;
}

Result c6_star(Suite)
{
    Result r = start(6, "Star-shaped closed forms");
    const auto t0 = Clock::now();
    const double m1 = 1;
    const ModelParams p0{1, 0.5, 0};
    const auto closed0 = star_closed(m1, p0);
    const double d0 = std::max(sup(closed0.pmf.probs, solve_star(p0, m1).probs),
                               sup(closed0.pmf.probs, solve_star_banded(p0, m1, 4096).probs));
    const ModelParams p1{1, 0.5, 0.5};
    const auto closed1 = star_closed(m1, p1);
    const auto rec = solve_star(p1, m1);
    double d1 = 0;
    for (double z : z_grid(20)) d1 = std::max(d1, std::abs(closed1.pgf(z) - rec.pgf(z)));
    const double g1 = std::max(std::abs(closed1.pgf(1.0) - 1), std::abs(closed1.pgf(1 - 1e-10) - 1));
    r.seconds = since(t0);
    r.pass = d0 <= 1e-12 && d1 <= 1e-7 && g1 <= 1e-8;
    r.detail = fmt::format("theta1=0 closed vs recursion {:.3g} (tol 1e-12); theta1=0.5 pgf vs {} pmf {:.3g} "
                           "(tol 1e-7); |g(1)-1| {:.3g} (tol 1e-8)",
                           d0, to_string(rec.solver_tag), d1, g1);
    return r;
}

Result c7_factorial_moments(Suite s)
{
    Result r = start(7, "Factorial moment recursions");
    const auto t0 = Clock::now();
    double worst = 0;
    for (const auto& p : moran_grid(s == Suite::Full ? 50 : 15)) {
        const auto pmf = solve_moran(p);
        for (int n = 1; n <= std::min(10, p.N - 1); ++n) {
            const double lhs = ((n + 1) * (1 + p.s) + p.N * p.u0) * falling_moment(pmf, n + 1, 0);
            const double a = (n + 1) * (p.N - n) * p.s * falling_moment(pmf, n, 0);
            const double b = p.N * (n + 1) * p.u1 * falling_moment(pmf, n, 1);
            worst = std::max(worst, std::abs(lhs - a + b) / std::max({1.0, std::abs(lhs), std::abs(a), std::abs(b)}));
        }
    }
    for (const auto& p : cube_grid()) {
        const double m0 = 2;
        const auto pmf = wf_closed(m0, p).pmf;
        for (int n = 1; n <= 10; ++n) {
            const double lhs = ((n + 1) * m0 + 2 * p.theta0) * falling_moment(pmf, n + 1, 0);
            const double a = 2 * (n + 1) * p.sigma * falling_moment(pmf, n, 0);
            const double b = 2 * (n + 1) * p.theta1 * falling_moment(pmf, n, 1);
            worst = std::max(worst, std::abs(lhs - a + b) / std::max({1.0, std::abs(lhs), std::abs(a), std::abs(b)}));
        }
    }
    r.seconds = since(t0);
    r.pass = worst <= 1e-8;
    r.detail = fmt::format("max scaled residual {:.3g} over n <= 10 (tol 1e-8)", worst);
    return r;
}

Result c8_duality(Suite s)
{
    Result r = start(8, "Moment duality");
    const auto t0 = Clock::now();
    const ModelParams p{1, 1, 1};
    const auto king = LambdaMeasure::kingman(2);
    const auto w = solve_w_moments(king, p);
    const long reps = s == Suite::Full ? 100'000 : 20'000;
    double worst_z = 0;
    for (int n = 1; n <= 5; ++n) {
        const auto e = sim::simulate_killed_asg(king, p, n, reps, 1000 + n);
        worst_z = std::max(worst_z, std::abs(e.frequency - w.w[n]) / e.std_error);
    }
    const auto w0 = solve_w_moments(LambdaMeasure::zero(), p);
    const double root = (3 - std::sqrt(5.0)) / 2;
    double d0 = 0;
    for (std::size_t n = 0; n < w0.w.size(); ++n) d0 = std::max(d0, std::abs(w0.w[n] - std::pow(root, double(n))));
    r.seconds = since(t0);
    r.pass = worst_z <= 3 && d0 <= 1e-10 && r.seconds < 60;
    r.detail = fmt::format("max |z| vs killed ASG {:.2f} (limit 3, {} reps); zero measure vs w^n {:.3g} (tol 1e-10); "
                           "{:.1f} s (limit 60)",
                           worst_z, reps, d0, r.seconds);
    return r;
}

Result c9_generating(Suite)
{
    Result r = start(9, "Generating function Taylor head");
    const auto t0 = Clock::now();
    const ModelParams p{1, 0.5, 0.5};
    const auto w = solve_w_moments(LambdaMeasure::uniform(), p);
    const auto g = bs_w_generating(p, {}, 10);
    double d = 0;
    for (int n = 1; n <= 10; ++n) d = std::max(d, std::abs(g.taylor[n] - w.w[n]));
    r.seconds = since(t0);
    r.pass = d <= 1e-5;
    r.detail = fmt::format("max |Taylor - recursion| over n <= 10: {:.3g} (tol 1e-5)", d);
    return r;
}

Result c10_fixed_point(Suite)
{
    Result r = start(10, "Fixed-point pipeline");
    const auto t0 = Clock::now();
    const double x0 = 0.3, m0 = 0.05;
    const auto mu = build_discrete_fixed_point(0.5, x0, m0);
    const auto Smu = apply_S(mu, 0.5);
    double fix = 0;
    for (const auto& a : Smu.atoms) {
        if (std::abs(a.k) >= mu.truncation_index_K) continue;  // edges see the truncation
        const auto it = std::find_if(mu.atoms.begin(), mu.atoms.end(), [&](const IndexedAtom& b) { return b.k == a.k; });
        fix = std::max(fix, std::abs(a.mass - it->mass) / it->mass);
    }
    const ModelParams p{1, 0.2, 0.2};
    const double rs = rho_star(x0, m0, p);
    const auto nu = build_discrete_fixed_point(rs, x0, m0);
    const auto lam = pushforward_to_lambda(nu, rs);
    const auto pmf = solve_lambda_truncated(lam, p);
    const double d = sup(pmf.probs, geometric_pmf(rs));
    const auto id = fixed_point_sum_identity(nu, rs, x0, m0);
    const double sid = std::abs(id.numeric - id.closed);
    r.seconds = since(t0);
    r.pass = fix <= 1e-12 && d <= 1e-6 && sid <= 1e-10;
    r.detail = fmt::format("S mu = mu rel {:.3g} (tol 1e-12); rho* {:.10f}, pmf vs geometric {:.3g} (tol 1e-6); "
                           "sum identity {:.3g} (tol 1e-10)",
                           fix, rs, d, sid);
    return r;
}

Result c11_master(Suite)
{
    Result r = start(11, "Master-equation residuals");
    const auto t0 = Clock::now();
    const auto z = z_grid(20);
    const MoranParams mp{20, 0.8, 0.3, 0.2};
    const double moran = verify_moran_ode(moran_closed(mp).pgf, mp, z).max_residual;
    const ModelParams p{1, 0.5, 0.5};
    const auto king = LambdaMeasure::kingman(2);
    const auto wf = verify_master_equation(wf_closed(2, p).pgf, king, p, z);
    const auto st = LambdaMeasure::star(1);
    const auto ds = verify_master_equation(star_closed(1, p).pgf, st, p, z);
    const double rho = bs_rho(p);
    PgfEvaluator geo;
    geo.model_tag = "geometric";
    geo.p1 = 1 - rho;
    geo.evaluate = [rho](double x) { return (1 - rho) * x / (1 - rho * x); };
    const auto car = verify_master_equation(geo, LambdaMeasure::uniform(), p, z, MasterEquation::Carleman);
    const double worst = std::max({moran, wf.max_residual, ds.max_residual, car.max_residual});
    r.seconds = since(t0);
    r.pass = worst <= 1e-6;
    r.detail = fmt::format("Moran ODE {:.3g}, Wright-Fisher ODE {:.3g}, star {:.3g}, Carleman {:.3g} (tol 1e-6)", moran,
                           wf.max_residual, ds.max_residual, car.max_residual);
    return r;
}

Result c12_beta31(Suite)
{
    Result r = start(12, "beta(3,1) ODE vs recursion");
    const auto t0 = Clock::now();
    const ModelParams p{1, 0.5, 0.5};
    const auto ode = beta31_pgf(p);
    const auto rec = solve_lambda_truncated(LambdaMeasure::beta(3, 1), p);
    const double d = sup(ode.pmf.probs, rec.probs);
    r.seconds = since(t0);
    r.pass = d <= 1e-6 && ode.p1_consistency <= 1e-6;
    r.detail = fmt::format("sup {:.3g} (tol 1e-6); ODE p1 vs coefficient p1 {:.3g} (tol 1e-6); boundary condition "
                           "number {:.3g}",
                           d, ode.p1_consistency, ode.condition);
    return r;
}

Result c13_specfun(Suite s)
{
    Result r = start(13, "Special-function identities");
    const auto t0 = Clock::now();
    const int n = s == Suite::Full ? 100 : 25;
    std::mt19937_64 eng(77);
    auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); };
    double g21 = 0, g11 = 0, gf1 = 0, gb2 = 0, gb3 = 0;
    for (int i = 0; i < n; ++i) {
        const double b = U(0.2, 3), c = b + U(0.2, 3), a = U(-2, 3), z = U(-0.9, 0.9);
        g21 = std::max(g21, rel_gap(gauss_2f1(a, b, c, z).value, gauss_2f1_integral(a, b, c, z)));
        const double a1 = U(0.2, 3), c1 = a1 + U(0.2, 3), z1 = U(-10, 10);
        g11 = std::max(g11, rel_gap(kummer_1f1(a1, c1, z1).value, kummer_1f1_integral(a1, c1, z1)));
        const double fa = U(0.2, 2), fd = fa + U(0.2, 2), fb = U(-1, 2), fc = U(-1, 2), fz = U(-0.8, 0.8),
                     fw = U(-0.8, 0.8);
        gf1 = std::max(gf1, rel_gap(appell_f1(fa, fb, fc, fd, fz, fw).value, appell_f1_integral(fa, fb, fc, fd, fz, fw)));
        const double al = U(0.1, 5), be = U(0.1, 5), ga = U(0.1, 5), nu = U(0.1, 5);
        gb2 = std::max(gb2, rel_gap(integral_I(al, be, ga, nu, 1.0), integral_I_at_one(al, be, ga, nu)));
        const double zmax = std::min(1.0, nu / std::sqrt(nu * nu + 2 * nu));
        const double zz = U(0.05, 0.95) * zmax;
        gb3 = std::max(gb3, rel_gap(integral_I(al, be, ga, nu, zz), integral_I_appell(al, be, ga, nu, zz)));
    }
    const double worst = std::max({g21, g11, gf1, gb2, gb3});
    r.seconds = since(t0);
    r.pass = worst <= 1e-9;
    r.detail = fmt::format("{} points each: 2F1 {:.2g}, 1F1 {:.2g}, F1 {:.2g}, I at 1 {:.2g}, I Appell {:.2g} (tol 1e-9)",
                           n, g21, g11, gf1, gb2, gb3);
    return r;
}

Result c14_absorption(Suite s)
{
    Result r = start(14, "Absorption identities");
    const auto t0 = Clock::now();
    double bs = 0, ki = 0;
    for (double sigma : {0.1, 0.5, std::log(2.0), 1.0, 3.0})
        for (int i = 0; i <= 20; ++i) {
            const double x = i / 20.0;
            bs = std::max(bs, std::abs(bs_absorption(x, sigma) - bs_absorption_geometric(x, sigma)));
            for (double m0 : {0.5, 1.0, 2.0})
                ki = std::max(ki, std::abs(kimura_fixation(x, sigma, m0) - kimura_fixation_poisson(x, sigma, m0)));
        }
    const long reps = s == Suite::Full ? 100'000 : 20'000;
    const MoranParams mp{5, 0.5, 0, 0};
    const auto e = sim::moran_fixation_frequency(mp, 2, reps, 9);
    const double z = std::abs(e.frequency - moran_fixation(2, 5, 0.5)) / e.std_error;
    r.seconds = since(t0);
    r.pass = bs <= 1e-13 && ki <= 1e-12 && z <= 3;
    r.detail = fmt::format("absorption vs geometric {:.3g} (tol 1e-13); Kimura vs Poisson {:.3g} (tol 1e-12); "
                           "Moran fixation |z| {:.2f} (limit 3, {} reps)",
                           bs, ki, z, reps);
    return r;
}

Result c15_negative(Suite s)
{
    Result r = start(15, "Negative geometric controls");
    const auto t0 = Clock::now();
    const int step = s == Suite::Full ? 1 : 7;
    const int checked = static_cast<int>(negative_models().size() * negative_rho_grid(step).size());
    const int bad = negative_control_sweep(step);
    r.seconds = since(t0);
    r.pass = bad == 0;
    r.detail = fmt::format("{} (measure, rho) pairs, {} wrongly geometric", checked, bad);
    return r;
}

using Fn = Result (*)(Suite);
constexpr Fn kCriteria[] = {c1_moran_triple, c2_moran_simulation, c3_kingman,      c4_moran_to_wf,
                            c5_bs_geometry,  c6_star,             c7_factorial_moments, c8_duality,
                            c9_generating,   c10_fixed_point,     c11_master,      c12_beta31,
                            c13_specfun,     c14_absorption,      c15_negative};

}  // namespace

int criterion_count() { return static_cast<int>(std::size(kCriteria)); }

double moran_grid_sweep(int count, par::Exec exec)
{
    const auto grid = moran_grid(count);
    std::vector<double> worst(grid.size(), 0.0);
    for_each_index(count, exec, [&](int i) {
        const auto& p = grid[i];
        const auto a = solve_moran(p).probs;
        const auto b = solve_moran_nullspace(p, par::Exec::Serial).probs;
        const auto c = moran_closed(p).pmf.probs;
        worst[i] = std::max({sup(a, b), sup(a, c), sup(b, c)});
    });
    return *std::max_element(worst.begin(), worst.end());
}

int negative_control_sweep(int step, par::Exec exec)
{
    const ModelParams p{1, 0.5, 0.5};
    const auto& models = negative_models();
    const auto rhos = negative_rho_grid(step);
    const int n = static_cast<int>(models.size() * rhos.size());
    std::vector<char> geometric(n, 0);
    for_each_index(n, exec, [&](int i) {
        const auto& m = models[i / rhos.size()].second;
        geometric[i] = check_geometric(m, rhos[i % rhos.size()] / 100.0, p).geometric();
    });
    return static_cast<int>(std::count(geometric.begin(), geometric.end(), 1));
}

std::vector<Result> run_suite(Suite suite, const std::vector<int>& only,
                              const std::function<void(const Result&)>& on_result)
{
    std::vector<Result> out;
    for (int i = 0; i < criterion_count(); ++i) {
        if (!only.empty() && std::find(only.begin(), only.end(), i + 1) == only.end()) continue;
        Result r;
        const auto t0 = Clock::now();
        try {
            r = kCriteria[i](suite);
        } catch (const std::exception& e) {
            r.id = i + 1;
            r.title = "criterion " + std::to_string(i + 1);
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
            r.seconds = since(t0);
        }
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace bcp::validate
