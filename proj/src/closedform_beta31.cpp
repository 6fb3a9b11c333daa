#include <array>
#include <cmath>
#include <memory>

#include <boost/numeric/odeint.hpp>

#include "bcp/closedform.hpp"

namespace bcp {

namespace {

using State = std::array<double, 2>;

constexpr int kSeriesTerms = 10;

// P g' + Q g = p1 R_A + p2 R_B with
//   P = sigma z^2 - (sigma+theta) z + theta1,  Q = 2 sigma z - sigma - theta - 3,
//   R_A = theta1 - (3 + 2(sigma+theta)) z,     R_B = 2 theta1 z.
// The two basis solutions (unit loads) are analytic at the smaller root x- of P
// and are started there from a Frobenius series.
struct Beta31Ode {
    double sigma, theta, theta1;
    double d, xm, xp, h0;
    std::array<std::array<double, kSeriesTerms>, 2> series{};

    explicit Beta31Ode(const ModelParams& p)
        : sigma(p.sigma), theta(p.theta()), theta1(p.theta1)
    {
        d = std::sqrt((sigma + theta) * (sigma + theta) - 4 * sigma * theta1);
        xm = 2 * theta1 / (sigma + theta + d);
        xp = (sigma + theta + d) / (2 * sigma);
        if (std::abs(xm - 1) < 1e-14) xm = 1;
        h0 = 0.05 * (xp - xm);
        if (xm > 0) h0 = std::min(h0, 0.5 * xm);
        if (xm < 1) h0 = std::min(h0, 0.5 * (1 - xm));
        if (!(h0 > 0)) h0 = 0.05 * std::max(xm, 1 - xm);
        for (int i = 0; i < 2; ++i) {
            const double r0 = R(i, xm), r1 = dR(i);
            auto& b = series[i];
            b[0] = -r0 / (d + 3);
            for (int k = 1; k < kSeriesTerms; ++k)
                b[k] = (sigma * (k + 1) * b[k - 1] - (k == 1 ? r1 : 0.0)) / (d * (k + 1) + 3);
        }
    }

    double P(double z) const { return sigma * z * z - (sigma + theta) * z + theta1; }
    double Q(double z) const { return 2 * sigma * z - sigma - theta - 3; }
    double R(int i, double z) const { return i == 0 ? theta1 - (3 + 2 * (sigma + theta)) * z : 2 * theta1 * z; }
    double dR(int i) const { return i == 0 ? -(3 + 2 * (sigma + theta)) : 2 * theta1; }

    State from_series(double z) const
    {
        const double h = z - xm;
        State y{};
        for (int i = 0; i < 2; ++i) {
            double v = 0;
            for (int k = kSeriesTerms - 1; k >= 0; --k) v = v * h + series[i][k];
            y[i] = v;
        }
        return y;
    }

    // Both basis solutions at z.
    State basis(double z) const
    {
        if (std::abs(z - xm) <= h0) return from_series(z);
        const double z0 = z > xm ? xm + h0 : xm - h0;
        State y = from_series(z0);
        auto rhs = [this](const State& s, State& dy, double t) {
            const double pz = P(t), qz = Q(t);
            for (int i = 0; i < 2; ++i) dy[i] = (R(i, t) - qz * s[i]) / pz;
        };
        namespace oi = boost::numeric::odeint;
        auto stepper = oi::make_controlled(1e-13, 1e-10, oi::runge_kutta_dopri5<State>());
        const double dt = (z > z0 ? 1 : -1) * 1e-3;
        oi::integrate_adaptive(stepper, rhs, y, z0, z, dt);
        return y;
    }
};

double cond_inf(double a, double b, double c, double e)
{
    const double det = a * e - b * c;
    const double n = std::max(std::abs(a) + std::abs(b), std::abs(c) + std::abs(e));
    const double ninv = std::max(std::abs(e) + std::abs(b), std::abs(c) + std::abs(a)) / std::abs(det);
    return n * ninv;
}

Beta31 oracle_fallback(const ModelParams& p, double condition)
{
    Beta31 out;
    out.condition = condition;
    out.pmf = solve_lambda_truncated(LambdaMeasure::beta(3, 1), p);
    out.pmf.warnings.push_back("boundary system ill-conditioned; pmf from the truncated recursion");
    out.p1 = out.pmf.p(1);
    out.p2 = out.pmf.p(2);
    out.pgf = pgf_from_pmf(out.pmf, "beta31");
    return out;
}

}  // namespace

Beta31 beta31_pgf(const ModelParams& p)
{
    p.validate();
    if (!(p.sigma > 0)) throw DomainError("beta(3,1) model needs sigma > 0");
    const auto rec = is_positive_recurrent(LambdaMeasure::beta(3, 1), p);
    if (rec.verdict == Recurrence::Verdict::NotPositiveRecurrent)
        throw NotPositiveRecurrent("beta(3,1) block counting process is not positive recurrent: " + rec.clause);

    auto ode = std::make_shared<const Beta31Ode>(p);
    const double theta = p.theta();
    Beta31 out;

    if (p.theta1 == 0) {
        // x- = 0, only the first load is present and g(0) = 0 holds automatically.
        double a;
        double target;
        if (p.theta0 > 0) {
            a = ode->basis(1.0)[0];
            target = 1;
        } else {
            a = ode->R(0, 1.0);
            target = ode->Q(1.0);
        }
        out.condition = 1;
        out.p1 = target / a;
        out.p2 = 0;
    } else {
        double a11 = 0, a12 = 0, a21 = 0, a22 = 0, t2 = 0;
        const State g0 = ode->basis(0.0);
        a11 = g0[0];
        a12 = g0[1];
        if (p.theta0 > 0) {
            const State g1 = ode->basis(1.0);
            a21 = g1[0];
            a22 = g1[1];
            t2 = 1;
        } else {
            // P(1) = 0: analyticity at 1 forces Q(1) g(1) = R(1) with g(1) = 1.
            a21 = ode->R(0, 1.0);
            a22 = ode->R(1, 1.0);
            t2 = ode->Q(1.0);
        }
        out.condition = cond_inf(a11, a12, a21, a22);
        if (!(out.condition <= 1e10)) return oracle_fallback(p, out.condition);
        const double det = a11 * a22 - a12 * a21;
        out.p1 = -a12 * t2 / det;
        out.p2 = a11 * t2 / det;
    }

    // pmf from the coefficient recursion
    //   sigma (n+1) p_{n-1} = ((sigma+theta)(n+1) + 3) p_n - theta1 (n+1) p_{n+1},  n >= 2
    std::vector<double> probs;
    if (p.theta1 > 0) {
        auto miller = [&](int N) {
            std::vector<double> v(N + 2, 0.0);
            v[N] = 1;
            for (int n = N; n >= 2; --n) {
                v[n - 1] = (((p.sigma + theta) * (n + 1) + 3) * v[n] - p.theta1 * (n + 1) * v[n + 1]) /
                           (p.sigma * (n + 1));
                if (std::abs(v[n - 1]) > 1e250)
                    for (int k = n - 1; k <= N; ++k) v[k] *= 1e-250;
            }
            double s = 0;
            for (int n = 1; n <= N; ++n) s += v[n];
            std::vector<double> q(v.begin() + 1, v.begin() + N + 1);
            for (auto& x : q) x /= s;
            return q;
        };
        int N = 64;
        auto prev = miller(N);
        for (;;) {
            N *= 2;
            auto cur = miller(N);
            double diff = 0;
            for (std::size_t i = 0; i < prev.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
            prev = std::move(cur);
            if (diff < 1e-15 || N >= (1 << 16)) break;
        }
        probs = std::move(prev);
        while (probs.size() > 1 && probs.back() < 1e-300) probs.pop_back();
    } else {
        probs.push_back(1);
        double s = 1;
        for (int n = 2; n < (1 << 20); ++n) {
            const double v = probs.back() * p.sigma * (n + 1) / ((p.sigma + theta) * (n + 1) + 3);
            probs.push_back(v);
            s += v;
            if (v < 1e-17 * s) break;
        }
        for (auto& x : probs) x /= s;
    }
    out.pmf.probs = std::move(probs);
    out.pmf.truncation_K = out.pmf.size();
    out.pmf.solver_tag = SolverTag::Beta31Ode;
    out.p1_consistency = std::abs(out.pmf.p(1) - out.p1);
    if (p.theta1 == 0) out.p2 = out.pmf.p(2);

    out.pgf.model_tag = "beta31";
    out.pgf.params = {{"sigma", p.sigma}, {"theta0", p.theta0}, {"theta1", p.theta1}};
    out.pgf.p1 = out.p1;
    out.pgf.p2 = out.p2;
    const double p1 = out.p1, p2 = out.p2;
    out.pgf.evaluate = [ode, p1, p2](double z) {
        if (z <= 0) return 0.0;
        if (z >= 1) return 1.0;
        const State y = ode->basis(std::min(z, 1 - 1e-10));
        return p1 * y[0] + p2 * y[1];
    };
    return out;
}

}  // namespace bcp
