#include <algorithm>
#include <cmath>

#include "bcp/closedform.hpp"
#include "bcp/specfun.hpp"
#include "closedform_detail.hpp"
#include "mp.hpp"

namespace bcp {

namespace {

constexpr int kMaxClosedTerms = 300;

struct MoranShape {
    double N, nu1, rho0, nrho0, gamma;  // gamma = (1 + u1 + rho0) N
};

MoranShape shape(const MoranParams& p)
{
    MoranShape s;
    s.N = p.N;
    s.nu1 = p.N * p.u1;
    s.rho0 = p.u0 / (1 + p.s);
    s.nrho0 = p.N * s.rho0;
    s.gamma = (1 + p.u1 + s.rho0) * p.N;
    return s;
}

template <class R>
R moran_ratio_r(const MoranParams& p)
{
    const R s = p.s, zz = s / (1 + s);
    const R Nu1 = R(p.N) * R(p.u1), Nrho0 = R(p.N) * R(p.u0) / (1 + s);
    auto F = [&](int i) {
        // 2F1(i - N, 1 + Nu1 + i; 1 + Nu1 + Nrho0 + i; s/(1+s)), terminating
        const R a = R(i - p.N), b = 1 + Nu1 + i, c = 1 + Nu1 + Nrho0 + i;
        R t = 1, sum = 1;
        for (int k = 0; k < p.N - i; ++k) {
            t *= (a + k) * (b + k) / ((c + k) * (k + 1)) * zz;
            sum += t;
        }
        return sum;
    };
    return (1 + Nu1) / ((1 + Nu1 + Nrho0) * (1 + s)) * F(1) / F(0);
}

// p_n for n = 1..ncut from the q_{n,i} double sums, i in {1, 2}. The sums
// alternate, so r is carried at the working precision too.
template <class R>
std::vector<double> moran_q_pmf(const MoranParams& p, int ncut)
{
    const R r = moran_ratio_r<R>(p), omr = 1 - r;
    const R N = p.N, s = p.s, Nu1 = R(p.N) * R(p.u1);
    const R Nrho0 = R(p.N) * R(p.u0) / (1 + s);
    const R a2 = 1 - Nrho0, z = 1 + s;
    auto q = [&](int n, int i) {
        R total = 0;
        R A = 1;  // (-N+i-1)_m / (Nu1+i+1)_m (-s)^m
        for (int m = 0; m <= n - i; ++m) {
            R t = 1, inner = 1;
            const int last = n - i - m;
            for (int k = 0; k < last; ++k) {
                t *= (m + 1 + k) * (a2 + k) * R(m - n + i + k) / ((Nu1 + m + i + 1 + k) * R(k + 1) * R(k + 1)) * z;
                inner += t;
            }
            total += A * inner;
            A *= (-N + i - 1 + m) / (Nu1 + i + 1 + m) * (-s);
        }
        return total;
    };
    const R pref = R(p.N) * R(p.u0) / omr;
    std::vector<double> out(ncut);
    for (int n = 1; n <= ncut; ++n) {
        const R v = pref * (r * q(n, 1) / (Nu1 + 1) - q(n, 2) / (Nu1 + 2));
        out[n - 1] = static_cast<double>(v);
    }
    return out;
}

int cut_from_solver(const MoranParams& p)
{
    const auto ref = solve_moran(p);
    const auto tails = ref.tails();
    int n = p.N;
    while (n > 1 && tails[n - 1] < 1e-18) --n;
    return n;
}

}  // namespace

MoranIntegrals moran_integrals(const MoranParams& p)
{
    p.validate();
    if (!(p.u0 > 0)) throw DomainError("Moran integrals need u0 > 0");
    const MoranShape sh = shape(p);
    const double nu = 1 / p.s;
    auto smooth = [&](double y) { return -(sh.gamma + 1) * std::log(y + nu); };
    detail::LogIntegrand i0{sh.nu1, sh.nrho0 - 1, smooth};
    detail::LogIntegrand i1{sh.nu1 + 1, sh.nrho0 - 1, smooth};
    detail::LogIntegrand j{sh.nu1, sh.nrho0, smooth};
    const double split = detail::argmax_on_grid(j);
    const double shift = j(split);
    MoranIntegrals out;
    out.log_scale = shift;
    out.I0 = detail::scaled_integral(i0, shift, split);
    out.I1 = detail::scaled_integral(i1, shift, split);
    out.J = detail::scaled_integral(j, shift, split);
    return out;
}

double moran_ratio_hypergeometric(const MoranParams& p)
{
    p.validate();
    return mp::ladder([&]<class R>() { return std::vector<double>{static_cast<double>(moran_ratio_r<R>(p))}; }, 1e-16)[0];
}

double moran_p1(const MoranParams& p)
{
    p.validate();
    if (p.u0 == 0) {
        // p_1 = 1 / 2F1(1, 1-N; Nu+2; -s), a sum of positive terms
        double t = 1, sum = 1;
        for (int k = 1; k < p.N; ++k) {
            t *= (p.N - k) * p.s / (p.N * p.u() + 1 + k);
            sum += t;
            if (!std::isfinite(sum)) return 0.0;
        }
        return 1 / sum;
    }
    const auto I = moran_integrals(p);
    return p.N * p.u0 * I.I1 / ((p.N * p.u1 + 1) * I.J);
}

ClosedForm moran_closed(const MoranParams& p)
{
    p.validate();
    ClosedForm out;
    out.pgf.model_tag = "moran";
    out.pgf.params = {{"N", double(p.N)}, {"s", p.s}, {"u0", p.u0}, {"u1", p.u1}};
    out.pmf.solver_tag = SolverTag::MoranClosed;
    out.pmf.truncation_K = p.N;

    if (p.u0 == 0) {
        // p_n proportional to (N-1)_{n-1} falling s^{n-1} / (Nu+2)_{n-1} rising, in log space
        std::vector<double> lt(p.N);
        lt[0] = 0;
        for (int n = 2; n <= p.N; ++n)
            lt[n - 1] = lt[n - 2] + std::log(double(p.N - n + 1)) + std::log(p.s) - std::log(p.N * p.u() + n);
        const double mx = *std::max_element(lt.begin(), lt.end());
        out.pmf.probs.resize(p.N);
        for (int n = 1; n <= p.N; ++n) out.pmf.probs[n - 1] = std::exp(lt[n - 1] - mx);
        finalize_probabilities(out.pmf.probs);
        out.pmf.residual = moran_pmf_residual(p, out.pmf.probs);
        const auto probs = out.pmf.probs;
        out.pgf.p1 = probs[0];
        out.pgf.evaluate = [probs](double z) {
            double g = 0;
            for (std::size_t i = probs.size(); i-- > 0;) g = (g + probs[i]) * z;
            return g;
        };
        return out;
    }

    const auto I = moran_integrals(p);
    const double r = I.ratio(), omr = I.one_minus_ratio();
    const double p1 = p.N * p.u0 * I.I1 / ((p.N * p.u1 + 1) * I.J);
    const int ncut = cut_from_solver(p);
    if (ncut > kMaxClosedTerms)
        throw PreconditionViolated("closed Moran pmf needs " + std::to_string(ncut) +
                                   " terms; the q-sum evaluation is limited to 300");
    auto probs = mp::ladder([&]<class R>() { return moran_q_pmf<R>(p, ncut); }, 1e-13);
    probs.resize(p.N, 0.0);
    out.pmf.probs = std::move(probs);
    finalize_probabilities(out.pmf.probs);
    out.pmf.tail_bound = ncut < p.N ? 1e-18 : 0.0;  // entries beyond the cut are below this
    out.pmf.residual = moran_pmf_residual(p, out.pmf.probs);

    const MoranShape sh = shape(p);
    const double nu = 1 / p.s;
    detail::VariationOfConstants vc;
    vc.pref = p.N * p.u0 / (p.s * omr);
    vc.r = r;
    vc.a = sh.nu1;
    vc.b = sh.nrho0;
    const double gam = sh.gamma;
    vc.psi = [gam, nu](double x) { return -gam * std::log(x + nu); };
    vc.w = [nu](double x) { return 1 / (x + nu); };
    out.pgf.p1 = p1;
    out.pgf.evaluate = vc;
    return out;
}

double moran_mean(const MoranParams& p, double p1)
{
    return (p.N * (p.s + p.u0 - p.u1) + (1 + p.N * p.u1) * p1) / (1 + p.s + p.N * p.u0);
}

std::vector<double> moran_factorial_moments(const MoranParams& p, double p1, int n_max)
{
    if (n_max > p.N) throw DomainError("factorial moments are needed only up to N");
    std::vector<double> F(n_max + 1, 0.0);
    F[0] = 1;
    if (n_max >= 1) F[1] = moran_mean(p, p1);
    for (int n = 1; n + 1 <= n_max; ++n) {
        // E[(L-1)_n] = sum_k binom(n,k) E[(L)_{n-k}] (-1)^k k!
        double G = 0, c = 1;  // c = binom(n,k) k! (-1)^k
        for (int k = 0; k <= n; ++k) {
            G += c * F[n - k];
            c *= -double(n - k);
        }
        F[n + 1] = ((n + 1.0) * (p.N - n) * p.s * F[n] - p.N * (n + 1.0) * p.u1 * G) /
                   ((n + 1.0) * (1 + p.s) + p.N * p.u0);
    }
    return F;
}

std::vector<double> moran_factorial_moments(const MoranParams& p, int n_max)
{
    return moran_factorial_moments(p, moran_p1(p), n_max);
}

std::vector<double> moran_factorial_moments_u0_zero(const MoranParams& p, const StationaryPmf& pmf, int n_max)
{
    if (p.u0 != 0) throw DomainError("this form requires u0 = 0");
    std::vector<double> F(n_max + 1, 0.0);
    F[0] = 1;
    const double z = -p.s, Nu = p.N * p.u();
    double fact = 1;
    for (int n = 1; n <= n_max; ++n) {
        fact *= n;
        const double h1 = gauss_2f1(n + 1, n + 1 - p.N, Nu + n + 2, z).value;
        const double h0 = gauss_2f1(n, n - p.N, Nu + n + 1, z).value;
        F[n] = fact * (h1 * pmf.p(n + 1) + h0 * pmf.p(n));
    }
    return F;
}

std::vector<double> moran_factorial_moments_u1_zero(const MoranParams& p, int n_max)
{
    if (p.u1 != 0) throw DomainError("this form requires u1 = 0");
    std::vector<double> F(n_max + 1, 0.0);
    F[0] = 1;
    const double mean = moran_mean(p, moran_p1(p));
    const double x = 2 + p.N * p.u() / (1 + p.s), q = p.s / (1 + p.s);
    double c = 1;  // n! (N-1)_{n-1} / (x)_{n-1} q^{n-1}
    for (int n = 1; n <= n_max; ++n) {
        if (n >= 2) c *= n * double(p.N - n + 1) / (x + n - 2) * q;
        F[n] = c * mean;
    }
    return F;
}

}  // namespace bcp
