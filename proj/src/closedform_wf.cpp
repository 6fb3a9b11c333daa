#include <algorithm>
#include <cmath>
#include <limits>

#include "bcp/closedform.hpp"
#include "bcp/specfun.hpp"
#include "closedform_detail.hpp"
#include "mp.hpp"

namespace bcp {

namespace {

constexpr int kMaxClosedTerms = 300;

struct WfShape {
    double a, b, c;  // 2 theta1/m0, 2 theta0/m0, 2 sigma/m0
};

WfShape shape(double m0, const ModelParams& p)
{
    if (!(m0 > 0)) throw DomainError("Wright-Fisher model needs m0 > 0");
    p.validate();
    if (!(p.sigma > 0)) throw DomainError("Wright-Fisher closed form needs sigma > 0");
    return {2 * p.theta1 / m0, 2 * p.theta0 / m0, 2 * p.sigma / m0};
}

// r = (a+1)/(a+b+1) M(b; a+b+2; c) / M(b; a+b+1; c), both series positive.
template <class R>
R wf_ratio_r(const R& a, const R& b, const R& c)
{
    auto M = [&](const R& x) {
        R t = 1, sum = 1;
        const R eps = std::numeric_limits<R>::epsilon();
        for (int k = 0; k < 100000; ++k) {
            t *= (b + k) / (x + k) * c / (k + 1);
            sum += t;
            if (t < eps * sum && k > c) break;
        }
        return sum;
    };
    return (a + 1) / (a + b + 1) * M(a + b + 2) / M(a + b + 1);
}

// The q sums alternate, so r is carried at the working precision too.
template <class R>
std::vector<double> wf_q_pmf(double m0, const ModelParams& p, int ncut)
{
    const R a = R(2) * R(p.theta1) / R(m0), b = R(2) * R(p.theta0) / R(m0), c = R(2) * R(p.sigma) / R(m0);
    const R r = wf_ratio_r(a, b, c), omr = 1 - r;
    const R b1 = 1 - b;
    auto q = [&](int n, int i) {
        R total = 0, A = 1;  // c^m / (a+i+1)_m
        for (int m = 0; m <= n - i; ++m) {
            R t = 1, inner = 1;
            const int last = n - i - m;
            for (int k = 0; k < last; ++k) {
                t *= (m + 1 + k) * (b1 + k) * R(m - n + i + k) / ((a + m + i + 1 + k) * R(k + 1) * R(k + 1));
                inner += t;
            }
            total += A * inner;
            A *= c / (a + i + 1 + m);
        }
        return total;
    };
    const R th1 = p.theta1, M0 = m0;
    const R pref = R(2) * R(p.theta0) / omr;
    std::vector<double> out(ncut);
    for (int n = 1; n <= ncut; ++n) {
        const R v = pref * (r * q(n, 1) / (2 * th1 + M0) - q(n, 2) / (2 * th1 + 2 * M0));
        out[n - 1] = static_cast<double>(v);
    }
    return out;
}

// First n at which n^12 c^{n-1} / (2+a)_{n-1} drops below 1e-18. The bracket
// bounds p_n; the power keeps factorial moments up to order 12 intact.
int wf_cut(const WfShape& s)
{
    double bound = 1;
    int n = 1;
    while (bound * std::pow(double(n), 12) >= 1e-18 && n < 100000) {
        bound *= s.c / (2 + s.a + n - 1);
        ++n;
    }
    return n;
}

}  // namespace

WfIntegrals wf_integrals(double m0, const ModelParams& p)
{
    const WfShape s = shape(m0, p);
    if (!(p.theta0 > 0)) throw DomainError("Wright-Fisher integrals need theta0 > 0");
    const double c = s.c;
    auto smooth = [c](double y) { return -c * y; };
    detail::LogIntegrand i0{s.a, s.b - 1, smooth};
    detail::LogIntegrand i1{s.a + 1, s.b - 1, smooth};
    detail::LogIntegrand j{s.a, s.b, smooth};
    const double split = detail::argmax_on_grid(j);
    const double shift = j(split);
    WfIntegrals out;
    out.I0 = detail::scaled_integral(i0, shift, split);
    out.I1 = detail::scaled_integral(i1, shift, split);
    out.J = detail::scaled_integral(j, shift, split);
    return out;
}

WfIntegrals wf_integrals_kummer(double m0, const ModelParams& p)
{
    const WfShape s = shape(m0, p);
    // B(x, y) 1F1(x; x+y; -c) = e^{-c} B(x, y) 1F1(y; x+y; c); the common e^{-c} is dropped.
    auto I = [&](double x, double y) { return std::exp(log_beta(x, y)) * kummer_1f1(y, x + y, s.c).value; };
    WfIntegrals out;
    out.I0 = I(s.a + 1, s.b);
    out.I1 = I(s.a + 2, s.b);
    out.J = I(s.a + 1, s.b + 1);
    return out;
}

double wf_p1(double m0, const ModelParams& p)
{
    const WfShape s = shape(m0, p);
    if (p.theta0 == 0) return 1 / kummer_1f1(1, 2 + s.a + s.b, s.c).value;
    const auto I = wf_integrals(m0, p);
    return 2 * p.theta0 * I.I1 / ((2 * p.theta1 + m0) * I.J);
}

ClosedForm wf_closed(double m0, const ModelParams& p)
{
    const WfShape s = shape(m0, p);
    ClosedForm out;
    out.pgf.model_tag = "wright_fisher";
    out.pgf.params = {{"m0", m0}, {"sigma", p.sigma}, {"theta0", p.theta0}, {"theta1", p.theta1}};
    out.pmf.solver_tag = SolverTag::WrightFisherClosed;

    if (p.theta0 == 0) {
        const double x = 2 + s.a + s.b;
        const double norm = kummer_1f1(1, x, s.c).value;
        std::vector<double> probs;
        double t = 1 / norm;
        for (int n = 1;; ++n) {
            probs.push_back(t);
            t *= s.c / (x + n - 1);
            if (t < 1e-18 * probs.front() && n > s.c) break;
        }
        out.pmf.probs = std::move(probs);
        out.pmf.tail_bound = t;
        out.pmf.truncation_K = out.pmf.size();
        const double cc = s.c;
        out.pgf.p1 = 1 / norm;
        out.pgf.evaluate = [x, cc, norm](double z) {
            if (z <= 0) return 0.0;
            return z * kummer_1f1(1, x, cc * z).value / norm;
        };
        return out;
    }

    const auto I = wf_integrals(m0, p);
    const double r = I.ratio(), omr = I.one_minus_ratio();
    const int ncut = wf_cut(s);
    if (ncut > kMaxClosedTerms)
        throw PreconditionViolated("closed Wright-Fisher pmf needs " + std::to_string(ncut) +
                                   " terms; the q-sum evaluation is limited to 300");
    auto probs = mp::ladder([&]<class R>() { return wf_q_pmf<R>(m0, p, ncut); }, 1e-13);
    out.pmf.probs = std::move(probs);
    finalize_probabilities(out.pmf.probs);
    out.pmf.tail_bound = 1e-18;
    out.pmf.truncation_K = ncut;
    out.pmf.residual =
        lambda_pmf_residual(LambdaMeasure::kingman(m0), p, out.pmf.probs, std::max(1, ncut - 1));

    detail::VariationOfConstants vc;
    vc.pref = s.b / omr;
    vc.r = r;
    vc.a = s.a;
    vc.b = s.b;
    const double cc = s.c;
    vc.psi = [cc](double x) { return -cc * x; };
    vc.w = [](double) { return 1.0; };
    out.pgf.p1 = 2 * p.theta0 * I.I1 / ((2 * p.theta1 + m0) * I.J);
    out.pgf.evaluate = vc;
    return out;
}

double wf_mean(double m0, const ModelParams& p, double p1)
{
    return (2 * (p.sigma + p.theta0 - p.theta1) + (m0 + 2 * p.theta1) * p1) / (m0 + 2 * p.theta0);
}

std::vector<double> wf_factorial_moments(double m0, const ModelParams& p, double p1, int n_max)
{
    std::vector<double> F(n_max + 1, 0.0);
    F[0] = 1;
    if (n_max >= 1) F[1] = wf_mean(m0, p, p1);
    for (int n = 1; n + 1 <= n_max; ++n) {
        double G = 0, c = 1;
        for (int k = 0; k <= n; ++k) {
            G += c * F[n - k];
            c *= -double(n - k);
        }
        F[n + 1] = (2 * (n + 1.0) * p.sigma * F[n] - 2 * (n + 1.0) * p.theta1 * G) / ((n + 1.0) * m0 + 2 * p.theta0);
    }
    return F;
}

std::vector<double> wf_factorial_moments(double m0, const ModelParams& p, int n_max)
{
    return wf_factorial_moments(m0, p, wf_p1(m0, p), n_max);
}

std::vector<double> wf_factorial_moments_theta0_zero(double m0, const ModelParams& p, const StationaryPmf& pmf,
                                                     int n_max)
{
    if (p.theta0 != 0) throw DomainError("this form requires theta0 = 0");
    const WfShape s = shape(m0, p);
    std::vector<double> F(n_max + 1, 0.0);
    F[0] = 1;
    double fact = 1;
    for (int k = 1; k <= n_max; ++k) {
        fact *= k;
        const double h1 = kummer_1f1(k + 1, k + 2 + s.a + s.b, s.c).value;
        const double h0 = kummer_1f1(k, k + 1 + s.a + s.b, s.c).value;
        F[k] = fact * (h1 * pmf.p(k + 1) + h0 * pmf.p(k));
    }
    return F;
}

std::vector<double> wf_factorial_moments_theta1_zero(double m0, const ModelParams& p, int n_max)
{
    if (p.theta1 != 0) throw DomainError("this form requires theta1 = 0");
    const WfShape s = shape(m0, p);
    std::vector<double> F(n_max + 1, 0.0);
    F[0] = 1;
    const double mean = wf_mean(m0, p, wf_p1(m0, p));
    const double x = 2 + s.a + s.b;
    double c = 1;  // n! c^{n-1} / (x)_{n-1}
    for (int n = 1; n <= n_max; ++n) {
        if (n >= 2) c *= n * s.c / (x + n - 2);
        F[n] = c * mean;
    }
    return F;
}

}  // namespace bcp
