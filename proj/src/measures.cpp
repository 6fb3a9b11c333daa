#include "bcp/measures.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "bcp/quadrature.hpp"
#include "bcp/specfun.hpp"

namespace bcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_binom(int k, int j)
{
    return std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_beta31(const BetaDensity& b) { return b.a == 3.0 && b.b == 1.0; }

// exp(logscale) * int x^{j-2} (1-x)^{k-j} rho(x) dx for a custom density.
double custom_moment(const CustomDensity& c, int k, int j, double logscale)
{
    auto f = [&](double x) {
        double v = c.density(x);
        if (v == 0) return 0.0;
        double e = logscale + (j - 2) * std::log(x);
        if (k != j) e += (k - j) * std::log1p(-x);
        return v * std::exp(e);
    };
    try {
        return quad::integrate_endpoints(f, 0.0, 1.0, c.e0 + (j - 2), c.e1 + (k - j)).value;
    } catch (const QuadratureFailure& e) {
        throw IntegrabilityError(std::string("custom density: ") + e.what());
    }
}

}  // namespace

LambdaMeasure::LambdaMeasure(double m0, double m1, InteriorPart interior)
    : m0_(m0), m1_(m1), interior_(std::move(interior))
{
    if (!(m0 >= 0) || !(m1 >= 0) || !std::isfinite(m0) || !std::isfinite(m1))
        throw DomainError("atom masses at 0 and 1 must be finite and nonnegative");
    std::visit(overloaded{
                   [](const InteriorZero&) {},
                   [](const UniformScaled& u) {
                       if (!(u.c > 0) || !std::isfinite(u.c))
                           throw DomainError("uniform scale must be positive");
                   },
                   [](const BetaDensity& b) {
                       if (!(b.a > 0 && b.b > 0 && b.total_mass > 0))
                           throw DomainError("beta density needs a, b, mass > 0");
                   },
                   [](const Atoms& a) {
                       if (a.atoms.size() > kMaxAtoms)
                           throw CoarseningError("atom list exceeds the 10^4 cap");
                       double prev = 0;
                       for (const auto& at : a.atoms) {
                           if (!(at.x > 0 && at.x < 1))
                               throw DomainError("atom locations must lie in (0,1)");
                           if (!(at.x > prev))
                               throw DomainError("atom locations must be strictly increasing");
                           if (!(at.mass > 0)) throw DomainError("atom masses must be positive");
                           prev = at.x;
                       }
                   },
                   [](const CustomDensity& c) {
                       if (!c.density) throw DomainError("custom density has no function");
                       if (!(c.e0 > -1 && c.e1 > -1))
                           throw IntegrabilityError("custom density is not a finite measure");
                   },
               },
               interior_);
}

double LambdaMeasure::interior_mass() const
{
    return std::visit(overloaded{
                          [](const InteriorZero&) { return 0.0; },
                          [](const UniformScaled& u) { return u.c; },
                          [](const BetaDensity& b) { return b.total_mass; },
                          [](const Atoms& a) {
                              double s = 0;
                              for (const auto& at : a.atoms) s += at.mass;
                              return s;
                          },
                          [](const CustomDensity& c) {
                              return quad::integrate_endpoints(c.density, 0.0, 1.0, c.e0, c.e1).value;
                          },
                      },
                      interior_);
}

std::string LambdaMeasure::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "m0=" << m0_ << ",m1=" << m1_ << ",interior=";
    std::visit(overloaded{
                   [&](const InteriorZero&) { os << "zero"; },
                   [&](const UniformScaled& u) { os << "uniform(c=" << u.c << ")"; },
                   [&](const BetaDensity& b) {
                       os << "beta(a=" << b.a << ",b=" << b.b << ",mass=" << b.total_mass << ")";
                   },
                   [&](const Atoms& a) { os << "atoms(n=" << a.atoms.size() << ")"; },
                   [&](const CustomDensity& c) { os << c.label; },
               },
               interior_);
    return os.str();
}

void ModelParams::validate() const
{
    if (!(sigma >= 0 && theta0 >= 0 && theta1 >= 0) ||
        !std::isfinite(sigma + theta0 + theta1))
        throw DomainError("sigma, theta0, theta1 must be finite and nonnegative");
}

void MoranParams::validate() const
{
    if (N < 2) throw DomainError("Moran model needs N >= 2");
    if (!(s > 0) || !std::isfinite(s)) throw DomainError("Moran model needs s > 0");
    if (!(u0 >= 0 && u1 >= 0) || !std::isfinite(u0 + u1))
        throw DomainError("mutation rates must be nonnegative");
}

double interior_merge_rate(const LambdaMeasure& m, int k, int j)
{
    if (j < 2 || j > k) throw DomainError("merge rate needs 2 <= j <= k");
    return std::visit(
        overloaded{
            [](const InteriorZero&) { return 0.0; },
            [&](const UniformScaled& u) { return u.c * k / (double(j) * (j - 1)); },
            [&](const BetaDensity& b) {
                if (is_beta31(b)) return 3.0 * b.total_mass / (k + 1.0);
                return b.total_mass *
                       std::exp(log_binom(k, j) + log_beta(b.a + j - 2, b.b + k - j) - log_beta(b.a, b.b));
            },
            [&](const Atoms& a) {
                const double lb = log_binom(k, j);
                double s = 0;
                for (const auto& at : a.atoms)
                    s += at.mass * std::exp(lb + (j - 2) * std::log(at.x) + (k - j) * std::log1p(-at.x));
                return s;
            },
            [&](const CustomDensity& c) { return custom_moment(c, k, j, log_binom(k, j)); },
        },
        m.interior());
}

double merge_rate(const LambdaMeasure& m, int k, int j)
{
    double r = interior_merge_rate(m, k, j);
    if (j == 2) r += m.m0() * 0.5 * k * (k - 1);
    if (j == k) r += m.m1();
    return r;
}

double lambda_rate(const LambdaMeasure& m, int k, int j)
{
    if (j < 2 || j > k) throw DomainError("lambda_rate needs 2 <= j <= k");
    double r = std::visit(
        overloaded{
            [](const InteriorZero&) { return 0.0; },
            [&](const UniformScaled& u) { return u.c * beta_fn(j - 1.0, k - j + 1.0); },
            [&](const BetaDensity& b) {
                return b.total_mass * std::exp(log_beta(b.a + j - 2, b.b + k - j) - log_beta(b.a, b.b));
            },
            [&](const Atoms& a) {
                double s = 0;
                for (const auto& at : a.atoms)
                    s += at.mass * std::pow(at.x, j - 2) * std::pow(1 - at.x, k - j);
                return s;
            },
            [&](const CustomDensity& c) { return custom_moment(c, k, j, 0.0); },
        },
        m.interior());
    if (j == 2) r += m.m0();
    if (j == k) r += m.m1();
    return r;
}

SigmaLambda sigma_lambda(const LambdaMeasure& m)
{
    SigmaLambda out;
    out.atom_at_zero = m.m0() > 0;
    out.atom_at_one = m.m1() > 0;
    double v = std::visit(
        overloaded{
            [](const InteriorZero&) { return 0.0; },
            [](const UniformScaled&) { return kInf; },
            [](const BetaDensity& b) {
                if (b.a <= 1) return kInf;
                // B(a-2, b) (psi(a+b-2) - psi(b)) / B(a, b), the gamma ratio being rational
                const double a = b.a, q = b.b, p = a - 2;
                const double ratio = (a + q - 1) * (a + q - 2) / (a - 1);
                double core;
                if (std::abs(p) < 1e-7)
                    core = ratio * boost::math::trigamma(q);
                else
                    core = ratio / p * (boost::math::digamma(p + q) - boost::math::digamma(q));
                return b.total_mass * core;
            },
            [](const Atoms& a) {
                double s = 0;
                for (const auto& at : a.atoms) s += at.mass * (-std::log1p(-at.x)) / (at.x * at.x);
                return s;
            },
            [](const CustomDensity& c) {
                if (c.e0 <= 0) return kInf;
                auto f = [&](double x) { return c.density(x) * (-std::log1p(-x)) / (x * x); };
                double total = quad::integrate_endpoints(f, 0.5, 1.0, 0.0, c.e1).value;
                for (int j = 1; j < 200; ++j) {
                    const double hi = std::ldexp(1.0, -j), lo = std::ldexp(1.0, -j - 1);
                    const double shell = quad::integrate(f, lo, hi).value;
                    total += shell;
                    if (total > 1e12) return kInf;
                    if (shell <= 1e-17 * total) break;
                }
                return total;
            },
        },
        m.interior());
    out.divergent_interior = std::isinf(v);
    if (out.atom_at_zero || out.atom_at_one) v = kInf;
    out.value = v;
    return out;
}

Recurrence is_positive_recurrent(const LambdaMeasure& m, const ModelParams& p)
{
    p.validate();
    Recurrence r;
    if (m.is_zero()) {
        if (p.theta0 > 0) {
            r.verdict = Recurrence::Verdict::PositiveRecurrent;
            r.clause = "Lambda = 0 and theta0 > 0";
        } else if (p.theta1 > p.sigma) {
            r.verdict = Recurrence::Verdict::PositiveRecurrent;
            r.clause = "Lambda = 0, theta0 = 0 and theta1 > sigma";
        } else {
            r.verdict = Recurrence::Verdict::NotPositiveRecurrent;
            r.clause = "Lambda = 0, theta0 = 0 and theta1 <= sigma";
        }
        return r;
    }
    if (p.theta0 > 0) {
        r.verdict = Recurrence::Verdict::PositiveRecurrent;
        r.clause = "theta0 > 0";
        return r;
    }
    const double sl = sigma_lambda(m).value;
    if (p.sigma < sl + p.theta1) {
        r.verdict = Recurrence::Verdict::PositiveRecurrent;
        r.clause = std::isinf(sl) ? "sigma_Lambda = inf" : "sigma < sigma_Lambda + theta1";
        return r;
    }
    r.verdict = Recurrence::Verdict::Undetermined;
    r.clause = "sufficient condition sigma < sigma_Lambda + theta1 fails";
    return r;
}

double cnk(const LambdaMeasure& m, int n, int k)
{
    if (!(n >= 1 && k > n)) throw DomainError("cnk needs k > n >= 1");
    if (const auto* u = std::get_if<UniformScaled>(&m.interior())) return u->c / (k - n);
    if (const auto* b = std::get_if<BetaDensity>(&m.interior()); b && is_beta31(*b))
        return 3.0 * b->total_mass / (k + 1.0);
    if (m.interior_is_zero()) return 0.0;
    // (1/n) int xi^-2 P(Bin(k, xi) >= k-n+1) Lambda0(dxi): every term is positive.
    double s = 0;
    for (int j = k - n + 1; j <= k; ++j) s += interior_merge_rate(m, k, j);
    return s / n;
}

void cnk_row(const LambdaMeasure& m, int n, int K, double* out)
{
    if (K <= n) return;
    if (const auto* u = std::get_if<UniformScaled>(&m.interior())) {
        for (int k = n + 1; k <= K; ++k) out[k - n - 1] = u->c / (k - n);
        return;
    }
    if (const auto* b = std::get_if<BetaDensity>(&m.interior()); b && is_beta31(*b)) {
        for (int k = n + 1; k <= K; ++k) out[k - n - 1] = 3.0 * b->total_mass / (k + 1.0);
        return;
    }
    if (m.interior_is_zero()) {
        for (int k = n + 1; k <= K; ++k) out[k - n - 1] = 0.0;
        return;
    }
    double c = cnk(m, n, K);
    out[K - n - 1] = c;
    for (int k = K - 1; k > n; --k) {
        c += interior_merge_rate(m, k + 1, k + 1 - n) / (k + 1);
        out[k - n - 1] = c;
    }
}

}  // namespace bcp
