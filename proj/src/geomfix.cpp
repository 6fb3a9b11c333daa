#include "bcp/geomfix.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/tools/roots.hpp>

#include "bcp/quadrature.hpp"
#include "interior_view.hpp"

namespace bcp {

namespace {

void check_rho(double rho)
{
    if (!(rho > 0 && rho < 1)) throw DomainError("rho must lie in (0, 1)");
}

// (1 - rho)^n and 1 - (1 - rho)^n for n >= 0
double qpow(double rho, long n) { return std::exp(n * std::log1p(-rho)); }
double one_minus_qpow(double rho, long n) { return -std::expm1(n * std::log1p(-rho)); }

quad::Options geo_quad()
{
    quad::Options o;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-12;
    return o;
}

double rhs_poly(const ModelParams& p, double rho)
{
    return p.theta1 * rho * rho - (p.sigma + p.theta()) * rho + p.sigma;
}

}  // namespace

double AtomicMeasure::total_mass() const
{
    double s = 0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

double phi_small(double rho, double y) { return (1 - rho) * y / (1 - rho * y); }

double phi_big(double rho, double x) { return (1 - x) / (1 - rho * x); }

double phi_iterate(double rho, double x, long n)
{
    check_rho(rho);
    if (n == 0) return x;
    if (n > 0) return qpow(rho, n) * x / (1 - x * one_minus_qpow(rho, n));
    const long m = -n;
    return x / (qpow(rho, m) + x * one_minus_qpow(rho, m));
}

double phi_iterate_complement(double rho, double x, long n)
{
    check_rho(rho);
    if (n == 0) return 1 - x;
    if (n > 0) return (1 - x) / (1 - x * one_minus_qpow(rho, n));
    const long m = -n;
    const double q = qpow(rho, m);
    return q * (1 - x) / (q + x * one_minus_qpow(rho, m));
}

GeometricCheck check_geometric(const LambdaMeasure& m, double rho, const ModelParams& p, int n_max, double tol)
{
    check_rho(rho);
    p.validate();
    GeometricCheck out;
    out.rho = rho;
    out.m0_zero = m.m0() == 0;
    out.m1_zero = m.m1() == 0;
    const auto iv = detail::view(m);
    const double rhs = rhs_poly(p, rho);

    auto integrate = [&](auto&& integrand) {
        // integrand(x) is multiplied by the density; endpoint behaviour is that of the density
        auto f = [&](double x) { return iv.density(x) * integrand(x); };
        return quad::integrate_endpoints(f, 0.0, 1.0, std::min(iv.e0, 0.0), std::min(iv.e1, 0.0), geo_quad())
            .value;
    };

    // (cg3a): int (1-x)^n Lambda0 = (1-rho) int ((1-x)/(1-rho x))^n Lambda0 / (1-rho x)^2.
    // For densities the right side becomes int (1-y)^n rho0(psi(y)) dy with psi(y) = y/(1-rho+rho y),
    // which is the change of variables y = phi(x).
    for (int n = 0; n <= n_max; ++n) {
        double r = 0;
        if (iv.is_atomic()) {
            double lhs = 0, rr = 0;
            for (const auto& a : iv.atoms) {
                const double w = 1 - rho * a.x;
                lhs += a.mass * std::pow(1 - a.x, n);
                rr += a.mass * std::pow((1 - a.x) / w, n) / (w * w);
            }
            r = lhs - (1 - rho) * rr;
        } else {
            auto f = [&](double y) {
                const double x = y / (1 - rho + rho * y);
                return std::pow(1 - y, n) * (iv.density(y) - iv.density(x));
            };
            r = quad::integrate_endpoints(f, 0.0, 1.0, std::min(iv.e0, 0.0), std::min(iv.e1, 0.0), geo_quad())
                    .value;
        }
        out.cg3a_residuals.push_back(r);
        out.cg3a_max = std::max(out.cg3a_max, std::abs(r));
    }

    // (cg3b)
    double lhs3b = 0;
    if (iv.is_atomic()) {
        for (const auto& a : iv.atoms) lhs3b += a.mass / (1 - rho * a.x);
    } else {
        lhs3b = integrate([&](double x) { return 1 / (1 - rho * x); });
    }
    out.cg3b_residual = lhs3b - rhs / (rho * (1 - rho));

    // (cg1) for n <= 10; the integrand tends to (n+1) rho (1-rho)/2 at x = 0.
    auto cg1_kernel = [&](int n, double x) {
        const double l1 = std::log1p(-x), l2 = std::log1p(-rho * x);
        const double br = (1 - rho) * std::expm1(n * l1) - std::expm1(n * (l1 - l2));
        return br / (n * x * x);
    };
    for (int n = 1; n <= std::min(n_max, 10); ++n) {
        constexpr double xs = 1e-3;
        // quadratic through the exact limit at 0 and the kernel at xs, 2 xs
        const double k0 = 0.5 * (n + 1) * rho * (1 - rho);
        const double k1 = cg1_kernel(n, xs), k2 = cg1_kernel(n, 2 * xs);
        const double c1 = (4 * k1 - k2 - 3 * k0) / (2 * xs), c2 = (k2 - 2 * k1 + k0) / (2 * xs * xs);
        auto kern = [&](double x) { return x >= xs ? cg1_kernel(n, x) : k0 + x * (c1 + x * c2); };
        double lhs = m.m1() * rho / n;
        if (iv.is_atomic()) {
            for (const auto& a : iv.atoms) lhs += a.mass * kern(a.x);
        } else {
            lhs += integrate(kern);
        }
        const double r = lhs - rhs;
        out.cg1_residuals.push_back(r);
        out.cg1_max = std::max(out.cg1_max, std::abs(r));
    }

    out.cg3a_pass = out.cg3a_max < tol;
    out.cg3b_pass = std::abs(out.cg3b_residual) < tol;
    out.cg1_pass = out.cg1_max < tol;

    if (iv.is_atomic()) {
        // A finite list has a finite sum; an orbit accumulating at 0 is judged by
        // whether m/x stops decaying over the atoms nearest 0.
        std::vector<Atom> a = iv.atoms;
        std::sort(a.begin(), a.end(), [](const Atom& u, const Atom& v) { return u.x < v.x; });
        const std::size_t n = std::min<std::size_t>(5, a.size());
        if (n >= 5) {
            double lo = INFINITY, hi = 0;
            for (std::size_t i = 0; i < n; ++i) {
                lo = std::min(lo, a[i].mass / a[i].x);
                hi = std::max(hi, a[i].mass / a[i].x);
            }
            out.dust_free = lo > 0.5 * hi;
        }
    } else {
        out.dust_free = iv.e0 <= 0;
    }
    return out;
}

AtomicMeasure apply_S(const AtomicMeasure& mu, double rho)
{
    check_rho(rho);
    std::map<long, IndexedAtom> acc;
    auto slot = [&](long k, double x, double omx) -> IndexedAtom& {
        auto [it, fresh] = acc.try_emplace(k);
        if (fresh) it->second = IndexedAtom{k, x, omx, 0.0};
        return it->second;
    };
    for (const auto& a : mu.atoms) {
        slot(a.k, a.x, a.one_minus_x).mass += rho * a.x * (2 - rho * a.x) * a.mass;
        // 1 - phi(y) = (1 - y) / (1 - rho y)
        slot(a.k + 1, phi_small(rho, a.x), a.one_minus_x / (1 - rho * a.x)).mass += (1 - rho) * a.mass;
    }
    AtomicMeasure out;
    out.truncation_index_K = mu.truncation_index_K;
    out.tail_bound = mu.tail_bound;
    for (auto& [k, a] : acc)
        if (a.mass > 0) out.atoms.push_back(a);
    return out;
}

std::function<double(double)> apply_S(const std::function<double(double)>& h, double rho)
{
    check_rho(rho);
    return [h, rho](double y) {
        const double den = 1 - rho + rho * y;
        const double inv = y / den;                  // phi^{-1}(y)
        const double jac = (1 - rho) / (den * den);  // (phi^{-1})'(y)
        return rho * y * (2 - rho * y) * h(y) + (1 - rho) * h(inv) * jac;
    };
}

double continuous_fixed_density(double rho, double y) { return (1 - rho) / ((1 - rho * y) * (1 - rho * y)); }

namespace {

double closed_mass(double rho, double x0, double m0_mass, long k)
{
    const double w = (1 - rho * x0) * (1 - rho * x0) * m0_mass;
    if (k == 0) return m0_mass;
    if (k > 0) {
        const double b = 1 - x0 * one_minus_qpow(rho, k + 1);
        return qpow(rho, k) * w / (b * b);
    }
    const long n = -k;
    const double c = qpow(rho, n - 1) + x0 * one_minus_qpow(rho, n - 1);
    return std::exp((n - 2) * std::log1p(-rho)) * w / (c * c);
}

}  // namespace

AtomicMeasure build_discrete_fixed_point(double rho, double x0, double m0_mass, int K)
{
    check_rho(rho);
    if (!(x0 > 0 && x0 < 1)) throw DomainError("x0 must lie in (0, 1)");
    if (!(m0_mass > 0)) throw DomainError("m0 must be positive");

    const double g = 1 - rho / 2;
    double c_plus = 0, c_minus = 0;
    for (long k = 1; k <= 50; ++k) {
        const double gk = std::pow(g, double(k)) * m0_mass;
        c_plus = std::max(c_plus, closed_mass(rho, x0, m0_mass, k) / gk);
        c_minus = std::max(c_minus, closed_mass(rho, x0, m0_mass, -k) / gk);
    }
    auto tail = [&](int KK) { return (c_plus + c_minus) * m0_mass * std::pow(g, KK + 1.0) / (rho / 2); };
    const int K_max = static_cast<int>((kMaxAtoms - 1) / 2);
    if (K <= 0) {
        K = 1;
        while (tail(K) >= 1e-10 && K < K_max) ++K;
    }
    if (K > K_max) throw DomainError("too many atoms requested");

    AtomicMeasure mu;
    mu.truncation_index_K = K;
    mu.tail_bound = tail(K);
    for (long k = -K; k <= K; ++k) {
        IndexedAtom a;
        a.k = k;
        a.x = phi_iterate(rho, x0, k);
        a.one_minus_x = phi_iterate_complement(rho, x0, k);
        a.mass = closed_mass(rho, x0, m0_mass, k);
        mu.atoms.push_back(a);
    }
    return mu;
}

std::vector<double> fixed_point_masses_recursive(double rho, double x0, double m0_mass, int K)
{
    check_rho(rho);
    std::vector<double> m(2 * K + 1);
    m[K] = m0_mass;
    for (long k = 0; k < K; ++k) {
        // m_{k+1} = (1-rho) m_k / (1 - rho phi^(k+1)(x0))^2
        const double w = 1 - rho * phi_iterate(rho, x0, k + 1);
        m[K + k + 1] = (1 - rho) * m[K + k] / (w * w);
        // m_{-k-1} = m_{-k} (1 - rho phi^(-k)(x0))^2 / (1-rho), with 1 - rho x = (1-rho) + rho (1-x)
        const double v = (1 - rho) + rho * phi_iterate_complement(rho, x0, -k);
        m[K - k - 1] = m[K - k] * v * v / (1 - rho);
    }
    return m;
}

double rho_star(double x0, double m0_mass, const ModelParams& p)
{
    p.validate();
    if (!(x0 > 0 && x0 < 1)) throw DomainError("x0 must lie in (0, 1)");
    if (!(m0_mass > 0)) throw DomainError("m0 must be positive");
    if (!(m0_mass < p.sigma * x0 * (1 - x0)))
        throw PreconditionViolated("rho_star needs m0 < sigma x0 (1 - x0)");
    auto r = [&](double z) {
        return m0_mass * (1 - z * x0) * (1 - z * x0) - x0 * (1 - x0) * rhs_poly(p, z);
    };
    const auto root = boost::math::tools::bisect(r, 0.0, 1.0, boost::math::tools::eps_tolerance<double>(53));
    return 0.5 * (root.first + root.second);
}

AtomicMeasure pushforward_atoms(const AtomicMeasure& mu, double rho)
{
    check_rho(rho);
    AtomicMeasure out;
    out.truncation_index_K = mu.truncation_index_K;
    out.tail_bound = mu.tail_bound;
    for (const auto& a : mu.atoms) {
        IndexedAtom b;
        b.k = a.k;
        b.mass = a.mass;
        const double w = 1 - rho * a.x;
        b.x = a.one_minus_x / w;
        b.one_minus_x = (1 - rho) * a.x / w;
        out.atoms.push_back(b);
    }
    return out;
}

LambdaMeasure pushforward_to_lambda(const AtomicMeasure& mu, double rho)
{
    const AtomicMeasure img = pushforward_atoms(mu, rho);
    std::vector<Atom> atoms;
    for (const auto& a : img.atoms)
        if (a.x > 0 && a.x < 1) atoms.push_back({a.x, a.mass});
    std::sort(atoms.begin(), atoms.end(), [](const Atom& u, const Atom& v) { return u.x < v.x; });
    // far orbit points can collide in double precision
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().x == a.x)
            merged.back().mass += a.mass;
        else
            merged.push_back(a);
    }
    atoms = std::move(merged);
    return LambdaMeasure::atoms(std::move(atoms));
}

SumIdentity fixed_point_sum_identity(const AtomicMeasure& mu, double rho, double x0, double m0_mass)
{
    SumIdentity s;
    // Kahan sum: terms span many orders of magnitude
    double sum = 0, comp = 0;
    for (const auto& a : mu.atoms) {
        const double t = a.mass * ((1 - rho) + rho * a.one_minus_x) / (1 - rho) - comp;
        const double u = sum + t;
        comp = (u - sum) - t;
        sum = u;
    }
    s.numeric = sum;
    s.closed = m0_mass * (1 - rho * x0) * (1 - rho * x0) / (rho * (1 - rho) * x0 * (1 - x0));
    return s;
}

}  // namespace bcp
