#include "bcp/recursions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bcp/closedform.hpp"

namespace bcp {

std::string to_string(SolverTag t)
{
    switch (t) {
    case SolverTag::MoranBackward: return "moran_backward";
    case SolverTag::MoranShooting: return "moran_shooting";
    case SolverTag::MoranNullspace: return "moran_nullspace";
    case SolverTag::MoranClosed: return "moran_closed";
    case SolverTag::LambdaTruncated: return "lambda_truncated";
    case SolverTag::StarClosedTails: return "star_closed_tails";
    case SolverTag::StarForward: return "star_forward";
    case SolverTag::StarBanded: return "star_banded";
    case SolverTag::StarSeries: return "star_series";
    case SolverTag::CrowKimura: return "crow_kimura";
    case SolverTag::WrightFisherClosed: return "wright_fisher_closed";
    case SolverTag::Beta31Ode: return "beta31_ode";
    }
    return "unknown";
}

std::vector<double> StationaryPmf::tails() const
{
    std::vector<double> a(probs.size() + 1, 0.0);
    double s = 0;
    for (std::size_t n = probs.size(); n-- > 0;) {
        a[n + 1] = s;
        s += probs[n];
    }
    a[0] = 1.0;
    return a;
}

double StationaryPmf::mean() const
{
    double m = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) m += (i + 1.0) * probs[i];
    return m;
}

std::vector<double> StationaryPmf::factorial_moments(int n_max) const
{
    std::vector<double> out(n_max + 1, 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double L = i + 1.0;
        double ff = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            out[n] += ff * probs[i];
            ff *= L - n;
            if (ff == 0) break;
        }
    }
    return out;
}

double StationaryPmf::pgf(double z) const
{
    double g = 0;
    for (std::size_t i = probs.size(); i-- > 0;) g = (g + probs[i]) * z;
    return g;
}

void finalize_probabilities(std::vector<double>& p, double clip)
{
    for (double& v : p) {
        if (!std::isfinite(v)) throw NegativeMass("non-finite probability");
        if (v < 0) {
            if (v < -clip) {
                std::ostringstream os;
                os << "probability " << v << " below clipping tolerance";
                throw NegativeMass(os.str());
            }
            v = 0;
        }
    }
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(s > 0)) throw NegativeMass("probabilities sum to zero");
    for (double& v : p) v /= s;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    const std::size_t n = std::max(a.size(), b.size());
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        d = std::max(d, std::abs(x - y));
    }
    return d;
}

// ---------------------------------------------------------------- Moran

double moran_rate(const MoranParams& p, int i, int j)
{
    const int N = p.N;
    if (i < 1 || i > N || j < 1 || j > N || i == j) return 0.0;
    if (j == i + 1) return double(i) * (N - i) * p.s / N;
    if (j == i - 1) return double(i) * (i - 1) / N + (i - 1) * p.u1 + p.u0;
    if (j <= i - 2) return p.u0;
    return 0.0;
}

double moran_pmf_residual(const MoranParams& p, const std::vector<double>& probs)
{
    const int N = p.N;
    auto P = [&](int n) { return n >= 1 && n <= int(probs.size()) ? probs[n - 1] : 0.0; };
    double res = std::abs((1 + p.u()) * P(N) - p.s / N * P(N - 1));
    double S = P(N);
    for (int n = N - 1; n >= 2; --n) {
        S += P(n);
        const double lhs = (double(n) / N + p.u1) * P(n);
        const double rhs = (N - n + 1.0) * p.s / N * P(n - 1) - p.u0 * S;
        res = std::max(res, std::abs(lhs - rhs));
    }
    double total = 0;
    for (double v : probs) total += v;
    return std::max(res, std::abs(total - 1));
}

StationaryPmf solve_moran(const MoranParams& p)
{
    p.validate();
    const int N = p.N;
    std::vector<double> q(N + 1, 0.0);
    q[N] = 1.0;
    q[N - 1] = N * (1 + p.u()) / p.s;
    double S = q[N] + q[N - 1];
    constexpr double kBig = 1e250;
    for (int n = N - 1; n >= 2; --n) {
        q[n - 1] = ((double(n) / N + p.u1) * q[n] + p.u0 * S) * N / ((N - n + 1.0) * p.s);
        S += q[n - 1];
        if (q[n - 1] > kBig) {
            for (int k = n - 1; k <= N; ++k) q[k] /= kBig;
            S /= kBig;
        }
    }
    StationaryPmf out;
    out.probs.assign(q.begin() + 1, q.end());
    finalize_probabilities(out.probs);
    out.truncation_K = N;
    out.solver_tag = SolverTag::MoranBackward;
    out.residual = moran_pmf_residual(p, out.probs);
    return out;
}

StationaryPmf solve_moran_shooting(const MoranParams& p)
{
    p.validate();
    const int N = p.N;
    std::vector<double> al(N, 0.0), be(N, 0.0);  // a_n = al_n + be_n a_1, n = 0..N-1
    al[0] = 1;
    if (N > 1) be[1] = 1;
    double amp = 1;  // max of |al|, |be| in the current scale
    double log_scale = 0;
    for (int n = 2; n <= N - 1; ++n) {
        const double c1 = double(n) / N + (N - n + 1.0) * p.s / N + p.u();
        const double c2 = (N - n + 1.0) * p.s / N;
        const double d = double(n) / N + p.u1;
        al[n] = (c1 * al[n - 1] - c2 * al[n - 2]) / d;
        be[n] = (c1 * be[n - 1] - c2 * be[n - 2]) / d;
        const double m = std::max(std::abs(al[n]) , std::abs(be[n]));
        amp = std::max(amp, m);
        if (N > 500 && n % 50 == 0 && m > 1e100) {
            // rescale the whole propagated pair; the boundary equation is homogeneous in it
            for (int k = 0; k <= n; ++k) {
                al[k] /= m;
                be[k] /= m;
            }
            log_scale += std::log(m);
            amp /= m;
        }
    }
    double a1;
    if (N == 2) {
        // boundary row alone: (1+u+s/2) a_1 = (s/2) a_0
        a1 = (p.s / N) / (1 + p.u() + p.s / N);
    } else {
        const double c1 = 1 + p.u() + p.s / N, c2 = p.s / N;
        const double den = c1 * be[N - 1] - c2 * be[N - 2];
        const double num = -(c1 * al[N - 1] - c2 * al[N - 2]);
        if (den == 0 || !std::isfinite(den))
            throw SingularShooting("shooting: boundary equation degenerates in a_1");
        a1 = num / den;
        const double cancel = (std::abs(c1 * be[N - 1]) + std::abs(c2 * be[N - 2])) / std::abs(den);
        const double err = 4 * std::numeric_limits<double>::epsilon() * amp * cancel * std::exp(log_scale);
        if (!(err < 1e-9)) {
            std::ostringstream os;
            os << "shooting: error amplification " << err << " exceeds tolerance";
            throw InstabilityDetected(os.str());
        }
    }
    std::vector<double> a(N + 1, 0.0);
    for (int n = 0; n <= N - 1; ++n) a[n] = al[n] + be[n] * a1;  // a[0] carries any rescaling
    a[N] = 0;
    StationaryPmf out;
    out.probs.resize(N);
    for (int n = 1; n <= N; ++n) out.probs[n - 1] = a[n - 1] - a[n];
    finalize_probabilities(out.probs);
    out.truncation_K = N;
    out.solver_tag = SolverTag::MoranShooting;
    out.residual = moran_pmf_residual(p, out.probs);
    return out;
}

std::vector<double> gth_stationary(std::vector<double> Q, int n, par::Exec exec)
{
    const bool parallel = exec == par::Exec::Parallel;
    auto A = [&](int i, int j) -> double& { return Q[std::size_t(i) * n + j]; };
    for (int k = n - 1; k >= 1; --k) {
        double s = 0;
        for (int j = 0; j < k; ++j) s += A(k, j);
        if (!(s > 0)) throw PreconditionViolated("GTH: chain is reducible");
        for (int i = 0; i < k; ++i) A(i, k) /= s;
#pragma omp parallel for schedule(static) if (parallel)
        for (int i = 0; i < k; ++i) {
            const double aik = A(i, k);
            if (aik == 0) continue;
            double* row = &Q[std::size_t(i) * n];
            const double* rk = &Q[std::size_t(k) * n];
            for (int j = 0; j < k; ++j) row[j] += aik * rk[j];
        }
    }
    std::vector<double> pi(n, 0.0);
    pi[0] = 1;
    for (int j = 1; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < j; ++i) s += pi[i] * A(i, j);
        pi[j] = s;
    }
    const double tot = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& v : pi) v /= tot;
    return pi;
}

StationaryPmf solve_moran_nullspace(const MoranParams& p, par::Exec exec)
{
    p.validate();
    const int N = p.N;
    if (N > 2000) throw PreconditionViolated("nullspace oracle is limited to N <= 2000");
    std::vector<double> Q(std::size_t(N) * N, 0.0);
    for (int i = 1; i <= N; ++i) {
        double out = 0;
        for (int j = 1; j <= N; ++j) {
            if (j == i) continue;
            const double r = moran_rate(p, i, j);
            Q[std::size_t(i - 1) * N + (j - 1)] = r;
            out += r;
        }
        Q[std::size_t(i - 1) * N + (i - 1)] = -out;
    }
    const std::vector<double> Qcopy = Q;
    StationaryPmf res;
    res.probs = gth_stationary(std::move(Q), N, exec);
    res.truncation_K = N;
    res.solver_tag = SolverTag::MoranNullspace;
    double r = 0;
    for (int j = 0; j < N; ++j) {
        double s = 0;
        for (int i = 0; i < N; ++i) s += res.probs[i] * Qcopy[std::size_t(i) * N + j];
        r = std::max(r, std::abs(s));
    }
    res.residual = r;
    return res;
}

// ---------------------------------------------------------------- general Lambda

namespace {

// Rows c_{n,k}, k = n+1..K, for n in [lo, hi], each in its own buffer.
void fill_rows(const LambdaMeasure& m, int lo, int hi, int K, std::vector<std::vector<double>>& rows,
               bool parallel)
{
    const int cnt = hi - lo + 1;
    rows.resize(cnt);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (int r = 0; r < cnt; ++r) {
        const int n = lo + r;
        rows[r].assign(std::max(0, K - n), 0.0);
        if (K > n) cnk_row(m, n, K, rows[r].data());
    }
}

constexpr int kRowBlock = 64;

}  // namespace

StationaryPmf solve_lambda_fixed_K(const LambdaMeasure& m, const ModelParams& p, int K, par::Exec exec)
{
    p.validate();
    if (K < 2) throw DomainError("truncation level must be at least 2");
    StationaryPmf out;
    out.truncation_K = K;
    out.solver_tag = SolverTag::LambdaTruncated;
    if (p.sigma == 0) {
        out.probs.assign(K, 0.0);
        out.probs[0] = 1.0;
        return out;
    }
    const bool parallel = exec == par::Exec::Parallel;
    std::vector<double> q(K + 2, 0.0);  // q[n] ~ p_n, unnormalised
    q[K] = 1.0;
    double tail = 1.0;  // sum_{k>n} q_k once row n is processed
    constexpr double kBig = 1e200;
    std::vector<std::vector<double>> rows;
    int hi = K - 1;
    while (hi >= 1) {
        const int lo = std::max(1, hi - kRowBlock + 1);
        fill_rows(m, lo, hi, K, rows, parallel);
        for (int n = hi; n >= lo; --n) {
            const auto& c = rows[n - lo];
            double acc = 0;
            for (int k = n + 1; k <= K; ++k) acc += q[k] * c[k - n - 1];
            const double lhs = (m.m0() * (n + 1) / 2.0 + p.theta1) * q[n + 1] + acc +
                               (m.m1() / n + p.theta0) * tail;
            q[n] = lhs / p.sigma;
            tail += q[n];
            if (q[n] > kBig) {
                for (int k = n; k <= K; ++k) q[k] /= kBig;
                tail /= kBig;
            }
        }
        hi = lo - 1;
    }
    out.probs.assign(q.begin() + 1, q.begin() + K + 1);
    finalize_probabilities(out.probs);
    out.residual = lambda_pmf_residual(m, p, out.probs, K - 1);
    return out;
}

double lambda_pmf_residual(const LambdaMeasure& m, const ModelParams& p, const std::vector<double>& probs,
                           int n_max)
{
    const int K = static_cast<int>(probs.size());
    auto P = [&](int n) { return n >= 1 && n <= K ? probs[n - 1] : 0.0; };
    std::vector<double> suffix(K + 2, 0.0);
    for (int n = K; n >= 1; --n) suffix[n] = suffix[n + 1] + P(n);
    double res = 0;
    std::vector<double> row;
    for (int n = 1; n <= std::min(n_max, K - 1); ++n) {
        row.assign(K - n, 0.0);
        cnk_row(m, n, K, row.data());
        double acc = 0;
        for (int k = n + 1; k <= K; ++k) acc += P(k) * row[k - n - 1];
        const double lhs = (m.m0() * (n + 1) / 2.0 + p.theta1) * P(n + 1) + acc +
                           (m.m1() / n + p.theta0) * suffix[n + 1];
        res = std::max(res, std::abs(lhs - p.sigma * P(n)));
    }
    return res;
}

StationaryPmf solve_lambda_truncated(const LambdaMeasure& m, const ModelParams& p,
                                     const LambdaSolveOptions& opt)
{
    p.validate();
    const auto rec = is_positive_recurrent(m, p);
    std::vector<std::string> warnings;
    if (rec.verdict == Recurrence::Verdict::NotPositiveRecurrent)
        warnings.push_back("block counting process is not positive recurrent (" + rec.clause + ")");
    else if (rec.verdict == Recurrence::Verdict::Undetermined)
        warnings.push_back("positive recurrence not established: " + rec.clause);
    int K = std::max(opt.K, 10);
    if (K > opt.K_cap) throw DomainError("initial truncation level exceeds the cap");
    StationaryPmf cur = solve_lambda_fixed_K(m, p, K, opt.exec);
    if (!opt.auto_double) {
        cur.warnings = warnings;
        return cur;
    }
    for (;;) {
        if (2 * K > opt.K_cap) {
            std::ostringstream os;
            os << "truncated system did not stabilise below K = " << opt.K_cap;
            throw NoConvergence(os.str());
        }
        StationaryPmf next = solve_lambda_fixed_K(m, p, 2 * K, opt.exec);
        const double d = sup_distance(cur.probs, next.probs);
        if (d < opt.tol) {
            cur.tail_bound = d;
            cur.warnings = warnings;
            return cur;
        }
        cur = std::move(next);
        K *= 2;
    }
}

// ---------------------------------------------------------------- star-shaped

namespace {

StationaryPmf pmf_from_tails(const std::vector<double>& a)
{
    StationaryPmf out;
    out.probs.resize(a.size() - 1);
    for (std::size_t n = 1; n < a.size(); ++n) out.probs[n - 1] = a[n - 1] - a[n];
    return out;
}

double star_residual(const ModelParams& p, double m1, const std::vector<double>& a)
{
    double res = 0;
    const double th = p.theta();
    for (std::size_t n = 1; n + 1 < a.size(); ++n) {
        const double lhs = (m1 / n + th + p.sigma) * a[n];
        res = std::max(res, std::abs(lhs - p.sigma * a[n - 1] - p.theta1 * a[n + 1]));
    }
    return res;
}

}  // namespace

StationaryPmf solve_star_banded(const ModelParams& p, double m1, int K)
{
    p.validate();
    if (!(p.sigma > 0)) throw DomainError("star model needs sigma > 0");
    if (K < 2) throw DomainError("banded star solve needs K >= 2");
    const double th = p.theta();
    // Thomas algorithm on -sigma a_{n-1} + d_n a_n - theta1 a_{n+1} = 0, n = 1..K-1.
    std::vector<double> cp(K, 0.0), dp(K, 0.0);
    for (int n = 1; n <= K - 1; ++n) {
        const double diag = m1 / n + th + p.sigma;
        const double lower = n == 1 ? 0.0 : -p.sigma;
        const double rhs = n == 1 ? p.sigma : 0.0;
        const double denom = diag - lower * (n == 1 ? 0.0 : cp[n - 1]);
        cp[n] = -p.theta1 / denom;
        dp[n] = (rhs - lower * (n == 1 ? 0.0 : dp[n - 1])) / denom;
    }
    std::vector<double> a(K + 1, 0.0);
    a[0] = 1;
    for (int n = K - 1; n >= 1; --n) a[n] = dp[n] - cp[n] * a[n + 1];
    StationaryPmf out = pmf_from_tails(a);
    out.tail_bound = a[K - 1];
    finalize_probabilities(out.probs);
    out.truncation_K = K;
    out.solver_tag = SolverTag::StarBanded;
    out.residual = star_residual(p, m1, a);
    return out;
}

StationaryPmf solve_star(const ModelParams& p, double m1, const StarOptions& opt)
{
    p.validate();
    if (!(p.sigma > 0)) throw DomainError("star model needs sigma > 0");
    if (!(m1 >= 0)) throw DomainError("star model needs m1 >= 0");
    const double th = p.theta();
    StationaryPmf out;

    if (p.theta1 == 0) {
        const double r = p.sigma / (p.sigma + p.theta0);
        const double x = m1 / (p.sigma + p.theta0);
        std::vector<double> probs;
        double a = 1.0;
        int n = 1;
        for (; n <= opt.K; ++n) {
            // p_n = a_{n-1} (n(1-r) + x) / (n + x), a_n = a_{n-1} n r / (n + x)
            probs.push_back(a * (n * (1 - r) + x) / (n + x));
            a *= n * r / (n + x);
            if (a < 1e-17) break;
        }
        out.probs = std::move(probs);
        out.tail_bound = a;
        out.truncation_K = static_cast<int>(out.probs.size());
        out.solver_tag = SolverTag::StarClosedTails;
        if (a <= 1e-12) {
            finalize_probabilities(out.probs);
        } else {
            std::ostringstream os;
            os << "tail mass " << a << " beyond K = " << out.truncation_K << " is not captured";
            out.warnings.push_back(os.str());
        }
        std::vector<double> tails = out.tails();
        out.residual = star_residual(p, m1, tails);
        return out;
    }

    double p1, dp1;
    if (opt.p1) {
        p1 = *opt.p1;
        dp1 = 4 * std::numeric_limits<double>::epsilon();
    } else {
        const auto sp = star_p1(p, m1);
        p1 = sp.value;
        dp1 = std::max(sp.error, 4 * std::numeric_limits<double>::epsilon());
    }

    // Forward substitution in extended precision with a running error bound.
    using X = long double;
    std::vector<double> a{1.0, 1.0 - p1};
    X am2 = 1, am1 = X(1) - X(p1);
    X em2 = 0, em1 = dp1;
    bool unstable = false;
    std::string why;
    for (int n = 1; n < opt.K; ++n) {
        const X c = X(m1) / n + th + p.sigma;
        const X an = (c * am1 - X(p.sigma) * am2) / X(p.theta1);
        const X en = (c * em1 + X(p.sigma) * em2) / X(p.theta1) + std::numeric_limits<X>::epsilon() * std::abs(an);
        if (am1 <= 1e-16L) break;  // remaining tail below resolution
        if (en > 1e-12L) {
            if (am1 <= 1e-12L) break;
            unstable = true;
            why = "error bound exceeded at n = " + std::to_string(n + 1);
            break;
        }
        if (an > am1 + en || an < -en) {
            unstable = true;
            why = "tail sequence not monotone at n = " + std::to_string(n + 1);
            break;
        }
        a.push_back(static_cast<double>(std::max(an, X(0))));
        am2 = am1;
        am1 = an;
        em2 = em1;
        em1 = en;
    }
    if (unstable) {
        if (!opt.allow_fallback) throw InstabilityDetected("star forward recursion: " + why);
        int K = 64;
        StationaryPmf b;
        for (;;) {
            b = solve_star_banded(p, m1, K);
            if (b.tail_bound < 1e-17 || 2 * K > opt.K) break;
            K *= 2;
        }
        b.warnings.push_back("forward recursion unstable (" + why + "); used two-sided banded solve");
        return b;
    }
    a.push_back(0.0);
    out = pmf_from_tails(a);
    out.tail_bound = a[a.size() - 2];
    finalize_probabilities(out.probs);
    out.truncation_K = static_cast<int>(out.probs.size());
    out.solver_tag = SolverTag::StarForward;
    a.pop_back();
    out.residual = star_residual(p, m1, a);
    return out;
}

// ---------------------------------------------------------------- Crow-Kimura

double crow_kimura_p(const ModelParams& p)
{
    p.validate();
    if (!(p.theta0 > 0 || p.theta1 > p.sigma))
        throw NotPositiveRecurrent("Crow-Kimura chain needs theta0 > 0 or theta1 > sigma");
    if (p.theta1 == 0) return p.sigma / (p.sigma + p.theta0);
    const double th = p.theta();
    const double disc = std::sqrt((p.sigma - th) * (p.sigma - th) + 4 * p.sigma * p.theta0);
    // rationalised form of (sigma + theta - disc) / (2 theta1)
    return 2 * p.sigma / (p.sigma + th + disc);
}

CrowKimura crow_kimura_geometric(const ModelParams& p, int K)
{
    CrowKimura out;
    out.p = crow_kimura_p(p);
    const double q = out.p;
    if (K <= 0) {
        K = q > 0 ? std::max(10, static_cast<int>(std::ceil(std::log(1e-18) / std::log(q))) + 1) : 10;
    }
    out.pmf.probs.resize(K);
    double pw = 1.0;
    for (int n = 1; n <= K; ++n) {
        out.pmf.probs[n - 1] = (1 - q) * pw;
        pw *= q;
    }
    out.pmf.tail_bound = pw;
    out.pmf.truncation_K = K;
    out.pmf.solver_tag = SolverTag::CrowKimura;
    out.pmf.residual = lambda_pmf_residual(LambdaMeasure::zero(), p, out.pmf.probs, K - 1);
    return out;
}

}  // namespace bcp
