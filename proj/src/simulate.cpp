#include "bcp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace bcp::sim {

namespace {

constexpr double kMaxExitRate = 1e12;
constexpr long kMaxAsgEvents = 10'000'000;
constexpr double kInf = std::numeric_limits<double>::infinity();

void push(RateRow& r, int target, double rate)
{
    if (rate < 0) throw DomainError("negative transition rate");
    if (rate == 0) return;
    r.targets.push_back(target);
    r.cumulative.push_back(r.total() + rate);
}

// One Gillespie step; returns false if the state is absorbing.
bool step(const RateRow& row, Engine& eng, int& state, double& holding)
{
    const double total = row.total();
    if (total == 0) {
        holding = kInf;
        return false;
    }
    if (total > kMaxExitRate) throw RateOverflow("exit rate " + std::to_string(total) + " exceeds 1e12");
    holding = std::exponential_distribution<double>(total)(eng);
    const double u = std::uniform_real_distribution<double>(0.0, total)(eng);
    const auto it = std::upper_bound(row.cumulative.begin(), row.cumulative.end(), u);
    const auto idx = std::min<std::size_t>(it - row.cumulative.begin(), row.targets.size() - 1);
    state = row.targets[idx];
    return true;
}

template <class RowFn>
JumpPath run_path(RowFn&& row_of, int start, long max_events, std::uint64_t seed, ChainModel model)
{
    if (max_events < 0) throw DomainError("max_events must be nonnegative");
    JumpPath path;
    path.seed = seed;
    path.model = model;
    Engine eng = make_engine(seed);
    int state = start;
    for (long e = 0;; ++e) {
        path.states.push_back(state);
        if (state == kCemetery) {
            path.holding_times.push_back(kInf);
            path.absorbed = true;
            break;
        }
        double hold = 0;
        int next = state;
        const bool moved = step(row_of(state), eng, next, hold);
        path.holding_times.push_back(hold);
        if (!moved) {
            path.absorbed = true;
            break;
        }
        if (e == max_events) break;  // the holding time of the last state is kept, the jump is not
        state = next;
    }
    return path;
}

}  // namespace

std::string to_string(ChainModel m)
{
    switch (m) {
    case ChainModel::MoranL: return "moran_L";
    case ChainModel::LambdaL: return "lambda_L";
    case ChainModel::KilledAsg: return "killed_asg";
    case ChainModel::MoranX: return "moran_X";
    }
    return "unknown";
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Engine make_engine(std::uint64_t seed, std::uint64_t stream)
{
    const std::uint64_t s = splitmix64(seed + stream * 0x9e3779b97f4a7c15ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Engine(seq);
}

double OccupancyEstimate::fraction(int state) const
{
    const auto it = weights.find(state);
    return it == weights.end() || total_time <= 0 ? 0.0 : it->second / total_time;
}

// ---- rate rows

RateRow moran_L_rates(const MoranParams& p, int i)
{
    RateRow r;
    for (int j = 1; j < i; ++j) push(r, j, moran_rate(p, i, j));
    if (i < p.N) push(r, i + 1, moran_rate(p, i, i + 1));
    return r;
}

RateRow lambda_L_rates(const LambdaMeasure& m, const ModelParams& p, int k)
{
    RateRow r;
    for (int l = 1; l < k; ++l) {
        double rate = merge_rate(m, k, k - l + 1) + p.theta0;
        if (l == k - 1) rate += (k - 1) * p.theta1;
        push(r, l, rate);
    }
    push(r, k + 1, k * p.sigma);
    return r;
}

RateRow killed_asg_rates(const LambdaMeasure& m, const ModelParams& p, int k)
{
    RateRow r;
    if (k <= 0) return r;
    push(r, kCemetery, k * p.theta0);
    for (int l = 0; l < k; ++l) {
        double rate = l >= 1 ? merge_rate(m, k, k - l + 1) : 0.0;
        if (l == k - 1) rate += k * p.theta1;
        push(r, l, rate);
    }
    push(r, k + 1, k * p.sigma);
    return r;
}

namespace {

double moran_X_up(const MoranParams& p, int k)
{
    const double N = p.N;
    return k * (N - k) * (1 + p.s) / N + (N - k) * p.u0;
}

double moran_X_down(const MoranParams& p, int k)
{
    const double N = p.N;
    return k * (N - k) / N + k * p.u1;
}

}  // namespace

RateRow moran_X_rates(const MoranParams& p, int k)
{
    RateRow r;
    if (k > 0) push(r, k - 1, moran_X_down(p, k));
    if (k < p.N) push(r, k + 1, moran_X_up(p, k));
    return r;
}

RateCache::RateCache(LambdaMeasure m, ModelParams p, bool killed, int state_cap)
    : m_(std::move(m)), p_(p), killed_(killed), cap_(state_cap)
{
}

const RateRow& RateCache::row(int k)
{
    auto build = [&] { return killed_ ? killed_asg_rates(m_, p_, k) : lambda_L_rates(m_, p_, k); };
    if (k < 0 || k > cap_) {
        scratch_ = build();
        return scratch_;
    }
    if (static_cast<std::size_t>(k) >= rows_.size()) {
        rows_.resize(k + 1);
        have_.resize(k + 1, 0);
    }
    if (!have_[k]) {
        rows_[k] = build();
        have_[k] = 1;
    }
    return rows_[k];
}

// ---- paths

JumpPath simulate_moran_L(const MoranParams& p, int start, long max_events, std::uint64_t seed)
{
    p.validate();
    if (start < 1 || start > p.N) throw DomainError("start must lie in [1, N]");
    std::vector<RateRow> rows(p.N + 1);
    for (int i = 1; i <= p.N; ++i) rows[i] = moran_L_rates(p, i);
    return run_path([&](int i) -> const RateRow& { return rows[i]; }, start, max_events, seed, ChainModel::MoranL);
}

JumpPath simulate_lambda_L(const LambdaMeasure& m, const ModelParams& p, int start, long max_events,
                           std::uint64_t seed)
{
    p.validate();
    if (start < 1) throw DomainError("start must be at least 1");
    RateCache cache(m, p, false);
    auto path = run_path([&](int k) -> const RateRow& { return cache.row(k); }, start, max_events, seed,
                         ChainModel::LambdaL);
    const auto rec = is_positive_recurrent(m, p);
    if (!rec.positive()) path.warnings.push_back("chain may not be positive recurrent: " + rec.clause);
    return path;
}

JumpPath simulate_killed_asg_path(const LambdaMeasure& m, const ModelParams& p, int start, long max_events,
                                  std::uint64_t seed)
{
    p.validate();
    if (start < 0) throw DomainError("start must be nonnegative");
    RateCache cache(m, p, true);
    return run_path([&](int k) -> const RateRow& { return cache.row(k); }, start, max_events, seed,
                    ChainModel::KilledAsg);
}

JumpPath simulate_moran_X(const MoranParams& p, int start, long max_events, std::uint64_t seed)
{
    p.validate();
    if (start < 0 || start > p.N) throw DomainError("start must lie in [0, N]");
    std::vector<RateRow> rows(p.N + 1);
    for (int k = 0; k <= p.N; ++k) rows[k] = moran_X_rates(p, k);
    return run_path([&](int k) -> const RateRow& { return rows[k]; }, start, max_events, seed, ChainModel::MoranX);
}

// ---- replicate runners

namespace {

// Runs n_reps independent replicates; replicate i draws from stream i, so the
// count does not depend on the schedule. Exceptions are rethrown after the loop.
template <class MakeState, class Rep>
long count_hits(long n_reps, par::Exec exec, MakeState&& make_state, Rep&& rep)
{
    long hits = 0;
    std::exception_ptr err;
    if (exec == par::Exec::Serial) {
        auto st = make_state();
        for (long i = 0; i < n_reps; ++i) hits += rep(st, i) ? 1 : 0;
        return hits;
    }
#pragma omp parallel reduction(+ : hits)
    {
        auto st = make_state();
#pragma omp for schedule(dynamic, 256)
        for (long i = 0; i < n_reps; ++i) {
            try {
                hits += rep(st, i) ? 1 : 0;
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
    return hits;
}

AbsorptionEstimate estimate(long hits, long n)
{
    AbsorptionEstimate e;
    e.replicates = n;
    e.hits = hits;
    e.frequency = n > 0 ? double(hits) / n : 0.0;
    e.std_error = n > 0 ? std::sqrt(e.frequency * (1 - e.frequency) / n) : 0.0;
    return e;
}

}  // namespace

AbsorptionEstimate simulate_killed_asg(const LambdaMeasure& m, const ModelParams& p, int start, long n_reps,
                                       std::uint64_t seed, par::Exec exec)
{
    p.validate();
    if (!(p.theta0 > 0 && p.theta1 > 0)) throw DomainError("killed ASG absorption needs theta0 > 0 and theta1 > 0");
    if (start < 0) throw DomainError("start must be nonnegative");
    if (n_reps < 1) throw DomainError("n_reps must be positive");
    auto make = [&] { return RateCache(m, p, true); };
    auto rep = [&](RateCache& cache, long i) {
        Engine eng = make_engine(seed, static_cast<std::uint64_t>(i));
        int state = start;
        double hold = 0;
        for (long e = 0; e < kMaxAsgEvents; ++e) {
            if (state == 0) return true;
            if (state == kCemetery) return false;
            if (!step(cache.row(state), eng, state, hold)) return state == 0;
        }
        throw NonAbsorbing("killed ASG replicate not absorbed after 1e7 events");
    };
    return estimate(count_hits(n_reps, exec, make, rep), n_reps);
}

AbsorptionEstimate moran_fixation_frequency(const MoranParams& p, int start, long n_reps, std::uint64_t seed,
                                            par::Exec exec)
{
    p.validate();
    if (p.u0 != 0 || p.u1 != 0) throw DomainError("fixation needs u0 = u1 = 0");
    if (start < 0 || start > p.N) throw DomainError("start must lie in [0, N]");
    if (n_reps < 1) throw DomainError("n_reps must be positive");
    std::vector<RateRow> rows(p.N + 1);
    for (int k = 0; k <= p.N; ++k) rows[k] = moran_X_rates(p, k);
    auto make = [] { return 0; };
    auto rep = [&](int&, long i) {
        Engine eng = make_engine(seed, static_cast<std::uint64_t>(i));
        int state = start;
        double hold = 0;
        while (step(rows[state], eng, state, hold)) {
        }
        return state == p.N;
    };
    return estimate(count_hits(n_reps, exec, make, rep), n_reps);
}

// ---- occupancy

OccupancyEstimate occupancy(const JumpPath& path, double burn_in_fraction)
{
    if (path.states.empty()) throw EmptyPath("path has no states");
    if (!(burn_in_fraction >= 0 && burn_in_fraction < 1)) throw DomainError("burn-in fraction must lie in [0, 1)");
    OccupancyEstimate out;
    out.n_events = path.n_jumps();
    double T = 0;
    for (double h : path.holding_times)
        if (std::isfinite(h)) T += h;
    if (T == 0) {
        out.weights[path.states.back()] = 1;
        out.total_time = 1;
        return out;
    }
    const double burn = burn_in_fraction * T;
    double t = 0;
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        const double h = path.holding_times[i];
        if (!std::isfinite(h)) break;
        const double lo = std::max(t, burn), hi = t + h;
        if (hi > lo) out.weights[path.states[i]] += hi - lo;
        t = hi;
    }
    for (const auto& [k, w] : out.weights) out.total_time += w;
    return out;
}

double tv_distance(const OccupancyEstimate& occ, const StationaryPmf& pmf)
{
    double d = 0;
    for (const auto& [k, w] : occ.weights) d += std::abs(w / occ.total_time - pmf.p(k));
    for (int n = 1; n <= pmf.size(); ++n)
        if (!occ.weights.count(n)) d += pmf.p(n);
    return 0.5 * d;
}

std::vector<double> moran_X_stationary(const MoranParams& p)
{
    p.validate();
    if (!(p.u0 > 0 && p.u1 > 0)) throw DomainError("stationary law needs u0 > 0 and u1 > 0");
    const int N = p.N;
    std::vector<double> logw(N + 1, 0.0);
    for (int k = 1; k <= N; ++k) {
        logw[k] = logw[k - 1] + std::log(moran_X_up(p, k - 1)) - std::log(moran_X_down(p, k));
    }
    const double mx = *std::max_element(logw.begin(), logw.end());
    std::vector<double> pi(N + 1);
    double s = 0;
    for (int k = 0; k <= N; ++k) s += pi[k] = std::exp(logw[k] - mx);
    for (auto& x : pi) x /= s;
    return pi;
}

}  // namespace bcp::sim
