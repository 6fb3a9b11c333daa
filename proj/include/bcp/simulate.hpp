#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bcp/measures.hpp"
#include "bcp/parallel.hpp"
#include "bcp/recursions.hpp"

namespace bcp::sim {

// Cemetery state of the killed ASG.
inline constexpr int kCemetery = -1;

enum class ChainModel { MoranL, LambdaL, KilledAsg, MoranX };
std::string to_string(ChainModel m);

// Engine: std::mt19937_64 seeded through SplitMix64.
using Engine = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64/splitmix64";

// SplitMix64 finaliser; stream i of a run with seed s uses splitmix64(s + (i + 1) * golden gamma).
std::uint64_t splitmix64(std::uint64_t x);
Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0);

// states.size() == holding_times.size(). An absorbing final state carries an
// infinite holding time; every other holding time is finite and positive.
struct JumpPath {
    std::vector<int> states;
    std::vector<double> holding_times;
    std::uint64_t seed = 0;
    ChainModel model = ChainModel::MoranL;
    std::string rng = kRngName;
    bool absorbed = false;
    std::vector<std::string> warnings;

    long n_jumps() const { return static_cast<long>(states.size()) - 1; }
};

struct OccupancyEstimate {
    std::map<int, double> weights;  // state -> occupation time
    double total_time = 0;
    long n_events = 0;

    double fraction(int state) const;
};

// Outgoing transitions of one state, as targets with cumulative rates.
struct RateRow {
    std::vector<int> targets;
    std::vector<double> cumulative;
    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

RateRow moran_L_rates(const MoranParams& p, int i);
RateRow lambda_L_rates(const LambdaMeasure& m, const ModelParams& p, int k);
RateRow killed_asg_rates(const LambdaMeasure& m, const ModelParams& p, int k);
RateRow moran_X_rates(const MoranParams& p, int k);

// Cache of rate rows for the Lambda chains; rows for states above the cap
// are rebuilt on demand.
class RateCache {
public:
    RateCache(LambdaMeasure m, ModelParams p, bool killed, int state_cap = 10000);
    const RateRow& row(int k);

private:
    LambdaMeasure m_;
    ModelParams p_;
    bool killed_;
    int cap_;
    std::vector<RateRow> rows_;
    std::vector<char> have_;
    RateRow scratch_;
};

JumpPath simulate_moran_L(const MoranParams& p, int start, long max_events, std::uint64_t seed);
JumpPath simulate_lambda_L(const LambdaMeasure& m, const ModelParams& p, int start, long max_events,
                           std::uint64_t seed);
JumpPath simulate_killed_asg_path(const LambdaMeasure& m, const ModelParams& p, int start, long max_events,
                                  std::uint64_t seed);
JumpPath simulate_moran_X(const MoranParams& p, int start, long max_events, std::uint64_t seed);

struct AbsorptionEstimate {
    double frequency = 0;
    double std_error = 0;
    long replicates = 0;
    long hits = 0;
};

// Fraction of replicates of the killed ASG absorbed at 0.
AbsorptionEstimate simulate_killed_asg(const LambdaMeasure& m, const ModelParams& p, int start, long n_reps,
                                       std::uint64_t seed, par::Exec exec = par::Exec::Parallel);
// Fraction of replicates of the Moran frequency chain fixing at N (u0 = u1 = 0).
AbsorptionEstimate moran_fixation_frequency(const MoranParams& p, int start, long n_reps, std::uint64_t seed,
                                            par::Exec exec = par::Exec::Parallel);

OccupancyEstimate occupancy(const JumpPath& path, double burn_in_fraction = 0.2);
// Total variation distance between an occupancy histogram over 1..N and a pmf.
double tv_distance(const OccupancyEstimate& occ, const StationaryPmf& pmf);

// Stationary law of the Moran frequency chain, pi(k) proportional to prod lambda_{i-1} / mu_i.
std::vector<double> moran_X_stationary(const MoranParams& p);

}  // namespace bcp::sim
