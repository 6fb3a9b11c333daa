#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bcp/measures.hpp"
#include "bcp/parallel.hpp"

namespace bcp {

enum class SolverTag {
    MoranBackward,
    MoranShooting,
    MoranNullspace,
    MoranClosed,
    LambdaTruncated,
    StarClosedTails,
    StarForward,
    StarBanded,
    StarSeries,
    CrowKimura,
    WrightFisherClosed,
    Beta31Ode,
};

std::string to_string(SolverTag t);

struct StationaryPmf {
    std::vector<double> probs;  // probs[n-1] = p_n
    int truncation_K = 0;
    double residual = 0;     // max violation of the defining equations
    double tail_bound = 0;   // mass or change not captured by the truncation
    SolverTag solver_tag = SolverTag::LambdaTruncated;
    std::vector<std::string> warnings;

    double p(int n) const { return n >= 1 && n <= static_cast<int>(probs.size()) ? probs[n - 1] : 0.0; }
    int size() const { return static_cast<int>(probs.size()); }
    // a_0..a_K with a_n = sum_{k>n} p_k.
    std::vector<double> tails() const;
    double mean() const;
    // E[(L)_n falling], n = 0..n_max.
    std::vector<double> factorial_moments(int n_max) const;
    double pgf(double z) const;
};

// Clip values in [-1e-12, 0) to zero and renormalise; throw NegativeMass otherwise.
void finalize_probabilities(std::vector<double>& p, double clip = 1e-12);
double sup_distance(const std::vector<double>& a, const std::vector<double>& b);

// Moran block counting chain.
StationaryPmf solve_moran(const MoranParams& p);
StationaryPmf solve_moran_shooting(const MoranParams& p);
StationaryPmf solve_moran_nullspace(const MoranParams& p, par::Exec exec = par::Exec::Parallel);
double moran_rate(const MoranParams& p, int i, int j);
// Residual of the pmf form of the Moran recursion and its boundary rows.
double moran_pmf_residual(const MoranParams& p, const std::vector<double>& probs);

// Stationary vector of a CTMC from its dense generator (row-major n x n) by
// Grassmann-Taksar-Heyman elimination. Only off-diagonal entries are read.
std::vector<double> gth_stationary(std::vector<double> Q, int n, par::Exec exec = par::Exec::Parallel);

struct LambdaSolveOptions {
    int K = 64;
    double tol = 1e-12;
    int K_cap = 1 << 14;
    par::Exec exec = par::Exec::Parallel;
    bool auto_double = true;
};
StationaryPmf solve_lambda_truncated(const LambdaMeasure& m, const ModelParams& p,
                                     const LambdaSolveOptions& opt = {});
// Single truncation level, no doubling.
StationaryPmf solve_lambda_fixed_K(const LambdaMeasure& m, const ModelParams& p, int K,
                                   par::Exec exec = par::Exec::Parallel);
// Max residual of the pmf recursion rows n = 1..n_max for a given pmf.
double lambda_pmf_residual(const LambdaMeasure& m, const ModelParams& p, const std::vector<double>& probs,
                           int n_max);

struct StarOptions {
    int K = 4096;
    std::optional<double> p1;  // supply p_1 instead of computing it by quadrature
    bool allow_fallback = true;
};
StationaryPmf solve_star(const ModelParams& p, double m1, const StarOptions& opt = {});
// Two-sided banded solve of the star tail recursion with a_0 = 1, a_K = 0.
StationaryPmf solve_star_banded(const ModelParams& p, double m1, int K);

struct CrowKimura {
    double p = 0;
    StationaryPmf pmf;
};
CrowKimura crow_kimura_geometric(const ModelParams& p, int K = 0);
double crow_kimura_p(const ModelParams& p);

}  // namespace bcp
