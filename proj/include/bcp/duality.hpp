#pragma once

#include <span>
#include <vector>

#include "bcp/closedform.hpp"
#include "bcp/measures.hpp"
#include "bcp/recursions.hpp"

namespace bcp {

// w_n = E[(1 - X)^n] for the stationary frequency X, n = 0..K.
struct MomentSequence {
    std::vector<double> w;
    int truncation_K = 0;
    double residual = 0;             // max row violation of the truncated system
    double closure_sensitivity = 0;  // max |w_n(K/2) - w_n(K)| over the reported head
    double monotonicity_defect = 0;  // most negative finite difference found (0 if none)
    bool completely_monotone = true;
};

struct MomentOptions {
    int K = 32;
    double tol = 1e-10;
    int K_cap = 2048;
};
MomentSequence solve_w_moments(const LambdaMeasure& m, const ModelParams& p, const MomentOptions& opt = {});
// Single truncation level with closure w_{K+1} = 0.
std::vector<double> solve_w_moments_fixed_K(const LambdaMeasure& m, const ModelParams& p, int K);

// Generating function w(s) = sum_{n>=1} w_n s^n for the uniform measure.
struct BsGenerating {
    double s2 = 0;                 // singular point in (0, 1)
    std::vector<double> s;         // requested grid
    std::vector<double> values;    // w(s)
    std::vector<double> taylor;    // taylor[n] = w_n, n = 0..n_taylor (taylor[0] = 1)
    double contour_closure = 0;    // mismatch after continuing around the Cauchy circle
};
double bs_singular_point(const ModelParams& p);
BsGenerating bs_w_generating(const ModelParams& p, std::span<const double> s_grid, int n_taylor = 12);
// E[1 / (t - (1 - X))] for t > 1/s2.
double bs_stieltjes(const ModelParams& p, double t);
// sum_{k>=1} s^k / (k (k+1)) in closed form.
double bs_phi(double s);

double bs_absorption(double x, double sigma);
// Same quantity as E[(1-x)^G] for G geometric with success 1 - rho, rho = 1 - e^{-sigma}.
double bs_absorption_geometric(double x, double sigma);

double kimura_fixation(double x, double sigma, double m0);
// 1 - E[(1-x)^L] for L ~ Poisson(2 sigma / m0) conditioned positive, by direct summation.
double kimura_fixation_poisson(double x, double sigma, double m0);

double moran_fixation(int k, int N, double s);

// h(x) = 1 - g(1 - x).
double ancestral_type_h(const PgfEvaluator& g, double x);
// sum_n x (1-x)^n a_n from the tails of a pmf.
double ancestral_type_h_tails(const StationaryPmf& pmf, double x);

}  // namespace bcp
