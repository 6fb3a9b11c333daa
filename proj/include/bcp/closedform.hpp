#pragma once

#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bcp/measures.hpp"
#include "bcp/recursions.hpp"

namespace bcp {

struct PgfEvaluator {
    std::string model_tag;
    std::map<std::string, double> params;
    std::function<double(double)> evaluate;  // z in [0, 1]
    double p1 = 0;
    double p2 = std::numeric_limits<double>::quiet_NaN();

    double operator()(double z) const { return evaluate(z); }
};

struct ClosedForm {
    StationaryPmf pmf;
    PgfEvaluator pgf;
};

// ---- Moran model

// Integrals I_0, I_1 and J = I_0 - I_1 of the Moran closed form, all scaled by
// the same factor exp(-log_scale).
struct MoranIntegrals {
    double I0 = 0, I1 = 0, J = 0;
    double log_scale = 0;
    double ratio() const { return I1 / I0; }          // r
    double one_minus_ratio() const { return J / I0; }  // 1 - r
};
MoranIntegrals moran_integrals(const MoranParams& p);
// Same ratio from the terminating Gauss series, in extended precision.
double moran_ratio_hypergeometric(const MoranParams& p);

double moran_p1(const MoranParams& p);
ClosedForm moran_closed(const MoranParams& p);
double moran_mean(const MoranParams& p, double p1);
// E[(L)_n falling], n = 0..n_max, from the three-term recursion.
std::vector<double> moran_factorial_moments(const MoranParams& p, double p1, int n_max);
std::vector<double> moran_factorial_moments(const MoranParams& p, int n_max);
// Cross-check forms valid when u0 = 0 (needs the pmf) or u1 = 0.
std::vector<double> moran_factorial_moments_u0_zero(const MoranParams& p, const StationaryPmf& pmf, int n_max);
std::vector<double> moran_factorial_moments_u1_zero(const MoranParams& p, int n_max);

// ---- Wright-Fisher diffusion (Kingman with mass m0 at zero)

struct WfIntegrals {
    double I0 = 0, I1 = 0, J = 0;
    double ratio() const { return I1 / I0; }
    double one_minus_ratio() const { return J / I0; }
};
WfIntegrals wf_integrals(double m0, const ModelParams& p);
// Same quantities through Kummer functions.
WfIntegrals wf_integrals_kummer(double m0, const ModelParams& p);

double wf_p1(double m0, const ModelParams& p);
ClosedForm wf_closed(double m0, const ModelParams& p);
double wf_mean(double m0, const ModelParams& p, double p1);
std::vector<double> wf_factorial_moments(double m0, const ModelParams& p, double p1, int n_max);
std::vector<double> wf_factorial_moments(double m0, const ModelParams& p, int n_max);
std::vector<double> wf_factorial_moments_theta0_zero(double m0, const ModelParams& p, const StationaryPmf& pmf,
                                                     int n_max);
std::vector<double> wf_factorial_moments_theta1_zero(double m0, const ModelParams& p, int n_max);

// ---- star-shaped model (mass m1 at one)

struct StarRoots {
    double d = 0, x_minus = 0, x_plus = 0;
};
StarRoots star_roots(const ModelParams& p);
struct StarP1 {
    double value = 0;
    double error = 0;
};
// p_1 from the regularised integral representation of f(0).
StarP1 star_p1(const ModelParams& p, double m1);
// p_1 from 1 - (sigma/theta1) int_0^{x-} ((1-u/x-)/(1-u/x+))^{m1/d} du.
StarP1 star_p1_direct(const ModelParams& p, double m1);
// f(z) with g(z) = z (1 - (1 - z) f(z)).
double star_f(const ModelParams& p, double m1, double z);
ClosedForm star_closed(double m1, const ModelParams& p);
// Series coefficients of f at 0; only valid when 2 x- < x+.
std::vector<double> star_series_f(const ModelParams& p, double m1, int K);
StationaryPmf star_series_pmf(const ModelParams& p, double m1, int K);

// ---- Bolthausen-Sznitman

double bs_rho(const ModelParams& p);
// Lambert-W closed forms for theta = 0, theta0 = 0 or theta1 = 0; NaN otherwise.
double bs_rho_lambert(const ModelParams& p);
// Left side of the fixed-point identity int Lambda0/(1 - rho x) = (theta1 rho^2 - (sigma+theta) rho + sigma)/(rho(1-rho))
// for the uniform measure, returned as lhs - rhs.
double bs_rho_identity_residual(const ModelParams& p, double rho);

// ---- beta(3,1)

struct Beta31 {
    PgfEvaluator pgf;
    double p1 = 0, p2 = 0;
    double condition = 0;  // of the boundary system
    StationaryPmf pmf;
    double p1_consistency = 0;  // |p1 from pmf recursion - p1 from the ODE|
};
Beta31 beta31_pgf(const ModelParams& p);

// ---- master-equation verification

enum class MasterEquation { Auto, CrowKimura, WrightFisherOde, StarDess, Carleman, MasterII };
std::string to_string(MasterEquation e);

struct MasterCheck {
    double max_residual = 0;
    std::vector<double> residuals;
    MasterEquation equation = MasterEquation::Auto;
};

MasterCheck verify_master_equation(const PgfEvaluator& g, const LambdaMeasure& m, const ModelParams& p,
                                   std::span<const double> z_grid, MasterEquation eq = MasterEquation::Auto);
MasterCheck verify_moran_ode(const PgfEvaluator& g, const MoranParams& p, std::span<const double> z_grid);

// Principal value of int_0^1 f(t)/(t - x) dt by symmetric excision and
// Richardson extrapolation over radii 1e-2, 1e-3, 1e-4.
double principal_value(const std::function<double(double)>& f, double x);

// PgfEvaluator built from a pmf (Horner), used for truncated-solver output.
PgfEvaluator pgf_from_pmf(const StationaryPmf& pmf, std::string tag);

}  // namespace bcp
