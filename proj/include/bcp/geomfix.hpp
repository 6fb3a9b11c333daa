#pragma once

#include <functional>
#include <vector>

#include "bcp/measures.hpp"

namespace bcp {

// Atom with its location complement stored separately, so atoms
// accumulating at 1 keep full relative precision in 1 - x.
struct IndexedAtom {
    long k = 0;  // orbit index: x = phi^(k)(x0)
    double x = 0;
    double one_minus_x = 1;
    double mass = 0;
};

struct AtomicMeasure {
    std::vector<IndexedAtom> atoms;  // ordered by k
    int truncation_index_K = 0;
    double tail_bound = 0;  // mass of the omitted atoms |k| > K
    double total_mass() const;
};

// phi(y) = (1 - rho) y / (1 - rho y) and its iterates; negative n gives the inverse iterates.
double phi_small(double rho, double y);
double phi_iterate(double rho, double x, long n);
// 1 - phi^(n)(x), computed without cancellation.
double phi_iterate_complement(double rho, double x, long n);
// Involution varphi(x) = (1 - x) / (1 - rho x).
double phi_big(double rho, double x);

struct GeometricCheck {
    double rho = 0;
    bool m0_zero = true, m1_zero = true;
    std::vector<double> cg3a_residuals;  // n = 0..n_max
    double cg3b_residual = 0;
    std::vector<double> cg1_residuals;   // n = 1..min(n_max, 10)
    double cg3a_max = 0, cg1_max = 0;
    bool cg3a_pass = false, cg3b_pass = false, cg1_pass = false;
    // int x^{-1} Lambda0(dx) = infinity; necessary for a nonzero geometric Lambda.
    bool dust_free = false;
    bool geometric() const { return m0_zero && m1_zero && cg3a_pass && cg3b_pass; }
};
GeometricCheck check_geometric(const LambdaMeasure& m, double rho, const ModelParams& p, int n_max = 30,
                               double tol = 1e-8);

// The operator S on measures. Densities are handled through the exact
// change of variables.
AtomicMeasure apply_S(const AtomicMeasure& mu, double rho);
std::function<double(double)> apply_S(const std::function<double(double)>& h, double rho);
// Continuous fixed density (1 - rho) / (1 - rho y)^2.
double continuous_fixed_density(double rho, double y);

// Atoms at phi^(k)(x0), |k| <= K, masses from the closed form. K = 0 picks
// the smallest K whose tail bound is below 1e-10.
AtomicMeasure build_discrete_fixed_point(double rho, double x0, double m0_mass, int K = 0);
// Same masses from the two-sided ratio recursions.
std::vector<double> fixed_point_masses_recursive(double rho, double x0, double m0_mass, int K);

double rho_star(double x0, double m0_mass, const ModelParams& p);

// mu o varphi^{-1} as an atomic measure (varphi is an involution).
AtomicMeasure pushforward_atoms(const AtomicMeasure& mu, double rho);
// Same, as a LambdaMeasure; atoms whose image rounds to 0 or 1 are dropped.
LambdaMeasure pushforward_to_lambda(const AtomicMeasure& mu, double rho);

struct SumIdentity {
    double numeric = 0;
    double closed = 0;
};
// sum_i m_i (1 - rho phi^(i)(x0)) / (1 - rho) against m0 (1-rho x0)^2 / (rho (1-rho) x0 (1-x0)).
SumIdentity fixed_point_sum_identity(const AtomicMeasure& mu, double rho, double x0, double m0_mass);

}  // namespace bcp
