#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "bcp/errors.hpp"

namespace bcp {

struct Atom {
    double x = 0;
    double mass = 0;
};

struct InteriorZero {};
// c * Lebesgue on (0,1).
struct UniformScaled {
    double c = 1;
};
// total_mass * Beta(a, b) density.
struct BetaDensity {
    double a = 1, b = 1, total_mass = 1;
};
struct Atoms {
    std::vector<Atom> atoms;
};
// Density on (0,1) with declared behaviour x^e0 near 0 and (1-x)^e1 near 1.
struct CustomDensity {
    std::function<double(double)> density;
    double e0 = 0;
    double e1 = 0;
    std::string label = "custom";
};

using InteriorPart = std::variant<InteriorZero, UniformScaled, BetaDensity, Atoms, CustomDensity>;

inline constexpr std::size_t kMaxAtoms = 10000;

// Lambda = m0 delta_0 + m1 delta_1 + interior. Immutable after construction.
class LambdaMeasure {
public:
    LambdaMeasure() = default;
    LambdaMeasure(double m0, double m1, InteriorPart interior);

    static LambdaMeasure zero() { return {}; }
    static LambdaMeasure kingman(double m0) { return {m0, 0, InteriorZero{}}; }
    static LambdaMeasure star(double m1) { return {0, m1, InteriorZero{}}; }
    static LambdaMeasure uniform(double c = 1) { return {0, 0, UniformScaled{c}}; }
    static LambdaMeasure beta(double a, double b, double mass = 1) { return {0, 0, BetaDensity{a, b, mass}}; }
    static LambdaMeasure atoms(std::vector<Atom> a) { return {0, 0, Atoms{std::move(a)}}; }

    double m0() const { return m0_; }
    double m1() const { return m1_; }
    const InteriorPart& interior() const { return interior_; }
    bool interior_is_zero() const { return std::holds_alternative<InteriorZero>(interior_); }
    bool is_zero() const { return m0_ == 0 && m1_ == 0 && interior_is_zero(); }
    double interior_mass() const;
    double total_mass() const { return m0_ + m1_ + interior_mass(); }
    std::string describe() const;

private:
    double m0_ = 0, m1_ = 0;
    InteriorPart interior_ = InteriorZero{};
};

struct ModelParams {
    double sigma = 0, theta0 = 0, theta1 = 0;
    double theta() const { return theta0 + theta1; }
    void validate() const;
};

struct MoranParams {
    int N = 2;
    double s = 1, u0 = 0, u1 = 0;
    double u() const { return u0 + u1; }
    void validate() const;
};

// lambda_{k,j} = int x^{j-2} (1-x)^{k-j} Lambda(dx), 2 <= j <= k.
double lambda_rate(const LambdaMeasure& m, int k, int j);
// binom(k, j) * lambda_{k,j} restricted to the interior part (no atoms at 0 or 1).
double interior_merge_rate(const LambdaMeasure& m, int k, int j);
// binom(k, j) * lambda_{k,j}: total rate of a j-merger from k blocks.
double merge_rate(const LambdaMeasure& m, int k, int j);

struct SigmaLambda {
    double value = 0;  // may be +inf
    bool atom_at_zero = false;
    bool atom_at_one = false;
    bool divergent_interior = false;
};
SigmaLambda sigma_lambda(const LambdaMeasure& m);

struct Recurrence {
    enum class Verdict { PositiveRecurrent, NotPositiveRecurrent, Undetermined };
    Verdict verdict = Verdict::Undetermined;
    std::string clause;
    bool positive() const { return verdict == Verdict::PositiveRecurrent; }
};
Recurrence is_positive_recurrent(const LambdaMeasure& m, const ModelParams& p);

// Coefficient c_{n,k} of the pmf recursion, k > n >= 1.
double cnk(const LambdaMeasure& m, int n, int k);
// Row c_{n,k} for k = n+1..K written to out[k - n - 1]; out.size() == K - n.
void cnk_row(const LambdaMeasure& m, int n, int K, double* out);

}  // namespace bcp
