#pragma once

#include <cmath>
#include <functional>
#include <type_traits>
#include <variant>
#include <vector>

#include "bcp/measures.hpp"
#include "bcp/specfun.hpp"

namespace bcp::detail {

// Interior part of a measure as a density with endpoint exponents, or as atoms.
struct InteriorView {
    std::function<double(double)> density;
    double e0 = 0, e1 = 0;
    std::vector<Atom> atoms;
    bool is_atomic() const { return !density; }
};

inline InteriorView view(const LambdaMeasure& m)
{
    InteriorView v;
    std::visit(
        [&](const auto& part) {
            using T = std::decay_t<decltype(part)>;
            if constexpr (std::is_same_v<T, UniformScaled>) {
                const double c = part.c;
                v.density = [c](double) { return c; };
            } else if constexpr (std::is_same_v<T, BetaDensity>) {
                const double a = part.a, b = part.b, lognorm = std::log(part.total_mass) - log_beta(a, b);
                v.density = [=](double x) {
                    double e = lognorm;
                    if (a != 1) e += (a - 1) * std::log(x);
                    if (b != 1) e += (b - 1) * std::log1p(-x);
                    return std::exp(e);
                };
                v.e0 = a - 1;
                v.e1 = b - 1;
            } else if constexpr (std::is_same_v<T, CustomDensity>) {
                v.density = part.density;
                v.e0 = part.e0;
                v.e1 = part.e1;
            } else if constexpr (std::is_same_v<T, Atoms>) {
                v.atoms = part.atoms;
            }
        },
        m.interior());
    return v;
}

}  // namespace bcp::detail
