#pragma once

// Fixed-precision MPFR reals and a precision ladder. Static precision is
// used because the dynamic mpfr_float default precision is global state.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "bcp/errors.hpp"

namespace bcp::mp {

template <unsigned Digits>
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits>,
                                           boost::multiprecision::et_off>;

inline bool agree(const std::vector<double>& a, const std::vector<double>& b, double tol)
{
    if (a.size() != b.size()) return false;
    double scale = 0, diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(b[i]));
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return diff <= tol * std::max(scale, 1e-300);
}

// Evaluates f.template operator()<Real<D>>() for D = 60, 120, 240, 480 and
// returns the first result that agrees with the next level to tol (relative
// to the largest entry).
template <class F>
std::vector<double> ladder(F&& f, double tol = 1e-15)
{
    auto v60 = f.template operator()<Real<60>>();
    auto v120 = f.template operator()<Real<120>>();
    if (agree(v60, v120, tol)) return v120;
    auto v240 = f.template operator()<Real<240>>();
    if (agree(v120, v240, tol)) return v240;
    auto v480 = f.template operator()<Real<480>>();
    if (agree(v240, v480, tol)) return v480;
    throw NoConvergence("multiprecision evaluation did not stabilise at 480 digits");
}

}  // namespace bcp::mp
