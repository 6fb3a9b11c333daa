#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bcp/parallel.hpp"

namespace bcp::validate {

enum class Suite { Quick, Full };

struct Result {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// The cross-check matrix. Full uses the acceptance settings; Quick shrinks
// replicate counts and grids while keeping every tolerance.
std::vector<Result> run_suite(Suite suite, const std::vector<int>& only = {},
                              const std::function<void(const Result&)>& on_result = {});

int criterion_count();

// Grid kernels behind criteria 1 and 15, exposed for benchmarking. Results do
// not depend on the execution policy.
double moran_grid_sweep(int count, par::Exec exec = par::Exec::Parallel);  // max pairwise sup
int negative_control_sweep(int step, par::Exec exec = par::Exec::Parallel);  // wrongly geometric pairs

}  // namespace bcp::validate
