#pragma once

#include <utility>
#include <vector>

namespace wintrack {

// Bounded-variable linear program in the form used by the assignment step:
//   max  c'x   s.t.  A x <= b,  lower <= x <= upper.
// Columns are sparse (row, coefficient) lists; b must be componentwise >= the
// column-sum at the lower bounds so the all-slack basis is feasible (true for
// packing problems with disjoint fixed-to-one columns).
struct LpProblem {
    int num_rows = 0;
    std::vector<double> c;
    std::vector<double> b;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::vector<std::pair<int, double>>> cols;

    std::size_t num_cols() const { return c.size(); }
};

struct LpResult {
    std::vector<double> x;  // structural variables only
    double objective = 0.0;
    int iterations = 0;
    bool hit_iteration_cap = false;
};

// Revised primal simplex with explicit dense basis inverse, Dantzig pricing
// with a Bland's-rule fallback on stalls, bound flips, and periodic
// refactorization. Deterministic for fixed input.
LpResult solve_lp(const LpProblem& problem, int max_iterations);

}  // namespace wintrack
