#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wintrack/assoc_graph.hpp"
#include "wintrack/errors.hpp"
#include "wintrack/hypothesis.hpp"

namespace wintrack {

// The 0/1 packing program over the hypothesis map:
//   max c'z  s.t.  A z <= 1,  z in {0,1}^p,
// one constraint row per graph node, one column per hypothesis. Stored as
// per-column row lists; every coefficient is 1.
struct AssignmentProblem {
    std::vector<double> cost;                    // c, length p
    std::vector<std::vector<int>> column_rows;   // node-row indices per column
    int num_node_rows = 0;                       // q = graph node count
    std::vector<NodeId> row_to_node;             // constraint row -> node id

    std::size_t num_columns() const { return cost.size(); }
    std::size_t nnz() const;
    /// 1 - nnz / (p * q); 1.0 for an empty matrix.
    double sparsity() const;
};

struct AssignmentSolution {
    std::vector<std::size_t> selected;  // ascending hypothesis indices
    double objective = 0.0;
    bool relaxation_was_integral = true;
};

/// Iteration budget exhausted; carries the best feasible solution found.
class SolverResourceError : public TrackerError {
  public:
    SolverResourceError(const std::string& msg, AssignmentSolution incumbent)
        : TrackerError(msg), incumbent(std::move(incumbent)) {}
    AssignmentSolution incumbent;
};

/// One constraint row per live graph node, one column per map row. Throws
/// ConsistencyError if a hypothesis references a node the graph no longer has.
AssignmentProblem build_problem(const HypothesisMap& map, const AssociationGraph& graph);

/// Exact optimum: LP relaxation over the positive-cost columns first; when the
/// relaxed optimum is integral within 1e-6 it is rounded and returned,
/// otherwise exact branch and bound seeded by the LP bound. The null solution
/// is always feasible, so non-positive columns are never selected.
AssignmentSolution solve(const AssignmentProblem& problem);

/// Exhaustive search over feasible subsets, p <= 25 (SizeGuardError beyond).
/// Ties broken toward the lexicographically smallest selected index set.
AssignmentSolution brute_force_oracle(const AssignmentProblem& problem);

/// CPLEX LP text rendering of the relaxation, for external cross-checks.
std::string to_lp_format(const AssignmentProblem& problem);

}  // namespace wintrack
