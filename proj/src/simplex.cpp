#include "wintrack/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "wintrack/errors.hpp"

namespace wintrack {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kRatioTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRefactorPeriod = 100;
constexpr int kStallLimit = 500;

// Simplex working state over p structural variables and q slacks. Variable
// indices: [0, p) structural, [p, p+q) slack for row j - p.
struct Workspace {
    const LpProblem& lp;
    int p, q;
    std::vector<int> basis;        // slot -> variable
    std::vector<signed char> state;  // 0 = at lower, 1 = at upper, 2 = basic
    Eigen::MatrixXd binv;
    Eigen::VectorXd xb;
    int pivots_since_refactor = 0;

    explicit Workspace(const LpProblem& problem)
        : lp(problem), p(static_cast<int>(problem.num_cols())), q(problem.num_rows) {
        basis.resize(q);
        state.assign(p + q, 0);
        for (int i = 0; i < q; ++i) {
            basis[i] = p + i;
            state[p + i] = 2;
        }
        binv = Eigen::MatrixXd::Identity(q, q);
        recompute_xb();
        for (int i = 0; i < q; ++i) {
            if (xb[i] < -1e-7) {
                throw ConsistencyError("simplex: all-slack start infeasible");
            }
        }
    }

    double cost(int var) const { return var < p ? lp.c[var] : 0.0; }
    double lower(int var) const { return var < p ? lp.lower[var] : 0.0; }
    double upper(int var) const { return var < p ? lp.upper[var] : kInf; }
    double nonbasic_value(int var) const { return state[var] == 1 ? upper(var) : lower(var); }

    // w = Binv * A_j for structural j, or the slack's Binv column.
    Eigen::VectorXd ftran(int var) const {
        if (var >= p) return binv.col(var - p);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(q);
        for (const auto& [row, coef] : lp.cols[var]) w += coef * binv.col(row);
        return w;
    }

    double dot_col(const Eigen::VectorXd& y, int var) const {
        if (var >= p) return y[var - p];
        double s = 0.0;
        for (const auto& [row, coef] : lp.cols[var]) s += coef * y[row];
        return s;
    }

    void recompute_xb() {
        Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(lp.b.data(), q);
        for (int j = 0; j < p; ++j) {
            if (state[j] == 2) continue;
            const double v = nonbasic_value(j);
            if (v == 0.0) continue;
            for (const auto& [row, coef] : lp.cols[j]) rhs[row] -= coef * v;
        }
        xb = binv * rhs;
    }

    void refactorize() {
        Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(q, q);
        for (int i = 0; i < q; ++i) {
            const int var = basis[i];
            if (var >= p) {
                basis_matrix(var - p, i) = 1.0;
            } else {
                for (const auto& [row, coef] : lp.cols[var]) basis_matrix(row, i) = coef;
            }
        }
        binv = basis_matrix.partialPivLu().inverse();
        recompute_xb();
        pivots_since_refactor = 0;
    }

    double objective() const {
        double obj = 0.0;
        for (int j = 0; j < p; ++j) {
            if (state[j] != 2) obj += lp.c[j] * nonbasic_value(j);
        }
        for (int i = 0; i < q; ++i) {
            if (basis[i] < p) obj += lp.c[basis[i]] * xb[i];
        }
        return obj;
    }
};

}  // namespace

LpResult solve_lp(const LpProblem& problem, int max_iterations) {
    const int p = static_cast<int>(problem.num_cols());
    LpResult result;
    result.x.assign(p, 0.0);

    if (problem.num_rows == 0) {
        // Unconstrained box problem: each variable goes to its paying bound.
        for (int j = 0; j < p; ++j) {
            result.x[j] = problem.c[j] > 0.0 ? problem.upper[j] : problem.lower[j];
            result.objective += problem.c[j] * result.x[j];
        }
        return result;
    }

    Workspace ws(problem);
    const int q = problem.num_rows;

    bool bland = false;
    int stalled = 0;
    int tiny_pivot_retries = 0;
    double last_objective = ws.objective();

    for (int iter = 0; iter < max_iterations; ++iter) {
        // Pricing: duals, then the entering candidate.
        Eigen::VectorXd cb(q);
        for (int i = 0; i < q; ++i) cb[i] = ws.cost(ws.basis[i]);
        const Eigen::VectorXd y = ws.binv.transpose() * cb;

        int entering = -1;
        int enter_dir = 0;  // +1 entering rises off lower, -1 falls off upper
        double best_violation = kReducedCostTol;
        for (int j = 0; j < p + q; ++j) {
            if (ws.state[j] == 2) continue;
            if (ws.upper(j) - ws.lower(j) <= 0.0) continue;  // fixed variable
            const double d = ws.cost(j) - ws.dot_col(y, j);
            double violation = 0.0;
            int dir = 0;
            if (ws.state[j] == 0 && d > kReducedCostTol) {
                violation = d;
                dir = +1;
            } else if (ws.state[j] == 1 && d < -kReducedCostTol) {
                violation = -d;
                dir = -1;
            } else {
                continue;
            }
            if (bland) {
                entering = j;
                enter_dir = dir;
                break;
            }
            if (violation > best_violation) {
                best_violation = violation;
                entering = j;
                enter_dir = dir;
            }
        }
        if (entering < 0) break;  // optimal

        Eigen::VectorXd w = ws.ftran(entering);

        // Ratio test; a tie keeps the bound flip (guaranteed progress) and
        // otherwise prefers the larger pivot, then the smaller variable index.
        double best_t = ws.upper(entering) - ws.lower(entering);
        int leaving = -1;
        int leave_side = 0;
        for (int i = 0; i < q; ++i) {
            const double delta = -enter_dir * w[i];
            double limit;
            int side;
            if (delta < -kRatioTol) {
                limit = (ws.xb[i] - ws.lower(ws.basis[i])) / (-delta);
                side = 0;
            } else if (delta > kRatioTol) {
                const double ub = ws.upper(ws.basis[i]);
                if (ub == kInf) continue;
                limit = (ub - ws.xb[i]) / delta;
                side = 1;
            } else {
                continue;
            }
            if (limit < 0.0) limit = 0.0;
            const bool better =
                limit < best_t - kRatioTol ||
                (leaving >= 0 && std::abs(limit - best_t) <= kRatioTol &&
                 (bland ? ws.basis[i] < ws.basis[leaving]
                        : std::abs(w[i]) > std::abs(w[leaving]) + 1e-12 ||
                              (std::abs(std::abs(w[i]) - std::abs(w[leaving])) <= 1e-12 &&
                               ws.basis[i] < ws.basis[leaving])));
            if (better) {
                best_t = std::min(best_t, limit);
                leaving = i;
                leave_side = side;
            }
        }
        if (best_t == kInf) {
            throw NumericalDegeneracyError("simplex: unbounded ray in a bounded program");
        }

        result.iterations = iter + 1;
        if (leaving < 0) {
            // Bound flip: the entering variable crosses to its other bound.
            ws.xb -= enter_dir * best_t * w;
            ws.state[entering] = static_cast<signed char>(ws.state[entering] == 0 ? 1 : 0);
        } else {
            const double pivot = w[leaving];
            if (std::abs(pivot) < kPivotTol) {
                if (++tiny_pivot_retries > 2) {
                    throw NumericalDegeneracyError("simplex: no usable pivot");
                }
                ws.refactorize();
                continue;  // retry the iteration against a clean inverse
            }
            tiny_pivot_retries = 0;
            const double enter_value = ws.state[entering] == 0
                                           ? ws.lower(entering) + best_t
                                           : ws.upper(entering) - best_t;
            ws.xb -= enter_dir * best_t * w;
            const int leave_var = ws.basis[leaving];
            ws.state[leave_var] = static_cast<signed char>(leave_side);
            ws.basis[leaving] = entering;
            ws.state[entering] = 2;
            ws.xb[leaving] = enter_value;

            ws.binv.row(leaving) /= pivot;
            for (int i = 0; i < q; ++i) {
                if (i == leaving) continue;
                const double factor = w[i];
                if (factor != 0.0) ws.binv.row(i) -= factor * ws.binv.row(leaving);
            }
            if (++ws.pivots_since_refactor >= kRefactorPeriod) ws.refactorize();
        }

        const double obj = ws.objective();
        if (obj > last_objective + 1e-10) {
            stalled = 0;
            last_objective = obj;
        } else if (!bland && ++stalled >= kStallLimit) {
            bland = true;  // degenerate stretch: Bland's rule guarantees escape
        }

        if (iter + 1 >= max_iterations) {
            result.hit_iteration_cap = true;
        }
    }

    for (int j = 0; j < p; ++j) {
        result.x[j] = ws.state[j] == 2 ? 0.0 : ws.nonbasic_value(j);
    }
    for (int i = 0; i < q; ++i) {
        if (ws.basis[i] < p) result.x[ws.basis[i]] = ws.xb[i];
    }
    for (int j = 0; j < p; ++j) result.objective += problem.c[j] * result.x[j];
    return result;
}

}  // namespace wintrack
