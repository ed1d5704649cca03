#include "wintrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "wintrack/simplex.hpp"

namespace wintrack {

namespace {

constexpr double kIntegralityTol = 1e-6;
constexpr double kObjectiveTol = 1e-9;
constexpr int kBranchNodeLimit = 20000;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Row-usage bitset sized for the reduced problem.
struct RowMask {
    std::vector<std::uint64_t> words;

    explicit RowMask(int rows) : words((rows + 63) / 64, 0) {}
    void set(int r) { words[r >> 6] |= std::uint64_t{1} << (r & 63); }
    bool intersects(const RowMask& other) const {
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (words[i] & other.words[i]) return true;
        }
        return false;
    }
    void merge(const RowMask& other) {
        for (std::size_t i = 0; i < words.size(); ++i) words[i] |= other.words[i];
    }
    void subtract(const RowMask& other) {
        for (std::size_t i = 0; i < words.size(); ++i) words[i] &= ~other.words[i];
    }
};

// The positive-cost columns with their rows renumbered to the touched subset.
struct ReducedProblem {
    std::vector<std::size_t> orig_index;       // reduced column -> original
    std::vector<double> cost;
    std::vector<std::vector<int>> column_rows;  // reduced row ids
    int num_rows = 0;
};

ReducedProblem reduce(const AssignmentProblem& problem) {
    ReducedProblem red;
    std::unordered_map<int, int> row_map;
    for (std::size_t j = 0; j < problem.num_columns(); ++j) {
        if (problem.cost[j] <= 0.0) continue;
        red.orig_index.push_back(j);
        red.cost.push_back(problem.cost[j]);
        std::vector<int> rows;
        rows.reserve(problem.column_rows[j].size());
        for (int r : problem.column_rows[j]) {
            auto it = row_map.find(r);
            if (it == row_map.end()) it = row_map.emplace(r, red.num_rows++).first;
            rows.push_back(it->second);
        }
        red.column_rows.push_back(std::move(rows));
    }
    return red;
}

// Columns conflict only within their connected component (columns joined by
// shared rows), so the packing splits into independent subproblems. On dense
// frames this turns one large LP into many tiny ones.
std::vector<ReducedProblem> split_components(const ReducedProblem& red) {
    std::vector<int> parent(red.num_rows);
    for (int r = 0; r < red.num_rows; ++r) parent[r] = r;
    std::function<int(int)> find = [&](int r) {
        while (parent[r] != r) {
            parent[r] = parent[parent[r]];
            r = parent[r];
        }
        return r;
    };
    for (const auto& rows : red.column_rows) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            parent[find(rows[i])] = find(rows[0]);
        }
    }

    // Components ordered by their first column; rows renumbered per component.
    std::unordered_map<int, std::size_t> comp_of_root;
    std::vector<ReducedProblem> comps;
    std::vector<std::unordered_map<int, int>> row_maps;
    for (std::size_t j = 0; j < red.cost.size(); ++j) {
        std::size_t comp;
        if (red.column_rows[j].empty()) {
            // A row-free column conflicts with nothing; it gets a component
            // of its own.
            comp = comps.size();
            comps.emplace_back();
            row_maps.emplace_back();
        } else {
            const int root = find(red.column_rows[j][0]);
            auto it = comp_of_root.find(root);
            if (it == comp_of_root.end()) {
                it = comp_of_root.emplace(root, comps.size()).first;
                comps.emplace_back();
                row_maps.emplace_back();
            }
            comp = it->second;
        }
        ReducedProblem& sub = comps[comp];
        std::unordered_map<int, int>& rmap = row_maps[comp];
        sub.orig_index.push_back(red.orig_index[j]);
        sub.cost.push_back(red.cost[j]);
        std::vector<int> rows;
        rows.reserve(red.column_rows[j].size());
        for (int r : red.column_rows[j]) {
            auto it = rmap.find(r);
            if (it == rmap.end()) it = rmap.emplace(r, sub.num_rows++).first;
            rows.push_back(it->second);
        }
        sub.column_rows.push_back(std::move(rows));
    }
    return comps;
}

LpProblem make_lp(const ReducedProblem& red, const std::vector<signed char>& fixed) {
    LpProblem lp;
    lp.num_rows = red.num_rows;
    const std::size_t p = red.cost.size();
    lp.c = red.cost;
    lp.b.assign(red.num_rows, 1.0);
    lp.lower.assign(p, 0.0);
    lp.upper.assign(p, 1.0);
    lp.cols.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        for (int r : red.column_rows[j]) lp.cols[j].emplace_back(r, 1.0);
        if (!fixed.empty()) {
            if (fixed[j] == 0) lp.upper[j] = 0.0;
            if (fixed[j] == 1) lp.lower[j] = 1.0;
        }
    }
    return lp;
}

int lp_iteration_budget(const ReducedProblem& red) {
    return 5000 + 50 * (static_cast<int>(red.cost.size()) + red.num_rows);
}

// Deterministic greedy packing by descending cost; used as the fallback
// incumbent when iteration budgets run out and as the branch-and-bound seed.
AssignmentSolution greedy_incumbent(const ReducedProblem& red) {
    std::vector<std::size_t> order(red.cost.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (red.cost[a] != red.cost[b]) return red.cost[a] > red.cost[b];
        return a < b;
    });
    RowMask used(red.num_rows);
    AssignmentSolution sol;
    for (std::size_t j : order) {
        RowMask mask(red.num_rows);
        for (int r : red.column_rows[j]) mask.set(r);
        if (mask.intersects(used)) continue;
        used.merge(mask);
        sol.selected.push_back(red.orig_index[j]);
        sol.objective += red.cost[j];
    }
    std::sort(sol.selected.begin(), sol.selected.end());
    return sol;
}

bool extract_integral(const LpResult& lp, std::vector<std::size_t>* reduced_selection) {
    reduced_selection->clear();
    for (std::size_t j = 0; j < lp.x.size(); ++j) {
        const double v = lp.x[j];
        if (v > kIntegralityTol && v < 1.0 - kIntegralityTol) return false;
        if (v >= 1.0 - kIntegralityTol) reduced_selection->push_back(j);
    }
    return true;
}

bool selection_feasible(const std::vector<std::size_t>& reduced_selection,
                        const ReducedProblem& red) {
    std::vector<int> usage(red.num_rows, 0);
    for (std::size_t j : reduced_selection) {
        for (int r : red.column_rows[j]) {
            if (++usage[r] > 1) return false;
        }
    }
    return true;
}

struct BranchContext {
    const ReducedProblem& red;
    AssignmentSolution incumbent;
    int nodes_explored = 0;
};

void branch(BranchContext& ctx, std::vector<signed char>& fixed, const RowMask& used) {
    if (++ctx.nodes_explored > kBranchNodeLimit) {
        throw SolverResourceError("assignment solve: branch-and-bound node limit",
                                  ctx.incumbent);
    }
    const LpResult lp = solve_lp(make_lp(ctx.red, fixed), lp_iteration_budget(ctx.red));
    if (lp.hit_iteration_cap) {
        throw SolverResourceError("assignment solve: LP iteration cap in branch node",
                                  ctx.incumbent);
    }
    if (lp.objective <= ctx.incumbent.objective + kObjectiveTol) return;

    std::vector<std::size_t> reduced_sel;
    if (extract_integral(lp, &reduced_sel) && selection_feasible(reduced_sel, ctx.red)) {
        AssignmentSolution candidate;
        for (std::size_t j : reduced_sel) {
            candidate.selected.push_back(ctx.red.orig_index[j]);
            candidate.objective += ctx.red.cost[j];
        }
        std::sort(candidate.selected.begin(), candidate.selected.end());
        if (candidate.objective > ctx.incumbent.objective + kObjectiveTol) {
            candidate.relaxation_was_integral = false;
            ctx.incumbent = std::move(candidate);
        }
        return;
    }

    // Most fractional variable, smallest index on ties.
    std::size_t pick = 0;
    double best_frac = 2.0;
    for (std::size_t j = 0; j < lp.x.size(); ++j) {
        if (fixed[j] != -1) continue;
        const double frac = std::abs(lp.x[j] - 0.5);
        if (frac < best_frac - 1e-12) {
            best_frac = frac;
            pick = j;
        }
    }

    RowMask pick_mask(ctx.red.num_rows);
    for (int r : ctx.red.column_rows[pick]) pick_mask.set(r);
    if (!pick_mask.intersects(used)) {
        fixed[pick] = 1;
        RowMask next = used;
        next.merge(pick_mask);
        branch(ctx, fixed, next);
    }
    fixed[pick] = 0;
    branch(ctx, fixed, used);
    fixed[pick] = -1;
}

}  // namespace

std::size_t AssignmentProblem::nnz() const {
    std::size_t n = 0;
    for (const auto& rows : column_rows) n += rows.size();
    return n;
}

double AssignmentProblem::sparsity() const {
    const std::size_t cells = num_columns() * static_cast<std::size_t>(num_node_rows);
    if (cells == 0) return 1.0;
    return 1.0 - static_cast<double>(nnz()) / static_cast<double>(cells);
}

AssignmentProblem build_problem(const HypothesisMap& map, const AssociationGraph& graph) {
    AssignmentProblem problem;
    std::unordered_map<NodeId, int> node_row;
    for (const auto& layer : graph.layers()) {
        for (NodeId id : layer.nodes) {
            node_row.emplace(id, problem.num_node_rows++);
            problem.row_to_node.push_back(id);
        }
    }
    problem.cost.reserve(map.size());
    problem.column_rows.reserve(map.size());
    for (const Hypothesis& row : map.rows()) {
        std::vector<int> rows;
        rows.reserve(row.entries.size());
        for (const auto& entry : row.entries) {
            auto it = node_row.find(entry.node);
            if (it == node_row.end()) {
                throw ConsistencyError("build_problem: hypothesis references removed node");
            }
            rows.push_back(it->second);
        }
        problem.cost.push_back(row.score_total());
        problem.column_rows.push_back(std::move(rows));
    }
    return problem;
}

namespace {

// Optimum for one connected component; selections are original column ids.
AssignmentSolution solve_component(const ReducedProblem& red) {
    const AssignmentSolution fallback = greedy_incumbent(red);

    std::vector<signed char> no_fixing;
    const LpResult lp = solve_lp(make_lp(red, no_fixing), lp_iteration_budget(red));
    if (lp.hit_iteration_cap) {
        throw SolverResourceError("assignment solve: LP iteration cap", fallback);
    }

    std::vector<std::size_t> reduced_sel;
    if (extract_integral(lp, &reduced_sel) && selection_feasible(reduced_sel, red)) {
        AssignmentSolution sol;
        sol.relaxation_was_integral = true;
        for (std::size_t j : reduced_sel) {
            sol.selected.push_back(red.orig_index[j]);
            sol.objective += red.cost[j];
        }
        std::sort(sol.selected.begin(), sol.selected.end());
        return sol;
    }

    BranchContext ctx{red, fallback, 0};
    ctx.incumbent.relaxation_was_integral = false;
    std::vector<signed char> fixed(red.cost.size(), -1);
    RowMask used(red.num_rows);
    branch(ctx, fixed, used);
    return ctx.incumbent;
}

void merge_into(AssignmentSolution& total, const AssignmentSolution& part) {
    total.selected.insert(total.selected.end(), part.selected.begin(),
                          part.selected.end());
    total.objective += part.objective;
    total.relaxation_was_integral =
        total.relaxation_was_integral && part.relaxation_was_integral;
}

}  // namespace

AssignmentSolution solve(const AssignmentProblem& problem) {
    const ReducedProblem red = reduce(problem);
    if (red.cost.empty()) {
        return {};  // nothing can beat the (always feasible) null solution
    }

    const std::vector<ReducedProblem> comps = split_components(red);
    AssignmentSolution total;
    total.relaxation_was_integral = true;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        try {
            merge_into(total, solve_component(comps[c]));
        } catch (const SolverResourceError& e) {
            // Keep whatever is already exact, take the failed component's
            // incumbent, and fill the untouched components greedily so the
            // caller still receives a feasible solution.
            merge_into(total, e.incumbent);
            for (std::size_t rest = c + 1; rest < comps.size(); ++rest) {
                merge_into(total, greedy_incumbent(comps[rest]));
            }
            total.relaxation_was_integral = false;
            std::sort(total.selected.begin(), total.selected.end());
            throw SolverResourceError(e.what(), total);
        }
    }
    std::sort(total.selected.begin(), total.selected.end());
    return total;
}

AssignmentSolution brute_force_oracle(const AssignmentProblem& problem) {
    const std::size_t p = problem.num_columns();
    if (p > 25) {
        throw SizeGuardError("brute_force_oracle: more than 25 hypotheses");
    }

    // Only positive costs can appear in an optimum and the empty set is
    // feasible, so enumeration runs over the positive columns.
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < p; ++j) {
        if (problem.cost[j] > 0.0) cols.push_back(j);
    }

    std::unordered_map<int, int> row_map;
    int rows = 0;
    for (std::size_t j : cols) {
        for (int r : problem.column_rows[j]) {
            if (row_map.emplace(r, rows).second) ++rows;
        }
    }
    std::vector<RowMask> masks;
    for (std::size_t j : cols) {
        RowMask m(rows);
        for (int r : problem.column_rows[j]) m.set(row_map.at(r));
        masks.push_back(m);
    }
    std::vector<double> suffix(cols.size() + 1, 0.0);
    for (std::size_t i = cols.size(); i-- > 0;) {
        suffix[i] = suffix[i + 1] + problem.cost[cols[i]];
    }

    AssignmentSolution best;  // the null solution
    std::vector<std::size_t> chosen;
    RowMask used(rows);

    auto consider = [&](double score) {
        const bool better = score > best.objective + 1e-12;
        const bool tie = !better && score > best.objective - 1e-12 &&
                         std::lexicographical_compare(chosen.begin(), chosen.end(),
                                                      best.selected.begin(),
                                                      best.selected.end());
        if (better || tie) {
            best.objective = score;
            best.selected = chosen;
        }
    };

    std::function<void(std::size_t, double)> dfs = [&](std::size_t idx, double score) {
        if (score + suffix[idx] < best.objective - 1e-12) return;  // cannot catch up
        if (idx == cols.size()) {
            consider(score);
            return;
        }
        if (!masks[idx].intersects(used)) {
            used.merge(masks[idx]);
            chosen.push_back(cols[idx]);
            dfs(idx + 1, score + problem.cost[cols[idx]]);
            chosen.pop_back();
            used.subtract(masks[idx]);
        }
        dfs(idx + 1, score);
    };
    dfs(0, 0.0);
    return best;
}

std::string to_lp_format(const AssignmentProblem& problem) {
    std::ostringstream os;
    os << "Maximize\n obj:";
    bool first = true;
    for (std::size_t j = 0; j < problem.num_columns(); ++j) {
        const double c = problem.cost[j];
        if (first) {
            os << ' ' << format_number(c) << " z" << j;
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ") << format_number(std::abs(c)) << " z" << j;
        }
    }
    if (first) os << " 0 z0";
    os << "\nSubject To\n";
    std::vector<std::vector<std::size_t>> by_row(problem.num_node_rows);
    for (std::size_t j = 0; j < problem.num_columns(); ++j) {
        for (int r : problem.column_rows[j]) by_row[r].push_back(j);
    }
    for (int r = 0; r < problem.num_node_rows; ++r) {
        if (by_row[r].empty()) continue;
        os << " n" << r << ":";
        for (std::size_t i = 0; i < by_row[r].size(); ++i) {
            os << (i == 0 ? " " : " + ") << 'z' << by_row[r][i];
        }
        os << " <= 1\n";
    }
    os << "Bounds\n";
    for (std::size_t j = 0; j < problem.num_columns(); ++j) {
        os << " 0 <= z" << j << " <= 1\n";
    }
    os << "End\n";
    return os.str();
}

}  // namespace wintrack
