#pragma once

// Budgeted s-t paths by approximate dynamic programming.
//
// States track, per supergroup of beta consecutive groups, the exact
// budget charge sum |D cap S_j| / 2^j of a walk, rounded up to a power of
// p > 1 after every doubling step. Rounding keeps the state space small;
// since it only ever over-approximates, any vector that survives all
// levels reconstructs to a genuine walk whose exact charge it dominates.
// A run that ends with no state at (s, t) certifies that no 1-valid path
// exists, because a 1-valid path would have kept one state alive through
// every level.

#include <vector>

#include "mnorm/core.hpp"
#include "mnorm/rational.hpp"
#include "mnorm/reduce.hpp"

namespace mn {

struct PathEdge {
  int from = 0;
  int to = 0;
};

// Directed multigraph whose chooseable items are the edges. Parallel edges
// and self-loops are legal input; self-loops and ungrouped edges can never
// lie on a returned path.
struct PathInstance {
  GroupedUniverse universe;  // one entry per edge
  std::vector<PathEdge> edges;
  int num_vertices = 0;
  int s = 0;
  int t = 0;

  PathInstance(GroupedUniverse u, std::vector<PathEdge> e, int nv, int s_in,
               int t_in);

  // True iff the chosen edges form a simple path from s to t.
  bool is_path(const Solution& chosen) const;
};

// Parameters the level DP derives from the target factor alpha >= 9.
struct PathParams {
  int beta = 1;    // groups per supergroup, the largest integral width
  Rat delta = 0;   // (alpha - 1) / (4 * beta) - 1, kept in [1/2, 2]
  int levels = 1;  // doubling iterations: ceil(log2(longest useful path))
  int K = 1;       // number of supergroups, ceil(T / beta)
  Rat p = 0;       // rounding base 1 + delta / (2 * levels)
  Rat budget = 0;  // validity bound of returned paths, (alpha - 1) / 4
};

// Throws std::invalid_argument when alpha < 9 or no integral supergroup
// width puts delta inside [1/2, 2] (the message suggests usable alphas).
PathParams path_params(const Rat& alpha, int num_edges, int T,
                       int num_vertices);

// Exact supergroup charge vector: entry i sums |D cap S_j| / 2^j over the
// beta groups of supergroup i. Ungrouped elements contribute nothing.
std::vector<Rat> supergroup_cost(const GroupedUniverse& u,
                                 const std::vector<int>& chosen, int beta);

// Approximate DP solver. Solved reports are (alpha - 1) / 4 - valid simple
// paths; no-valid-solution certifies that no 1-valid path exists; input is
// infeasible when t is unreachable from s even using every edge.
SolveReport solve_path(const PathInstance& inst, const Rat& alpha);

// Budgeted-selection adapter for the norm reduction, solving at factor
// (alpha - 1) / 4. Excluded elements must arrive ungrouped.
LogBgtSolver path_logbgt_solver(std::vector<PathEdge> edges, int nv, int s,
                                int t, Rat alpha);

// Exact min-total-weight backend over simple s-t paths (nonnegative
// weights), for the top-ell and ordered-norm scalarizations.
WeightedSolver path_weight_solver(std::vector<PathEdge> edges, int nv, int s,
                                  int t);

}  // namespace mn
