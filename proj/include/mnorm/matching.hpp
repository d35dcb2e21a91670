#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mnorm/core.hpp"
#include "mnorm/rational.hpp"
#include "mnorm/reduce.hpp"

namespace mn {

// One edge of a bipartite graph; both sides are indexed 0..m-1.
struct MatchEdge {
  int left = 0;
  int right = 0;
};

// The standard per-group budget vector (2^1, ..., 2^T).
std::vector<Rat> budget_ladder(int T);

// Bipartite perfect-matching instance with one universe element per edge.
// Group budgets d default to the 2^i ladder; a group with d_i = 0 is shut
// off entirely. Ungrouped edges are usable and count against no budget.
// Forbidden edges may not be chosen at all (used by the norm reduction to
// exclude elements above a value threshold).
struct MatchingInstance {
  GroupedUniverse universe;
  std::vector<MatchEdge> edges;
  int m = 0;
  std::vector<Rat> d;           // per-group budget, size T
  std::vector<char> forbidden;  // size n, or empty for none

  // Validates endpoint ranges, m >= 1, one edge per universe element, a
  // budget per group, and nonnegative budgets; throws std::invalid_argument.
  MatchingInstance(GroupedUniverse u, std::vector<MatchEdge> e, int m_in,
                   std::vector<Rat> d_in = {},
                   std::vector<char> forbidden_in = {});

  bool usable(int e) const {
    return forbidden.empty() || !forbidden[static_cast<std::size_t>(e)];
  }

  // Left- and right-side degrees under an edge set.
  std::pair<std::vector<int>, std::vector<int>> degrees(
      const std::vector<int>& chosen) const;

  // True iff chosen is a perfect matching (every degree exactly 1).
  bool is_perfect_matching(const std::vector<int>& chosen) const;
};

// An edge set in which every vertex has degree 1 or 2. Produced by the
// iterative rounding below; deg2_count vertices (across both sides) have
// degree 2 and the rest have degree 1.
struct RelaxedMatching {
  std::vector<int> chosen;  // sorted edge ids
  int deg2_count = 0;
  // How the rounding got there, for diagnostics and tests.
  int cycle_events = 0;
  int path_events = 0;
  int drop_events = 0;
};

// Rounds a fractional perfect matching (degree equalities, budget rows
// Sum_{e in S_i} x_e <= d_i) into a degree-{1,2} edge set. Returns nullopt
// exactly when the initial relaxation is infeasible. On success the output
// satisfies, for every group: no edges when d_i = 0, and at most
// 2 d_i + 9/eps edges when d_i > 0; the number of degree-2 vertices is at
// most 2*eps*m. One constraint is resolved per round: an integral variable
// is fixed, an alternating cycle or a long alternating path of the
// two-edge-vertex subgraph is rounded, or a budget row whose slack
// Sum (1 - 2 x_e) is at most 9/eps is dropped.
std::optional<RelaxedMatching> iterative_round(const MatchingInstance& inst,
                                               const Rat& eps);

// floor(log2(9 / (delta * eps))): how many leading groups are decided by
// search rather than rounding, so the additive 9/eps lands only on groups
// whose budget already dwarfs it.
int enumeration_depth(const Rat& eps, const Rat& delta);

// Decides the leading groups by branch-and-bound over partial matchings
// (include/exclude one low-group edge per node, relaxation-infeasible
// subtrees pruned, every node also tested as a leaf with the remaining low
// groups shut off) and rounds the rest. Requires d to be the 2^i ladder.
// On success the result is (2+delta)-valid; nullopt certifies that no
// 1-valid perfect matching exists.
std::optional<RelaxedMatching> solve_relaxed(const MatchingInstance& inst,
                                             const Rat& eps,
                                             const Rat& delta);

// Deletes one edge at every degree-2 vertex of a relaxed matching. The
// result is a matching with at least m - deg2_count/2 edges; per-group
// counts never increase.
Solution to_nearly_matching(const MatchingInstance& inst,
                            const RelaxedMatching& relaxed);

// Adapter for the norm reduction: solves the budgeted relaxed-matching
// problem on the sub-universe the reduction built, treating excluded
// elements as forbidden edges.
LogBgtSolver matching_logbgt_solver(std::vector<MatchEdge> edges, int m,
                                    Rat eps, Rat delta);

// Minimizes an arbitrary symmetric monotone norm over perfect matchings,
// bi-criterially: returns a matching covering at least (1-eps)m vertices
// per side whose norm is at most (8+delta) times the best perfect
// matching's. Certifies NoValidSolution when the graph has no perfect
// matching at all.
SolveReport minnorm_nearly_matching(const MatchingInstance& inst,
                                    const std::vector<Rat>& values,
                                    const NormSpec& norm, const Rat& eps,
                                    const Rat& delta);

}  // namespace mn
