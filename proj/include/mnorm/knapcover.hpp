#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mnorm/core.hpp"
#include "mnorm/reduce.hpp"

namespace mn {

// d-dimensional covering over grouped elements: a subset D is feasible when
// sum_{u in D} weights[u][i] >= 1 for every dimension i. Elements left in no
// group (group_of == 0) can never be chosen by the solver.
struct KnapInstance {
  GroupedUniverse universe;
  int d = 0;
  std::vector<std::vector<Rat>> weights;  // weights[u] has exactly d entries

  KnapInstance(GroupedUniverse u, int dim, std::vector<std::vector<Rat>> w);

  bool covers(const std::vector<int>& chosen) const;

  // Max over dimensions of (largest weight / smallest positive weight).
  // Throws invalid_argument when some dimension carries no positive weight at
  // all (no subset can cover that dimension).
  Rat weight_spread() const;
};

// A choice for the first t0 groups: sets[j] is the subset taken from group
// j+1, sorted ascending. sets.size() == t0 always.
struct PartialSolution {
  int t0 = 0;
  std::vector<std::vector<int>> sets;
};

// Streams every (D_1..D_t0) with D_j a subset of group j and |D_j| <= 2^j,
// ordered per group by size then lexicographically. The visitor returns
// false to stop early. Memory stays proportional to one partial solution.
void enumerate_full(const KnapInstance& inst, int t0,
                    const std::function<bool(const PartialSolution&)>& visit);

// Element partition of one group by dyadic weight class. Per dimension the
// class digit is 0 for zero weight and 1 + floor(log2(w / gamma)) otherwise,
// gamma being the smallest positive weight of that dimension inside the
// group. Classes are ordered by first appearance over ascending element ids.
struct WeightClasses {
  std::vector<std::vector<int>> classes;  // ascending ids per class
  std::vector<std::vector<int>> keys;     // the d digits of each class
};

WeightClasses weight_classes(const KnapInstance& inst, int group_index);

// The deterministic pick for a class-count vector: the min(2*counts[k],
// class size) smallest ids from each class, merged and sorted.
std::vector<int> pick_from_classes(const WeightClasses& wc,
                                   const std::vector<int>& counts);

// Streams the partial solutions obtained by enumerating, per group j <= t0,
// all class-count vectors with counts[k] <= class size and sum <= 2^j, each
// materialized via pick_from_classes. |D_j| <= 2^{j+1} for every output.
void enumerate_weight_classes(
    const KnapInstance& inst, int t0,
    const std::function<bool(const PartialSolution&)>& visit);

// Extends a partial choice for groups 1..t0 by one LP rounding step over
// groups t0+1..T: covering rows demand the residual weight left by the
// partial, each later group gets its cardinality budget 2^j, and every
// positive entry of a vertex solution is taken. Returns nullopt when the
// relaxation is infeasible. Any returned solution covers all dimensions and
// satisfies |D cap S_j| <= (d/2^t0 + 1) * 2^j for t0 < j <= T; a vertex with
// more than d+1 fractional entries in one group would contradict the
// counting argument behind that bound, so it raises logic_error.
std::optional<Solution> round_vertex(const KnapInstance& inst,
                                     const PartialSolution& partial, int t0);

enum class KnapRegime {
  SmallD,  // full enumeration of the first t0 groups, (1+eps)-valid
  LargeD,  // weight-class enumeration, 2-valid
};

// The prefix length each regime enumerates. SmallD picks the smallest t0
// with 2^t0 >= d/eps; LargeD picks the smallest t0 with 2^t0 >= d. Both are
// clamped to [1, T]; at t0 == T the LP stage degenerates to a coverage
// check of the enumerated prefix.
int knap_t0(const KnapInstance& inst, KnapRegime regime, const Rat& eps);

// Runs the chosen enumeration and rounds the first extendable partial
// choice (in enumeration order; evaluation may be parallel but the result
// is deterministic). Solved reports are (1+eps)-valid in SmallD and 2-valid
// in LargeD; if every partial choice fails, no 1-valid solution exists and
// that is certified.
SolveReport solve_knapcover(const KnapInstance& inst, KnapRegime regime,
                            const Rat& eps = Rat(1));

// Adapter for the norm-minimization driver: captures the weight vectors and
// solves each grouped instance the driver proposes.
LogBgtSolver knap_logbgt_solver(std::vector<std::vector<Rat>> weights,
                                KnapRegime regime, Rat eps = Rat(1));

}  // namespace mn
