#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mnorm/core.hpp"

namespace mn {

// Anchor positions 1, 2, 4, ... capped at n (duplicates collapsed).
std::vector<int> pos_set(int n);

// Anchor positions ceil((1+delta)^s) capped at n, for the ordered-norm
// weight rounding. delta > 0.
std::vector<int> pos_set_delta(int n, const Rat& delta);

// Smallest anchor >= i (i in [1, n]).
int pos_advance(const std::vector<int>& anchors, int i);

// A non-increasing guess of the optimum's value profile, sampled at anchor
// positions. Entries are either 0 or powers of (1+eps) inside
// [eps*o1_guess/n, snap(o1_guess)]; the entry at anchor 1 is pinned to
// snap(o1_guess). The all-zero vector carries o1_guess = 0.
struct ThresholdVector {
  std::vector<Rat> t;  // one entry per anchor, non-increasing
  Rat o1_guess = 0;
};

// Every threshold vector that can be exact-profile-consistent for some
// subset of the given values: one family per distinct positive value used
// as the o1 guess, plus the all-zero vector. Deterministic order.
std::vector<ThresholdVector> enumerate_thresholds(
    const std::vector<Rat>& values, const Rat& eps,
    const std::vector<int>& anchors);

// The n-vector g with g_i = t(advance(i)): the coarsest profile that still
// dominates any profile consistent with t.
std::vector<Rat> g_of_t(const ThresholdVector& tv,
                        const std::vector<int>& anchors, int n);

// Elements bucketed by value against a threshold vector. Elements above
// the anchor-1 entry are excluded (no solution may use them); elements at
// or below max(last entry, eps*o1/n) land in the last group; the rest go
// to the group whose anchor interval brackets their value.
struct GroupedInstance {
  GroupedUniverse universe;
  std::vector<char> excluded;  // n flags
};

GroupedInstance build_groups(const std::vector<Rat>& values,
                             const ThresholdVector& tv, const Rat& eps);

// A budgeted-selection solver: must either return a Solved report whose
// solution respects the instance's feasibility notion and is c-valid for
// the universe budgets, certify that no 1-valid solution exists, or report
// the instance infeasible outright. Excluded elements must not be chosen.
using LogBgtSolver = std::function<SolveReport(
    const GroupedUniverse&, const std::vector<char>& excluded)>;

struct MinNormResult {
  SolveReport report;
  std::optional<Rat> norm_value;        // set when solved
  std::optional<ThresholdVector> best;  // threshold that won
  int solver_calls = 0;
  int distinct_groupings = 0;
};

// Minimizes an arbitrary symmetric monotone norm over the feasible family
// encoded by the solver, by sweeping threshold vectors and keeping the best
// returned solution under the actual norm. With a solver of factor
// solver_c, the winner is within 4*solver_c + eps of optimal; if every
// sweep certifies no 1-valid solution, the instance itself is infeasible.
MinNormResult minnorm_via_logbgt(const std::vector<Rat>& values,
                                 const NormSpec& norm, const Rat& eps,
                                 const LogBgtSolver& solver,
                                 const Rat& solver_c);

// A solver for min total weight over the same feasible family: returns the
// chosen set and its reported weight, or nullopt when infeasible. Must be
// an alpha-approximation and must never choose excluded elements.
using MinSumSolver = std::function<std::optional<std::pair<Solution, Rat>>(
    const std::vector<Rat>& weights, const std::vector<char>& excluded)>;

// Runs the min-sum solver on weights 2^-i per group-i element (0 for
// ungrouped) and converts the answer into a budget certificate: a returned
// weight above alpha * T proves no 1-valid solution exists; otherwise the
// returned set is (alpha * T)-valid.
SolveReport logbgt_via_minsum(const GroupedUniverse& u,
                              const std::vector<char>& excluded,
                              const MinSumSolver& solver, const Rat& alpha);

// Minimizes the sum of the ell largest chosen values by guessing the
// ell-th largest value t in the optimum and solving min-sum over the
// clipped weights max(v - t, 0). Exact solver -> exact optimum; an
// alpha-approximate solver stays alpha-approximate. Candidates are scored
// by the true top-ell value of their set; best wins.
struct ScalarResult {
  Solution set;
  Rat value = 0;
};

using WeightedSolver = std::function<std::optional<std::pair<Solution, Rat>>(
    const std::vector<Rat>& weights)>;

std::optional<ScalarResult> topl_minimize(const std::vector<Rat>& values,
                                          int ell,
                                          const WeightedSolver& solver);

// Minimizes an ordered norm by rounding the weights to anchor positions
// (factor 1+delta), then sweeping threshold vectors and replacing each
// element value by its proximal surrogate cost, which a min-sum solver can
// handle. Candidates are scored by the true ordered norm.
std::optional<ScalarResult> ordered_minimize(const std::vector<Rat>& values,
                                             const std::vector<Rat>& weights,
                                             const Rat& delta, const Rat& eps,
                                             const WeightedSolver& solver);

// Weight rounding used by ordered_minimize, exposed for tests:
// w~_i = w_(smallest anchor >= i), giving Ord_w~ <= Ord_w <= (1+d) Ord_w~.
std::vector<Rat> round_ordered_weights(const std::vector<Rat>& weights,
                                       const std::vector<int>& anchors);

}  // namespace mn
