#pragma once

// Budgeted set cover by randomized LP rounding.
//
// The chooseable items are sets; ground elements just record which sets
// contain them. A covering relaxation (pick each set fractionally, cover
// every ground element, respect the per-group budgets 2^i) is solved
// exactly, then each set is kept independently with probability
// min(2 * x_v * L, 1) where L is the instance's coverage log. A round
// succeeds when every ground element is covered and every group i holds
// at most 4 * 2^i * L kept sets, which happens with probability > 1/2;
// the solver resamples with fresh sub-seeds up to a fixed trial cap.

#include <cstdint>
#include <optional>
#include <vector>

#include "mnorm/core.hpp"
#include "mnorm/rational.hpp"

namespace mn {

// Ground elements are 0..ground_size()-1. containing[u] lists the sets
// (universe elements) that contain ground element u; it may be empty, in
// which case no subset whatsoever covers u and solving reports infeasible
// input. Ungrouped sets may appear in membership lists but can never be
// chosen.
struct SetCoverInstance {
  GroupedUniverse universe;                  // one entry per set
  std::vector<std::vector<int>> containing;  // per ground element

  SetCoverInstance(GroupedUniverse u, std::vector<std::vector<int>> member);

  int ground_size() const { return static_cast<int>(containing.size()); }

  // True iff every ground element lies in some chosen set.
  bool covers(const Solution& chosen) const;
};

// The "log n" the rounding is calibrated against: ceil(log2) of the larger
// side of the instance (sets or ground elements), at least 1. Using the
// larger side keeps both failure modes (an uncovered element, a blown
// budget) union-boundable against the same quantity.
int coverage_log(const SetCoverInstance& inst);

// min(2 * x * log_n, 1), the keep probability for a set at LP value x.
// Any x >= 1 / (2 * log_n) pins the probability at one, so a set carrying
// that much LP mass is kept surely.
Rat keep_probability(const Rat& x, int log_n);

// Exact product of (1 - prob[v]) over the listed sets: the probability
// that one round keeps none of them. For an LP row summing to >= 1 this
// is at most 1/N^2 with N = max side of the instance; tests audit that
// bound exactly.
Rat miss_probability(const std::vector<Rat>& prob, const std::vector<int>& members);

// Sub-seed for one rounding trial. Distinct trials of the same solve get
// decorrelated streams while staying a pure function of (seed, trial).
std::uint64_t trial_seed(std::uint64_t seed, int trial);

// One rounding pass: kept[v] = 1 with probability prob[v], independently,
// from a deterministic per-seed stream (one draw per entry, in index
// order). Probabilities are compared exactly against a 64-bit draw, so
// equal (prob, seed) always yields the identical sample.
std::vector<char> sample_sets(const std::vector<Rat>& prob, std::uint64_t seed);

// Per-set keep probabilities derived from an exact vertex of the covering
// relaxation; ungrouped sets get probability zero. nullopt iff the
// relaxation (cover everything, group loads at most 2^i) is infeasible,
// which certifies that no 1-valid cover exists.
std::optional<std::vector<Rat>> cover_probabilities(const SetCoverInstance& inst);

// Trials per solve. Each fails with probability < 1/2, so the chance of
// exhausting the cap is below 2^-32.
inline constexpr int kSetCoverTrialCap = 32;

// Randomized budgeted cover. Solved reports are (4 * coverage_log)-valid
// and record the seed plus the winning trial; the winning trial is the
// smallest succeeding index, so runs are reproducible and parallel trial
// evaluation cannot change the answer. Reports infeasible input when even
// the full family misses some element, no-valid-solution when coverage
// needs ungrouped sets or the relaxation is infeasible. Throws
// std::runtime_error if every trial fails.
SolveReport solve_setcover(const SetCoverInstance& inst, std::uint64_t seed);

}  // namespace mn
