#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "mnorm/core.hpp"
#include "mnorm/intervalcover.hpp"
#include "mnorm/knapcover.hpp"
#include "mnorm/reduce.hpp"
#include "mnorm/setcover.hpp"
#include "mnorm/stpath.hpp"

namespace mn {

// A tiny subset-selection problem given by an explicit feasibility
// predicate over bitmasks. Only meant for exhaustive cross-checking of the
// real solvers; n is capped accordingly.
struct SubsetSystem {
  int n = 0;
  std::function<bool(std::uint32_t)> feasible;
};

constexpr int kBruteForceMaxN = 24;

Solution mask_to_solution(std::uint32_t mask, int n);

// Minimum norm over all feasible subsets by full enumeration; ties go to
// the smallest bitmask. nullopt when nothing is feasible.
std::optional<std::pair<Solution, Rat>> brute_force_minnorm(
    const SubsetSystem& sys, const NormSpec& norm,
    const std::vector<Rat>& values);

// Minimum total weight over feasible subsets avoiding excluded elements.
std::optional<std::pair<Solution, Rat>> brute_force_minsum(
    const SubsetSystem& sys, const std::vector<Rat>& weights,
    const std::vector<char>& excluded);

// Smallest achievable validity factor over feasible subsets avoiding
// excluded elements; fills *best with the witness.
std::optional<Rat> brute_force_validity(const SubsetSystem& sys,
                                        const GroupedUniverse& u,
                                        const std::vector<char>& excluded,
                                        Solution* best = nullptr);

// Exhaustive solver with factor c = 1: returns the minimum-validity
// feasible subset when it is 1-valid, otherwise a certified answer.
LogBgtSolver make_exhaustive_logbgt(const SubsetSystem& sys);

// Exhaustive exact min-sum solvers (alpha = 1), with and without an
// exclusion mask.
MinSumSolver make_exhaustive_minsum(const SubsetSystem& sys);
WeightedSolver make_exhaustive_weighted(const SubsetSystem& sys);

// A generated covering instance together with the 1-valid covering subset
// that was planted into it.
struct PlantedKnap {
  KnapInstance instance;
  Solution planted;
};

// Random d-dimensional covering instance with an embedded 1-valid solution.
// Groups 1..3 are kept small so full enumeration of a short prefix stays
// affordable; every positive weight within a dimension lies within a factor
// 2^spread_exp of the others (so weight_spread() <= 2^spread_exp).
PlantedKnap gen_planted_knap(std::mt19937_64& rng, int n, int d,
                             int spread_exp);

// Random covering instance with no planted structure; may or may not admit
// a covering subset at all. Used for certificate cross-checks.
KnapInstance gen_random_knap(std::mt19937_64& rng, int n, int d);

// A segment-cover instance over target [0, n) together with a 1-valid
// covering subset that was planted into it.
struct PlantedIntervals {
  IntervalInstance instance;
  Solution planted;
};

// Splits [0, n) into consecutive planted blocks with rational jitter, then
// pads with noise segments. The first two groups are kept tiny because the
// containment-tree prefix enumeration branches on them.
PlantedIntervals gen_planted_intervals(std::mt19937_64& rng, int n);

// Random segments over a short target with no planted structure; may fail
// to cover. Meant for exhaustive cross-checks, so keep n small.
IntervalInstance gen_random_intervals(std::mt19937_64& rng, int n);

// A leaf-cover instance on a rooted forest together with a 1-valid planted
// cover (every leaf has a planted ancestor-or-self).
struct PlantedTree {
  TreeInstance tree;
  Solution planted;
};

// Random forest with groups strictly increasing along edges plus a planted
// cover within every group budget. Rebuilds the forest when the planting
// fails; throws after too many attempts.
PlantedTree gen_planted_tree(std::mt19937_64& rng, int m);

// A set-cover instance together with a 1-valid cover planted into it:
// every ground element lies in at least one planted set and the planted
// sets respect every group budget.
struct PlantedSetCover {
  SetCoverInstance instance;
  Solution planted;
};

// nsets sets (about an eighth ungrouped), nelems ground elements. Each
// element gets one planted set plus a few random extra memberships, so
// membership lists are never empty.
PlantedSetCover gen_planted_setcover(std::mt19937_64& rng, int nsets,
                                     int nelems);

// Random memberships with no planted structure; elements may lie in no set
// at all. Meant for exhaustive certificate cross-checks on tiny sizes.
SetCoverInstance gen_random_setcover(std::mt19937_64& rng, int nsets,
                                     int nelems);

// A directed-graph instance together with a planted simple s-t path that
// respects every group budget.
struct PlantedPath {
  PathInstance instance;
  Solution planted;
};

// Plants a simple path from 0 to nv-1 through distinct random vertices,
// assigns its edges groups within the budgets, then pads with random noise
// edges (about an eighth ungrouped). Edge ids are shuffled.
PlantedPath gen_planted_path(std::mt19937_64& rng, int nv);

// Random directed multigraph with no planted structure; s = 0 and
// t = nv-1 may be disconnected. For exhaustive cross-checks on tiny sizes.
PathInstance gen_random_path_instance(std::mt19937_64& rng, int nv);

}  // namespace mn
