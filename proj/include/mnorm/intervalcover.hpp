#pragma once

#include <optional>
#include <vector>

#include "mnorm/core.hpp"
#include "mnorm/rational.hpp"
#include "mnorm/reduce.hpp"

namespace mn {

// Half-open segment [lo, hi) of the rational line. Empty when lo >= hi.
struct Seg {
  Rat lo;
  Rat hi;

  bool empty() const { return lo >= hi; }
  Rat length() const { return hi - lo; }
  bool contains(const Seg& s) const { return lo <= s.lo && s.hi <= hi; }
};

bool operator==(const Seg& a, const Seg& b);

Seg seg_clip(const Seg& s, const Seg& window);

// True when the union of the segments contains the whole target.
bool segs_cover(const std::vector<Seg>& segs, const Seg& target);

// Interval covering over grouped elements: a subset D is feasible when the
// union of its segments contains the target. Segments are clipped to the
// target on construction, so coverage questions never leave it; segments
// that miss the target entirely become empty and are simply useless.
// Elements in no group (group_of == 0) can never be chosen by the solver.
struct IntervalInstance {
  GroupedUniverse universe;
  std::vector<Seg> segs;  // one per element, clipped to target
  Seg target;

  IntervalInstance(GroupedUniverse u, std::vector<Seg> s, Seg t);

  bool covers(const std::vector<int>& chosen) const;
};

// One output of the per-group disjointification sweep: a sub-segment of the
// element it came from.
struct DisjointPiece {
  Seg seg;
  int origin = -1;  // element of the original instance
  int group = 0;
};

// Rewrites each group as a family of pairwise disjoint pieces with the same
// union: repeatedly emit the remaining segment with the leftmost left
// endpoint (ties to the rightmost right endpoint) and subtract it from the
// rest. At most one piece survives per element, every element's segment
// meets at most two pieces of its group, and their union contains it.
// Pieces come out sorted by (group, lo). Empty and ungrouped segments are
// skipped.
std::vector<DisjointPiece> to_disjoint(const IntervalInstance& inst);

// A node of the laminar family. The extent starts as a part of the creator
// piece and may later be widened; each widening is covered by the recorded
// extender piece, so {creator} + extenders always covers the extent.
struct LamNode {
  Seg seg;  // final extent
  int group = 0;
  int creator = -1;             // index into pieces
  std::vector<int> extenders;   // indices into pieces, in event order
};

struct LaminarFamily {
  std::vector<DisjointPiece> pieces;
  std::vector<LamNode> nodes;  // pairwise nested or disjoint extents
};

// Converts disjoint pieces into a laminar family with the same union.
// Pieces are processed by ascending (group, lo); each one deletes the nodes
// it swallows, widens the nodes it properly crosses (left-crossers and
// right-crossers move to a common cut point), and is itself inserted as one
// or two nodes split at that cut. Strictly contained extents always belong
// to strictly later groups, and nodes sharing a group stay disjoint.
LaminarFamily to_laminar(std::vector<DisjointPiece> pieces);

// The pieces that rebuild the chosen nodes' extents: creators + extenders,
// deduplicated. Per chosen node the pieces are one of its own group plus at
// most two per later group, so per-group counts at most triple.
std::vector<int> replay_pieces(const LaminarFamily& fam,
                               const std::vector<int>& chosen_nodes);

// Keeps a node unless some strictly larger extent is not the union of the
// extents strictly inside it. Dropped nodes are redundant both ways: the
// kept nodes' minimal extents still cover everything, and restricting any
// covering family to the kept nodes keeps every minimal extent covered.
std::vector<int> tree_filter(const LaminarFamily& fam);

// Containment forest over grouped nodes: parent[v] is the node directly
// above v, or -1 when v hangs off the (virtual) root. Every edge must go
// from a smaller to a strictly larger group index. A subset D covers the
// tree when every leaf has an ancestor-or-self in D.
struct TreeInstance {
  GroupedUniverse universe;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;

  TreeInstance(GroupedUniverse u, std::vector<int> par);

  bool is_leaf(int v) const { return children[v].empty(); }
  std::vector<int> leaves() const;
  bool covers(const std::vector<int>& chosen) const;
};

struct TreeFromIntervals {
  TreeInstance tree;
  std::vector<int> node_of;  // tree element -> index into fam.nodes
};

// Arranges the kept nodes by extent containment; nodes with equal extents
// are chained by ascending group. group_count fixes the universe's group
// range and must be >= every node group.
TreeFromIntervals build_tree(const LaminarFamily& fam, int group_count);

// Per-node charges driving the enumeration: c1[v] = 2^-group(v), and c2[v]
// is the cheaper of c1[v] and the sum of the children's c2 (c1 at leaves).
struct TreeCosts {
  std::vector<Rat> c1;
  std::vector<Rat> c2;
};

TreeCosts tree_costs(const TreeInstance& t);

// Split of the group range [1, T]: groups <= t0 are enumerated exactly,
// groups in (t0, t1] are rounded in the second stage, the rest in the
// first. Chosen so that 2^(t0+1) <= 2^t1 <= T whenever T >= 2 (t0 = t1 = 0
// otherwise), t1 - t0 <= 2^(t0+1), and t0 stays triple-log small.
struct TreeThresholds {
  int t0 = 0;
  int t1 = 0;
  Rat theta;  // 1/T: nodes this cheap are never picked while enumerating
};

TreeThresholds tree_thresholds(const TreeInstance& t);

// All candidate choices for the groups <= t0, deduplicated and sorted. A
// branch either takes the frontier node with the smallest group (only when
// its c2 exceeds theta, and then its subtree is sealed off) or replaces it
// by its children; branches die once the running c2 charge passes 2*c0*T
// or a group count passes 2*c0*2^i. If some c0-valid cover exists, one
// returned choice agrees with a 2*c0-valid cover on all groups <= t0.
std::vector<std::vector<int>> enumerate_tree(const TreeInstance& t, int c0);

// Extends one enumerated choice to a full cover with per-group counts at
// most (4*c0+1)*2^i, via two rounding stages: an exact-coverage relaxation
// with budgets 2*c0*2^i over the not-yet-covered deep leaves, then a
// second relaxation with doubled budgets over the groups in (t0, t1] for
// the rows the first vertex left uncovered. nullopt when the choice leaves
// a shallow leaf uncovered or the first relaxation is infeasible; a
// c0-valid cover guarantees success for the choice that mirrors it.
std::optional<std::vector<int>> round_tree(const TreeInstance& t,
                                           const std::vector<int>& partial,
                                           int c0);

// Tree covering: either a cover with validity at most 4*c0+1, or a sound
// certificate that no c0-valid cover exists.
SolveReport solve_treecov(const TreeInstance& t, int c0);

// Interval covering: either a cover with validity at most 3*(32*c0+1), or
// a sound certificate that no c0-valid cover exists. InfeasibleInput when
// even the full segment list fails to cover the target; NoValidSolution
// when only dropping the ungrouped elements makes it fail.
SolveReport solve_intervalcover(const IntervalInstance& inst, int c0 = 1);

// Adapter for the threshold reduction: solves the grouped instance the
// reduction proposes at c0 = 1, so the wrapper's factor is 3*33 = 99.
LogBgtSolver interval_logbgt_solver(std::vector<Seg> segs, Seg target);

}  // namespace mn
