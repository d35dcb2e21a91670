#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mnorm/rational.hpp"

namespace mn {

// A symmetric monotone norm, given in one of the closed forms the toolkit
// understands. Sum and Max are the two extremes; TopL interpolates between
// them; Ordered covers every nonnegative non-increasing weight vector; Lp is
// evaluated in double precision and is the only inexact norm here.
struct NormSpec {
  enum class Kind { Sum, Max, TopL, Ordered, Lp };

  Kind kind = Kind::Sum;
  int ell = 1;                // TopL: number of largest entries summed
  std::vector<Rat> weights;   // Ordered: non-increasing, non-negative
  double p = 2.0;             // Lp: p >= 1

  static NormSpec sum() { return {}; }
  static NormSpec max() { return {Kind::Max, 1, {}, 2.0}; }
  static NormSpec top(int ell) { return {Kind::TopL, ell, {}, 2.0}; }
  static NormSpec ordered(std::vector<Rat> w) {
    return {Kind::Ordered, 1, std::move(w), 2.0};
  }
  static NormSpec lp(double p) { return {Kind::Lp, 1, {}, p}; }

  std::string describe() const;
};

// Evaluates the norm of a nonnegative vector. Exact for all kinds except Lp,
// which goes through double and returns the nearest representable value.
// Throws std::invalid_argument on negative entries, an Ordered weight vector
// whose length differs from the value vector, ell out of range, or p < 1.
Rat eval_norm(const NormSpec& spec, std::vector<Rat> values);

// True iff for every prefix length l, the sum of the l largest entries of v
// is at most alpha times the sum of the l largest entries of u. When this
// holds, f(v) <= alpha * f(u) for every symmetric monotone norm f, so the
// check certifies an approximation factor once and for all norms at once.
bool majorization_dominates(const std::vector<Rat>& u,
                            const std::vector<Rat>& v, const Rat& alpha);

// Elements 0..n-1 partitioned into groups S_1..S_T with budget 2^i on group
// i. Elements may be left ungrouped (group_of == 0); those are never counted
// against any budget.
struct GroupedUniverse {
  int n = 0;
  int T = 0;
  std::vector<std::vector<int>> groups;  // groups[i-1] holds S_i, sorted ids
  std::vector<int> group_of;             // n entries in [0, T]; 0 = ungrouped

  GroupedUniverse() = default;
  GroupedUniverse(int n_, std::vector<std::vector<int>> groups_);

  // Group count used by the reductions: max(1, ceil(log2 n)).
  static int default_T(int n);

  const std::vector<int>& group(int i) const { return groups.at(i - 1); }
  bool contains(int i, int e) const { return group_of.at(e) == i; }
};

// A selected subset of element ids, sorted and duplicate-free.
struct Solution {
  std::vector<int> chosen;

  void normalize();
  bool contains(int e) const;
  int size() const { return static_cast<int>(chosen.size()); }
};

// Per-group load |D cap S_i| for i = 1..T.
std::vector<int> group_loads(const GroupedUniverse& u, const Solution& d);

// True iff |D cap S_i| <= c * 2^i for every group i.
bool check_valid(const GroupedUniverse& u, const Solution& d, const Rat& c);

// Smallest c for which d is c-valid: max_i |D cap S_i| / 2^i (0 if all
// groups are empty of D).
Rat validity_factor(const GroupedUniverse& u, const Solution& d);

enum class Certificate {
  Solved,           // solution meets the advertised validity factor
  NoValidSolution,  // instance has no 1-valid solution; proof by exhaustion
                    // or by an infeasible relaxation
  InfeasibleInput,  // instance itself admits no feasible subset at all
};

std::string certificate_name(Certificate c);

// Common result envelope shared by every solver in the toolkit.
struct SolveReport {
  Certificate certificate = Certificate::Solved;
  Solution solution;            // meaningful iff certificate == Solved
  std::vector<Rat> group_load;  // |D cap S_i| / 2^i per group
  Rat validity = 0;             // max of group_load
  std::optional<Rat> norm_value;
  std::uint64_t seed = 0;  // randomized solvers record the seed they used
  std::string note;        // free-form detail, e.g. which stage certified

  static SolveReport solved(const GroupedUniverse& u, Solution d);
  static SolveReport no_valid_solution(std::string note = {});
  static SolveReport infeasible_input(std::string note = {});
};

}  // namespace mn
