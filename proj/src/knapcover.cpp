#include "mnorm/knapcover.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "mnorm/lp.hpp"
#include "mnorm/parallel.hpp"

namespace mn {

namespace {

// Cardinality budget 2^i of group i, saturating: no group ever holds more
// than n elements anyway.
int group_budget(int i, int n) {
  if (i >= 30) return n;
  return std::min(1 << i, n);
}

// Streams all subsets of g with at most cap elements, ordered by size and
// then lexicographically. Returns false when the visitor stopped the walk.
bool each_subset(const std::vector<int>& g, int cap,
                 const std::function<bool(std::vector<int>)>& fn) {
  int m = static_cast<int>(g.size());
  if (!fn({})) return false;
  for (int s = 1; s <= std::min(cap, m); ++s) {
    std::vector<int> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<int> cur(s);
      for (int k = 0; k < s; ++k) cur[k] = g[idx[k]];
      if (!fn(std::move(cur))) return false;
      int i = s - 1;
      while (i >= 0 && idx[i] == m - s + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int k = i + 1; k < s; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
  return true;
}

void check_t0(const KnapInstance& inst, int t0) {
  if (t0 < 0 || t0 > inst.universe.T)
    throw std::invalid_argument("knapsack cover: t0 out of range");
}

}  // namespace

KnapInstance::KnapInstance(GroupedUniverse u, int dim,
                           std::vector<std::vector<Rat>> w)
    : universe(std::move(u)), d(dim), weights(std::move(w)) {
  if (d < 1) throw std::invalid_argument("knapsack cover: d must be >= 1");
  if (static_cast<int>(weights.size()) != universe.n)
    throw std::invalid_argument("knapsack cover: one weight vector per element");
  for (const auto& wu : weights) {
    if (static_cast<int>(wu.size()) != d)
      throw std::invalid_argument("knapsack cover: weight vector has wrong size");
    for (const Rat& x : wu)
      if (x < 0)
        throw std::invalid_argument("knapsack cover: negative weight");
  }
}

bool KnapInstance::covers(const std::vector<int>& chosen) const {
  for (int i = 0; i < d; ++i) {
    Rat total = 0;
    for (int e : chosen) total += weights.at(e)[i];
    if (total < 1) return false;
  }
  return true;
}

Rat KnapInstance::weight_spread() const {
  Rat spread = 1;
  for (int i = 0; i < d; ++i) {
    Rat hi = 0;
    std::optional<Rat> lo;
    for (const auto& wu : weights) {
      const Rat& x = wu[i];
      if (x <= 0) continue;
      hi = std::max(hi, x);
      if (!lo || x < *lo) lo = x;
    }
    if (!lo)
      throw std::invalid_argument(
          "knapsack cover: a dimension has no positive weight");
    Rat ratio = hi / *lo;
    spread = std::max(spread, ratio);
  }
  return spread;
}

void enumerate_full(const KnapInstance& inst, int t0,
                    const std::function<bool(const PartialSolution&)>& visit) {
  check_t0(inst, t0);
  PartialSolution p;
  p.t0 = t0;
  p.sets.resize(t0);
  std::function<bool(int)> rec = [&](int j) -> bool {
    if (j == t0) return visit(p);
    const std::vector<int>& g = inst.universe.group(j + 1);
    return each_subset(g, group_budget(j + 1, inst.universe.n),
                       [&](std::vector<int> s) {
                         p.sets[j] = std::move(s);
                         return rec(j + 1);
                       });
  };
  rec(0);
}

WeightClasses weight_classes(const KnapInstance& inst, int group_index) {
  const std::vector<int>& g = inst.universe.group(group_index);
  std::vector<std::optional<Rat>> gamma(inst.d);
  for (int e : g)
    for (int i = 0; i < inst.d; ++i) {
      const Rat& x = inst.weights[e][i];
      if (x > 0 && (!gamma[i] || x < *gamma[i])) gamma[i] = x;
    }

  WeightClasses wc;
  for (int e : g) {
    std::vector<int> key(inst.d);
    for (int i = 0; i < inst.d; ++i) {
      const Rat& x = inst.weights[e][i];
      key[i] = x == 0 ? 0 : 1 + floor_log2(Rat(x / *gamma[i]));
    }
    auto it = std::find(wc.keys.begin(), wc.keys.end(), key);
    if (it == wc.keys.end()) {
      wc.keys.push_back(std::move(key));
      wc.classes.emplace_back();
      it = wc.keys.end() - 1;
    }
    wc.classes[it - wc.keys.begin()].push_back(e);
  }
  return wc;
}

std::vector<int> pick_from_classes(const WeightClasses& wc,
                                   const std::vector<int>& counts) {
  if (counts.size() != wc.classes.size())
    throw std::invalid_argument("pick_from_classes: one count per class");
  std::vector<int> out;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    int size = static_cast<int>(wc.classes[k].size());
    if (counts[k] < 0 || counts[k] > size)
      throw std::invalid_argument("pick_from_classes: count out of range");
    int take = std::min(2 * counts[k], size);
    out.insert(out.end(), wc.classes[k].begin(), wc.classes[k].begin() + take);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void enumerate_weight_classes(
    const KnapInstance& inst, int t0,
    const std::function<bool(const PartialSolution&)>& visit) {
  check_t0(inst, t0);
  std::vector<WeightClasses> per_group;
  per_group.reserve(t0);
  for (int j = 1; j <= t0; ++j) per_group.push_back(weight_classes(inst, j));

  PartialSolution p;
  p.t0 = t0;
  p.sets.resize(t0);
  std::function<bool(int)> rec = [&](int j) -> bool {
    if (j == t0) return visit(p);
    const WeightClasses& wc = per_group[j];
    int r = static_cast<int>(wc.classes.size());
    std::vector<int> counts(r, 0);
    int budget = group_budget(j + 1, inst.universe.n);
    std::function<bool(int, int)> crec = [&](int k, int left) -> bool {
      if (k == r) {
        p.sets[j] = pick_from_classes(wc, counts);
        return rec(j + 1);
      }
      int cap = std::min<int>(static_cast<int>(wc.classes[k].size()), left);
      for (int c = 0; c <= cap; ++c) {
        counts[k] = c;
        if (!crec(k + 1, left - c)) return false;
      }
      counts[k] = 0;
      return true;
    };
    return crec(0, budget);
  };
  rec(0);
}

std::optional<Solution> round_vertex(const KnapInstance& inst,
                                     const PartialSolution& partial, int t0) {
  check_t0(inst, t0);
  if (static_cast<int>(partial.sets.size()) != t0)
    throw std::invalid_argument("round_vertex: partial has wrong group count");
  const GroupedUniverse& u = inst.universe;
  for (int j = 0; j < t0; ++j)
    for (int e : partial.sets[j])
      if (!u.contains(j + 1, e))
        throw std::invalid_argument("round_vertex: element outside its group");

  // Demand left over for the later groups.
  std::vector<Rat> resid(inst.d, Rat(1));
  for (const auto& s : partial.sets)
    for (int e : s)
      for (int i = 0; i < inst.d; ++i) resid[i] -= inst.weights[e][i];

  Solution sol;
  for (const auto& s : partial.sets)
    sol.chosen.insert(sol.chosen.end(), s.begin(), s.end());

  std::vector<int> ids;
  for (int e = 0; e < u.n; ++e)
    if (u.group_of[e] > t0) ids.push_back(e);

  if (ids.empty()) {
    for (const Rat& r : resid)
      if (r > 0) return std::nullopt;
    sol.normalize();
    return sol;
  }

  LinearProgram lp;
  std::vector<int> var_of(u.n, -1);
  for (int e : ids) var_of[e] = lp.add_var(Rat(0), Rat(1));
  for (int i = 0; i < inst.d; ++i) {
    LpRow row;
    for (int e : ids)
      if (inst.weights[e][i] != 0)
        row.coef.emplace_back(var_of[e], inst.weights[e][i]);
    row.rel = Rel::Ge;
    row.rhs = std::max(Rat(0), resid[i]);
    row.tag = RowTag::Feasibility;
    lp.add_row(std::move(row));
  }
  for (int j = t0 + 1; j <= u.T; ++j) {
    const std::vector<int>& g = u.group(j);
    if (g.empty()) continue;
    LpRow row;
    for (int e : g) row.coef.emplace_back(var_of[e], Rat(1));
    row.rel = Rel::Le;
    row.rhs = pow2(j);
    row.tag = RowTag::Cardinality;
    lp.add_row(std::move(row));
  }

  LpResult res = solve_feasible_vertex(lp);
  if (!res.feasible) return std::nullopt;
  const std::vector<Rat>& x = res.vertex.x;

  // At a vertex, a group's fractional entries live only in the d covering
  // rows plus the group's own budget row, so more than d+1 of them would be
  // linearly dependent.
  for (int j = t0 + 1; j <= u.T; ++j) {
    std::vector<int> vars;
    for (int e : u.group(j)) vars.push_back(var_of[e]);
    if (count_fractional(lp, x, vars) > inst.d + 1)
      throw std::logic_error(
          "knapsack cover: vertex with more than d+1 fractional entries in "
          "one group");
  }

  for (int e : ids)
    if (x[var_of[e]] > 0) sol.chosen.push_back(e);
  sol.normalize();

  std::vector<int> loads = group_loads(u, sol);
  Rat factor = Rat(inst.d) / pow2(t0) + 1;
  for (int j = t0 + 1; j <= u.T; ++j)
    if (Rat(loads[j - 1]) > factor * pow2(j))
      throw std::logic_error(
          "knapsack cover: rounded group exceeds its certified budget");
  if (!inst.covers(sol.chosen))
    throw std::logic_error("knapsack cover: rounded solution fails to cover");
  return sol;
}

int knap_t0(const KnapInstance& inst, KnapRegime regime, const Rat& eps) {
  if (eps <= 0) throw std::invalid_argument("knapsack cover: eps must be > 0");
  Rat target =
      regime == KnapRegime::SmallD ? Rat(inst.d) / eps : Rat(inst.d);
  int t0 = std::max(1, ceil_log2(std::max(target, Rat(1))));
  return std::min(t0, inst.universe.T);
}

namespace {

// Evaluates streamed partial solutions in chunks; inside a chunk the LP
// roundings run in parallel, but the winner is always the first success in
// stream order, so the result does not depend on the worker count.
struct FirstFeasible {
  const KnapInstance& inst;
  int t0;
  std::vector<PartialSolution> buf;
  std::optional<Solution> found;

  static constexpr std::size_t kChunk = 256;

  bool feed(const PartialSolution& p) {
    buf.push_back(p);
    if (buf.size() < kChunk) return true;
    return flush();
  }

  // Returns false once a feasible partial has been found (stop streaming).
  bool flush() {
    if (buf.empty()) return true;
    std::vector<std::optional<Solution>> out(buf.size());
    std::optional<std::int64_t> win = par_first_success(
        static_cast<std::int64_t>(buf.size()), [&](std::int64_t i) {
          out[i] = round_vertex(inst, buf[i], t0);
          return out[i].has_value();
        });
    buf.clear();
    if (win) {
      found = std::move(out[*win]);
      return false;
    }
    return true;
  }
};

}  // namespace

namespace {

// Fractional relaxation over every group at once. Any integral 1-valid
// solution is a point of it, so infeasibility certifies absence without
// walking the enumeration.
bool relaxation_feasible(const KnapInstance& inst) {
  const GroupedUniverse& u = inst.universe;
  LinearProgram lp;
  std::vector<int> var_of(u.n, -1);
  for (int e = 0; e < u.n; ++e)
    if (u.group_of[e] > 0) var_of[e] = lp.add_var(Rat(0), Rat(1));
  if (lp.num_vars() == 0) return false;
  for (int i = 0; i < inst.d; ++i) {
    LpRow row;
    for (int e = 0; e < u.n; ++e)
      if (var_of[e] >= 0 && inst.weights[e][i] != 0)
        row.coef.emplace_back(var_of[e], inst.weights[e][i]);
    row.rel = Rel::Ge;
    row.rhs = 1;
    row.tag = RowTag::Feasibility;
    if (row.coef.empty()) return false;
    lp.add_row(std::move(row));
  }
  for (int j = 1; j <= u.T; ++j) {
    const std::vector<int>& g = u.group(j);
    if (g.empty()) continue;
    LpRow row;
    for (int e : g) row.coef.emplace_back(var_of[e], Rat(1));
    row.rel = Rel::Le;
    row.rhs = pow2(j);
    row.tag = RowTag::Cardinality;
    lp.add_row(std::move(row));
  }
  return solve_feasible_vertex(lp).feasible;
}

}  // namespace

SolveReport solve_knapcover(const KnapInstance& inst, KnapRegime regime,
                            const Rat& eps) {
  int t0 = knap_t0(inst, regime, eps);
  if (!relaxation_feasible(inst))
    return SolveReport::no_valid_solution(
        "the covering relaxation over all groups is infeasible");
  FirstFeasible ff{inst, t0, {}, {}};
  auto visit = [&](const PartialSolution& p) { return ff.feed(p); };
  if (regime == KnapRegime::SmallD)
    enumerate_full(inst, t0, visit);
  else
    enumerate_weight_classes(inst, t0, visit);
  if (!ff.found) ff.flush();

  if (ff.found) {
    SolveReport rep = SolveReport::solved(inst.universe, *ff.found);
    Rat cap = regime == KnapRegime::SmallD ? 1 + eps : Rat(2);
    if (rep.validity > cap)
      throw std::logic_error(
          "knapsack cover: solution exceeded its validity guarantee");
    return rep;
  }
  return SolveReport::no_valid_solution(
      "every choice for the leading groups leaves the covering relaxation "
      "infeasible");
}

LogBgtSolver knap_logbgt_solver(std::vector<std::vector<Rat>> weights,
                                KnapRegime regime, Rat eps) {
  return [weights = std::move(weights), regime,
          eps](const GroupedUniverse& u,
               const std::vector<char>& excluded) -> SolveReport {
    if (static_cast<int>(weights.size()) != u.n)
      throw std::invalid_argument("knap solver: weight count mismatch");
    for (int e = 0; e < u.n; ++e)
      if (excluded[e] && u.group_of[e] != 0)
        throw std::invalid_argument("knap solver: excluded element grouped");
    int d = weights.empty() ? 1 : static_cast<int>(weights[0].size());
    KnapInstance inst(u, d, weights);
    return solve_knapcover(inst, regime, eps);
  };
}

}  // namespace mn
