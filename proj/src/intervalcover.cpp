#include "mnorm/intervalcover.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "mnorm/lp.hpp"
#include "mnorm/parallel.hpp"

namespace mn {

bool operator==(const Seg& a, const Seg& b) {
  return a.lo == b.lo && a.hi == b.hi;
}

Seg seg_clip(const Seg& s, const Seg& window) {
  Seg out;
  out.lo = std::max(s.lo, window.lo);
  out.hi = std::min(s.hi, window.hi);
  return out;
}

bool segs_cover(const std::vector<Seg>& segs, const Seg& target) {
  if (target.empty()) return true;
  std::vector<Seg> live;
  for (const Seg& s : segs)
    if (!s.empty()) live.push_back(s);
  std::sort(live.begin(), live.end(), [](const Seg& a, const Seg& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi > b.hi;
  });
  Rat reach = target.lo;
  for (const Seg& s : live) {
    if (reach >= target.hi) return true;
    if (s.lo > reach) return false;
    reach = std::max(reach, s.hi);
  }
  return reach >= target.hi;
}

IntervalInstance::IntervalInstance(GroupedUniverse u, std::vector<Seg> s,
                                   Seg t)
    : universe(std::move(u)), segs(std::move(s)), target(t) {
  if (target.empty())
    throw std::invalid_argument("interval cover: target must be nonempty");
  if (static_cast<int>(segs.size()) != universe.n)
    throw std::invalid_argument("interval cover: one segment per element");
  for (Seg& sg : segs) {
    sg = seg_clip(sg, target);
    if (sg.empty()) sg = Seg{target.lo, target.lo};
  }
}

bool IntervalInstance::covers(const std::vector<int>& chosen) const {
  std::vector<Seg> picked;
  picked.reserve(chosen.size());
  for (int e : chosen) picked.push_back(segs.at(e));
  return segs_cover(picked, target);
}

std::vector<DisjointPiece> to_disjoint(const IntervalInstance& inst) {
  std::vector<DisjointPiece> out;
  for (int g = 1; g <= inst.universe.T; ++g) {
    // Surviving remainders of this group's segments.
    std::vector<std::pair<Seg, int>> work;
    for (int e : inst.universe.group(g))
      if (!inst.segs[e].empty()) work.emplace_back(inst.segs[e], e);
    while (!work.empty()) {
      std::size_t pick = 0;
      for (std::size_t i = 1; i < work.size(); ++i) {
        const Seg& a = work[i].first;
        const Seg& b = work[pick].first;
        if (a.lo < b.lo || (a.lo == b.lo && a.hi > b.hi)) pick = i;
      }
      Seg chosen = work[pick].first;
      out.push_back({chosen, work[pick].second, g});
      std::vector<std::pair<Seg, int>> next;
      for (std::size_t i = 0; i < work.size(); ++i) {
        if (i == pick) continue;
        // The chosen segment starts leftmost, so subtracting it leaves at
        // most the right part.
        Seg rest{std::max(work[i].first.lo, chosen.hi), work[i].first.hi};
        if (!rest.empty()) next.emplace_back(rest, work[i].second);
      }
      work = std::move(next);
    }
  }
  return out;
}

namespace {

struct BuildNode {
  Seg seg;
  int group = 0;
  int creator = -1;
  std::vector<int> extenders;
  bool alive = true;
};

}  // namespace

LaminarFamily to_laminar(std::vector<DisjointPiece> pieces) {
  std::sort(pieces.begin(), pieces.end(),
            [](const DisjointPiece& a, const DisjointPiece& b) {
              if (a.group != b.group) return a.group < b.group;
              if (!(a.seg.lo == b.seg.lo)) return a.seg.lo < b.seg.lo;
              return a.origin < b.origin;
            });
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].seg.empty() || pieces[i].group < 1)
      throw std::invalid_argument("laminar: pieces must be nonempty and grouped");
    if (i > 0 && pieces[i - 1].group == pieces[i].group &&
        pieces[i - 1].seg.hi > pieces[i].seg.lo)
      throw std::invalid_argument("laminar: pieces of a group must be disjoint");
  }

  std::vector<BuildNode> nodes;
  for (int p = 0; p < static_cast<int>(pieces.size()); ++p) {
    const Seg cur = pieces[p].seg;
    const int g = pieces[p].group;
    for (BuildNode& nd : nodes)
      if (nd.alive && cur.contains(nd.seg)) nd.alive = false;
    std::vector<int> left, right;  // crossers by which endpoint lies inside
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      const BuildNode& nd = nodes[i];
      if (!nd.alive) continue;
      if (cur.lo < nd.seg.lo && nd.seg.lo < cur.hi && cur.hi < nd.seg.hi)
        left.push_back(i);
      else if (nd.seg.lo < cur.lo && cur.lo < nd.seg.hi &&
               nd.seg.hi < cur.hi)
        right.push_back(i);
    }
    Rat cut = cur.hi;
    for (int i : left) cut = std::min(cut, Rat(nodes[i].seg.lo));
    for (int i : left) {
      if (nodes[i].seg.lo > cut) {
        nodes[i].seg.lo = cut;
        nodes[i].extenders.push_back(p);
      }
    }
    for (int i : right) {
      if (nodes[i].seg.hi > cut)
        throw std::logic_error("laminar: a left-reaching crosser passed the cut");
      if (nodes[i].seg.hi < cut) {
        nodes[i].seg.hi = cut;
        nodes[i].extenders.push_back(p);
      }
    }
    nodes.push_back({Seg{cur.lo, cut}, g, p, {}, true});
    if (cut < cur.hi) nodes.push_back({Seg{cut, cur.hi}, g, p, {}, true});
  }

  LaminarFamily fam;
  fam.pieces = std::move(pieces);
  for (BuildNode& nd : nodes)
    if (nd.alive)
      fam.nodes.push_back(
          {nd.seg, nd.group, nd.creator, std::move(nd.extenders)});
  return fam;
}

std::vector<int> replay_pieces(const LaminarFamily& fam,
                               const std::vector<int>& chosen_nodes) {
  std::set<int> out;
  for (int id : chosen_nodes) {
    const LamNode& nd = fam.nodes.at(id);
    out.insert(nd.creator);
    out.insert(nd.extenders.begin(), nd.extenders.end());
  }
  return {out.begin(), out.end()};
}

std::vector<int> tree_filter(const LaminarFamily& fam) {
  const auto& nodes = fam.nodes;
  int m = static_cast<int>(nodes.size());
  auto strictly_inside = [&](const Seg& a, const Seg& b) {
    return b.contains(a) && !(a == b);
  };
  // A node is elementary when the extents strictly inside it fail to tile
  // it. Anything sitting strictly inside an elementary extent is dropped.
  std::vector<char> elementary(m, 0);
  for (int j = 0; j < m; ++j) {
    std::vector<Seg> inside;
    for (int k = 0; k < m; ++k)
      if (strictly_inside(nodes[k].seg, nodes[j].seg))
        inside.push_back(nodes[k].seg);
    elementary[j] = !segs_cover(inside, nodes[j].seg);
  }
  std::vector<int> kept;
  for (int i = 0; i < m; ++i) {
    bool drop = false;
    for (int j = 0; j < m && !drop; ++j)
      if (elementary[j] && strictly_inside(nodes[i].seg, nodes[j].seg))
        drop = true;
    if (!drop) kept.push_back(i);
  }
  return kept;
}

TreeInstance::TreeInstance(GroupedUniverse u, std::vector<int> par)
    : universe(std::move(u)), parent(std::move(par)) {
  if (static_cast<int>(parent.size()) != universe.n)
    throw std::invalid_argument("tree cover: one parent entry per node");
  children.assign(universe.n, {});
  for (int v = 0; v < universe.n; ++v) {
    if (universe.group_of[v] < 1)
      throw std::invalid_argument("tree cover: every node must be grouped");
    int p = parent[v];
    if (p < -1 || p >= universe.n || p == v)
      throw std::invalid_argument("tree cover: parent out of range");
    if (p >= 0) {
      if (universe.group_of[v] <= universe.group_of[p])
        throw std::invalid_argument(
            "tree cover: child group must exceed parent group");
      children[p].push_back(v);
    }
  }
}

std::vector<int> TreeInstance::leaves() const {
  std::vector<int> out;
  for (int v = 0; v < universe.n; ++v)
    if (children[v].empty()) out.push_back(v);
  return out;
}

bool TreeInstance::covers(const std::vector<int>& chosen) const {
  std::vector<char> in(universe.n, 0);
  for (int v : chosen) in.at(v) = 1;
  for (int v = 0; v < universe.n; ++v) {
    if (!children[v].empty()) continue;
    bool hit = false;
    for (int w = v; w != -1; w = parent[w])
      if (in[w]) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

TreeFromIntervals build_tree(const LaminarFamily& fam, int group_count) {
  std::vector<int> kept = tree_filter(fam);
  int m = static_cast<int>(kept.size());
  std::map<std::pair<std::pair<Rat, Rat>, int>, int> seen;
  for (int i = 0; i < m; ++i) {
    const LamNode& nd = fam.nodes[kept[i]];
    if (nd.group < 1 || nd.group > group_count)
      throw std::invalid_argument("build_tree: node group out of range");
    auto key = std::make_pair(std::make_pair(nd.seg.lo, nd.seg.hi), nd.group);
    if (!seen.emplace(key, i).second)
      throw std::logic_error("build_tree: duplicate extent within a group");
  }

  // Everything above a node is totally ordered: by strict containment, and
  // among equal extents by descending group. The parent is the closest one.
  std::vector<int> parent(m, -1);
  for (int i = 0; i < m; ++i) {
    const LamNode& a = fam.nodes[kept[i]];
    int best = -1;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const LamNode& b = fam.nodes[kept[j]];
      bool above = (b.seg.contains(a.seg) && !(a.seg == b.seg)) ||
                   (a.seg == b.seg && b.group < a.group);
      if (!above) continue;
      if (best == -1) {
        best = j;
        continue;
      }
      const LamNode& c = fam.nodes[kept[best]];
      Rat lb = b.seg.length(), lc = c.seg.length();
      if (lb < lc || (lb == lc && b.group > c.group)) best = j;
    }
    parent[i] = best;
  }

  std::vector<std::vector<int>> groups(group_count);
  for (int i = 0; i < m; ++i)
    groups[fam.nodes[kept[i]].group - 1].push_back(i);
  TreeFromIntervals out{TreeInstance(GroupedUniverse(m, std::move(groups)),
                                     std::move(parent)),
                        std::move(kept)};
  return out;
}

TreeCosts tree_costs(const TreeInstance& t) {
  int m = t.universe.n;
  TreeCosts costs;
  costs.c1.resize(m);
  costs.c2.resize(m);
  std::vector<int> order(m);
  for (int v = 0; v < m; ++v) order[v] = v;
  // Children carry strictly larger groups, so descending group order visits
  // them before their parents.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return t.universe.group_of[a] > t.universe.group_of[b];
  });
  for (int v : order) {
    costs.c1[v] = pow2(-t.universe.group_of[v]);
    if (t.is_leaf(v)) {
      costs.c2[v] = costs.c1[v];
    } else {
      Rat sum = 0;
      for (int ch : t.children[v]) sum += costs.c2[ch];
      costs.c2[v] = std::min(costs.c1[v], sum);
    }
  }
  return costs;
}

TreeThresholds tree_thresholds(const TreeInstance& t) {
  int T = t.universe.T;
  TreeThresholds th;
  th.theta = T >= 1 ? Rat(1) / T : Rat(1);
  if (T < 2) return th;
  int big = floor_log2(static_cast<std::uint64_t>(T));
  std::uint64_t x = static_cast<std::uint64_t>(t.universe.n);
  for (int rounds = 0; rounds < 3; ++rounds)
    x = x >= 2 ? static_cast<std::uint64_t>(floor_log2(x)) : 0;
  th.t0 = std::max(0, std::min(big - 1, static_cast<int>(x)));
  th.t1 = big;
  while (th.t1 - th.t0 > (1 << (th.t0 + 1))) ++th.t0;
  return th;
}

namespace {

struct TreeEnum {
  const TreeInstance& t;
  const TreeCosts& costs;
  const TreeThresholds th;
  const int c0;
  const Rat charge_cap;
  std::set<std::vector<int>> outs;

  // counts[i] tracks |D ∩ S_i| for the enumerated groups.
  std::vector<long long> counts;

  void rec(std::vector<int> frontier, std::vector<int>& chosen, Rat charge) {
    if (charge > charge_cap) return;
    for (int i = 1; i <= th.t0; ++i)
      if (counts[i] > static_cast<long long>(2 * c0) * (1LL << i)) return;

    std::size_t pick = frontier.size();
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (t.universe.group_of[frontier[i]] > th.t0) continue;
      if (pick == frontier.size() ||
          t.universe.group_of[frontier[i]] <
              t.universe.group_of[frontier[pick]] ||
          (t.universe.group_of[frontier[i]] ==
               t.universe.group_of[frontier[pick]] &&
           frontier[i] < frontier[pick]))
        pick = i;
    }
    if (pick == frontier.size()) {
      std::vector<int> d = chosen;
      std::sort(d.begin(), d.end());
      outs.insert(std::move(d));
      return;
    }

    int u = frontier[pick];
    frontier.erase(frontier.begin() + pick);
    if (!t.is_leaf(u)) {
      std::vector<int> wider = frontier;
      Rat delta = -costs.c2[u];
      for (int ch : t.children[u]) {
        wider.push_back(ch);
        delta += costs.c2[ch];
      }
      rec(std::move(wider), chosen, charge + delta);
    } else if (costs.c2[u] <= th.theta) {
      throw std::logic_error(
          "tree cover: an enumerated-range leaf fell below the charge floor");
    }
    if (costs.c2[u] > th.theta) {
      chosen.push_back(u);
      ++counts[t.universe.group_of[u]];
      rec(std::move(frontier), chosen, charge);
      --counts[t.universe.group_of[u]];
      chosen.pop_back();
    }
  }
};

}  // namespace

std::vector<std::vector<int>> enumerate_tree(const TreeInstance& t, int c0) {
  if (c0 < 1) throw std::invalid_argument("tree cover: c0 must be >= 1");
  TreeCosts costs = tree_costs(t);
  TreeThresholds th = tree_thresholds(t);
  TreeEnum en{t, costs, th, c0, Rat(2 * c0) * t.universe.T, {}, {}};
  en.counts.assign(th.t0 + 1, 0);
  std::vector<int> roots;
  Rat charge = 0;
  for (int v = 0; v < t.universe.n; ++v)
    if (t.parent[v] == -1) {
      roots.push_back(v);
      charge += costs.c2[v];
    }
  std::vector<int> chosen;
  en.rec(std::move(roots), chosen, charge);
  return {en.outs.begin(), en.outs.end()};
}

namespace {

// The ancestors-or-self of every uncovered deep leaf, shallow-to-deep, cut
// to the nodes the relaxation may still pick.
struct CoverRows {
  std::vector<std::vector<int>> chains;
};

Rat half() { return Rat(1) / 2; }

}  // namespace

std::optional<std::vector<int>> round_tree(const TreeInstance& t,
                                           const std::vector<int>& partial,
                                           int c0) {
  if (c0 < 1) throw std::invalid_argument("tree cover: c0 must be >= 1");
  const GroupedUniverse& u = t.universe;
  const TreeThresholds th = tree_thresholds(t);
  {
    std::vector<long long> cnt(th.t0 + 1, 0);
    for (int v : partial) {
      if (v < 0 || v >= u.n || u.group_of[v] > th.t0)
        throw std::invalid_argument(
            "round_tree: partial must pick nodes from the enumerated groups");
      if (++cnt[u.group_of[v]] > static_cast<long long>(2 * c0) *
                                     (1LL << u.group_of[v]))
        throw std::invalid_argument("round_tree: partial exceeds its caps");
    }
  }

  std::vector<char> in_partial(u.n, 0);
  for (int v : partial) in_partial[v] = 1;
  std::vector<char> under(u.n, 0);
  for (int v = 0; v < u.n; ++v)
    for (int w = v; w != -1; w = t.parent[w])
      if (in_partial[w]) {
        under[v] = 1;
        break;
      }

  // Leaves in the enumerated groups can only ever be covered by the
  // partial itself; bail out early when one is missed.
  std::vector<int> deep_leaves;
  for (int v : t.leaves()) {
    if (under[v]) continue;
    if (u.group_of[v] <= th.t0) return std::nullopt;
    deep_leaves.push_back(v);
  }

  std::vector<char> in_v0(u.n, 0);
  for (int v = 0; v < u.n; ++v)
    if (u.group_of[v] > th.t0 && !under[v]) in_v0[v] = 1;

  std::vector<int> result = partial;
  if (deep_leaves.empty()) {
    std::sort(result.begin(), result.end());
    if (!t.covers(result))
      throw std::logic_error("round_tree: trivial extension fails to cover");
    return result;
  }

  CoverRows rows;
  for (int v : deep_leaves) {
    std::vector<int> chain;
    for (int w = v; w != -1 && in_v0[w]; w = t.parent[w]) chain.push_back(w);
    std::reverse(chain.begin(), chain.end());
    rows.chains.push_back(std::move(chain));
  }

  LinearProgram lp;
  std::vector<int> var_of(u.n, -1);
  for (int v = 0; v < u.n; ++v)
    if (in_v0[v]) var_of[v] = lp.add_var(Rat(0), Rat(1));
  for (const auto& chain : rows.chains) {
    LpRow row;
    for (int v : chain) row.coef.emplace_back(var_of[v], Rat(1));
    std::sort(row.coef.begin(), row.coef.end());
    row.rel = Rel::Eq;
    row.rhs = 1;
    row.tag = RowTag::Feasibility;
    lp.add_row(std::move(row));
  }
  for (int i = th.t0 + 1; i <= u.T; ++i) {
    LpRow row;
    for (int v : u.group(i))
      if (in_v0[v]) row.coef.emplace_back(var_of[v], Rat(1));
    if (row.coef.empty()) continue;
    row.rel = Rel::Le;
    row.rhs = Rat(2 * c0) * pow2(i);
    row.tag = RowTag::Budget;
    lp.add_row(std::move(row));
  }

  LpResult res = solve_feasible_vertex(lp);
  if (!res.feasible) return std::nullopt;
  const std::vector<Rat>& x = res.vertex.x;

  // Positive entries of a row all sit on the chain above its deepest
  // positive node, so equal-bottomed rows coincide and each distinct row
  // owns its bottom.
  std::set<std::vector<int>> supports;
  for (const auto& chain : rows.chains) {
    std::vector<int> sup;
    for (int v : chain)
      if (x[var_of[v]] > 0) sup.push_back(v);
    if (sup.empty())
      throw std::logic_error("round_tree: a coverage row lost all its mass");
    supports.insert(std::move(sup));
  }
  std::set<int> bottoms;
  for (const auto& sup : supports) bottoms.insert(sup.back());

  std::set<int> level1;
  for (int v = 0; v < u.n; ++v) {
    if (!in_v0[v] || u.group_of[v] <= th.t1) continue;
    const Rat& xv = x[var_of[v]];
    if (xv >= half() || (xv > 0 && !bottoms.count(v))) level1.insert(v);
  }

  std::set<std::vector<int>> mid_rows;
  for (const auto& sup : supports) {
    bool hit = false;
    for (int v : sup)
      if (level1.count(v)) {
        hit = true;
        break;
      }
    if (hit) continue;
    std::vector<int> mid;
    for (int v : sup)
      if (u.group_of[v] <= th.t1) mid.push_back(v);
    if (mid.empty())
      throw std::logic_error("round_tree: a leftover row has no middle mass");
    mid_rows.insert(std::move(mid));
  }

  std::set<int> level2;
  if (!mid_rows.empty()) {
    std::set<int> v2set;
    for (const auto& row : mid_rows) v2set.insert(row.begin(), row.end());
    LinearProgram lp2;
    std::vector<int> var2(u.n, -1);
    for (int v : v2set) var2[v] = lp2.add_var(Rat(0), Rat(1));
    for (const auto& mid : mid_rows) {
      LpRow row;
      for (int v : mid) row.coef.emplace_back(var2[v], Rat(1));
      std::sort(row.coef.begin(), row.coef.end());
      row.rel = Rel::Ge;
      row.rhs = 1;
      row.tag = RowTag::Feasibility;
      lp2.add_row(std::move(row));
    }
    for (int i = th.t0 + 1; i <= th.t1; ++i) {
      LpRow row;
      for (int v : u.group(i))
        if (var2[v] >= 0) row.coef.emplace_back(var2[v], Rat(1));
      if (row.coef.empty()) continue;
      row.rel = Rel::Le;
      row.rhs = Rat(4 * c0) * pow2(i);
      row.tag = RowTag::Budget;
      lp2.add_row(std::move(row));
    }
    LpResult res2 = solve_feasible_vertex(lp2);
    if (!res2.feasible)
      throw std::logic_error(
          "round_tree: the doubled relaxation must stay feasible");
    const std::vector<Rat>& y = res2.vertex.x;

    std::set<int> bottoms2;
    std::set<std::vector<int>> sup2set;
    for (const auto& mid : mid_rows) {
      Rat sum = 0;
      std::vector<int> sup;
      for (int v : mid) {
        sum += y[var2[v]];
        if (y[var2[v]] > 0) sup.push_back(v);
      }
      if (sup.empty())
        throw std::logic_error("round_tree: a middle row lost all its mass");
      if (sum == 1) bottoms2.insert(sup.back());
      sup2set.insert(std::move(sup));
    }
    for (int v : v2set) {
      const Rat& yv = y[var2[v]];
      if (yv == 1 || (yv > 0 && !bottoms2.count(v))) level2.insert(v);
    }
    for (const auto& mid : mid_rows) {
      bool hit = false;
      for (int v : mid)
        if (level2.count(v)) {
          hit = true;
          break;
        }
      if (!hit)
        throw std::logic_error("round_tree: a middle row was left uncovered");
    }
  }

  result.insert(result.end(), level1.begin(), level1.end());
  result.insert(result.end(), level2.begin(), level2.end());
  std::sort(result.begin(), result.end());

  if (!t.covers(result))
    throw std::logic_error("round_tree: rounded set fails to cover");
  Solution sol;
  sol.chosen = result;
  std::vector<int> loads = group_loads(u, sol);
  Rat cap = Rat(4 * c0 + 1);
  for (int i = 1; i <= u.T; ++i)
    if (Rat(loads[i - 1]) > cap * pow2(i))
      throw std::logic_error(
          "round_tree: rounded group exceeds its certified budget");
  return result;
}

SolveReport solve_treecov(const TreeInstance& t, int c0) {
  if (c0 < 1) throw std::invalid_argument("tree cover: c0 must be >= 1");
  if (t.universe.n == 0)
    return SolveReport::solved(t.universe, Solution{});

  std::vector<std::vector<int>> partials = enumerate_tree(t, c0);
  std::vector<std::optional<std::vector<int>>> out(partials.size());
  std::optional<std::int64_t> win = par_first_success(
      static_cast<std::int64_t>(partials.size()), [&](std::int64_t i) {
        out[i] = round_tree(t, partials[i], c0);
        return out[i].has_value();
      });
  if (!win)
    return SolveReport::no_valid_solution(
        "every enumerated choice for the leading groups leaves the covering "
        "relaxation infeasible");

  Solution sol;
  sol.chosen = std::move(*out[*win]);
  sol.normalize();
  SolveReport rep = SolveReport::solved(t.universe, std::move(sol));
  if (rep.validity > Rat(4 * c0 + 1))
    throw std::logic_error(
        "tree cover: solution exceeded its validity guarantee");
  return rep;
}

SolveReport solve_intervalcover(const IntervalInstance& inst, int c0) {
  if (c0 < 1)
    throw std::invalid_argument("interval cover: c0 must be >= 1");
  std::vector<Seg> usable;
  for (int e = 0; e < inst.universe.n; ++e)
    if (inst.universe.group_of[e] > 0 && !inst.segs[e].empty())
      usable.push_back(inst.segs[e]);
  if (!segs_cover(usable, inst.target)) {
    if (segs_cover(inst.segs, inst.target))
      return SolveReport::no_valid_solution(
          "the target is only coverable with ungrouped elements");
    return SolveReport::infeasible_input(
        "the segments do not cover the target");
  }

  LaminarFamily fam = to_laminar(to_disjoint(inst));
  TreeFromIntervals tfi = build_tree(fam, inst.universe.T);
  SolveReport tree_rep = solve_treecov(tfi.tree, 8 * c0);
  if (tree_rep.certificate != Certificate::Solved)
    return SolveReport::no_valid_solution(
        "the containment-tree stage certifies that no cover fits the caps");

  std::vector<int> lam_ids;
  for (int v : tree_rep.solution.chosen) lam_ids.push_back(tfi.node_of[v]);
  std::set<int> elements;
  for (int p : replay_pieces(fam, lam_ids))
    elements.insert(fam.pieces[p].origin);
  Solution sol;
  sol.chosen.assign(elements.begin(), elements.end());

  if (!inst.covers(sol.chosen))
    throw std::logic_error(
        "interval cover: replayed solution fails to cover the target");
  SolveReport rep = SolveReport::solved(inst.universe, std::move(sol));
  if (rep.validity > Rat(3 * (32 * c0 + 1)))
    throw std::logic_error(
        "interval cover: solution exceeded its validity guarantee");
  return rep;
}

LogBgtSolver interval_logbgt_solver(std::vector<Seg> segs, Seg target) {
  return [segs = std::move(segs),
          target](const GroupedUniverse& u,
                  const std::vector<char>& excluded) -> SolveReport {
    if (static_cast<int>(segs.size()) != u.n)
      throw std::invalid_argument("interval solver: segment count mismatch");
    for (int e = 0; e < u.n; ++e)
      if (excluded[e] && u.group_of[e] != 0)
        throw std::invalid_argument("interval solver: excluded element grouped");
    IntervalInstance inst(u, segs, target);
    return solve_intervalcover(inst, 1);
  };
}

}  // namespace mn
