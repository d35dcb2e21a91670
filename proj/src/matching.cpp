#include "mnorm/matching.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mnorm/lp.hpp"
#include "mnorm/log.hpp"

namespace mn {

std::vector<Rat> budget_ladder(int T) {
  std::vector<Rat> d(static_cast<std::size_t>(std::max(0, T)));
  for (int g = 1; g <= T; ++g) d[static_cast<std::size_t>(g - 1)] = pow2(g);
  return d;
}

MatchingInstance::MatchingInstance(GroupedUniverse u, std::vector<MatchEdge> e,
                                   int m_in, std::vector<Rat> d_in,
                                   std::vector<char> forbidden_in)
    : universe(std::move(u)),
      edges(std::move(e)),
      m(m_in),
      d(std::move(d_in)),
      forbidden(std::move(forbidden_in)) {
  if (static_cast<int>(edges.size()) != universe.n)
    throw std::invalid_argument(
        "matching instance: one universe element per edge");
  if (m < 1) throw std::invalid_argument("matching instance: m must be >= 1");
  for (const MatchEdge& me : edges)
    if (me.left < 0 || me.left >= m || me.right < 0 || me.right >= m)
      throw std::invalid_argument(
          "matching instance: edge endpoint out of range");
  if (d.empty()) d = budget_ladder(universe.T);
  if (static_cast<int>(d.size()) != universe.T)
    throw std::invalid_argument("matching instance: one budget per group");
  for (const Rat& di : d)
    if (di < 0)
      throw std::invalid_argument("matching instance: budgets are nonnegative");
  if (!forbidden.empty() &&
      static_cast<int>(forbidden.size()) != universe.n)
    throw std::invalid_argument(
        "matching instance: forbidden mask must cover every edge");
}

std::pair<std::vector<int>, std::vector<int>> MatchingInstance::degrees(
    const std::vector<int>& chosen) const {
  std::vector<int> dl(static_cast<std::size_t>(m), 0);
  std::vector<int> dr(static_cast<std::size_t>(m), 0);
  for (int e : chosen) {
    dl[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].left)]++;
    dr[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].right)]++;
  }
  return {dl, dr};
}

bool MatchingInstance::is_perfect_matching(
    const std::vector<int>& chosen) const {
  const auto [dl, dr] = degrees(chosen);
  for (int v = 0; v < m; ++v)
    if (dl[static_cast<std::size_t>(v)] != 1 ||
        dr[static_cast<std::size_t>(v)] != 1)
      return false;
  return true;
}

namespace {

// Working state of one rounding run. Rows shrink as variables are fixed and
// as cycle/path events delete satisfied degree constraints; the fractional
// point is re-verified against the shrunken system after every mutation.
struct Rounder {
  const MatchingInstance& inst;
  const Rat eps;
  int n;
  int m;
  int T;

  std::vector<char> alive;       // variable still in the system
  std::vector<Rat> x;            // current fractional value (alive only)
  std::vector<int> chosen;       // edges fixed to 1
  std::vector<std::vector<char>> deg_alive;  // [side][v], side 0 = left
  std::vector<std::vector<int>> deg_rhs;     // 1, or 0 once an edge chose v
  std::vector<char> bud_alive;   // [g], 1-based; index 0 unused
  std::vector<Rat> bud_rhs;
  std::vector<std::vector<char>> deg2_ok;  // path endpoints allowed degree 2
  int cycle_events = 0;
  int path_events = 0;
  int drop_events = 0;

  Rounder(const MatchingInstance& inst_, const Rat& eps_,
          const std::vector<int>& prefix,
          const std::vector<char>& extra_forbid)
      : inst(inst_), eps(eps_), n(inst_.universe.n), m(inst_.m),
        T(inst_.universe.T) {
    alive.assign(static_cast<std::size_t>(n), 0);
    x.assign(static_cast<std::size_t>(n), Rat(0));
    deg_alive.assign(2, std::vector<char>(static_cast<std::size_t>(m), 1));
    deg_rhs.assign(2, std::vector<int>(static_cast<std::size_t>(m), 1));
    deg2_ok.assign(2, std::vector<char>(static_cast<std::size_t>(m), 0));
    bud_alive.assign(static_cast<std::size_t>(T) + 1, 0);
    bud_rhs.assign(static_cast<std::size_t>(T) + 1, Rat(0));
    for (int g = 1; g <= T; ++g) {
      bud_alive[static_cast<std::size_t>(g)] = 1;
      bud_rhs[static_cast<std::size_t>(g)] =
          inst.d[static_cast<std::size_t>(g - 1)];
    }
    std::vector<char> in_prefix(static_cast<std::size_t>(n), 0);
    for (int e : prefix) in_prefix[static_cast<std::size_t>(e)] = 1;
    for (int e = 0; e < n; ++e) {
      if (in_prefix[static_cast<std::size_t>(e)]) continue;
      if (!inst.usable(e)) continue;
      if (!extra_forbid.empty() && extra_forbid[static_cast<std::size_t>(e)])
        continue;
      const int g = inst.universe.group_of[static_cast<std::size_t>(e)];
      if (g != 0 && bud_rhs[static_cast<std::size_t>(g)] == 0)
        continue;  // a zero budget shuts the whole group off
      alive[static_cast<std::size_t>(e)] = 1;
    }
    for (int e : prefix) fix_one(e);
  }

  void fix_one(int e) {
    chosen.push_back(e);
    const MatchEdge& me = inst.edges[static_cast<std::size_t>(e)];
    for (int side = 0; side < 2; ++side) {
      const int v = side == 0 ? me.left : me.right;
      int& rhs = deg_rhs[static_cast<std::size_t>(side)]
                        [static_cast<std::size_t>(v)];
      if (rhs <= 0)
        throw std::logic_error("matching rounder: vertex chosen twice");
      --rhs;
    }
    const int g = inst.universe.group_of[static_cast<std::size_t>(e)];
    if (g != 0) {
      Rat& rhs = bud_rhs[static_cast<std::size_t>(g)];
      rhs -= 1;
      if (rhs < 0)
        throw std::logic_error("matching rounder: budget driven negative");
    }
  }

  std::vector<int> alive_at(int side, int v) const {
    std::vector<int> out;
    for (int e = 0; e < n; ++e) {
      if (!alive[static_cast<std::size_t>(e)]) continue;
      const MatchEdge& me = inst.edges[static_cast<std::size_t>(e)];
      if ((side == 0 ? me.left : me.right) == v) out.push_back(e);
    }
    return out;
  }

  // Exact feasibility of the current point against the shrunken system.
  void verify_state(const char* where) const {
    for (int e = 0; e < n; ++e) {
      if (!alive[static_cast<std::size_t>(e)]) continue;
      const Rat& xe = x[static_cast<std::size_t>(e)];
      if (xe < 0 || xe > 1)
        throw std::logic_error(std::string("matching rounder: value out of "
                                           "bounds after ") + where);
    }
    for (int side = 0; side < 2; ++side)
      for (int v = 0; v < m; ++v) {
        if (!deg_alive[static_cast<std::size_t>(side)]
                      [static_cast<std::size_t>(v)])
          continue;
        Rat sum = 0;
        for (int e : alive_at(side, v)) sum += x[static_cast<std::size_t>(e)];
        if (sum != Rat(deg_rhs[static_cast<std::size_t>(side)]
                              [static_cast<std::size_t>(v)]))
          throw std::logic_error(
              std::string("matching rounder: degree row broken after ") +
              where);
      }
    for (int g = 1; g <= T; ++g) {
      if (!bud_alive[static_cast<std::size_t>(g)]) continue;
      Rat sum = 0;
      for (int e : inst.universe.group(g))
        if (alive[static_cast<std::size_t>(e)])
          sum += x[static_cast<std::size_t>(e)];
      if (sum > bud_rhs[static_cast<std::size_t>(g)])
        throw std::logic_error(
            std::string("matching rounder: budget row broken after ") + where);
    }
  }

  // Builds the current LP and finds a vertex. Returns false on infeasible.
  bool solve_vertex() {
    LinearProgram lp;
    std::vector<int> var_of(static_cast<std::size_t>(n), -1);
    std::vector<int> edge_of;
    for (int e = 0; e < n; ++e)
      if (alive[static_cast<std::size_t>(e)]) {
        var_of[static_cast<std::size_t>(e)] = lp.add_var(Rat(0), Rat(1));
        edge_of.push_back(e);
      }
    for (int side = 0; side < 2; ++side)
      for (int v = 0; v < m; ++v) {
        if (!deg_alive[static_cast<std::size_t>(side)]
                      [static_cast<std::size_t>(v)])
          continue;
        LpRow row;
        row.rel = Rel::Eq;
        row.rhs = Rat(deg_rhs[static_cast<std::size_t>(side)]
                             [static_cast<std::size_t>(v)]);
        row.tag = RowTag::Degree;
        for (int e : alive_at(side, v))
          row.coef.emplace_back(var_of[static_cast<std::size_t>(e)], Rat(1));
        if (row.coef.empty())
          throw std::logic_error(
              "matching rounder: empty degree row survived the sweep");
        lp.add_row(std::move(row));
      }
    for (int g = 1; g <= T; ++g) {
      if (!bud_alive[static_cast<std::size_t>(g)]) continue;
      LpRow row;
      row.rel = Rel::Le;
      row.rhs = bud_rhs[static_cast<std::size_t>(g)];
      row.tag = RowTag::Budget;
      for (int e : inst.universe.group(g))
        if (alive[static_cast<std::size_t>(e)])
          row.coef.emplace_back(var_of[static_cast<std::size_t>(e)], Rat(1));
      if (row.coef.empty())
        throw std::logic_error(
            "matching rounder: empty budget row survived the sweep");
      lp.add_row(std::move(row));
    }
    const LpResult res = solve_feasible_vertex(lp);
    if (!res.feasible) return false;
    for (std::size_t j = 0; j < edge_of.size(); ++j)
      x[static_cast<std::size_t>(edge_of[j])] = res.vertex.x[j];
    return true;
  }

  // Fixes every integral variable and retires emptied rows.
  // Returns the number of variables fixed.
  int fix_integrals() {
    int fixed = 0;
    for (int e = 0; e < n; ++e) {
      if (!alive[static_cast<std::size_t>(e)]) continue;
      const Rat& xe = x[static_cast<std::size_t>(e)];
      if (xe == 0) {
        alive[static_cast<std::size_t>(e)] = 0;
        ++fixed;
      } else if (xe == 1) {
        alive[static_cast<std::size_t>(e)] = 0;
        fix_one(e);
        ++fixed;
      }
    }
    sweep_empty_rows();
    return fixed;
  }

  void sweep_empty_rows() {
    for (int side = 0; side < 2; ++side)
      for (int v = 0; v < m; ++v) {
        if (!deg_alive[static_cast<std::size_t>(side)]
                      [static_cast<std::size_t>(v)])
          continue;
        if (!alive_at(side, v).empty()) continue;
        if (deg_rhs[static_cast<std::size_t>(side)]
                   [static_cast<std::size_t>(v)] != 0)
          throw std::logic_error(
              "matching rounder: an unmatched vertex ran out of edges");
        deg_alive[static_cast<std::size_t>(side)]
                 [static_cast<std::size_t>(v)] = 0;
      }
    for (int g = 1; g <= T; ++g) {
      if (!bud_alive[static_cast<std::size_t>(g)]) continue;
      bool any = false;
      for (int e : inst.universe.group(g))
        if (alive[static_cast<std::size_t>(e)]) {
          any = true;
          break;
        }
      if (!any) {
        if (bud_rhs[static_cast<std::size_t>(g)] < 0)
          throw std::logic_error("matching rounder: negative empty budget");
        bud_alive[static_cast<std::size_t>(g)] = 0;
      }
    }
  }

  bool is_bad(int side, int v) const {
    return deg_alive[static_cast<std::size_t>(side)]
                    [static_cast<std::size_t>(v)] &&
           alive_at(side, v).size() == 2;
  }

  // Retires a resolved edge: removes it from the system and charges its
  // fractional value against its budget row, keeping the remaining point
  // feasible and the chosen-count at most twice the budget decrease.
  void retire(int e, bool take) {
    if (take) chosen.push_back(e);
    const int g = inst.universe.group_of[static_cast<std::size_t>(e)];
    if (g != 0 && bud_alive[static_cast<std::size_t>(g)])
      bud_rhs[static_cast<std::size_t>(g)] -= x[static_cast<std::size_t>(e)];
    alive[static_cast<std::size_t>(e)] = 0;
  }

  // One structural event. Precondition: every alive variable is fractional
  // and at least one budget row is alive. Rounds an alternating cycle, or a
  // long alternating path, or drops one budget row with small slack.
  void structural_event() {
    // Subgraph of edges whose endpoints each carry exactly two alive edges.
    std::vector<char> sub(static_cast<std::size_t>(n), 0);
    for (int e = 0; e < n; ++e) {
      if (!alive[static_cast<std::size_t>(e)]) continue;
      const MatchEdge& me = inst.edges[static_cast<std::size_t>(e)];
      if (is_bad(0, me.left) && is_bad(1, me.right))
        sub[static_cast<std::size_t>(e)] = 1;
    }
    // Sub-degree of a node: its alive edges that lie in the subgraph.
    const auto sub_at = [&](int side, int v) {
      std::vector<int> out;
      for (int e : alive_at(side, v))
        if (sub[static_cast<std::size_t>(e)]) out.push_back(e);
      return out;
    };

    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::optional<std::vector<int>> best_path;  // edge walk, node count + 1
    for (int e0 = 0; e0 < n; ++e0) {
      if (!sub[static_cast<std::size_t>(e0)] ||
          seen[static_cast<std::size_t>(e0)])
        continue;
      // Walk the component containing e0. Follow from its left endpoint;
      // stop when the walk closes (cycle) or both directions dead-end.
      const auto walk_from = [&](int side, int v, int via) {
        std::vector<int> path;
        int cs = side, cv = v, ce = via;
        while (true) {
          path.push_back(ce);
          const MatchEdge& me = inst.edges[static_cast<std::size_t>(ce)];
          cs = 1 - cs;
          cv = cs == 0 ? me.left : me.right;
          const std::vector<int> nxt = sub_at(cs, cv);
          int forward = -1;
          for (int cand : nxt)
            if (cand != ce) forward = cand;
          if (forward < 0 || forward == path.front()) {
            if (forward == path.front() && path.size() > 1)
              path.push_back(-1);  // marks closure back into the start edge
            return path;
          }
          ce = forward;
        }
      };
      const MatchEdge& m0 = inst.edges[static_cast<std::size_t>(e0)];
      std::vector<int> right_walk = walk_from(0, m0.left, e0);
      bool cycle = !right_walk.empty() && right_walk.back() == -1;
      std::vector<int> edges_walk;
      if (cycle) {
        right_walk.pop_back();
        edges_walk = std::move(right_walk);
      } else {
        // Extend to the left of e0 as well, then re-walk from that end so
        // the edge order follows the path.
        std::vector<int> left_walk = walk_from(1, m0.right, e0);
        // left_walk starts with e0 and runs leftwards.
        std::reverse(left_walk.begin(), left_walk.end());
        left_walk.pop_back();  // drop e0, right_walk starts with it
        edges_walk = std::move(left_walk);
        edges_walk.insert(edges_walk.end(), right_walk.begin(),
                          right_walk.end());
      }
      for (int e : edges_walk) seen[static_cast<std::size_t>(e)] = 1;
      if (cycle) {
        round_cycle(edges_walk);
        return;
      }
      if (!best_path &&
          Rat(static_cast<long>(edges_walk.size())) >= Rat(2) / eps + 5)
        best_path = edges_walk;
    }
    if (best_path) {
      round_path(*best_path);
      return;
    }
    drop_budget_row();
  }

  // The node sequence n_0..n_len of an edge walk, as (side, vertex) pairs.
  std::vector<std::pair<int, int>> nodes_of_walk(
      const std::vector<int>& walk, bool cycle) const {
    const MatchEdge& first = inst.edges[static_cast<std::size_t>(walk[0])];
    std::vector<std::pair<int, int>> nodes;
    if (walk.size() == 1) {
      nodes.emplace_back(0, first.left);
      nodes.emplace_back(1, first.right);
      return nodes;
    }
    // Orient the first edge so that its second node touches the second edge.
    // For parallel edges (a two-cycle) either orientation lists the same
    // node set and the same edge positions, so the tie is harmless.
    const MatchEdge& second = inst.edges[static_cast<std::size_t>(walk[1])];
    int side;
    if (second.left == first.left)
      side = 1;
    else if (second.right == first.right)
      side = 0;
    else
      throw std::logic_error("matching rounder: walk edges do not chain");
    nodes.emplace_back(side, side == 0 ? first.left : first.right);
    int cs = side;
    for (int e : walk) {
      const MatchEdge& me = inst.edges[static_cast<std::size_t>(e)];
      if ((cs == 0 ? me.left : me.right) != nodes.back().second ||
          cs != nodes.back().first)
        throw std::logic_error("matching rounder: walk edges do not chain");
      cs = 1 - cs;
      nodes.emplace_back(cs, cs == 0 ? me.left : me.right);
    }
    if (cycle) {
      if (nodes.front() != nodes.back())
        throw std::logic_error("matching rounder: cycle walk did not close");
      nodes.pop_back();
    }
    return nodes;
  }

  // Checks the strict alternation x, 1-x along a walk and returns the
  // 0-based positions holding the value to round up (>= 1/2; the class of
  // position 0 wins a tie).
  bool big_at_even(const std::vector<int>& walk) const {
    const Rat a = x[static_cast<std::size_t>(walk[0])];
    for (std::size_t j = 0; j < walk.size(); ++j) {
      const Rat expect = j % 2 == 0 ? a : Rat(1) - a;
      if (x[static_cast<std::size_t>(walk[j])] != expect)
        throw std::logic_error(
            "matching rounder: walk values do not alternate");
    }
    return a >= Rat(1, 2);
  }

  void round_cycle(const std::vector<int>& walk) {
    if (walk.size() % 2 != 0)
      throw std::logic_error("matching rounder: odd cycle in bipartite graph");
    const bool even_up = big_at_even(walk);
    const std::vector<std::pair<int, int>> nodes = nodes_of_walk(walk, true);
    ++cycle_events;
    for (std::size_t j = 0; j < walk.size(); ++j)
      retire(walk[j], (j % 2 == 0) == even_up);
    for (const auto& [side, v] : nodes)
      deg_alive[static_cast<std::size_t>(side)][static_cast<std::size_t>(v)] =
          0;
    sweep_empty_rows();
    verify_state("cycle rounding");
  }

  void round_path(const std::vector<int>& walk) {
    const bool even_up = big_at_even(walk);
    const std::vector<std::pair<int, int>> nodes = nodes_of_walk(walk, false);
    const int len = static_cast<int>(walk.size());
    const int f = even_up ? 0 : 1;            // first rounded-up edge
    const int k = (len - 1 - f) / 2 + 1;      // count of rounded-up edges
    if (Rat(k) < Rat(1) / eps + 1)
      throw std::logic_error(
          "matching rounder: long path has too few heavy edges");
    ++path_events;
    // Round edges f, f+2, ..., f+2(k-1) up and the edges between them down;
    // the 2k touched nodes leave the system, and only the two ends of the
    // touched stretch may later pick up a second edge.
    for (int j = f; j <= f + 2 * (k - 1); ++j)
      retire(walk[static_cast<std::size_t>(j)], (j - f) % 2 == 0);
    for (int t = f; t <= f + 2 * k - 1; ++t) {
      const auto& [side, v] = nodes[static_cast<std::size_t>(t)];
      deg_alive[static_cast<std::size_t>(side)][static_cast<std::size_t>(v)] =
          0;
    }
    const auto& [s0, v0] = nodes[static_cast<std::size_t>(f)];
    const auto& [s1, v1] = nodes[static_cast<std::size_t>(f + 2 * k - 1)];
    deg2_ok[static_cast<std::size_t>(s0)][static_cast<std::size_t>(v0)] = 1;
    deg2_ok[static_cast<std::size_t>(s1)][static_cast<std::size_t>(v1)] = 1;
    sweep_empty_rows();
    verify_state("path rounding");
  }

  void drop_budget_row() {
    const Rat limit = Rat(9) / eps;
    for (int g = 1; g <= T; ++g) {
      if (!bud_alive[static_cast<std::size_t>(g)]) continue;
      Rat slack = 0;
      for (int e : inst.universe.group(g))
        if (alive[static_cast<std::size_t>(e)])
          slack += Rat(1) - 2 * x[static_cast<std::size_t>(e)];
      if (slack <= limit) {
        bud_alive[static_cast<std::size_t>(g)] = 0;
        ++drop_events;
        verify_state("budget drop");
        return;
      }
    }
    throw std::logic_error(
        "matching rounder: no droppable budget row; the rounding bound "
        "argument would be falsified");
  }

  bool any_alive_var() const {
    for (int e = 0; e < n; ++e)
      if (alive[static_cast<std::size_t>(e)]) return true;
    return false;
  }

  bool any_alive_budget() const {
    for (int g = 1; g <= T; ++g)
      if (bud_alive[static_cast<std::size_t>(g)]) return true;
    return false;
  }

  std::optional<RelaxedMatching> run() {
    // A vertex with no edge left cannot be matched: input infeasibility,
    // reported the same way as a first-solve failure. Afterwards every
    // empty row the sweep meets is an internal error.
    for (int side = 0; side < 2; ++side)
      for (int v = 0; v < m; ++v)
        if (deg_rhs[static_cast<std::size_t>(side)]
                   [static_cast<std::size_t>(v)] > 0 &&
            alive_at(side, v).empty())
          return std::nullopt;
    sweep_empty_rows();
    bool first = true;
    const int iter_cap = 4 * n + 4 * T + 8;
    for (int iter = 0; iter < iter_cap; ++iter) {
      if (!any_alive_var()) break;
      if (!solve_vertex()) {
        if (first) return std::nullopt;
        throw std::logic_error(
            "matching rounder: system became infeasible mid-rounding");
      }
      first = false;
      verify_state("vertex solve");
      if (fix_integrals() > 0) {
        verify_state("integral fixes");
        continue;
      }
      if (!any_alive_var()) break;
      if (!any_alive_budget())
        throw std::logic_error(
            "matching rounder: fractional vertex with only degree rows");
      structural_event();
    }
    if (any_alive_var())
      throw std::logic_error("matching rounder: rounding did not terminate");

    RelaxedMatching out;
    out.chosen = chosen;
    std::sort(out.chosen.begin(), out.chosen.end());
    finish_checks(out);
    return out;
  }

  void finish_checks(RelaxedMatching& out) {
    const auto [dl, dr] = inst.degrees(out.chosen);
    for (int side = 0; side < 2; ++side)
      for (int v = 0; v < m; ++v) {
        const int deg = (side == 0 ? dl : dr)[static_cast<std::size_t>(v)];
        if (deg < 1 || deg > 2)
          throw std::logic_error(
              "matching rounder: a vertex ended with degree outside {1,2}");
        if (deg == 2) {
          if (!deg2_ok[static_cast<std::size_t>(side)]
                      [static_cast<std::size_t>(v)])
            throw std::logic_error(
                "matching rounder: degree 2 outside a path-rounding end");
          ++out.deg2_count;
        }
      }
    if (Rat(out.deg2_count) > 2 * eps * Rat(m))
      throw std::logic_error(
          "matching rounder: more than 2*eps*m degree-2 vertices");
    const std::vector<int> loads =
        group_loads(inst.universe, Solution{out.chosen});
    for (int g = 1; g <= T; ++g) {
      const Rat dg = inst.d[static_cast<std::size_t>(g - 1)];
      const Rat cnt = Rat(loads[static_cast<std::size_t>(g - 1)]);
      if (dg == 0 ? cnt != 0 : cnt > 2 * dg + Rat(9) / eps)
        throw std::logic_error(
            "matching rounder: group bound 2d + 9/eps violated");
    }
  }
};

std::optional<RelaxedMatching> round_with_prefix(
    const MatchingInstance& inst, const Rat& eps,
    const std::vector<int>& prefix, const std::vector<char>& extra_forbid) {
  Rounder r(inst, eps, prefix, extra_forbid);
  return r.run();
}

}  // namespace

std::optional<RelaxedMatching> iterative_round(const MatchingInstance& inst,
                                               const Rat& eps) {
  if (eps <= 0 || eps >= 1)
    throw std::invalid_argument("iterative_round: eps must lie in (0,1)");
  return round_with_prefix(inst, eps, {}, {});
}

int enumeration_depth(const Rat& eps, const Rat& delta) {
  if (eps <= 0 || eps >= 1 || delta <= 0 || delta >= 1)
    throw std::invalid_argument(
        "enumeration depth: eps and delta must lie in (0,1)");
  const Rat bound = Rat(9) / (delta * eps);
  int k = 0;
  while (pow2(k + 1) <= bound) ++k;
  return k;
}

std::optional<RelaxedMatching> solve_relaxed(const MatchingInstance& inst,
                                             const Rat& eps,
                                             const Rat& delta) {
  if (eps <= 0 || eps >= 1 || delta <= 0 || delta >= 1)
    throw std::invalid_argument(
        "solve_relaxed: eps and delta must lie in (0,1)");
  if (inst.d != budget_ladder(inst.universe.T))
    throw std::invalid_argument(
        "solve_relaxed: budgets must be the 2^i ladder");
  const int n = inst.universe.n;
  const int m = inst.m;
  const int T = inst.universe.T;
  const int k = std::min(enumeration_depth(eps, delta), T);

  std::vector<char> low(static_cast<std::size_t>(n), 0);
  for (int e = 0; e < n; ++e) {
    const int g = inst.universe.group_of[static_cast<std::size_t>(e)];
    low[static_cast<std::size_t>(e)] =
        inst.usable(e) && g >= 1 && g <= k ? 1 : 0;
  }

  // Branch and bound over partial matchings inside the low groups. Every
  // node is also tried as a leaf: the partial is fixed, the rest of the low
  // groups is shut off, and the high groups are rounded. A relaxation with
  // the low budgets reduced by the partial prunes hopeless subtrees, and
  // its vertex picks the next edge to branch on.
  std::vector<int> partial;
  std::vector<char> forbid(static_cast<std::size_t>(n), 0);
  std::vector<char> covered_l(static_cast<std::size_t>(m), 0);
  std::vector<char> covered_r(static_cast<std::size_t>(m), 0);
  std::vector<int> cnt(static_cast<std::size_t>(T) + 1, 0);
  long nodes = 0;

  const std::function<std::optional<RelaxedMatching>()> visit =
      [&]() -> std::optional<RelaxedMatching> {
    ++nodes;
    {  // Leaf attempt: everything low and undecided is shut off.
      std::vector<char> leaf_forbid = forbid;
      for (int e = 0; e < n; ++e)
        if (low[static_cast<std::size_t>(e)])
          leaf_forbid[static_cast<std::size_t>(e)] = 1;  // prefix skips these
      std::optional<RelaxedMatching> leaf =
          round_with_prefix(inst, eps, partial, leaf_forbid);
      if (leaf) return leaf;
    }
    // Relaxation at this node: partial fixed, forbidden edges gone, low
    // budgets shrunk by the partial. Infeasible means no descendant leaf
    // can succeed, because any such leaf plus its partial would satisfy it.
    LinearProgram lp;
    std::vector<int> var_of(static_cast<std::size_t>(n), -1);
    std::vector<int> edge_of;
    for (int e = 0; e < n; ++e) {
      if (!inst.usable(e) || forbid[static_cast<std::size_t>(e)]) continue;
      const MatchEdge& me = inst.edges[static_cast<std::size_t>(e)];
      if (covered_l[static_cast<std::size_t>(me.left)] ||
          covered_r[static_cast<std::size_t>(me.right)])
        continue;
      var_of[static_cast<std::size_t>(e)] = lp.add_var(Rat(0), Rat(1));
      edge_of.push_back(e);
    }
    for (int side = 0; side < 2; ++side)
      for (int v = 0; v < m; ++v) {
        if ((side == 0 ? covered_l : covered_r)[static_cast<std::size_t>(v)])
          continue;
        LpRow row;
        row.rel = Rel::Eq;
        row.rhs = 1;
        row.tag = RowTag::Degree;
        for (int e : edge_of) {
          const MatchEdge& me = inst.edges[static_cast<std::size_t>(e)];
          if ((side == 0 ? me.left : me.right) == v)
            row.coef.emplace_back(var_of[static_cast<std::size_t>(e)], Rat(1));
        }
        if (row.coef.empty()) return std::nullopt;  // vertex unmatched
        lp.add_row(std::move(row));
      }
    for (int g = 1; g <= T; ++g) {
      LpRow row;
      row.rel = Rel::Le;
      row.rhs = pow2(g) - Rat(cnt[static_cast<std::size_t>(g)]);
      row.tag = RowTag::Budget;
      for (int e : inst.universe.group(g))
        if (var_of[static_cast<std::size_t>(e)] >= 0)
          row.coef.emplace_back(var_of[static_cast<std::size_t>(e)], Rat(1));
      if (!row.coef.empty()) lp.add_row(std::move(row));
    }
    const LpResult relax = solve_feasible_vertex(lp);
    if (!relax.feasible) return std::nullopt;

    // Branch on the undecided low edge the relaxation leans on hardest.
    int pick = -1;
    Rat pick_x = -1;
    for (std::size_t j = 0; j < edge_of.size(); ++j) {
      const int e = edge_of[j];
      if (!low[static_cast<std::size_t>(e)]) continue;
      const int g = inst.universe.group_of[static_cast<std::size_t>(e)];
      if (Rat(cnt[static_cast<std::size_t>(g)]) >= pow2(g))
        continue;  // the partial already fills this group's budget
      if (relax.vertex.x[j] > pick_x) {
        pick = e;
        pick_x = relax.vertex.x[j];
      }
    }
    if (pick < 0) return std::nullopt;  // leaf already failed above

    const MatchEdge& me = inst.edges[static_cast<std::size_t>(pick)];
    const int g = inst.universe.group_of[static_cast<std::size_t>(pick)];
    partial.push_back(pick);
    covered_l[static_cast<std::size_t>(me.left)] = 1;
    covered_r[static_cast<std::size_t>(me.right)] = 1;
    ++cnt[static_cast<std::size_t>(g)];
    std::optional<RelaxedMatching> got = visit();
    --cnt[static_cast<std::size_t>(g)];
    covered_l[static_cast<std::size_t>(me.left)] = 0;
    covered_r[static_cast<std::size_t>(me.right)] = 0;
    partial.pop_back();
    if (got) return got;
    forbid[static_cast<std::size_t>(pick)] = 1;
    got = visit();
    forbid[static_cast<std::size_t>(pick)] = 0;
    return got;
  };

  std::optional<RelaxedMatching> res = visit();
  logf("solve_relaxed: m ", m, ", n ", n, ", depth ", k, ", nodes ", nodes,
       res ? ", solved" : ", certified none");
  if (res) {
    if (!check_valid(inst.universe, Solution{res->chosen}, Rat(2) + delta))
      throw std::logic_error(
          "solve_relaxed: result must be (2+delta)-valid");
  }
  return res;
}

Solution to_nearly_matching(const MatchingInstance& inst,
                            const RelaxedMatching& relaxed) {
  auto [dl, dr] = inst.degrees(relaxed.chosen);
  for (int v = 0; v < inst.m; ++v)
    if (dl[static_cast<std::size_t>(v)] < 1 ||
        dl[static_cast<std::size_t>(v)] > 2 ||
        dr[static_cast<std::size_t>(v)] < 1 ||
        dr[static_cast<std::size_t>(v)] > 2)
      throw std::invalid_argument(
          "to_nearly_matching: input degrees must all be 1 or 2");
  std::vector<char> kept(relaxed.chosen.size(), 1);
  // One pass per side, dropping the higher-id edge at each still-double
  // vertex. Degrees only fall, so one pass each suffices.
  for (int side = 0; side < 2; ++side) {
    std::vector<int>& deg = side == 0 ? dl : dr;
    for (int v = 0; v < inst.m; ++v) {
      if (deg[static_cast<std::size_t>(v)] != 2) continue;
      int drop_pos = -1;
      for (std::size_t j = 0; j < relaxed.chosen.size(); ++j) {
        if (!kept[j]) continue;
        const MatchEdge& me =
            inst.edges[static_cast<std::size_t>(relaxed.chosen[j])];
        if ((side == 0 ? me.left : me.right) == v)
          drop_pos = static_cast<int>(j);  // ids ascend, so last hit is max
      }
      if (drop_pos < 0)
        throw std::logic_error("to_nearly_matching: degree lost its edges");
      kept[static_cast<std::size_t>(drop_pos)] = 0;
      const MatchEdge& me = inst.edges[static_cast<std::size_t>(
          relaxed.chosen[static_cast<std::size_t>(drop_pos)])];
      dl[static_cast<std::size_t>(me.left)]--;
      dr[static_cast<std::size_t>(me.right)]--;
    }
  }
  Solution out;
  for (std::size_t j = 0; j < relaxed.chosen.size(); ++j)
    if (kept[j]) out.chosen.push_back(relaxed.chosen[j]);
  out.normalize();
  const auto [fl, fr] = inst.degrees(out.chosen);
  for (int v = 0; v < inst.m; ++v)
    if (fl[static_cast<std::size_t>(v)] > 1 ||
        fr[static_cast<std::size_t>(v)] > 1)
      throw std::logic_error("to_nearly_matching: result is not a matching");
  if (2 * out.size() < 2 * inst.m - relaxed.deg2_count)
    throw std::logic_error(
        "to_nearly_matching: too few edges survived the deletions");
  return out;
}

LogBgtSolver matching_logbgt_solver(std::vector<MatchEdge> edges, int m,
                                    Rat eps, Rat delta) {
  return [edges = std::move(edges), m, eps = std::move(eps),
          delta = std::move(delta)](
             const GroupedUniverse& u,
             const std::vector<char>& excluded) -> SolveReport {
    if (u.n != static_cast<int>(edges.size()) ||
        excluded.size() != edges.size())
      throw std::logic_error("matching adapter: universe must match the edges");
    for (int e = 0; e < u.n; ++e)
      if (excluded[static_cast<std::size_t>(e)] &&
          u.group_of[static_cast<std::size_t>(e)] != 0)
        throw std::logic_error(
            "matching adapter: excluded edges must be ungrouped");
    MatchingInstance inst(u, edges, m, budget_ladder(u.T), excluded);
    std::optional<RelaxedMatching> got = solve_relaxed(inst, eps, delta);
    if (!got)
      return SolveReport::no_valid_solution(
          "no 1-valid perfect matching within the group budgets");
    SolveReport rep = SolveReport::solved(u, Solution{got->chosen});
    rep.note = "relaxed matching with " + std::to_string(got->deg2_count) +
               " degree-2 vertices";
    return rep;
  };
}

SolveReport minnorm_nearly_matching(const MatchingInstance& inst,
                                    const std::vector<Rat>& values,
                                    const NormSpec& norm, const Rat& eps,
                                    const Rat& delta) {
  if (eps <= 0 || eps >= 1 || delta <= 0 || delta >= 1)
    throw std::invalid_argument(
        "minnorm matching: eps and delta must lie in (0,1)");
  if (static_cast<int>(values.size()) != inst.universe.n)
    throw std::invalid_argument("minnorm matching: one value per edge");
  if (!inst.forbidden.empty())
    throw std::invalid_argument(
        "minnorm matching: forbidden edges are reserved for the reduction");
  // 4(2 + delta/8) + delta/2 = 8 + delta: the solver slack and the sweep
  // granularity split the headroom.
  const Rat sub_delta = delta / 8;
  const Rat sweep_eps = delta / 2;
  const MinNormResult res = minnorm_via_logbgt(
      values, norm, sweep_eps,
      matching_logbgt_solver(inst.edges, inst.m, eps, sub_delta),
      Rat(2) + sub_delta);
  if (res.report.certificate != Certificate::Solved) {
    SolveReport rep = SolveReport::no_valid_solution(
        "no perfect matching exists (every threshold certified none)");
    return rep;
  }
  const auto [dl, dr] = inst.degrees(res.report.solution.chosen);
  RelaxedMatching relaxed;
  relaxed.chosen = res.report.solution.chosen;
  for (int v = 0; v < inst.m; ++v) {
    if (dl[static_cast<std::size_t>(v)] == 2) ++relaxed.deg2_count;
    if (dr[static_cast<std::size_t>(v)] == 2) ++relaxed.deg2_count;
  }
  const Solution near = to_nearly_matching(inst, relaxed);
  if (Rat(near.size()) < (Rat(1) - eps) * Rat(inst.m))
    throw std::logic_error(
        "minnorm matching: nearly matching lost more than eps*m edges");
  SolveReport rep = SolveReport::solved(inst.universe, near);
  std::vector<Rat> masked(values.size(), Rat(0));
  for (int e : near.chosen)
    masked[static_cast<std::size_t>(e)] = values[static_cast<std::size_t>(e)];
  rep.norm_value = eval_norm(norm, masked);
  rep.note = "matched " + std::to_string(near.size()) + " of " +
             std::to_string(inst.m) + " pairs; " +
             std::to_string(res.solver_calls) + " threshold solves";
  return rep;
}

}  // namespace mn
