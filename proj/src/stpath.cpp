#include "mnorm/stpath.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mnorm/log.hpp"
#include "mnorm/parallel.hpp"

namespace mn {

PathInstance::PathInstance(GroupedUniverse u, std::vector<PathEdge> e, int nv,
                           int s_in, int t_in)
    : universe(std::move(u)),
      edges(std::move(e)),
      num_vertices(nv),
      s(s_in),
      t(t_in) {
  if (static_cast<int>(edges.size()) != universe.n)
    throw std::invalid_argument("path instance: one universe element per edge");
  if (num_vertices < 1)
    throw std::invalid_argument("path instance: no vertices");
  for (const PathEdge& pe : edges)
    if (pe.from < 0 || pe.from >= num_vertices || pe.to < 0 ||
        pe.to >= num_vertices)
      throw std::invalid_argument("path instance: edge endpoint out of range");
  if (s < 0 || s >= num_vertices || t < 0 || t >= num_vertices)
    throw std::invalid_argument("path instance: terminal out of range");
  if (s == t)
    throw std::invalid_argument("path instance: s and t must differ");
}

bool PathInstance::is_path(const Solution& chosen) const {
  if (chosen.chosen.empty()) return false;  // s != t needs at least one edge
  std::vector<int> out_edge(num_vertices, -1);
  for (int id : chosen.chosen) {
    if (id < 0 || id >= universe.n) return false;
    const int from = edges[id].from;
    if (out_edge[from] != -1) return false;  // two departures from one vertex
    out_edge[from] = id;
  }
  std::vector<char> seen(num_vertices, 0);
  seen[s] = 1;
  int cur = s;
  int steps = 0;
  while (cur != t) {
    const int id = out_edge[cur];
    if (id < 0) return false;
    cur = edges[id].to;
    if (seen[cur]) return false;
    seen[cur] = 1;
    if (++steps > chosen.size()) return false;
  }
  return steps == chosen.size();
}

PathParams path_params(const Rat& alpha, int num_edges, int T,
                       int num_vertices) {
  if (alpha < 9)
    throw std::invalid_argument(
        "path solver: the target factor must be at least 9");
  if (T < 1)
    throw std::invalid_argument("path solver: need at least one group");
  PathParams out;
  // Largest integral width keeps the state space smallest; delta absorbs
  // the slack and must stay within [1/2, 2] for the rounding analysis.
  const Rat span = (alpha - Rat(1)) / 6;
  BigInt width = numerator(span) / denominator(span);
  int beta = 0;
  Rat delta = 0;
  for (BigInt b = width; b >= 1; --b) {
    const Rat cand = (alpha - Rat(1)) / (Rat(4) * Rat(b)) - Rat(1);
    if (cand >= Rat(1, 2) && cand <= 2) {
      beta = static_cast<int>(b);
      delta = cand;
      break;
    }
  }
  if (beta == 0)
    throw std::invalid_argument(
        "path solver: no integral supergroup width fits this factor; try "
        "alpha = 9, 13, or 21");
  out.beta = beta;
  out.delta = delta;
  const int reach = std::max(1, std::min(num_edges, num_vertices - 1));
  out.levels = std::max(1, ceil_log2(static_cast<std::uint64_t>(reach)));
  out.K = (T + beta - 1) / beta;
  // Soundness only needs p^levels <= 1 + delta: rounding each merge up to a
  // power of p inflates a charge by < p per level, so the final cap is
  // p^levels * beta <= (1 + delta) * beta. Within that bound a coarser base
  // is strictly better (fewer distinct rounded values, smaller frontiers),
  // so pick the largest p on a fixed denominator grid instead of the
  // per-level split 1 + delta/(2*levels).
  const Rat limit = Rat(1) + delta;
  long den = 64;
  while (rat_pow(Rat(den + 1, den), out.levels) > limit) den *= 2;
  Rat p(den + 1, den);
  for (long a = den + 2;; ++a) {
    const Rat cand(a, den);
    if (rat_pow(cand, out.levels) > limit) break;
    p = cand;
  }
  out.p = p;
  out.budget = (alpha - Rat(1)) / 4;
  return out;
}

std::vector<Rat> supergroup_cost(const GroupedUniverse& u,
                                 const std::vector<int>& chosen, int beta) {
  if (beta < 1)
    throw std::invalid_argument("supergroup width must be positive");
  const int K = (u.T + beta - 1) / beta;
  std::vector<Rat> out(K, Rat(0));
  for (int e : chosen) {
    const int g = u.group_of.at(e);
    if (g == 0) continue;
    out[(g - 1) / beta] += pow2(-g);
  }
  return out;
}

namespace {

// Every coordinate a state can hold is either zero, the exact charge 2^-j
// of one level-0 edge, or a power of p. The solver enumerates all of them
// once, sorts them, and works with integer ranks from then on: sums with
// round-up and the level caps become table lookups, and dominance is an
// integer comparison. Code -1 is zero; codes 0.. are the positive values
// in ascending order, so code order equals value order.
struct BackRef {
  int via = -1;    // middle vertex (levels >= 1)
  int left = -1;   // state index in the previous level's (x, via) cell
  int right = -1;  // state index in the previous level's (via, y) cell
  int edge = -1;   // level 0: edge id, or -1 for the empty walk
};

struct DpVec {
  std::vector<std::int16_t> codes;
  BackRef bp;
};

using Cell = std::vector<DpVec>;

bool dominates(const std::vector<std::int16_t>& a,
               const std::vector<std::int16_t>& b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] > b[j]) return false;
  return true;
}

// Pareto insert. A candidate dominated by (or equal to) a stored state is
// dropped; stored states it strictly dominates are evicted. The surviving
// set is the frontier of every candidate offered, independent of offer
// order; ties keep the earliest offer, so a fixed enumeration order fixes
// every back reference. Dropping dominated states is safe: combining is
// coordinatewise monotone and so is the level cap, so any guarantee a
// dropped state carried is carried by the state that dominated it.
void offer(Cell& cell, const std::vector<std::int16_t>& codes, BackRef bp) {
  for (const DpVec& have : cell)
    if (dominates(have.codes, codes)) return;
  cell.erase(std::remove_if(cell.begin(), cell.end(),
                            [&](const DpVec& have) {
                              return dominates(codes, have.codes);
                            }),
             cell.end());
  cell.push_back(DpVec{codes, bp});
}

void sort_cell(Cell& cell) {
  std::sort(cell.begin(), cell.end(),
            [](const DpVec& a, const DpVec& b) { return a.codes < b.codes; });
}

}  // namespace

SolveReport solve_path(const PathInstance& inst, const Rat& alpha) {
  const GroupedUniverse& u = inst.universe;
  const PathParams par = path_params(alpha, u.n, u.T, inst.num_vertices);
  const int nv = inst.num_vertices;

  {  // Reachability over every edge, grouped or not.
    std::vector<std::vector<int>> adj(nv);
    for (const PathEdge& e : inst.edges) adj[e.from].push_back(e.to);
    std::vector<char> seen(nv, 0);
    std::deque<int> bfs{inst.s};
    seen[inst.s] = 1;
    while (!bfs.empty()) {
      const int x = bfs.front();
      bfs.pop_front();
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          bfs.push_back(y);
        }
    }
    if (!seen[inst.t])
      return SolveReport::infeasible_input("t is unreachable from s");
  }

  const int L = par.levels;
  const int K = par.K;
  std::vector<Rat> caps(L + 1);
  for (int i = 0; i <= L; ++i) caps[i] = rat_pow(par.p, i) * Rat(par.beta);

  // Level-L states use at most 2^L distinct edges, so a group whose budget
  // already admits that many edges can never be violated by anything the
  // dp builds. Supergroups made only of such groups need no coordinate;
  // they form a suffix, so tracking a prefix of the charge vector suffices.
  // The final per-group validity check still verifies them explicitly.
  int g_auto = 1;
  while (g_auto <= u.T && pow2(L) > par.budget * pow2(g_auto)) ++g_auto;
  int K_track = 0;
  while (K_track < K && K_track * par.beta + 1 < g_auto) ++K_track;

  // Power table: every positive charge the DP can see lies in
  // [2^-T, 2 * caps[L]], so its round-up exponent lands inside the table.
  std::vector<Rat> pow_val;
  {
    std::deque<Rat> vals{Rat(1)};
    const Rat floor_val = pow2(-u.T);
    while (vals.front() > floor_val) vals.push_front(vals.front() / par.p);
    const Rat top = caps[L] * 2;
    while (vals.back() < top) vals.push_back(vals.back() * par.p);
    pow_val.assign(vals.begin(), vals.end());
  }

  // Global ascending value list (2^-j charges and p powers are never
  // equal, so the merge has no ties), plus integer tables that make the
  // combine loop pure integer work: round-up of a single value or of a
  // pair sum as an index into pow_val, the per-level cap as a max index.
  std::vector<Rat> code_val;
  {
    code_val.reserve(pow_val.size() + u.T);
    for (int j = 1; j <= u.T; ++j) code_val.push_back(pow2(-j));
    code_val.insert(code_val.end(), pow_val.begin(), pow_val.end());
    std::sort(code_val.begin(), code_val.end());
  }
  const int C = static_cast<int>(code_val.size());
  if (C > 30000)
    throw std::logic_error("path dp: value table unexpectedly large");
  const auto code_of = [&](const Rat& x) {
    const auto it = std::lower_bound(code_val.begin(), code_val.end(), x);
    return static_cast<int>(it - code_val.begin());
  };
  std::vector<std::int16_t> pow_code(pow_val.size());
  for (std::size_t k = 0; k < pow_val.size(); ++k)
    pow_code[k] = static_cast<std::int16_t>(code_of(pow_val[k]));
  std::vector<int> half_code(u.T + 1, -1);
  for (int j = 1; j <= u.T; ++j) half_code[j] = code_of(pow2(-j));
  const auto round_idx = [&](const Rat& x) {
    return static_cast<int>(
        std::lower_bound(pow_val.begin(), pow_val.end(), x) - pow_val.begin());
  };
  std::vector<int> single_round(C);
  for (int c = 0; c < C; ++c) single_round[c] = round_idx(code_val[c]);
  std::vector<int> pair_round(static_cast<std::size_t>(C) * C);
  for (int a = 0; a < C; ++a)
    for (int b = a; b < C; ++b) {
      const int idx = round_idx(code_val[a] + code_val[b]);
      pair_round[static_cast<std::size_t>(a) * C + b] = idx;
      pair_round[static_cast<std::size_t>(b) * C + a] = idx;
    }
  // Per-level, per-coordinate cap. A level-i state is a walk with at most
  // 2^i distinct edges, each contributing at most 2^-(lowest group of the
  // supergroup), so a genuine segment's coordinate j stays within
  // 2^(i - g_min); with the p^i rounding slack the tighter of that and the
  // global cap still keeps every segment of a 1-valid path.
  std::vector<std::vector<int>> max_idx(
      L + 1, std::vector<int>(std::max(1, K_track)));
  for (int i = 0; i <= L; ++i)
    for (int j = 0; j < K_track; ++j) {
      const int g_min = j * par.beta + 1;
      Rat cap = caps[i];
      const Rat len_cap = rat_pow(par.p, i) * pow2(i - g_min);
      if (len_cap < cap) cap = len_cap;
      max_idx[i][j] = static_cast<int>(std::upper_bound(pow_val.begin(),
                                                        pow_val.end(), cap) -
                                       pow_val.begin()) -
                      1;
    }

  std::vector<std::vector<Cell>> q(L + 1);
  for (auto& level : q) level.assign(static_cast<std::size_t>(nv) * nv, {});

  const std::vector<std::int16_t> zero_codes(K_track, -1);
  for (int x = 0; x < nv; ++x)
    q[0][static_cast<std::size_t>(x) * nv + x].push_back(
        DpVec{zero_codes, BackRef{}});
  for (int id = 0; id < u.n; ++id) {
    const int g = u.group_of[id];
    const PathEdge& e = inst.edges[id];
    if (g == 0 || e.from == e.to) continue;  // unusable on any simple path
    std::vector<std::int16_t> codes(K_track, -1);
    const int sg = (g - 1) / par.beta;
    if (sg < K_track) codes[sg] = static_cast<std::int16_t>(half_code[g]);
    BackRef bp;
    bp.edge = id;
    offer(q[0][static_cast<std::size_t>(e.from) * nv + e.to], codes, bp);
  }
  for (Cell& cell : q[0]) sort_cell(cell);

  long long states = 0;
  for (const Cell& cell : q[0]) states += static_cast<long long>(cell.size());

  for (int i = 1; i <= L; ++i) {
    const auto& prev = q[i - 1];
    auto& cur = q[i];
    const std::vector<int>& cap_row = max_idx[i];
    std::vector<std::vector<int>> next_of(nv);
    for (int x = 0; x < nv; ++x)
      for (int z = 0; z < nv; ++z)
        if (!prev[static_cast<std::size_t>(x) * nv + z].empty())
          next_of[x].push_back(z);
    par_for(static_cast<std::int64_t>(nv) * nv, [&](std::int64_t cell_id) {
      const int x = static_cast<int>(cell_id / nv);
      const int y = static_cast<int>(cell_id % nv);
      Cell out;
      std::vector<std::int16_t> cand(K_track);
      for (int z : next_of[x]) {
        const Cell& a = prev[static_cast<std::size_t>(x) * nv + z];
        const Cell& b = prev[static_cast<std::size_t>(z) * nv + y];
        if (b.empty()) continue;
        for (const DpVec& va : a)
          for (const DpVec& vb : b) {
            bool ok = true;
            for (int j = 0; j < K_track; ++j) {
              const int ca = va.codes[j];
              const int cb = vb.codes[j];
              if (ca < 0 && cb < 0) {
                cand[j] = -1;
                continue;
              }
              const int idx = ca < 0   ? single_round[cb]
                              : cb < 0 ? single_round[ca]
                                       : pair_round[static_cast<std::size_t>(
                                                        ca) *
                                                        C +
                                                    cb];
              if (idx > cap_row[j]) {
                ok = false;
                break;
              }
              cand[j] = pow_code[idx];
            }
            if (!ok) continue;
            offer(out, cand, BackRef{z,
                                     static_cast<int>(&va - a.data()),
                                     static_cast<int>(&vb - b.data()), -1});
          }
      }
      sort_cell(out);
      cur[cell_id] = std::move(out);
    });
    for (const Cell& cell : cur) states += static_cast<long long>(cell.size());
  }

  const Cell& fin = q[L][static_cast<std::size_t>(inst.s) * nv + inst.t];
  logf("solve_path: ", nv, " vertices, ", u.n, " edges, beta ", par.beta,
       ", levels ", L, ", tracked ", K_track, " of ", K, ", states ", states,
       ", final ", fin.size());
  if (fin.empty())
    return SolveReport::no_valid_solution(
        "no s-t path stays within every group budget");

  // Reconstruct the canonically smallest surviving state into a walk.
  std::vector<int> walk;
  const std::function<void(int, int, int, int)> rebuild =
      [&](int level, int x, int y, int idx) {
        const DpVec& v = q[level][static_cast<std::size_t>(x) * nv + y][idx];
        if (level == 0) {
          if (v.bp.edge >= 0) walk.push_back(v.bp.edge);
          return;
        }
        rebuild(level - 1, x, v.bp.via, v.bp.left);
        rebuild(level - 1, v.bp.via, y, v.bp.right);
      };
  rebuild(L, inst.s, inst.t, 0);
  if (walk.empty())
    throw std::logic_error("path dp: a surviving state rebuilt to nothing");

  // Cut cycles out of the walk; dropping edges never raises any charge.
  std::vector<int> stack_e;
  std::vector<int> stack_v{inst.s};
  std::vector<int> pos(nv, -1);
  pos[inst.s] = 0;
  for (int id : walk) {
    if (inst.edges[id].from != stack_v.back())
      throw std::logic_error("path dp: reconstructed state is not a walk");
    const int v = inst.edges[id].to;
    if (pos[v] >= 0) {
      while (static_cast<int>(stack_v.size()) > pos[v] + 1) {
        pos[stack_v.back()] = -1;
        stack_v.pop_back();
        stack_e.pop_back();
      }
    } else {
      stack_v.push_back(v);
      pos[v] = static_cast<int>(stack_v.size()) - 1;
      stack_e.push_back(id);
    }
  }
  if (stack_v.back() != inst.t)
    throw std::logic_error("path dp: walk did not end at t");

  Solution sol;
  sol.chosen = stack_e;
  sol.normalize();
  if (!inst.is_path(sol))
    throw std::logic_error("path dp: cycle removal must leave a simple path");
  const std::vector<Rat> exact = supergroup_cost(u, sol.chosen, par.beta);
  for (int j = 0; j < K_track; ++j) {
    const int c = fin[0].codes[j];
    const Rat held = c < 0 ? Rat(0) : code_val[c];
    if (exact[j] > held)
      throw std::logic_error(
          "path dp: a rounded state must dominate its reconstruction");
  }

  SolveReport rep = SolveReport::solved(u, sol);
  rep.note = "level dp: beta " + std::to_string(par.beta) + ", levels " +
             std::to_string(L) + ", states " + std::to_string(states);
  if (rep.validity > par.budget)
    throw std::logic_error("path dp: returned path must meet the budget");
  return rep;
}

LogBgtSolver path_logbgt_solver(std::vector<PathEdge> edges, int nv, int s,
                                int t, Rat alpha) {
  return [edges = std::move(edges), nv, s, t, alpha = std::move(alpha)](
             const GroupedUniverse& u,
             const std::vector<char>& excluded) -> SolveReport {
    if (u.n != static_cast<int>(edges.size()) ||
        excluded.size() != edges.size())
      throw std::logic_error("path adapter: universe must match the edges");
    for (int e = 0; e < u.n; ++e)
      if (excluded[e] && u.group_of[e] != 0)
        throw std::logic_error("path adapter: excluded edges must be ungrouped");
    return solve_path(PathInstance(u, edges, nv, s, t), alpha);
  };
}

WeightedSolver path_weight_solver(std::vector<PathEdge> edges, int nv, int s,
                                  int t) {
  return [edges = std::move(edges), nv, s, t](const std::vector<Rat>& w)
             -> std::optional<std::pair<Solution, Rat>> {
    if (w.size() != edges.size())
      throw std::logic_error("path weight solver: one weight per edge");
    for (const Rat& x : w)
      if (x < 0)
        throw std::logic_error("path weight solver: negative weight");
    // Bellman-Ford with strict improvement: predecessors stay acyclic even
    // through zero-weight edges, so the answer is a simple path.
    std::vector<std::optional<Rat>> dist(nv);
    std::vector<int> from_edge(nv, -1);
    dist[s] = Rat(0);
    for (int round = 0; round + 1 < nv; ++round) {
      bool changed = false;
      for (int id = 0; id < static_cast<int>(edges.size()); ++id) {
        const PathEdge& e = edges[id];
        if (e.from == e.to || !dist[e.from]) continue;
        const Rat cand = *dist[e.from] + w[id];
        if (!dist[e.to] || cand < *dist[e.to]) {
          dist[e.to] = cand;
          from_edge[e.to] = id;
          changed = true;
        }
      }
      if (!changed) break;
    }
    if (!dist[t]) return std::nullopt;
    Solution sol;
    for (int v = t; v != s;) {
      const int id = from_edge[v];
      sol.chosen.push_back(id);
      v = edges[id].from;
    }
    sol.normalize();
    return std::make_pair(std::move(sol), *dist[t]);
  };
}

}  // namespace mn
