#include "mnorm/harness.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mn {

namespace {

void check_size(const SubsetSystem& sys) {
  if (sys.n < 0 || sys.n > kBruteForceMaxN)
    throw std::invalid_argument("brute force: universe too large");
  if (!sys.feasible) throw std::invalid_argument("brute force: no predicate");
}

}  // namespace

Solution mask_to_solution(std::uint32_t mask, int n) {
  Solution s;
  for (int e = 0; e < n; ++e)
    if (mask >> e & 1u) s.chosen.push_back(e);
  return s;
}

std::optional<std::pair<Solution, Rat>> brute_force_minnorm(
    const SubsetSystem& sys, const NormSpec& norm,
    const std::vector<Rat>& values) {
  check_size(sys);
  if (static_cast<int>(values.size()) != sys.n)
    throw std::invalid_argument("brute_force_minnorm: value size mismatch");
  std::optional<std::pair<Solution, Rat>> best;
  std::vector<Rat> masked(sys.n);
  for (std::uint32_t mask = 0; mask < (1u << sys.n); ++mask) {
    if (!sys.feasible(mask)) continue;
    for (int e = 0; e < sys.n; ++e)
      masked[e] = (mask >> e & 1u) ? values[e] : Rat(0);
    Rat val = eval_norm(norm, masked);
    if (!best || val < best->second)
      best = {mask_to_solution(mask, sys.n), val};
  }
  return best;
}

std::optional<std::pair<Solution, Rat>> brute_force_minsum(
    const SubsetSystem& sys, const std::vector<Rat>& weights,
    const std::vector<char>& excluded) {
  check_size(sys);
  if (static_cast<int>(weights.size()) != sys.n ||
      static_cast<int>(excluded.size()) != sys.n)
    throw std::invalid_argument("brute_force_minsum: size mismatch");
  std::uint32_t banned = 0;
  for (int e = 0; e < sys.n; ++e)
    if (excluded[e]) banned |= 1u << e;
  std::optional<std::pair<Solution, Rat>> best;
  for (std::uint32_t mask = 0; mask < (1u << sys.n); ++mask) {
    if (mask & banned) continue;
    if (!sys.feasible(mask)) continue;
    Rat w = 0;
    for (int e = 0; e < sys.n; ++e)
      if (mask >> e & 1u) w += weights[e];
    if (!best || w < best->second) best = {mask_to_solution(mask, sys.n), w};
  }
  return best;
}

std::optional<Rat> brute_force_validity(const SubsetSystem& sys,
                                        const GroupedUniverse& u,
                                        const std::vector<char>& excluded,
                                        Solution* best) {
  check_size(sys);
  if (u.n != sys.n || static_cast<int>(excluded.size()) != sys.n)
    throw std::invalid_argument("brute_force_validity: size mismatch");
  std::uint32_t banned = 0;
  for (int e = 0; e < sys.n; ++e)
    if (excluded[e]) banned |= 1u << e;
  std::optional<Rat> bestval;
  for (std::uint32_t mask = 0; mask < (1u << sys.n); ++mask) {
    if (mask & banned) continue;
    if (!sys.feasible(mask)) continue;
    Solution s = mask_to_solution(mask, sys.n);
    Rat v = validity_factor(u, s);
    if (!bestval || v < *bestval) {
      bestval = v;
      if (best) *best = std::move(s);
    }
  }
  return bestval;
}

LogBgtSolver make_exhaustive_logbgt(const SubsetSystem& sys) {
  return [sys](const GroupedUniverse& u,
               const std::vector<char>& excluded) -> SolveReport {
    Solution best;
    auto v = brute_force_validity(sys, u, excluded, &best);
    if (!v) return SolveReport::infeasible_input("exhaustive: nothing feasible");
    if (*v <= 1) return SolveReport::solved(u, best);
    return SolveReport::no_valid_solution(
        "exhaustive: best validity " + rat_to_string(*v) + " exceeds 1");
  };
}

MinSumSolver make_exhaustive_minsum(const SubsetSystem& sys) {
  return [sys](const std::vector<Rat>& weights,
               const std::vector<char>& excluded) {
    return brute_force_minsum(sys, weights, excluded);
  };
}

WeightedSolver make_exhaustive_weighted(const SubsetSystem& sys) {
  return [sys](const std::vector<Rat>& weights) {
    return brute_force_minsum(sys, weights,
                              std::vector<char>(sys.n, 0));
  };
}

namespace {

// Assigns every element to a group, biased toward later groups, while the
// first three groups stay near their budgets so short-prefix enumeration is
// cheap on generated instances.
std::vector<std::vector<int>> random_groups(std::mt19937_64& rng, int n) {
  int T = GroupedUniverse::default_T(n);
  std::vector<std::vector<int>> groups(T);
  auto cap = [&](int j) {
    return j <= 3 ? (1 << j) + 2 : std::numeric_limits<int>::max();
  };
  for (int e = 0; e < n; ++e) {
    int j = 0;
    for (int tries = 0; tries < 64; ++tries) {
      // Two draws biased toward the last group, where capacity is ample.
      int a = 1 + static_cast<int>(rng() % T);
      int b = 1 + static_cast<int>(rng() % T);
      j = std::max(a, b);
      if (static_cast<int>(groups[j - 1].size()) < cap(j)) break;
      j = 0;
    }
    if (j == 0) {
      for (int k = T; k >= 1; --k)
        if (static_cast<int>(groups[k - 1].size()) < cap(k)) {
          j = k;
          break;
        }
    }
    groups[j - 1].push_back(e);
  }
  return groups;
}

}  // namespace

PlantedKnap gen_planted_knap(std::mt19937_64& rng, int n, int d,
                             int spread_exp) {
  if (n < 1 || d < 1 || spread_exp < 1)
    throw std::invalid_argument("gen_planted_knap: bad parameters");
  GroupedUniverse u(n, random_groups(rng, n));

  // Planted subset: within every group's budget, never empty overall.
  std::vector<int> planted;
  for (int j = 1; j <= u.T; ++j) {
    std::vector<int> pool = u.group(j);
    std::shuffle(pool.begin(), pool.end(), rng);
    int cap = std::min<int>(static_cast<int>(pool.size()),
                            j >= 30 ? n : (1 << j));
    int take = cap == 0 ? 0 : static_cast<int>(rng() % (cap + 1));
    planted.insert(planted.end(), pool.begin(), pool.begin() + take);
  }
  if (planted.empty()) {
    for (int j = 1; j <= u.T; ++j)
      if (!u.group(j).empty()) {
        planted.push_back(u.group(j)[static_cast<std::size_t>(
            rng() % u.group(j).size())]);
        break;
      }
  }

  // Per dimension, all positive weights are gamma * 2^k with k in
  // [0, spread_exp]; one planted element anchors coverage with weight >= 1.
  std::vector<std::vector<Rat>> w(n, std::vector<Rat>(d, Rat(0)));
  for (int i = 0; i < d; ++i) {
    Rat gamma = pow2(-static_cast<int>(rng() % 2));
    for (int e = 0; e < n; ++e)
      if (rng() % 2)
        w[e][i] = gamma * pow2(static_cast<int>(
                      rng() % static_cast<unsigned>(spread_exp + 1)));
    // Prefer an anchor outside the small leading groups: the planted cover
    // should usually be reachable without enumerating a deep prefix.
    std::vector<int> late;
    for (int e : planted)
      if (u.group_of[e] > 3) late.push_back(e);
    const std::vector<int>& pool = late.empty() ? planted : late;
    int anchor = pool[static_cast<std::size_t>(rng() % pool.size())];
    // gamma <= 1 <= gamma * 2^spread_exp, so weight 1 stays in the palette.
    w[anchor][i] = Rat(1);
  }

  PlantedKnap out{KnapInstance(u, d, std::move(w)), Solution{planted}};
  out.planted.normalize();
  if (!out.instance.covers(out.planted.chosen) ||
      !check_valid(u, out.planted, Rat(1)))
    throw std::logic_error("gen_planted_knap: planted witness broken");
  return out;
}

KnapInstance gen_random_knap(std::mt19937_64& rng, int n, int d) {
  if (n < 1 || d < 1)
    throw std::invalid_argument("gen_random_knap: bad parameters");
  GroupedUniverse u(n, random_groups(rng, n));
  std::vector<std::vector<Rat>> w(n, std::vector<Rat>(d, Rat(0)));
  for (int i = 0; i < d; ++i) {
    // Per-dimension scale: sparse small weights leave a decent share of
    // instances with no covering subset at all.
    int denom = 4 + static_cast<int>(rng() % 16);
    for (int e = 0; e < n; ++e)
      if (rng() % 2)
        w[e][i] = Rat(1 + static_cast<int>(rng() % 8), denom);
  }
  return KnapInstance(u, d, std::move(w));
}

namespace {

struct SegDraft {
  Seg seg;
  int group = 0;  // 0 = ungrouped
  bool planted = false;
};

// Shuffles drafts into final element ids and assembles the instance.
IntervalInstance assemble_intervals(std::mt19937_64& rng,
                                    std::vector<SegDraft>& drafts, int T,
                                    const Seg& target,
                                    std::vector<int>* planted) {
  std::shuffle(drafts.begin(), drafts.end(), rng);
  int n = static_cast<int>(drafts.size());
  std::vector<std::vector<int>> groups(T);
  std::vector<Seg> segs(n);
  for (int e = 0; e < n; ++e) {
    segs[e] = drafts[e].seg;
    if (drafts[e].group > 0) groups[drafts[e].group - 1].push_back(e);
    if (planted && drafts[e].planted) planted->push_back(e);
  }
  return IntervalInstance(GroupedUniverse(n, std::move(groups)),
                          std::move(segs), target);
}

}  // namespace

PlantedIntervals gen_planted_intervals(std::mt19937_64& rng, int n) {
  if (n < 1) throw std::invalid_argument("gen_planted_intervals: bad size");
  Seg target{Rat(0), Rat(n)};
  int T = GroupedUniverse::default_T(n);

  // Cut the target into consecutive blocks at rational points sharing one
  // small denominator.
  int q = 5 + static_cast<int>(rng() % 12);
  std::set<Rat> cuts;
  int want = static_cast<int>(rng() % static_cast<unsigned>((n + 1) / 2 + 1));
  for (int i = 0; i < want && n > 1; ++i)
    cuts.insert(Rat(1 + static_cast<long long>(
                            rng() % static_cast<unsigned long long>(n) * q +
                            rng() % q),
                    q));
  std::vector<Rat> edges{Rat(0)};
  for (const Rat& c : cuts)
    if (c > 0 && c < n) edges.push_back(c);
  edges.push_back(Rat(n));

  // Shallow groups drive the prefix-enumeration cost, so their total size
  // is capped across planted and noise elements alike.
  std::vector<long long> total(T + 1, 0), planted_cnt(T + 1, 0);
  auto shallow_cap = [](int j) {
    return j == 1 ? 2LL : j == 2 ? 4LL : std::numeric_limits<long long>::max();
  };
  auto budget = [](int j) {
    return j >= 30 ? std::numeric_limits<long long>::max() : (1LL << j);
  };
  auto draw_group = [&](bool for_planted) {
    for (int tries = 0; tries < 64; ++tries) {
      int a = 1 + static_cast<int>(rng() % T);
      int b = 1 + static_cast<int>(rng() % T);
      int j = std::max(a, b);
      if (total[j] >= shallow_cap(j)) continue;
      if (for_planted && planted_cnt[j] >= budget(j)) continue;
      return j;
    }
    for (int j = T; j >= 1; --j)
      if (total[j] < shallow_cap(j) &&
          (!for_planted || planted_cnt[j] < budget(j)))
        return j;
    throw std::logic_error("gen_planted_intervals: no group available");
  };

  std::vector<SegDraft> drafts;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    // Jitter only widens a block, so the union still covers the target.
    Rat lo = edges[k] - Rat(static_cast<int>(rng() % q), 4 * q);
    Rat hi = edges[k + 1] + Rat(static_cast<int>(rng() % q), 4 * q);
    int j = draw_group(true);
    ++total[j];
    ++planted_cnt[j];
    drafts.push_back({Seg{lo, hi}, j, true});
  }
  int noise = n - static_cast<int>(drafts.size());
  for (int i = 0; i < noise; ++i) {
    Rat lo(static_cast<long long>(rng() % static_cast<unsigned long long>(
                                      (n + 2) * q)) -
               q,
           q);
    Rat hi = lo + Rat(1 + static_cast<int>(rng() % (2 * q)), q);
    int j = rng() % 8 == 0 ? 0 : draw_group(false);
    if (j > 0) ++total[j];
    drafts.push_back({Seg{lo, hi}, j, false});
  }

  std::vector<int> planted_ids;
  PlantedIntervals out{assemble_intervals(rng, drafts, T, target, &planted_ids),
                       Solution{std::move(planted_ids)}};
  out.planted.normalize();
  if (!out.instance.covers(out.planted.chosen) ||
      !check_valid(out.instance.universe, out.planted, Rat(1)))
    throw std::logic_error("gen_planted_intervals: planted witness broken");
  return out;
}

IntervalInstance gen_random_intervals(std::mt19937_64& rng, int n) {
  if (n < 1) throw std::invalid_argument("gen_random_intervals: bad size");
  int units = 1 + static_cast<int>(rng() % 4);
  Seg target{Rat(0), Rat(units)};
  int T = GroupedUniverse::default_T(n);
  int q = 3 + static_cast<int>(rng() % 6);
  std::vector<SegDraft> drafts;
  for (int e = 0; e < n; ++e) {
    Rat lo(static_cast<long long>(
               rng() % static_cast<unsigned long long>((units + 2) * q)) -
               q,
           q);
    Rat hi = lo + Rat(1 + static_cast<int>(rng() % (2 * q)), q);
    int j = 1 + static_cast<int>(rng() % T);
    if (rng() % 8 == 0) j = 0;
    drafts.push_back({Seg{lo, hi}, j, false});
  }
  return assemble_intervals(rng, drafts, T, target, nullptr);
}

PlantedTree gen_planted_tree(std::mt19937_64& rng, int m) {
  if (m < 1) throw std::invalid_argument("gen_planted_tree: bad size");
  int T = GroupedUniverse::default_T(m);
  auto budget = [](int g) {
    return g >= 30 ? std::numeric_limits<long long>::max() : (1LL << g);
  };
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> parent(m, -1), group(m, 0);
    std::vector<long long> root_cnt(T + 2, 0);
    for (int v = 0; v < m; ++v) {
      int p = -1;
      if (v > 0 && rng() % 8 != 0) {
        for (int tries = 0; tries < 16 && p == -1; ++tries) {
          int cand = static_cast<int>(rng() % static_cast<unsigned>(v));
          if (group[cand] < T) p = cand;
        }
      }
      parent[v] = p;
      if (p == -1) {
        // Root groups stay within their budgets, so picking every root is
        // always a 1-valid cover and planting cannot be hopeless.
        int g = 1;
        while (g < T && root_cnt[g] >= budget(g)) ++g;
        if (g + 1 <= T && root_cnt[g + 1] < budget(g + 1) && rng() % 2) ++g;
        ++root_cnt[g];
        group[v] = g;
      } else {
        group[v] = std::min(T, group[p] + 1 + static_cast<int>(rng() % 2));
      }
    }
    std::vector<std::vector<int>> groups(T);
    for (int v = 0; v < m; ++v) groups[group[v] - 1].push_back(v);
    TreeInstance tree(GroupedUniverse(m, std::move(groups)),
                      std::move(parent));

    // Childless roots are forced picks; handle them before their budgets
    // can be spent elsewhere.
    std::vector<int> leaves = tree.leaves();
    std::shuffle(leaves.begin(), leaves.end(), rng);
    std::stable_partition(leaves.begin(), leaves.end(),
                          [&](int v) { return tree.parent[v] == -1; });
    std::vector<long long> used(T + 1, 0);
    std::vector<char> in(m, 0);
    bool ok = true;
    for (int leaf : leaves) {
      bool covered = false;
      std::vector<int> chain;
      for (int w = leaf; w != -1; w = tree.parent[w]) {
        if (in[w]) covered = true;
        chain.push_back(w);
      }
      if (covered) continue;
      // chain runs deep to shallow; deep groups have the roomy budgets.
      std::vector<int> open;
      for (int w : chain) {
        int g = tree.universe.group_of[w];
        if (used[g] < budget(g)) open.push_back(w);
      }
      if (open.empty()) {
        ok = false;
        break;
      }
      int w = open[static_cast<std::size_t>(rng() % open.size())];
      in[w] = 1;
      ++used[tree.universe.group_of[w]];
    }
    if (!ok) continue;

    Solution planted;
    for (int v = 0; v < m; ++v)
      if (in[v]) planted.chosen.push_back(v);
    if (!tree.covers(planted.chosen) ||
        !check_valid(tree.universe, planted, Rat(1)))
      throw std::logic_error("gen_planted_tree: planted witness broken");
    return PlantedTree{std::move(tree), std::move(planted)};
  }
  throw std::logic_error("gen_planted_tree: could not plant a valid cover");
}

PlantedSetCover gen_planted_setcover(std::mt19937_64& rng, int nsets,
                                     int nelems) {
  if (nsets < 1 || nelems < 0)
    throw std::invalid_argument("gen_planted_setcover: bad sizes");
  const int T = GroupedUniverse::default_T(nsets);
  const auto budget = [&](int g) {
    return g >= 30 ? std::numeric_limits<long long>::max() : (1LL << g);
  };

  std::vector<int> ids(nsets);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);

  const int want = 1 + static_cast<int>(rng() % std::max(1, nsets / 4));
  std::vector<int> group(nsets, 0);
  std::vector<long long> used(T + 1, 0);
  std::vector<int> planted_ids;
  for (int k = 0; k < nsets; ++k) {
    const int v = ids[k];
    if (k < want) {
      // Planted sets stay inside every group budget, so the witness is
      // 1-valid by construction. Group T can always absorb the overflow.
      std::vector<int> slack;
      for (int g = 1; g <= T; ++g)
        if (used[g] < budget(g)) slack.push_back(g);
      const int g = slack[static_cast<std::size_t>(rng() % slack.size())];
      group[v] = g;
      ++used[g];
      planted_ids.push_back(v);
    } else {
      group[v] = rng() % 8 == 0 ? 0 : 1 + static_cast<int>(rng() % T);
    }
  }

  std::vector<std::vector<int>> groups(T);
  for (int v = 0; v < nsets; ++v)
    if (group[v] != 0) groups[group[v] - 1].push_back(v);

  std::vector<std::vector<int>> member(nelems);
  for (int e = 0; e < nelems; ++e) {
    member[e].push_back(
        planted_ids[static_cast<std::size_t>(rng() % planted_ids.size())]);
    const int extra = static_cast<int>(rng() % 4);
    for (int k = 0; k < extra; ++k)
      member[e].push_back(static_cast<int>(rng() % nsets));
  }

  SetCoverInstance inst(GroupedUniverse(nsets, groups), std::move(member));
  Solution planted;
  planted.chosen = planted_ids;
  planted.normalize();
  if (!inst.covers(planted) || !check_valid(inst.universe, planted, Rat(1)))
    throw std::logic_error("gen_planted_setcover: planted witness broken");
  return PlantedSetCover{std::move(inst), std::move(planted)};
}

SetCoverInstance gen_random_setcover(std::mt19937_64& rng, int nsets,
                                     int nelems) {
  if (nsets < 1 || nelems < 0)
    throw std::invalid_argument("gen_random_setcover: bad sizes");
  const int T = GroupedUniverse::default_T(nsets);
  std::vector<std::vector<int>> groups(T);
  for (int v = 0; v < nsets; ++v)
    if (rng() % 8 != 0)
      groups[rng() % T].push_back(v);
  std::vector<std::vector<int>> member(nelems);
  for (int e = 0; e < nelems; ++e) {
    const int k = static_cast<int>(rng() % 3);
    for (int j = 0; j < k; ++j)
      member[e].push_back(static_cast<int>(rng() % nsets));
  }
  return SetCoverInstance(GroupedUniverse(nsets, groups), std::move(member));
}

PlantedPath gen_planted_path(std::mt19937_64& rng, int nv) {
  if (nv < 2) throw std::invalid_argument("gen_planted_path: need nv >= 2");
  const int s = 0;
  const int t = nv - 1;

  // Distinct intermediate vertices for a simple planted path.
  std::vector<int> inner(std::max(0, nv - 2));
  std::iota(inner.begin(), inner.end(), 1);
  std::shuffle(inner.begin(), inner.end(), rng);
  const int len = 1 + static_cast<int>(rng() % (nv - 1));
  std::vector<int> route{s};
  for (int k = 0; k + 1 < len; ++k) route.push_back(inner[k]);
  route.push_back(t);

  const int noise = nv / 4 + static_cast<int>(rng() % (nv + 1));
  const int m = len + noise;
  const int T = GroupedUniverse::default_T(m);
  const auto budget = [&](int g) {
    return g >= 30 ? std::numeric_limits<long long>::max() : (1LL << g);
  };

  struct Draft {
    PathEdge e;
    int group = 0;
    bool planted = false;
  };
  std::vector<Draft> drafts;
  std::vector<long long> used(T + 1, 0);
  for (int k = 0; k + 1 < static_cast<int>(route.size()); ++k) {
    // Planted edges stay inside every budget, so the witness is 1-valid.
    std::vector<int> slack;
    for (int g = 1; g <= T; ++g)
      if (used[g] < budget(g)) slack.push_back(g);
    const int g = slack[static_cast<std::size_t>(rng() % slack.size())];
    ++used[g];
    drafts.push_back({{route[k], route[k + 1]}, g, true});
  }
  for (int k = 0; k < noise; ++k) {
    const int a = static_cast<int>(rng() % nv);
    int b = static_cast<int>(rng() % nv);
    if (a == b) b = (b + 1) % nv;
    const int g = rng() % 8 == 0 ? 0 : 1 + static_cast<int>(rng() % T);
    drafts.push_back({{a, b}, g, false});
  }
  std::shuffle(drafts.begin(), drafts.end(), rng);

  std::vector<PathEdge> edges(m);
  std::vector<std::vector<int>> groups(T);
  Solution planted;
  for (int id = 0; id < m; ++id) {
    edges[id] = drafts[id].e;
    if (drafts[id].group != 0) groups[drafts[id].group - 1].push_back(id);
    if (drafts[id].planted) planted.chosen.push_back(id);
  }
  planted.normalize();

  PathInstance inst(GroupedUniverse(m, groups), std::move(edges), nv, s, t);
  if (!inst.is_path(planted) || !check_valid(inst.universe, planted, Rat(1)))
    throw std::logic_error("gen_planted_path: planted witness broken");
  return PlantedPath{std::move(inst), std::move(planted)};
}

PathInstance gen_random_path_instance(std::mt19937_64& rng, int nv) {
  if (nv < 2)
    throw std::invalid_argument("gen_random_path_instance: need nv >= 2");
  const int m = 1 + static_cast<int>(rng() % (2 * nv));
  const int T = GroupedUniverse::default_T(m);
  std::vector<PathEdge> edges(m);
  std::vector<std::vector<int>> groups(T);
  for (int id = 0; id < m; ++id) {
    edges[id].from = static_cast<int>(rng() % nv);
    edges[id].to = static_cast<int>(rng() % nv);  // self-loops allowed
    if (rng() % 8 != 0) groups[rng() % T].push_back(id);
  }
  return PathInstance(GroupedUniverse(m, groups), std::move(edges), nv, 0,
                      nv - 1);
}

}  // namespace mn
