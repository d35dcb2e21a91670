#include "mnorm/reduce.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "mnorm/log.hpp"
#include "mnorm/parallel.hpp"

namespace mn {

std::vector<int> pos_set(int n) {
  if (n < 1) throw std::invalid_argument("pos_set: n must be positive");
  std::vector<int> a;
  for (long long p = 1;; p *= 2) {
    a.push_back(static_cast<int>(std::min<long long>(p, n)));
    if (p >= n) break;
  }
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

std::vector<int> pos_set_delta(int n, const Rat& delta) {
  if (n < 1) throw std::invalid_argument("pos_set_delta: n must be positive");
  if (delta <= 0) throw std::invalid_argument("pos_set_delta: delta <= 0");
  std::vector<int> a;
  Rat p = 1;
  for (;;) {
    BigInt c = boost::multiprecision::numerator(p) /
                   boost::multiprecision::denominator(p) +
               (boost::multiprecision::numerator(p) %
                        boost::multiprecision::denominator(p) !=
                    0
                ? 1
                : 0);
    int v = static_cast<int>(std::min<BigInt>(c, n).convert_to<int>());
    if (a.empty() || a.back() != v) a.push_back(v);
    if (c >= n) break;
    p *= (1 + delta);
  }
  return a;
}

int pos_advance(const std::vector<int>& anchors, int i) {
  auto it = std::lower_bound(anchors.begin(), anchors.end(), i);
  if (it == anchors.end())
    throw std::invalid_argument("pos_advance: position beyond last anchor");
  return *it;
}

namespace {

// Smallest power of (1+eps) that is >= q (exact; exponent may be negative).
Rat snap_up(const Rat& q, const Rat& base) {
  Rat p = 1;
  if (p < q) {
    while (p < q) p *= base;
  } else {
    while (p / base >= q) p /= base;
  }
  return p;
}

}  // namespace

std::vector<ThresholdVector> enumerate_thresholds(
    const std::vector<Rat>& values, const Rat& eps,
    const std::vector<int>& anchors) {
  if (eps <= 0) throw std::invalid_argument("enumerate_thresholds: eps <= 0");
  const int n = static_cast<int>(values.size());
  const int L = static_cast<int>(anchors.size());
  if (n < 1 || L < 1)
    throw std::invalid_argument("enumerate_thresholds: empty input");
  const Rat base = 1 + eps;

  std::vector<ThresholdVector> out;
  out.push_back({std::vector<Rat>(L, Rat(0)), Rat(0)});

  std::vector<Rat> q_list;
  for (const Rat& v : values)
    if (v > 0) q_list.push_back(v);
  std::sort(q_list.begin(), q_list.end(), std::greater<Rat>());
  q_list.erase(std::unique(q_list.begin(), q_list.end()), q_list.end());

  for (const Rat& q : q_list) {
    Rat t1 = snap_up(q, base);
    Rat floor_v = eps * q / n;
    std::vector<Rat> ladder = {t1};
    while (ladder.back() / base >= floor_v) ladder.push_back(ladder.back() / base);

    // Non-increasing vectors: ladder indices weakly increase left to right,
    // and a zero ends the tail. Entry 0 is pinned to the snapped guess.
    std::vector<Rat> cur(L);
    cur[0] = t1;
    auto rec = [&](auto&& self, int pos, size_t min_idx) -> void {
      if (pos == L) {
        out.push_back({cur, q});
        return;
      }
      for (size_t j = min_idx; j < ladder.size(); ++j) {
        cur[pos] = ladder[j];
        self(self, pos + 1, j);
      }
      for (int k = pos; k < L; ++k) cur[k] = 0;
      out.push_back({cur, q});
    };
    rec(rec, 1, 0);
  }
  return out;
}

std::vector<Rat> g_of_t(const ThresholdVector& tv,
                        const std::vector<int>& anchors, int n) {
  if (tv.t.size() != anchors.size())
    throw std::invalid_argument("g_of_t: threshold/anchor length mismatch");
  std::vector<Rat> g(n);
  for (int i = 1; i <= n; ++i) {
    int a = pos_advance(anchors, i);
    size_t idx = std::lower_bound(anchors.begin(), anchors.end(), a) -
                 anchors.begin();
    g[i - 1] = tv.t[idx];
  }
  return g;
}

GroupedInstance build_groups(const std::vector<Rat>& values,
                             const ThresholdVector& tv, const Rat& eps) {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw std::invalid_argument("build_groups: no elements");
  std::vector<int> anchors = pos_set(n);
  if (tv.t.size() != anchors.size())
    throw std::invalid_argument("build_groups: threshold length mismatch");
  for (size_t k = 0; k + 1 < tv.t.size(); ++k)
    if (tv.t[k] < tv.t[k + 1])
      throw std::invalid_argument("build_groups: thresholds must not increase");
  const int T = GroupedUniverse::default_T(n);

  auto t_at = [&](int anchor) {
    size_t idx = std::lower_bound(anchors.begin(), anchors.end(), anchor) -
                 anchors.begin();
    return tv.t[idx];
  };

  Rat value_floor = eps * tv.o1_guess / n;
  Rat floor_v = std::max(tv.t.back(), value_floor);
  std::vector<std::vector<int>> groups(T);
  std::vector<char> excluded(n, 0);
  for (int e = 0; e < n; ++e) {
    const Rat& v = values[e];
    if (v < 0) throw std::invalid_argument("build_groups: negative value");
    if (v > tv.t[0]) {
      excluded[e] = 1;
      continue;
    }
    if (v <= floor_v) {
      groups[T - 1].push_back(e);
      continue;
    }
    bool placed = false;
    for (int i = 0; i < T && !placed; ++i) {
      int up = std::min(1 << i, n);
      int dn = std::min(1 << (i + 1), n);
      if (up == dn) continue;
      if (v <= t_at(up) && v > t_at(dn)) {
        groups[i].push_back(e);
        placed = true;
      }
    }
    if (!placed) throw std::logic_error("build_groups: element fell through");
  }
  return {GroupedUniverse(n, std::move(groups)), std::move(excluded)};
}

MinNormResult minnorm_via_logbgt(const std::vector<Rat>& values,
                                 const NormSpec& norm, const Rat& eps,
                                 const LogBgtSolver& solver,
                                 const Rat& solver_c) {
  if (eps <= 0 || solver_c < 1)
    throw std::invalid_argument("minnorm_via_logbgt: bad parameters");
  const int n = static_cast<int>(values.size());
  const std::vector<int> anchors = pos_set(n);
  // Internal guess spacing chosen so the end-to-end factor telescopes to
  // 4 * solver_c + eps.
  const Rat eps2 = eps / (1 + 4 * solver_c);
  auto tvs = enumerate_thresholds(values, eps2, anchors);

  // Distinct groupings only: different thresholds often bucket identically.
  std::vector<GroupedInstance> instances;
  std::vector<int> rep(tvs.size());
  std::map<std::vector<int>, int> seen;
  for (size_t i = 0; i < tvs.size(); ++i) {
    GroupedInstance gi = build_groups(values, tvs[i], eps2);
    std::vector<int> key(n);
    for (int e = 0; e < n; ++e)
      key[e] = gi.excluded[e] ? -1 : gi.universe.group_of[e];
    auto [it, fresh] = seen.emplace(std::move(key),
                                    static_cast<int>(instances.size()));
    if (fresh) instances.push_back(std::move(gi));
    rep[i] = it->second;
  }

  std::vector<SolveReport> reports(instances.size());
  par_for(static_cast<std::int64_t>(instances.size()), [&](std::int64_t k) {
    reports[k] = solver(instances[k].universe, instances[k].excluded);
  });

  MinNormResult res;
  res.solver_calls = static_cast<int>(instances.size());
  res.distinct_groupings = static_cast<int>(instances.size());
  bool any_solved = false;
  for (size_t i = 0; i < tvs.size(); ++i) {
    const SolveReport& r = reports[rep[i]];
    if (r.certificate != Certificate::Solved) continue;
    for (int e : r.solution.chosen)
      if (instances[rep[i]].excluded[e])
        throw std::logic_error("minnorm_via_logbgt: solver used excluded element");
    std::vector<Rat> masked(n, Rat(0));
    for (int e : r.solution.chosen) masked[e] = values[e];
    Rat val = eval_norm(norm, masked);
    if (!any_solved || val < *res.norm_value) {
      any_solved = true;
      res.report = r;
      res.norm_value = val;
      res.best = tvs[i];
    }
  }
  if (!any_solved) {
    res.report = SolveReport::infeasible_input(
        "every threshold guess certified no 1-valid solution");
  }
  logf("minnorm_via_logbgt: ", tvs.size(), " thresholds, ",
       instances.size(), " distinct groupings");
  return res;
}

SolveReport logbgt_via_minsum(const GroupedUniverse& u,
                              const std::vector<char>& excluded,
                              const MinSumSolver& solver, const Rat& alpha) {
  if (alpha < 1) throw std::invalid_argument("logbgt_via_minsum: alpha < 1");
  if (static_cast<int>(excluded.size()) != u.n)
    throw std::invalid_argument("logbgt_via_minsum: excluded mask size");
  std::vector<Rat> w(u.n, Rat(0));
  for (int e = 0; e < u.n; ++e)
    if (u.group_of[e] > 0) w[e] = pow2(-u.group_of[e]);
  auto got = solver(w, excluded);
  if (!got) return SolveReport::infeasible_input("min-sum solver: no feasible set");
  Solution d = std::move(got->first);
  d.normalize();
  Rat actual = 0;
  for (int e : d.chosen) {
    if (excluded[e])
      throw std::logic_error("logbgt_via_minsum: solver used excluded element");
    actual += w[e];
  }
  if (actual > alpha * u.T)
    return SolveReport::no_valid_solution(
        "min-sum weight exceeds alpha * T, so no 1-valid solution exists");
  return SolveReport::solved(u, std::move(d));
}

std::optional<ScalarResult> topl_minimize(const std::vector<Rat>& values,
                                          int ell,
                                          const WeightedSolver& solver) {
  const int n = static_cast<int>(values.size());
  if (ell < 1 || ell > n)
    throw std::invalid_argument("topl_minimize: ell out of range");
  std::vector<Rat> guesses = {Rat(0)};
  for (const Rat& v : values) guesses.push_back(v);
  std::sort(guesses.begin(), guesses.end(), std::greater<Rat>());
  guesses.erase(std::unique(guesses.begin(), guesses.end()), guesses.end());

  std::vector<std::optional<std::pair<Solution, Rat>>> cand(guesses.size());
  par_for(static_cast<std::int64_t>(guesses.size()), [&](std::int64_t k) {
    std::vector<Rat> w(n);
    for (int e = 0; e < n; ++e)
      w[e] = values[e] > guesses[k] ? values[e] - guesses[k] : Rat(0);
    cand[k] = solver(w);
  });

  std::optional<ScalarResult> best;
  NormSpec topl = NormSpec::top(ell);
  for (auto& c : cand) {
    if (!c) continue;
    std::vector<Rat> masked(n, Rat(0));
    Solution d = c->first;
    d.normalize();
    for (int e : d.chosen) masked[e] = values[e];
    Rat val = eval_norm(topl, masked);
    if (!best || val < best->value) best = ScalarResult{std::move(d), val};
  }
  return best;
}

std::vector<Rat> round_ordered_weights(const std::vector<Rat>& weights,
                                       const std::vector<int>& anchors) {
  const int n = static_cast<int>(weights.size());
  std::vector<Rat> out(n);
  for (int i = 1; i <= n; ++i) out[i - 1] = weights[pos_advance(anchors, i) - 1];
  return out;
}

std::optional<ScalarResult> ordered_minimize(const std::vector<Rat>& values,
                                             const std::vector<Rat>& weights,
                                             const Rat& delta, const Rat& eps,
                                             const WeightedSolver& solver) {
  const int n = static_cast<int>(values.size());
  if (static_cast<int>(weights.size()) != n)
    throw std::invalid_argument("ordered_minimize: weight length mismatch");
  for (int i = 0; i + 1 < n; ++i)
    if (weights[i] < weights[i + 1])
      throw std::invalid_argument("ordered_minimize: weights must not increase");
  if (n > 0 && weights.back() < 0)
    throw std::invalid_argument("ordered_minimize: negative weight");

  std::vector<int> anchors = pos_set_delta(n, delta);
  std::vector<Rat> wr = round_ordered_weights(weights, anchors);
  auto tvs = enumerate_thresholds(values, eps, anchors);

  // Surrogate cost of value a under thresholds t: sum over anchors l of
  // (w~_l - w~_next(l)) * (a - t_l)^+, which upper-bounds the rounded
  // ordered norm contribution and is within (1+2 eps) at a consistent t.
  const int L = static_cast<int>(anchors.size());
  std::vector<Rat> coef(L);
  for (int k = 0; k < L; ++k) {
    Rat next = (k + 1 < L) ? wr[anchors[k + 1] - 1] : Rat(0);
    coef[k] = wr[anchors[k] - 1] - next;
  }

  std::vector<std::optional<std::pair<Solution, Rat>>> cand(tvs.size());
  par_for(static_cast<std::int64_t>(tvs.size()), [&](std::int64_t i) {
    std::vector<Rat> w(n, Rat(0));
    for (int e = 0; e < n; ++e)
      for (int k = 0; k < L; ++k)
        if (coef[k] != 0 && values[e] > tvs[i].t[k])
          w[e] += coef[k] * (values[e] - tvs[i].t[k]);
    cand[i] = solver(w);
  });

  std::optional<ScalarResult> best;
  NormSpec ord = NormSpec::ordered(weights);
  for (auto& c : cand) {
    if (!c) continue;
    std::vector<Rat> masked(n, Rat(0));
    Solution d = c->first;
    d.normalize();
    for (int e : d.chosen) masked[e] = values[e];
    Rat val = eval_norm(ord, masked);
    if (!best || val < best->value) best = ScalarResult{std::move(d), val};
  }
  return best;
}

}  // namespace mn
