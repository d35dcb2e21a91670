#include "mnorm/setcover.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "mnorm/log.hpp"
#include "mnorm/lp.hpp"
#include "mnorm/parallel.hpp"

namespace mn {

SetCoverInstance::SetCoverInstance(GroupedUniverse u,
                                   std::vector<std::vector<int>> member)
    : universe(std::move(u)), containing(std::move(member)) {
  for (auto& sets : containing) {
    for (int v : sets)
      if (v < 0 || v >= universe.n)
        throw std::invalid_argument("set cover: membership id out of range");
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  }
}

bool SetCoverInstance::covers(const Solution& chosen) const {
  std::vector<char> in(universe.n, 0);
  for (int v : chosen.chosen) in.at(v) = 1;
  for (const auto& sets : containing) {
    bool hit = false;
    for (int v : sets)
      if (in[v]) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

int coverage_log(const SetCoverInstance& inst) {
  const std::uint64_t side =
      std::max<std::uint64_t>(std::max(inst.universe.n, inst.ground_size()), 2);
  return ceil_log2(side);
}

Rat keep_probability(const Rat& x, int log_n) {
  if (log_n < 1) throw std::invalid_argument("keep_probability: log_n < 1");
  if (x <= 0) return Rat(0);
  Rat p = Rat(2 * log_n) * x;
  if (p > 1) p = 1;
  return p;
}

Rat miss_probability(const std::vector<Rat>& prob,
                     const std::vector<int>& members) {
  Rat out = 1;
  for (int v : members) {
    const Rat& p = prob.at(v);
    out *= Rat(1) - p;
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  // splitmix64 finalizer over a golden-ratio stride; decorrelates trials
  // while keeping the stream a pure function of (seed, trial).
  std::uint64_t z =
      seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

std::vector<char> sample_sets(const std::vector<Rat>& prob,
                              std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<char> kept(prob.size(), 0);
  for (std::size_t v = 0; v < prob.size(); ++v) {
    const std::uint64_t r = gen();  // one draw per entry, in index order
    const Rat& p = prob[v];
    if (p >= 1) {
      kept[v] = 1;
      continue;
    }
    if (p <= 0) continue;
    // Keep iff r < floor(p * 2^64); exact, so equal inputs resample equally.
    const BigInt thr = (numerator(p) << 64) / denominator(p);
    kept[v] = BigInt(r) < thr ? 1 : 0;
  }
  return kept;
}

std::optional<std::vector<Rat>> cover_probabilities(
    const SetCoverInstance& inst) {
  const GroupedUniverse& u = inst.universe;
  LinearProgram lp;
  std::vector<int> var_of(u.n, -1);
  for (int v = 0; v < u.n; ++v)
    if (u.group_of[v] != 0) var_of[v] = lp.add_var(Rat(0), Rat(1));
  for (int e = 0; e < inst.ground_size(); ++e) {
    LpRow row;
    for (int v : inst.containing[e])  // ascending ids, so coefs stay sorted
      if (var_of[v] >= 0) row.coef.emplace_back(var_of[v], Rat(1));
    if (row.coef.empty()) return std::nullopt;
    row.rel = Rel::Ge;
    row.rhs = 1;
    row.tag = RowTag::Feasibility;
    lp.add_row(std::move(row));
  }
  for (int i = 1; i <= u.T; ++i) {
    LpRow row;
    for (int v : u.group(i)) row.coef.emplace_back(var_of[v], Rat(1));
    if (row.coef.empty()) continue;
    row.rel = Rel::Le;
    row.rhs = pow2(i);
    row.tag = RowTag::Budget;
    lp.add_row(std::move(row));
  }
  const LpResult res = solve_feasible_vertex(lp);
  if (!res.feasible) return std::nullopt;
  const int L = coverage_log(inst);
  std::vector<Rat> prob(u.n, Rat(0));
  for (int v = 0; v < u.n; ++v)
    if (var_of[v] >= 0) prob[v] = keep_probability(res.vertex.x[var_of[v]], L);
  return prob;
}

SolveReport solve_setcover(const SetCoverInstance& inst, std::uint64_t seed) {
  const GroupedUniverse& u = inst.universe;
  // Infeasible input outranks every other certificate: an element in no
  // set stays uncovered no matter which sets are chosen.
  for (int e = 0; e < inst.ground_size(); ++e) {
    if (inst.containing[e].empty()) {
      SolveReport rep = SolveReport::infeasible_input(
          "ground element " + std::to_string(e) + " lies in no set");
      rep.seed = seed;
      return rep;
    }
  }
  for (int e = 0; e < inst.ground_size(); ++e) {
    bool usable = false;
    for (int v : inst.containing[e])
      if (u.group_of[v] != 0) {
        usable = true;
        break;
      }
    if (!usable) {
      SolveReport rep = SolveReport::no_valid_solution(
          "ground element " + std::to_string(e) +
          " is covered only by ungrouped sets");
      rep.seed = seed;
      return rep;
    }
  }

  const auto prob = cover_probabilities(inst);
  if (!prob) {
    SolveReport rep = SolveReport::no_valid_solution(
        "the covering relaxation with group budgets 2^i is infeasible");
    rep.seed = seed;
    return rep;
  }

  const int L = coverage_log(inst);
  const Rat cap = Rat(4 * L);
  logf("solve_setcover: ", u.n, " sets, ", inst.ground_size(),
       " ground elements, L=", L);

  std::vector<Solution> out(kSetCoverTrialCap);
  const auto accept = [&](std::int64_t t) {
    std::vector<char> kept =
        sample_sets(*prob, trial_seed(seed, static_cast<int>(t)));
    Solution cand;
    for (int v = 0; v < u.n; ++v)
      if (kept[v]) cand.chosen.push_back(v);
    out[t] = cand;
    return inst.covers(cand) && check_valid(u, cand, cap);
  };
  const auto win = par_first_success(kSetCoverTrialCap, accept);
  if (!win) {
    const Solution& last = out.back();
    throw std::runtime_error(
        "set cover rounding failed " + std::to_string(kSetCoverTrialCap) +
        " trials at seed " + std::to_string(seed) + "; last sample kept " +
        std::to_string(last.size()) + " sets, covered=" +
        (inst.covers(last) ? "yes" : "no") +
        ", validity=" + validity_factor(u, last).str());
  }

  SolveReport rep = SolveReport::solved(u, out[*win]);
  rep.seed = seed;
  rep.note = "rounding trial " + std::to_string(*win) + " succeeded";
  if (rep.validity > cap)
    throw std::logic_error("a successful round must stay within 4L budgets");
  logf("solve_setcover: trial ", *win, " kept ", rep.solution.size(),
       " sets, validity ", rep.validity);
  return rep;
}

}  // namespace mn
