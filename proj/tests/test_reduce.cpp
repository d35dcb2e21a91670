#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "mnorm/harness.hpp"
#include "mnorm/parallel.hpp"
#include "mnorm/reduce.hpp"

using namespace mn;

namespace {

std::vector<Rat> random_values(std::mt19937_64& rng, int n, int hi) {
  std::uniform_int_distribution<int> num(0, hi), den(1, 3);
  std::vector<Rat> v;
  for (int i = 0; i < n; ++i) v.emplace_back(Rat(num(rng), den(rng)));
  return v;
}

// A small zoo of feasibility predicates used for exhaustive cross-checks.
SubsetSystem random_system(std::mt19937_64& rng, int n) {
  SubsetSystem sys;
  sys.n = n;
  switch (rng() % 4) {
    case 0: {  // must contain a fixed set
      std::uint32_t need = static_cast<std::uint32_t>(rng()) & ((1u << n) - 1);
      sys.feasible = [need](std::uint32_t m) { return (m & need) == need; };
      break;
    }
    case 1: {  // at least k elements
      int k = 1 + static_cast<int>(rng() % n);
      sys.feasible = [k](std::uint32_t m) { return __builtin_popcount(m) >= k; };
      break;
    }
    case 2: {  // one element from each consecutive pair
      sys.feasible = [n](std::uint32_t m) {
        for (int i = 0; i + 1 < n; i += 2)
          if (!(m >> i & 1u) && !(m >> (i + 1) & 1u)) return false;
        return true;
      };
      break;
    }
    default: {  // exactly k elements: not monotone
      int k = 1 + static_cast<int>(rng() % n);
      sys.feasible = [k](std::uint32_t m) { return __builtin_popcount(m) == k; };
      break;
    }
  }
  return sys;
}

// The snapped profile of a concrete subset: the threshold vector that the
// sweep must contain for the subset to survive grouping. Mirrors the
// guessing rule independently of the library implementation.
ThresholdVector profile_of(const std::vector<Rat>& values,
                           const std::vector<int>& chosen, const Rat& eps,
                           const std::vector<int>& anchors) {
  std::vector<Rat> sorted;
  for (int e : chosen) sorted.push_back(values[e]);
  std::sort(sorted.begin(), sorted.end(), std::greater<Rat>());
  ThresholdVector tv;
  tv.o1_guess = sorted.empty() ? Rat(0) : sorted[0];
  Rat base = 1 + eps;
  Rat floor_v = eps * tv.o1_guess / static_cast<int>(values.size());
  auto snap = [&](const Rat& o) {
    Rat p = 1;
    if (p < o) {
      while (p < o) p *= base;
    } else {
      while (p / base >= o) p /= base;
    }
    return p;
  };
  for (int a : anchors) {
    Rat o = a <= static_cast<int>(sorted.size()) ? sorted[a - 1] : Rat(0);
    if (tv.o1_guess == 0) {
      tv.t.push_back(0);
    } else if (a == 1) {
      tv.t.push_back(snap(tv.o1_guess));  // anchor 1 is always pinned
    } else if (o < floor_v) {
      tv.t.push_back(0);
    } else {
      tv.t.push_back(snap(o));
    }
  }
  return tv;
}

bool same_tv(const ThresholdVector& a, const ThresholdVector& b) {
  return a.o1_guess == b.o1_guess && a.t == b.t;
}

}  // namespace

TEST_CASE("anchor positions") {
  CHECK(pos_set(1) == std::vector<int>{1});
  CHECK(pos_set(3) == std::vector<int>{1, 2, 3});
  CHECK(pos_set(8) == std::vector<int>{1, 2, 4, 8});
  CHECK(pos_set(14) == std::vector<int>{1, 2, 4, 8, 14});
  CHECK(pos_advance(pos_set(14), 3) == 4);
  CHECK(pos_advance(pos_set(14), 9) == 14);
  CHECK(pos_advance(pos_set(14), 1) == 1);

  CHECK(pos_set_delta(10, Rat(1)) == std::vector<int>{1, 2, 4, 8, 10});
  CHECK(pos_set_delta(10, Rat(1, 2)) ==
        std::vector<int>{1, 2, 3, 4, 6, 8, 10});
  CHECK(pos_set_delta(1, Rat(1)) == std::vector<int>{1});
}

TEST_CASE("ordered weight rounding stays within its sandwich") {
  std::vector<int> anchors = {1, 2, 4, 6};
  std::vector<Rat> w = {Rat(10), Rat(8), Rat(5), Rat(4), Rat(2), Rat(1)};
  auto wr = round_ordered_weights(w, anchors);
  CHECK(wr == std::vector<Rat>{Rat(10), Rat(8), Rat(4), Rat(4), Rat(1), Rat(1)});

  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 80; ++iter) {
    int n = 1 + static_cast<int>(rng() % 9);
    Rat delta(1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2));
    auto anchors_d = pos_set_delta(n, delta);
    std::vector<Rat> weights = random_values(rng, n, 9);
    std::sort(weights.begin(), weights.end(), std::greater<Rat>());
    auto rounded = round_ordered_weights(weights, anchors_d);
    auto v = random_values(rng, n, 9);
    Rat lo = eval_norm(NormSpec::ordered(rounded), v);
    Rat hi = eval_norm(NormSpec::ordered(weights), v);
    CHECK(lo <= hi);
    CHECK(hi <= (1 + delta) * lo);
  }
}

TEST_CASE("threshold enumeration structure") {
  // Single element of value 5, eps = 1: the guess snaps into [5, 10].
  auto tvs = enumerate_thresholds({Rat(5)}, Rat(1), pos_set(1));
  REQUIRE(tvs.size() == 2);
  CHECK(tvs[0].t == std::vector<Rat>{Rat(0)});
  CHECK(tvs[1].t.size() == 1);
  CHECK(tvs[1].t[0] >= Rat(5));
  CHECK(tvs[1].t[0] <= Rat(10));
  CHECK(tvs[1].o1_guess == Rat(5));

  std::mt19937_64 rng(29);
  for (int iter = 0; iter < 30; ++iter) {
    int n = 1 + static_cast<int>(rng() % 7);
    auto values = random_values(rng, n, 12);
    Rat eps(1 + static_cast<int>(rng() % 2));
    auto anchors = pos_set(n);
    auto list = enumerate_thresholds(values, eps, anchors);
    for (const auto& tv : list) {
      REQUIRE(tv.t.size() == anchors.size());
      for (size_t k = 0; k + 1 < tv.t.size(); ++k)
        CHECK(tv.t[k] >= tv.t[k + 1]);
      if (tv.o1_guess == 0) continue;
      // Every nonzero entry below the pinned top is a ladder value, and the
      // ladder stops at the zeroing floor.  The top itself can sit below the
      // floor when eps > n, so it is exempt.
      for (const Rat& t : tv.t) {
        if (t == 0) continue;
        CHECK(t <= tv.t[0]);
        CHECK((t == tv.t[0] || t >= eps * tv.o1_guess / n));
      }
      CHECK(tv.t[0] >= tv.o1_guess);
      CHECK(tv.t[0] <= (1 + eps) * tv.o1_guess);
    }
  }
}

TEST_CASE("every subset's own snapped profile is enumerated and 1-valid") {
  std::mt19937_64 rng(37);
  for (int iter = 0; iter < 60; ++iter) {
    // n = 1 with eps up to 4 exercises the regime where the zeroing floor
    // exceeds the pinned top threshold.
    int n = 1 + static_cast<int>(rng() % 7);
    auto values = random_values(rng, n, 10);
    Rat eps(1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 2));
    auto anchors = pos_set(n);
    auto list = enumerate_thresholds(values, eps, anchors);

    std::vector<int> chosen;
    for (int e = 0; e < n; ++e)
      if (rng() % 2) chosen.push_back(e);
    if (chosen.empty()) chosen.push_back(static_cast<int>(rng() % n));

    ThresholdVector want = profile_of(values, chosen, eps, anchors);
    bool found = false;
    for (const auto& tv : list)
      if (same_tv(tv, want)) found = true;
    CHECK_MESSAGE(found, "snapped profile missing from enumeration");

    GroupedInstance gi = build_groups(values, want, eps);
    Solution s;
    s.chosen = chosen;
    for (int e : chosen) CHECK_FALSE(gi.excluded[e]);
    CHECK(check_valid(gi.universe, s, Rat(1)));
    // Grouping invariant: everything is excluded xor grouped.
    for (int e = 0; e < n; ++e)
      CHECK((gi.excluded[e] ? gi.universe.group_of[e] == 0
                            : gi.universe.group_of[e] > 0));
  }
}

TEST_CASE("group construction on a worked example") {
  std::vector<Rat> values = {Rat(10), Rat(5), Rat(3), Rat(1)};
  ThresholdVector tv{{Rat(16), Rat(4), Rat(1)}, Rat(10)};
  GroupedInstance gi = build_groups(values, tv, Rat(1));
  CHECK(gi.universe.T == 2);
  CHECK(gi.universe.group(1) == std::vector<int>{0, 1});
  CHECK(gi.universe.group(2) == std::vector<int>{2, 3});
  CHECK(std::count(gi.excluded.begin(), gi.excluded.end(), 1) == 0);

  ThresholdVector low{{Rat(2), Rat(1), Rat(0)}, Rat(2)};
  GroupedInstance gl = build_groups(values, low, Rat(1));
  CHECK(gl.excluded[0]);
  CHECK(gl.excluded[1]);
  CHECK(gl.excluded[2]);
  CHECK_FALSE(gl.excluded[3]);
  CHECK(gl.universe.group_of[3] == 2);
}

TEST_CASE("coarsened profile from thresholds") {
  // anchors of n=6 are {1,2,4,6}
  ThresholdVector tv{{Rat(8), Rat(4), Rat(2), Rat(1)}, Rat(8)};
  auto g = g_of_t(tv, pos_set(6), 6);
  CHECK(g == std::vector<Rat>{Rat(8), Rat(4), Rat(2), Rat(2), Rat(1), Rat(1)});
}

TEST_CASE("infeasible systems are certified by the sweep") {
  SubsetSystem none;
  none.n = 4;
  none.feasible = [](std::uint32_t) { return false; };
  std::vector<Rat> values = {Rat(3), Rat(1), Rat(4), Rat(1)};
  auto res = minnorm_via_logbgt(values, NormSpec::sum(), Rat(1),
                                make_exhaustive_logbgt(none), Rat(1));
  CHECK(res.report.certificate == Certificate::InfeasibleInput);
  CHECK_FALSE(res.norm_value.has_value());
}

TEST_CASE("norm minimization via budgeted solver matches brute force factor") {
  std::mt19937_64 rng(41);
  int solved_cases = 0;
  for (int iter = 0; iter < 40; ++iter) {
    int n = 3 + static_cast<int>(rng() % 5);
    auto values = random_values(rng, n, 9);
    SubsetSystem sys = random_system(rng, n);
    Rat eps(1 + static_cast<int>(rng() % 2));

    std::vector<NormSpec> norms = {NormSpec::sum(), NormSpec::max(),
                                   NormSpec::top(std::min(2, n))};
    std::vector<Rat> w = random_values(rng, n, 6);
    std::sort(w.begin(), w.end(), std::greater<Rat>());
    norms.push_back(NormSpec::ordered(w));

    for (const NormSpec& norm : norms) {
      auto brute = brute_force_minnorm(sys, norm, values);
      auto res = minnorm_via_logbgt(values, norm, eps,
                                    make_exhaustive_logbgt(sys), Rat(1));
      if (!brute) {
        CHECK(res.report.certificate == Certificate::InfeasibleInput);
        continue;
      }
      REQUIRE(res.report.certificate == Certificate::Solved);
      REQUIRE(res.norm_value.has_value());
      CHECK(*res.norm_value >= brute->second);
      CHECK(*res.norm_value <= (4 + eps) * brute->second);
      ++solved_cases;
    }
  }
  CHECK(solved_cases > 60);
}

TEST_CASE("budget certificates from a min-sum solver") {
  std::mt19937_64 rng(43);
  for (int iter = 0; iter < 60; ++iter) {
    int n = 2 + static_cast<int>(rng() % 7);
    int T = GroupedUniverse::default_T(n);
    std::vector<std::vector<int>> groups(T);
    for (int e = 0; e < n; ++e) groups[rng() % T].push_back(e);
    GroupedUniverse u(n, std::move(groups));
    std::vector<char> excluded(n, 0);
    for (int e = 0; e < n; ++e) excluded[e] = rng() % 5 == 0;
    SubsetSystem sys = random_system(rng, n);

    auto rep = logbgt_via_minsum(u, excluded, make_exhaustive_minsum(sys), Rat(1));
    auto bestv = brute_force_validity(sys, u, excluded);
    if (!bestv) {
      CHECK(rep.certificate == Certificate::InfeasibleInput);
      continue;
    }
    if (rep.certificate == Certificate::NoValidSolution) {
      // Sound only if no 1-valid solution exists.
      CHECK(*bestv > 1);
    } else {
      REQUIRE(rep.certificate == Certificate::Solved);
      CHECK(rep.validity <= Rat(u.T));
      for (int e : rep.solution.chosen) CHECK_FALSE(excluded[e]);
    }
    if (*bestv <= 1) CHECK(rep.certificate == Certificate::Solved);
  }
}

TEST_CASE("top-l minimization with an exact solver is exact") {
  std::mt19937_64 rng(47);
  for (int iter = 0; iter < 50; ++iter) {
    int n = 2 + static_cast<int>(rng() % 6);
    auto values = random_values(rng, n, 9);
    SubsetSystem sys = random_system(rng, n);
    int ell = 1 + static_cast<int>(rng() % n);
    auto got = topl_minimize(values, ell, make_exhaustive_weighted(sys));
    auto brute = brute_force_minnorm(sys, NormSpec::top(ell), values);
    REQUIRE(got.has_value() == brute.has_value());
    if (got) CHECK(got->value == brute->second);
  }
}

TEST_CASE("ordered norm minimization stays within its factor") {
  std::mt19937_64 rng(53);
  for (int iter = 0; iter < 30; ++iter) {
    int n = 2 + static_cast<int>(rng() % 5);
    auto values = random_values(rng, n, 9);
    SubsetSystem sys = random_system(rng, n);
    std::vector<Rat> w = random_values(rng, n, 6);
    std::sort(w.begin(), w.end(), std::greater<Rat>());
    Rat delta(1), eps(1);
    auto got = ordered_minimize(values, w, delta, eps,
                                make_exhaustive_weighted(sys));
    auto brute = brute_force_minnorm(sys, NormSpec::ordered(w), values);
    REQUIRE(got.has_value() == brute.has_value());
    if (!got) continue;
    CHECK(got->value >= brute->second);
    // alpha (1+delta)^2 (1+2 eps) with alpha = 1
    CHECK(got->value <= (1 + delta) * (1 + delta) * (1 + 2 * eps) * brute->second);
  }
}

TEST_CASE("parallel sweep matches the serial reference") {
  std::mt19937_64 rng(59);
  int n = 7;
  auto values = random_values(rng, n, 9);
  SubsetSystem sys = random_system(rng, n);
  NormSpec norm = NormSpec::top(2);

  set_parallel_workers(1);
  auto serial = minnorm_via_logbgt(values, norm, Rat(1),
                                   make_exhaustive_logbgt(sys), Rat(1));
  set_parallel_workers(4);
  auto parallel = minnorm_via_logbgt(values, norm, Rat(1),
                                     make_exhaustive_logbgt(sys), Rat(1));
  set_parallel_workers(1);
  CHECK(serial.report.certificate == parallel.report.certificate);
  if (serial.report.certificate == Certificate::Solved) {
    CHECK(serial.report.solution.chosen == parallel.report.solution.chosen);
    CHECK(*serial.norm_value == *parallel.norm_value);
  }
}
