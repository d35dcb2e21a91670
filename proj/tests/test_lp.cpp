#include "doctest.h"

#include <optional>
#include <random>
#include <vector>

#include "mnorm/lp.hpp"

using namespace mn;

namespace {

// Independent oracle for 2-variable LPs: every vertex of the feasible
// region lies on two tight constraints, so enumerate all pairs (rows and
// bounds), solve the 2x2 systems exactly, filter by feasibility and take
// the best objective. Assumes a bounded region (tests use box bounds).
struct Constraint2 {
  Rat a0, a1, b;
  Rel rel;
};

std::vector<Constraint2> all_constraints(const LinearProgram& lp) {
  std::vector<Constraint2> cs;
  for (const LpRow& r : lp.rows) {
    Constraint2 c{0, 0, r.rhs, r.rel};
    for (const auto& [j, a] : r.coef) (j == 0 ? c.a0 : c.a1) = a;
    cs.push_back(c);
  }
  cs.push_back({1, 0, lp.lower[0], Rel::Ge});
  cs.push_back({0, 1, lp.lower[1], Rel::Ge});
  if (lp.has_upper[0]) cs.push_back({1, 0, lp.upper[0], Rel::Le});
  if (lp.has_upper[1]) cs.push_back({0, 1, lp.upper[1], Rel::Le});
  return cs;
}

bool feasible_point(const std::vector<Constraint2>& cs, const Rat& x,
                    const Rat& y) {
  for (const auto& c : cs) {
    Rat lhs = c.a0 * x + c.a1 * y;
    if (c.rel == Rel::Le && lhs > c.b) return false;
    if (c.rel == Rel::Ge && lhs < c.b) return false;
    if (c.rel == Rel::Eq && lhs != c.b) return false;
  }
  return true;
}

struct Oracle2Result {
  bool feasible = false;
  Rat best;  // min objective over vertices
};

Oracle2Result oracle_2var(const LinearProgram& lp) {
  auto cs = all_constraints(lp);
  Rat c0 = 0, c1 = 0;
  for (const auto& [j, a] : lp.objective) (j == 0 ? c0 : c1) = a;
  Oracle2Result out;
  for (size_t i = 0; i < cs.size(); ++i)
    for (size_t j = i + 1; j < cs.size(); ++j) {
      Rat det = cs[i].a0 * cs[j].a1 - cs[i].a1 * cs[j].a0;
      if (det == 0) continue;
      Rat x = (cs[i].b * cs[j].a1 - cs[i].a1 * cs[j].b) / det;
      Rat y = (cs[i].a0 * cs[j].b - cs[i].b * cs[j].a0) / det;
      if (!feasible_point(cs, x, y)) continue;
      Rat val = c0 * x + c1 * y;
      if (!out.feasible || val < out.best) out.best = val;
      out.feasible = true;
    }
  return out;
}

LinearProgram box2(const Rat& hi0, const Rat& hi1) {
  LinearProgram lp;
  lp.add_var(Rat(0), hi0);
  lp.add_var(Rat(0), hi1);
  return lp;
}

}  // namespace

TEST_CASE("feasible vertex on a simplex facet") {
  LinearProgram lp;
  lp.add_var(Rat(0));
  lp.add_var(Rat(0));
  lp.add_row({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Eq, Rat(1), RowTag::Other});
  auto r = solve_feasible_vertex(lp);
  REQUIRE(r.feasible);
  std::string why;
  CHECK_MESSAGE(audit_vertex(lp, r.vertex, &why), why);
  CHECK(r.vertex.x[0] + r.vertex.x[1] == Rat(1));
  CHECK((r.vertex.x[0] == 0 || r.vertex.x[1] == 0));
  CHECK(r.vertex.tight.size() == 2);
}

TEST_CASE("infeasibility is certified") {
  LinearProgram lp = box2(Rat(1), Rat(1));
  lp.add_row({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Le, Rat(1), RowTag::Other});
  lp.add_row({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Ge, Rat(2), RowTag::Other});
  CHECK_FALSE(solve_feasible_vertex(lp).feasible);

  LinearProgram eq = box2(Rat(2), Rat(2));
  eq.add_row({{{0, Rat(1)}}, Rel::Eq, Rat(3), RowTag::Other});
  CHECK_FALSE(solve_feasible_vertex(eq).feasible);
}

TEST_CASE("optimization agrees with the 2-variable oracle") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> coef(-3, 3), rhs(-2, 6), nr(1, 4);
  int solved = 0, infeasible = 0;
  for (int iter = 0; iter < 400; ++iter) {
    LinearProgram lp = box2(Rat(1 + iter % 4), Rat(2));
    int m = nr(rng);
    for (int r = 0; r < m; ++r) {
      LpRow row;
      int a0 = coef(rng), a1 = coef(rng);
      if (a0) row.coef.emplace_back(0, Rat(a0));
      if (a1) row.coef.emplace_back(1, Rat(a1));
      row.rel = static_cast<Rel>(rng() % 3);
      if (row.coef.empty()) continue;
      // Equalities through a random box point keep things often-feasible.
      if (row.rel == Rel::Eq) {
        Rat px(static_cast<int>(rng() % 3), 2), py(static_cast<int>(rng() % 3), 2);
        row.rhs = Rat(a0) * px + Rat(a1) * py;
      } else {
        row.rhs = Rat(rhs(rng));
      }
      lp.add_row(std::move(row));
    }
    int c0 = coef(rng), c1 = coef(rng);
    if (c0) lp.objective.emplace_back(0, Rat(c0));
    if (c1) lp.objective.emplace_back(1, Rat(c1));

    Oracle2Result expect = oracle_2var(lp);
    LpResult got = solve_min(lp);
    REQUIRE(got.feasible == expect.feasible);
    if (!expect.feasible) {
      ++infeasible;
      continue;
    }
    ++solved;
    std::string why;
    CHECK_MESSAGE(audit_vertex(lp, got.vertex, &why), why);
    CHECK(got.vertex.objective_value == expect.best);
  }
  // Make sure the fuzz covered both outcomes.
  CHECK(solved > 50);
  CHECK(infeasible > 50);
}

TEST_CASE("unbounded objective is reported") {
  LinearProgram lp;
  lp.add_var(Rat(0));
  lp.objective.emplace_back(0, Rat(-1));
  CHECK_THROWS_AS(solve_min(lp), std::runtime_error);
}

TEST_CASE("unbounded rays still land on a vertex") {
  // Finite lower bounds keep every feasible region pointed, so a vertex
  // exists whenever the region is nonempty, even without upper bounds.
  LinearProgram lp;
  lp.add_var(Rat(0));
  lp.add_var(Rat(0));
  lp.add_row({{{0, Rat(1)}, {1, Rat(-1)}}, Rel::Eq, Rat(0), RowTag::Other});
  auto r = solve_feasible_vertex(lp);
  REQUIRE(r.feasible);
  CHECK(r.vertex.x[0] == 0);
  CHECK(r.vertex.x[1] == 0);

  LinearProgram ray;
  ray.add_var(Rat(0));
  ray.add_var(Rat(0));
  ray.add_row({{{0, Rat(1)}, {1, Rat(-1)}}, Rel::Eq, Rat(-1), RowTag::Other});
  ray.add_row({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Ge, Rat(3), RowTag::Other});
  auto r2 = solve_feasible_vertex(ray);
  REQUIRE(r2.feasible);
  std::string why;
  CHECK_MESSAGE(audit_vertex(ray, r2.vertex, &why), why);
}

TEST_CASE("degenerate and redundant rows still give an audited vertex") {
  LinearProgram lp = box2(Rat(4), Rat(4));
  // Three copies of the same facet plus a redundant sum row.
  for (int k = 0; k < 3; ++k)
    lp.add_row({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Le, Rat(4), RowTag::Other});
  lp.add_row({{{0, Rat(2)}, {1, Rat(2)}}, Rel::Le, Rat(8), RowTag::Other});
  lp.objective.emplace_back(0, Rat(-1));
  lp.objective.emplace_back(1, Rat(-1));
  auto r = solve_min(lp);
  REQUIRE(r.feasible);
  std::string why;
  CHECK_MESSAGE(audit_vertex(lp, r.vertex, &why), why);
  CHECK(r.vertex.objective_value == Rat(-4));
}

TEST_CASE("vertices with equality rows restrict cleanly") {
  LinearProgram lp;
  for (int j = 0; j < 4; ++j) lp.add_var(Rat(0), Rat(1));
  lp.add_row({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Eq, Rat(1), RowTag::Degree});
  lp.add_row({{{2, Rat(1)}, {3, Rat(1)}}, Rel::Eq, Rat(1), RowTag::Degree});
  lp.add_row({{{0, Rat(1)}, {2, Rat(1)}}, Rel::Le, Rat(1), RowTag::Budget});
  auto r = solve_feasible_vertex(lp);
  REQUIRE(r.feasible);

  // Fix the integral coordinates and keep the rest.
  std::vector<int> fixed;
  for (int j = 0; j < 4; ++j)
    if (r.vertex.x[j] == 0 || r.vertex.x[j] == 1) fixed.push_back(j);
  RestrictedLp res = restrict(lp, r.vertex.x, fixed);
  CHECK(res.lp.num_vars() + static_cast<int>(fixed.size()) == 4);
  CHECK(res.lp.rows.size() == 3);
  CHECK(res.lp.rows[2].tag == RowTag::Budget);
  if (res.lp.num_vars() > 0) {
    VertexSolution v = restrict_vertex(res, r.vertex.x);
    std::string why;
    CHECK_MESSAGE(audit_vertex(res.lp, v, &why), why);
  }
}

TEST_CASE("restriction rejects inconsistent fixings") {
  LinearProgram lp;
  lp.add_var(Rat(0), Rat(1));
  lp.add_var(Rat(0), Rat(1));
  lp.add_row({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Eq, Rat(2), RowTag::Other});
  std::vector<Rat> vals = {Rat(0), Rat(0)};
  CHECK_THROWS_AS(restrict(lp, vals, {0, 1}), std::invalid_argument);
}

TEST_CASE("fractional counting uses strict interiors") {
  LinearProgram lp;
  lp.add_var(Rat(0), Rat(1));
  lp.add_var(Rat(0), Rat(1));
  lp.add_var(Rat(0), Rat(1));
  std::vector<Rat> x = {Rat(1), Rat(0), Rat(1, 2)};
  CHECK(count_fractional(lp, x, {0, 1, 2}) == 1);
  CHECK(count_fractional(lp, x, {0, 1}) == 0);
  CHECK(count_fractional(lp, x, {2}) == 1);
}

TEST_CASE("bipartite degree systems have integral vertices") {
  // Equality degree rows over a bipartite edge set form a totally
  // unimodular system, so every vertex must be 0/1. Brute-force the
  // feasibility side to make sure infeasible answers are honest too.
  std::mt19937_64 rng(31);
  int integral_seen = 0, infeasible_seen = 0;
  for (int iter = 0; iter < 120; ++iter) {
    int nl = 1 + static_cast<int>(rng() % 3);
    int nr = 1 + static_cast<int>(rng() % 3);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < nl; ++a)
      for (int b = 0; b < nr; ++b)
        if (rng() % 2) edges.emplace_back(a, b);
    LinearProgram lp;
    for (size_t e = 0; e < edges.size(); ++e) lp.add_var(Rat(0), Rat(1));
    for (int a = 0; a < nl; ++a) {
      LpRow row{{}, Rel::Eq, Rat(1), RowTag::Degree};
      for (size_t e = 0; e < edges.size(); ++e)
        if (edges[e].first == a) row.coef.emplace_back(static_cast<int>(e), Rat(1));
      lp.add_row(std::move(row));
    }
    for (int b = 0; b < nr; ++b) {
      LpRow row{{}, Rel::Eq, Rat(1), RowTag::Degree};
      for (size_t e = 0; e < edges.size(); ++e)
        if (edges[e].second == b) row.coef.emplace_back(static_cast<int>(e), Rat(1));
      lp.add_row(std::move(row));
    }

    // Oracle: does a perfect matching exist?
    bool has_pm = false;
    if (nl == nr) {
      std::vector<int> perm(nl);
      for (int i = 0; i < nl; ++i) perm[i] = i;
      do {
        bool ok = true;
        for (int a = 0; a < nl && ok; ++a) {
          bool found = false;
          for (auto& e : edges)
            if (e.first == a && e.second == perm[a]) found = true;
          ok = found;
        }
        if (ok) has_pm = true;
      } while (!has_pm && std::next_permutation(perm.begin(), perm.end()));
    }

    auto r = solve_feasible_vertex(lp);
    CHECK(r.feasible == has_pm);
    if (!r.feasible) {
      ++infeasible_seen;
      continue;
    }
    ++integral_seen;
    std::string why;
    CHECK_MESSAGE(audit_vertex(lp, r.vertex, &why), why);
    for (const Rat& v : r.vertex.x) CHECK((v == 0 || v == 1));
  }
  CHECK(integral_seen > 20);
  CHECK(infeasible_seen > 20);
}

TEST_CASE("lp textual dump is stable") {
  LinearProgram lp = box2(Rat(1), Rat(1));
  lp.add_row({{{0, Rat(1)}, {1, Rat(2)}}, Rel::Le, Rat(3), RowTag::Budget});
  lp.objective.emplace_back(1, Rat(1));
  std::string text = dump_lp(lp);
  CHECK(text.find("r0 [budget] + 1 x0 + 2 x1 <= 3") != std::string::npos);
  CHECK(text.find("min + 1 x1") != std::string::npos);
}
