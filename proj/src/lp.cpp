#include "mnorm/lp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "mnorm/log.hpp"

namespace mn {

namespace {

// Sparse row: (column, value) pairs sorted by column, values nonzero.
using SpRow = std::vector<std::pair<int, Rat>>;

Rat sp_get(const SpRow& r, int c) {
  auto it = std::lower_bound(
      r.begin(), r.end(), c,
      [](const std::pair<int, Rat>& e, int col) { return e.first < col; });
  return (it != r.end() && it->first == c) ? it->second : Rat(0);
}

void sp_scale(SpRow& r, const Rat& f) {
  for (auto& e : r) e.second *= f;
}

// r += f * s
void sp_axpy(SpRow& r, const Rat& f, const SpRow& s) {
  SpRow out;
  out.reserve(r.size() + s.size());
  size_t i = 0, j = 0;
  while (i < r.size() || j < s.size()) {
    if (j == s.size() || (i < r.size() && r[i].first < s[j].first)) {
      out.push_back(r[i++]);
    } else if (i == r.size() || s[j].first < r[i].first) {
      Rat v = f * s[j].second;
      if (v != 0) out.emplace_back(s[j].first, std::move(v));
      ++j;
    } else {
      Rat v = r[i].second + f * s[j].second;
      if (v != 0) out.emplace_back(r[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  r = std::move(out);
}

constexpr char kAtLo = 0, kAtHi = 1, kBasic = 2;

// Bounded-variable primal simplex over exact rationals, Bland's rule.
// Columns: structural variables, then one slack per row (coefficient +1),
// then artificials appended by phase 1.
struct Simplex {
  const LinearProgram& L;
  int n, m, C;
  std::vector<Rat> lo, hi;
  std::vector<char> haslo, hashi, pinned;
  std::vector<SpRow> tab;   // current tableau rows (B^-1 A)
  std::vector<Rat> bval;    // values of basic variables per row
  std::vector<int> basis;   // column basic in each row
  std::vector<char> state;  // per column
  std::vector<Rat> objrow;  // reduced costs for the active phase
  int first_art = 0;

  explicit Simplex(const LinearProgram& lp)
      : L(lp), n(lp.num_vars()), m(static_cast<int>(lp.rows.size())) {
    C = n + m;
    lo.resize(C);
    hi.resize(C);
    haslo.assign(C, 0);
    hashi.assign(C, 0);
    pinned.assign(C, 0);
    state.assign(C, kAtLo);
    for (int j = 0; j < n; ++j) {
      lo[j] = L.lower[j];
      haslo[j] = 1;
      if (L.has_upper[j]) {
        hi[j] = L.upper[j];
        hashi[j] = 1;
        if (lo[j] == hi[j]) pinned[j] = 1;
      }
    }
    tab.resize(m);
    bval.resize(m);
    basis.resize(m);
    for (int r = 0; r < m; ++r) {
      const LpRow& row = L.rows[r];
      SpRow t(row.coef.begin(), row.coef.end());
      int sc = n + r;
      t.emplace_back(sc, 1);
      tab[r] = std::move(t);
      basis[r] = sc;
      state[sc] = kBasic;
      switch (row.rel) {
        case Rel::Le:
          lo[sc] = 0;
          haslo[sc] = 1;
          break;
        case Rel::Ge:
          hi[sc] = 0;
          hashi[sc] = 1;
          break;
        case Rel::Eq:
          lo[sc] = 0;
          hi[sc] = 0;
          haslo[sc] = hashi[sc] = 1;
          pinned[sc] = 1;
          break;
      }
      Rat v = row.rhs;
      for (const auto& [c, a] : row.coef) v -= a * lo[c];
      bval[r] = v;
    }
    first_art = C;
  }

  Rat bound_value(int c) const { return state[c] == kAtHi ? hi[c] : lo[c]; }

  Rat col_value(int c) const {
    if (state[c] != kBasic) return bound_value(c);
    for (int r = 0; r < m; ++r)
      if (basis[r] == c) return bval[r];
    throw std::logic_error("lp: basic column without row");
  }

  // Adds an artificial for every row whose basic slack sits outside its
  // bounds, making the starting point feasible for the extended system.
  void add_artificials() {
    for (int r = 0; r < m; ++r) {
      int sc = basis[r];
      Rat v = bval[r];
      bool low = haslo[sc] && v < lo[sc];
      bool high = hashi[sc] && v > hi[sc];
      if (!low && !high) continue;
      // Slack snaps to 0 in every violated case; the artificial absorbs v.
      int sign = v > 0 ? 1 : -1;
      int ac = C++;
      lo.push_back(0);
      hi.push_back(0);
      haslo.push_back(1);
      hashi.push_back(0);
      pinned.push_back(0);
      state.push_back(kBasic);
      if (sign < 0) sp_scale(tab[r], -1);
      tab[r].emplace_back(ac, 1);  // column index is largest so far
      basis[r] = ac;
      state[sc] = (L.rows[r].rel == Rel::Ge) ? kAtHi : kAtLo;
      bval[r] = sign < 0 ? -v : v;
    }
  }

  void set_phase1_objective() {
    objrow.assign(C, Rat(0));
    for (int c = first_art; c < C; ++c) objrow[c] = 1;
    for (int r = 0; r < m; ++r) {
      Rat f = objrow[basis[r]];
      if (f != 0)
        for (const auto& [c, a] : tab[r]) objrow[c] -= f * a;
    }
  }

  void set_phase2_objective() {
    objrow.assign(C, Rat(0));
    for (const auto& [c, a] : L.objective) objrow[c] += a;
    for (int r = 0; r < m; ++r) {
      Rat f = objrow[basis[r]];
      if (f != 0)
        for (const auto& [c, a] : tab[r]) objrow[c] -= f * a;
    }
  }

  int pick_entering() const {
    for (int c = 0; c < C; ++c) {
      if (pinned[c] || state[c] == kBasic) continue;
      if (state[c] == kAtLo && objrow[c] < 0) return c;
      if (state[c] == kAtHi && objrow[c] > 0) return c;
    }
    return -1;
  }

  // One simplex iteration on the active objective. Returns false when no
  // entering column exists (phase optimal). Throws on an unbounded ray.
  bool iterate(bool phase2) {
    int e = pick_entering();
    if (e < 0) return false;
    int dir = state[e] == kAtLo ? 1 : -1;

    std::vector<std::pair<int, Rat>> colent;  // (row, coefficient of e)
    for (int r = 0; r < m; ++r) {
      Rat te = sp_get(tab[r], e);
      if (te != 0) colent.emplace_back(r, std::move(te));
    }

    bool limited = false, flip = false;
    Rat theta;
    int leave_row = -1;
    char hit_side = kAtLo;
    for (const auto& [r, te] : colent) {
      Rat rate = -dir * te;  // d bval[r] / d theta
      int b = basis[r];
      if (rate > 0 && hashi[b]) {
        Rat t = (hi[b] - bval[r]) / rate;
        if (!limited || t < theta ||
            (t == theta && leave_row >= 0 && b < basis[leave_row])) {
          limited = true;
          theta = t;
          leave_row = r;
          hit_side = kAtHi;
        }
      } else if (rate < 0 && haslo[b]) {
        Rat t = (bval[r] - lo[b]) / (-rate);
        if (!limited || t < theta ||
            (t == theta && leave_row >= 0 && b < basis[leave_row])) {
          limited = true;
          theta = t;
          leave_row = r;
          hit_side = kAtLo;
        }
      }
    }
    if (haslo[e] && hashi[e]) {
      Rat t = hi[e] - lo[e];
      if (!limited || t < theta) {
        limited = true;
        theta = t;
        flip = true;
      }
    }
    if (!limited) {
      if (!phase2) throw std::logic_error("lp: phase 1 ray");
      throw std::runtime_error("lp: objective unbounded below");
    }

    if (theta != 0)
      for (const auto& [r, te] : colent) bval[r] -= dir * theta * te;
    if (flip) {
      state[e] ^= 1;
      return true;
    }

    int lv = basis[leave_row];
    state[lv] = hit_side;
    Rat enter_value = bound_value(e) + dir * theta;
    basis[leave_row] = e;
    state[e] = kBasic;
    bval[leave_row] = enter_value;

    Rat piv = sp_get(tab[leave_row], e);
    sp_scale(tab[leave_row], 1 / piv);
    for (const auto& [r, te] : colent) {
      if (r == leave_row) continue;
      sp_axpy(tab[r], -te, tab[leave_row]);
    }
    Rat f = objrow[e];
    if (f != 0)
      for (const auto& [c, a] : tab[leave_row]) objrow[c] -= f * a;
    return true;
  }

  // Returns false on infeasible input.
  bool phase1() {
    add_artificials();
    if (first_art == C) return true;  // start already feasible
    set_phase1_objective();
    while (iterate(false)) {
    }
    Rat total = 0;
    for (int c = first_art; c < C; ++c) total += col_value(c);
    if (total > 0) return false;
    // Freeze artificials: nonbasic ones cannot re-enter; basic ones sit at
    // zero and are pinned there by their [0,0] bounds.
    for (int c = first_art; c < C; ++c) {
      pinned[c] = 1;
      hashi[c] = 1;  // hi already 0
    }
    return true;
  }

  void phase2() {
    set_phase2_objective();
    while (iterate(true)) {
    }
  }

  std::vector<Rat> extract() const {
    std::vector<Rat> x(n);
    for (int j = 0; j < n; ++j) x[j] = bound_value(j);
    for (int r = 0; r < m; ++r)
      if (basis[r] < n) x[basis[r]] = bval[r];
    return x;
  }
};

// Row-echelon accumulator over constraint normals, used both to pick the
// deterministic tight basis and to find null directions while purifying.
struct Echelon {
  std::vector<SpRow> rows;  // each normalized: first entry has value 1
  std::vector<char> is_pivot;

  explicit Echelon(int nvars) : is_pivot(nvars, 0) {}

  int rank() const { return static_cast<int>(rows.size()); }

  // Tries to add a normal; returns true if it was independent.
  bool add(SpRow v) {
    for (const SpRow& r : rows) {
      if (v.empty()) break;
      Rat f = sp_get(v, r.front().first);
      if (f != 0) sp_axpy(v, -f, r);
    }
    if (v.empty()) return false;
    sp_scale(v, 1 / v.front().second);
    is_pivot[v.front().first] = 1;
    rows.push_back(std::move(v));
    return true;
  }

  // A nonzero direction orthogonal to every added normal. Requires
  // rank < nvars.
  std::vector<Rat> null_direction(int nvars) const {
    int free_col = -1;
    for (int c = 0; c < nvars; ++c)
      if (!is_pivot[c]) {
        free_col = c;
        break;
      }
    if (free_col < 0) throw std::logic_error("lp: echelon already full rank");
    std::vector<Rat> d(nvars, Rat(0));
    d[free_col] = 1;
    std::vector<const SpRow*> by_pivot(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) by_pivot[i] = &rows[i];
    std::sort(by_pivot.begin(), by_pivot.end(),
              [](const SpRow* a, const SpRow* b) {
                return a->front().first > b->front().first;
              });
    for (const SpRow* r : by_pivot) {
      Rat s = 0;
      for (size_t i = 1; i < r->size(); ++i)
        s += (*r)[i].second * d[(*r)[i].first];
      d[r->front().first] = -s;
    }
    return d;
  }
};

Rat row_lhs(const LpRow& row, const std::vector<Rat>& x) {
  Rat s = 0;
  for (const auto& [c, a] : row.coef) s += a * x[c];
  return s;
}

bool row_tight(const LpRow& row, const std::vector<Rat>& x) {
  return row_lhs(row, x) == row.rhs;
}

// Scans constraints in canonical order (rows, then lo/hi bounds per
// variable) and collects the first maximal independent set of tight
// normals. Returns the tight indices; *rank_out gets the achieved rank.
std::vector<int> tight_basis_scan(const LinearProgram& lp,
                                  const std::vector<Rat>& x, Echelon& ech) {
  const int n = lp.num_vars();
  std::vector<int> tight;
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    if (ech.rank() == n) break;
    if (!row_tight(lp.rows[r], x)) continue;
    SpRow v(lp.rows[r].coef.begin(), lp.rows[r].coef.end());
    if (ech.add(std::move(v))) tight.push_back(static_cast<int>(r));
  }
  for (int j = 0; j < n && ech.rank() < n; ++j) {
    if (x[j] == lp.lower[j] && ech.add({{j, Rat(1)}}))
      tight.push_back(lp.lower_bound_index(j));
    if (ech.rank() == n) break;
    if (lp.has_upper[j] && x[j] == lp.upper[j] && ech.add({{j, Rat(1)}}))
      tight.push_back(lp.upper_bound_index(j));
  }
  return tight;
}

// Largest step along d keeping x feasible; unlimited steps return nullopt.
std::optional<Rat> max_step(const LinearProgram& lp, const std::vector<Rat>& x,
                            const std::vector<Rat>& d) {
  std::optional<Rat> best;
  auto limit = [&](const Rat& slack, const Rat& rate) {
    if (rate <= 0) return;
    Rat t = slack / rate;
    if (!best || t < *best) best = t;
  };
  for (const LpRow& row : lp.rows) {
    Rat lhs = row_lhs(row, x);
    Rat rate = 0;
    for (const auto& [c, a] : row.coef) rate += a * d[c];
    if (row.rel != Rel::Ge) limit(row.rhs - lhs, rate);   // a.x <= b
    if (row.rel != Rel::Le) limit(lhs - row.rhs, -rate);  // a.x >= b
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    limit(x[j] - lp.lower[j], -d[j]);
    if (lp.has_upper[j]) limit(lp.upper[j] - x[j], d[j]);
  }
  return best;
}

// Moves x along null directions of its tight set until the tight normals
// have full rank, i.e. x is a vertex. Keeps the objective value constant
// when lock_objective is set. Returns the deterministic tight basis.
std::vector<int> purify_to_vertex(const LinearProgram& lp, std::vector<Rat>& x,
                                  bool lock_objective) {
  const int n = lp.num_vars();
  for (int guard = 0; guard <= n + 1; ++guard) {
    Echelon ech(n);
    std::vector<int> tight = tight_basis_scan(lp, x, ech);
    if (ech.rank() == n) return tight;
    if (lock_objective && !lp.objective.empty()) {
      SpRow obj(lp.objective.begin(), lp.objective.end());
      if (ech.add(std::move(obj)) && ech.rank() == n)
        throw std::logic_error("lp: optimal point blocked from vertex");
    }
    std::vector<Rat> d = ech.null_direction(n);
    auto fwd = max_step(lp, x, d);
    if (fwd && *fwd > 0) {
      for (int j = 0; j < n; ++j) x[j] += *fwd * d[j];
      continue;
    }
    for (Rat& v : d) v = -v;
    auto bwd = max_step(lp, x, d);
    if (bwd && *bwd > 0) {
      for (int j = 0; j < n; ++j) x[j] += *bwd * d[j];
      continue;
    }
    if (!fwd || !bwd)
      throw std::runtime_error("lp: feasible region unbounded, no vertex");
    throw std::logic_error("lp: degenerate purification step");
  }
  throw std::logic_error("lp: purification failed to converge");
}

Rat objective_value(const LinearProgram& lp, const std::vector<Rat>& x) {
  Rat s = 0;
  for (const auto& [c, a] : lp.objective) s += a * x[c];
  return s;
}

LpResult solve_core(const LinearProgram& lp, bool optimize) {
  lp.validate();
  Simplex s(lp);
  if (!s.phase1()) return {false, {}};
  bool with_obj = optimize && !lp.objective.empty();
  if (with_obj) s.phase2();
  std::vector<Rat> x = s.extract();
  std::vector<int> tight = purify_to_vertex(lp, x, with_obj);
  VertexSolution v;
  v.objective_value = objective_value(lp, x);
  v.x = std::move(x);
  v.tight = std::move(tight);
  return {true, std::move(v)};
}

}  // namespace

int LinearProgram::add_var(const Rat& lo) {
  lower.push_back(lo);
  upper.emplace_back();
  has_upper.push_back(false);
  return num_vars() - 1;
}

int LinearProgram::add_var(const Rat& lo, const Rat& hi) {
  lower.push_back(lo);
  upper.push_back(hi);
  has_upper.push_back(true);
  return num_vars() - 1;
}

void LinearProgram::add_row(LpRow row) { rows.push_back(std::move(row)); }

void LinearProgram::validate() const {
  const int n = num_vars();
  if (static_cast<int>(upper.size()) != n ||
      static_cast<int>(has_upper.size()) != n)
    throw std::invalid_argument("lp: inconsistent bound arrays");
  for (int j = 0; j < n; ++j)
    if (has_upper[j] && upper[j] < lower[j])
      throw std::invalid_argument("lp: empty bound interval");
  auto check_ids = [n](const std::vector<std::pair<int, Rat>>& coef,
                       const char* what) {
    int prev = -1;
    for (const auto& [c, a] : coef) {
      (void)a;
      if (c <= prev || c >= n)
        throw std::invalid_argument(std::string("lp: bad column ids in ") +
                                    what);
      prev = c;
    }
  };
  for (const LpRow& row : rows) check_ids(row.coef, "row");
  check_ids(objective, "objective");
}

LpResult solve_feasible_vertex(const LinearProgram& lp) {
  return solve_core(lp, false);
}

LpResult solve_min(const LinearProgram& lp) { return solve_core(lp, true); }

RestrictedLp restrict(const LinearProgram& lp, const std::vector<Rat>& values,
                      const std::vector<int>& fixed_ids) {
  const int n = lp.num_vars();
  if (static_cast<int>(values.size()) != n)
    throw std::invalid_argument("restrict: values length mismatch");
  std::vector<char> fixed(n, 0);
  for (int f : fixed_ids) {
    if (f < 0 || f >= n) throw std::invalid_argument("restrict: bad var id");
    fixed[f] = 1;
  }
  RestrictedLp out;
  std::vector<int> new_id(n, -1);
  for (int j = 0; j < n; ++j) {
    if (fixed[j]) continue;
    new_id[j] = static_cast<int>(out.kept.size());
    out.kept.push_back(j);
    if (lp.has_upper[j])
      out.lp.add_var(lp.lower[j], lp.upper[j]);
    else
      out.lp.add_var(lp.lower[j]);
  }
  for (const LpRow& row : lp.rows) {
    LpRow nr;
    nr.rel = row.rel;
    nr.tag = row.tag;
    nr.rhs = row.rhs;
    for (const auto& [c, a] : row.coef) {
      if (fixed[c])
        nr.rhs -= a * values[c];
      else
        nr.coef.emplace_back(new_id[c], a);
    }
    if (nr.coef.empty()) {
      bool ok = true;
      if (nr.rel == Rel::Le) ok = (0 <= nr.rhs);
      if (nr.rel == Rel::Ge) ok = (0 >= nr.rhs);
      if (nr.rel == Rel::Eq) ok = (nr.rhs == 0);
      if (!ok)
        throw std::invalid_argument(
            "restrict: fixed values violate a constraint");
    }
    out.lp.add_row(std::move(nr));
  }
  for (const auto& [c, a] : lp.objective) {
    if (fixed[c])
      out.objective_shift += a * values[c];
    else
      out.lp.objective.emplace_back(new_id[c], a);
  }
  return out;
}

VertexSolution restrict_vertex(const RestrictedLp& r,
                               const std::vector<Rat>& x) {
  std::vector<Rat> xs;
  xs.reserve(r.kept.size());
  for (int j : r.kept) xs.push_back(x.at(j));
  Echelon ech(r.lp.num_vars());
  std::vector<int> tight = tight_basis_scan(r.lp, xs, ech);
  if (ech.rank() != r.lp.num_vars())
    throw std::logic_error("restrict_vertex: projection is not a vertex");
  VertexSolution v;
  v.objective_value = objective_value(r.lp, xs);
  v.x = std::move(xs);
  v.tight = std::move(tight);
  return v;
}

int count_fractional(const LinearProgram& lp, const std::vector<Rat>& x,
                     const std::vector<int>& subset) {
  int count = 0;
  for (int j : subset) {
    if (j < 0 || j >= lp.num_vars())
      throw std::invalid_argument("count_fractional: bad var id");
    if (x[j] > lp.lower[j] && (!lp.has_upper[j] || x[j] < lp.upper[j]))
      ++count;
  }
  return count;
}

bool audit_vertex(const LinearProgram& lp, const VertexSolution& v,
                  std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.rows.size());
  if (static_cast<int>(v.x.size()) != n) return fail("x length mismatch");
  for (int j = 0; j < n; ++j) {
    if (v.x[j] < lp.lower[j]) return fail("lower bound violated");
    if (lp.has_upper[j] && v.x[j] > lp.upper[j])
      return fail("upper bound violated");
  }
  for (int r = 0; r < m; ++r) {
    Rat lhs = row_lhs(lp.rows[r], v.x);
    const Rat& rhs = lp.rows[r].rhs;
    switch (lp.rows[r].rel) {
      case Rel::Le:
        if (lhs > rhs) return fail("row violated");
        break;
      case Rel::Ge:
        if (lhs < rhs) return fail("row violated");
        break;
      case Rel::Eq:
        if (lhs != rhs) return fail("row violated");
        break;
    }
  }
  if (static_cast<int>(v.tight.size()) != n)
    return fail("tight set size != variable count");
  Echelon ech(n);
  for (int idx : v.tight) {
    SpRow normal;
    if (idx >= 0 && idx < m) {
      if (!row_tight(lp.rows[idx], v.x)) return fail("listed row not tight");
      normal.assign(lp.rows[idx].coef.begin(), lp.rows[idx].coef.end());
    } else {
      int rel = idx - m;
      int j = rel / 2;
      if (rel < 0 || j >= n) return fail("tight index out of range");
      if (rel % 2 == 0) {
        if (v.x[j] != lp.lower[j]) return fail("listed lower bound not tight");
      } else {
        if (!lp.has_upper[j] || v.x[j] != lp.upper[j])
          return fail("listed upper bound not tight");
      }
      normal = {{j, Rat(1)}};
    }
    if (!ech.add(std::move(normal))) return fail("tight normals dependent");
  }
  if (objective_value(lp, v.x) != v.objective_value)
    return fail("objective value mismatch");
  return true;
}

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream os;
  os << "min";
  if (lp.objective.empty()) os << " 0";
  for (const auto& [c, a] : lp.objective)
    os << " + " << a.str() << " x" << c;
  os << "\n";
  const char* tag_names[] = {"feasibility", "cardinality", "degree", "budget",
                             "other"};
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    const LpRow& row = lp.rows[r];
    os << "r" << r << " [" << tag_names[static_cast<int>(row.tag)] << "]";
    for (const auto& [c, a] : row.coef) os << " + " << a.str() << " x" << c;
    os << (row.rel == Rel::Le ? " <= " : row.rel == Rel::Ge ? " >= " : " == ")
       << row.rhs.str() << "\n";
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    os << lp.lower[j].str() << " <= x" << j;
    if (lp.has_upper[j]) os << " <= " << lp.upper[j].str();
    os << "\n";
  }
  return os.str();
}

}  // namespace mn
