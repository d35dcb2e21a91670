#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mnorm/rational.hpp"

namespace mn {

enum class Rel { Le, Eq, Ge };

// Rows are tagged by the role they play in the solver that built the LP, so
// rounding procedures can find the rows they are allowed to touch without
// guessing from coefficients.
enum class RowTag { Feasibility, Cardinality, Degree, Budget, Other };

struct LpRow {
  std::vector<std::pair<int, Rat>> coef;  // (var id, coefficient), ids ascending
  Rel rel = Rel::Le;
  Rat rhs = 0;
  RowTag tag = RowTag::Other;
};

// min c.x  s.t. rows, lower <= x <= upper (upper optional per variable).
// All data exact rationals. Variables must have a finite lower bound; the
// solver reports an error on polyhedra unbounded in an improving direction.
struct LinearProgram {
  std::vector<Rat> lower;
  std::vector<Rat> upper;      // meaningful iff has_upper
  std::vector<bool> has_upper;
  std::vector<LpRow> rows;
  std::vector<std::pair<int, Rat>> objective;  // empty = pure feasibility

  int num_vars() const { return static_cast<int>(lower.size()); }
  int add_var(const Rat& lo);
  int add_var(const Rat& lo, const Rat& hi);
  void add_row(LpRow row);
  void validate() const;  // throws std::invalid_argument on malformed input

  // Index space for tight constraints: row i -> i; lower bound of var j ->
  // rows.size() + 2j; upper bound of var j -> rows.size() + 2j + 1.
  int lower_bound_index(int var) const {
    return static_cast<int>(rows.size()) + 2 * var;
  }
  int upper_bound_index(int var) const {
    return static_cast<int>(rows.size()) + 2 * var + 1;
  }
};

// An exact extreme point: the point itself plus a set of num_vars() tight,
// linearly independent constraint indices chosen deterministically (first
// maximal independent subset scanning rows in order, then bounds).
struct VertexSolution {
  std::vector<Rat> x;
  std::vector<int> tight;
  Rat objective_value = 0;
};

struct LpResult {
  bool feasible = false;
  VertexSolution vertex;  // valid iff feasible
};

// Finds any extreme point of the feasible region (objective ignored).
LpResult solve_feasible_vertex(const LinearProgram& lp);

// Minimizes the objective; returns an optimal extreme point.
// Throws std::runtime_error if the objective is unbounded below.
LpResult solve_min(const LinearProgram& lp);

// The LP obtained by substituting x[f] = values[f] for every f in fixed_ids
// and dropping those variables. kept[j] is the original id of new var j.
// Row tags and relations survive; rows with no variables left are kept as
// 0 <= /= rhs' checks and verified at build time.
struct RestrictedLp {
  LinearProgram lp;
  std::vector<int> kept;
  Rat objective_shift = 0;  // constant absorbed from fixed variables
};

RestrictedLp restrict(const LinearProgram& lp, const std::vector<Rat>& values,
                      const std::vector<int>& fixed_ids);

// Projects a point of the original LP onto the restricted one and recomputes
// its tight set there. If x was an extreme point of the original LP, the
// projection is an extreme point of the restriction.
VertexSolution restrict_vertex(const RestrictedLp& r,
                               const std::vector<Rat>& x);

// Number of variables in subset strictly between their bounds (a missing
// upper bound counts as +infinity).
int count_fractional(const LinearProgram& lp, const std::vector<Rat>& x,
                     const std::vector<int>& subset);

// Exact re-check of a claimed vertex: feasibility, tightness of every listed
// index, and full rank of the tight normals. Returns false and fills *why on
// the first violation.
bool audit_vertex(const LinearProgram& lp, const VertexSolution& v,
                  std::string* why = nullptr);

// Line-oriented dump for debugging and for diffing against other solvers.
std::string dump_lp(const LinearProgram& lp);

}  // namespace mn
