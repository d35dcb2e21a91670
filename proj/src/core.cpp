#include "mnorm/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace mn {

std::string NormSpec::describe() const {
  switch (kind) {
    case Kind::Sum:
      return "sum";
    case Kind::Max:
      return "max";
    case Kind::TopL:
      return "top-" + std::to_string(ell);
    case Kind::Ordered:
      return "ordered[" + std::to_string(weights.size()) + "]";
    case Kind::Lp:
      return "l" + std::to_string(p);
  }
  return "?";
}

static void require_nonnegative(const std::vector<Rat>& values) {
  for (const Rat& v : values)
    if (v < 0) throw std::invalid_argument("eval_norm: negative entry");
}

Rat eval_norm(const NormSpec& spec, std::vector<Rat> values) {
  require_nonnegative(values);
  const int n = static_cast<int>(values.size());
  switch (spec.kind) {
    case NormSpec::Kind::Sum: {
      Rat s = 0;
      for (const Rat& v : values) s += v;
      return s;
    }
    case NormSpec::Kind::Max: {
      Rat m = 0;
      for (const Rat& v : values) m = std::max(m, v);
      return m;
    }
    case NormSpec::Kind::TopL: {
      if (spec.ell < 1 || spec.ell > n)
        throw std::invalid_argument("eval_norm: top-l with l out of range");
      std::sort(values.begin(), values.end(), std::greater<Rat>());
      Rat s = 0;
      for (int i = 0; i < spec.ell; ++i) s += values[i];
      return s;
    }
    case NormSpec::Kind::Ordered: {
      if (static_cast<int>(spec.weights.size()) != n)
        throw std::invalid_argument("eval_norm: weight length != vector length");
      for (size_t i = 0; i + 1 < spec.weights.size(); ++i)
        if (spec.weights[i] < spec.weights[i + 1])
          throw std::invalid_argument("eval_norm: weights must be non-increasing");
      if (!spec.weights.empty() && spec.weights.back() < 0)
        throw std::invalid_argument("eval_norm: negative weight");
      std::sort(values.begin(), values.end(), std::greater<Rat>());
      Rat s = 0;
      for (int i = 0; i < n; ++i) s += spec.weights[i] * values[i];
      return s;
    }
    case NormSpec::Kind::Lp: {
      if (spec.p < 1.0) throw std::invalid_argument("eval_norm: p < 1");
      double acc = 0;
      for (const Rat& v : values)
        acc += std::pow(v.convert_to<double>(), spec.p);
      double r = std::pow(acc, 1.0 / spec.p);
      // Round through a fixed denominator so results are reproducible across
      // runs regardless of how the Rat was produced.
      return Rat(static_cast<long long>(std::llround(r * (1LL << 40))),
                 (1LL << 40));
    }
  }
  throw std::logic_error("eval_norm: unknown kind");
}

bool majorization_dominates(const std::vector<Rat>& u,
                            const std::vector<Rat>& v, const Rat& alpha) {
  if (u.size() != v.size())
    throw std::invalid_argument("majorization_dominates: length mismatch");
  std::vector<Rat> us = u, vs = v;
  std::sort(us.begin(), us.end(), std::greater<Rat>());
  std::sort(vs.begin(), vs.end(), std::greater<Rat>());
  Rat pu = 0, pv = 0;
  for (size_t i = 0; i < us.size(); ++i) {
    if (us[i] < 0 || vs[i] < 0)
      throw std::invalid_argument("majorization_dominates: negative entry");
    pu += us[i];
    pv += vs[i];
    if (pv > alpha * pu) return false;
  }
  return true;
}

int GroupedUniverse::default_T(int n) {
  if (n < 1) throw std::invalid_argument("default_T: empty universe");
  return std::max(1, ceil_log2(static_cast<std::uint64_t>(n)));
}

GroupedUniverse::GroupedUniverse(int n_, std::vector<std::vector<int>> groups_)
    : n(n_), T(static_cast<int>(groups_.size())), groups(std::move(groups_)) {
  if (n < 0) throw std::invalid_argument("GroupedUniverse: negative n");
  group_of.assign(n, 0);
  for (int i = 1; i <= T; ++i) {
    auto& g = groups[i - 1];
    std::sort(g.begin(), g.end());
    for (int e : g) {
      if (e < 0 || e >= n)
        throw std::invalid_argument("GroupedUniverse: element out of range");
      if (group_of[e] != 0)
        throw std::invalid_argument("GroupedUniverse: groups must be disjoint");
      group_of[e] = i;
    }
  }
}

void Solution::normalize() {
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
}

bool Solution::contains(int e) const {
  return std::binary_search(chosen.begin(), chosen.end(), e);
}

std::vector<int> group_loads(const GroupedUniverse& u, const Solution& d) {
  std::vector<int> load(u.T, 0);
  for (int e : d.chosen) {
    if (e < 0 || e >= u.n)
      throw std::invalid_argument("group_loads: element out of range");
    int g = u.group_of[e];
    if (g > 0) ++load[g - 1];
  }
  return load;
}

bool check_valid(const GroupedUniverse& u, const Solution& d, const Rat& c) {
  auto load = group_loads(u, d);
  for (int i = 1; i <= u.T; ++i)
    if (load[i - 1] > c * pow2(i)) return false;
  return true;
}

Rat validity_factor(const GroupedUniverse& u, const Solution& d) {
  auto load = group_loads(u, d);
  Rat worst = 0;
  for (int i = 1; i <= u.T; ++i)
    worst = std::max(worst, Rat(load[i - 1]) / pow2(i));
  return worst;
}

std::string certificate_name(Certificate c) {
  switch (c) {
    case Certificate::Solved:
      return "solved";
    case Certificate::NoValidSolution:
      return "no-valid-solution";
    case Certificate::InfeasibleInput:
      return "infeasible-input";
  }
  return "?";
}

SolveReport SolveReport::solved(const GroupedUniverse& u, Solution d) {
  d.normalize();
  SolveReport r;
  r.certificate = Certificate::Solved;
  auto load = group_loads(u, d);
  r.group_load.reserve(u.T);
  for (int i = 1; i <= u.T; ++i) {
    r.group_load.push_back(Rat(load[i - 1]) / pow2(i));
    r.validity = std::max(r.validity, r.group_load.back());
  }
  r.solution = std::move(d);
  return r;
}

SolveReport SolveReport::no_valid_solution(std::string note) {
  SolveReport r;
  r.certificate = Certificate::NoValidSolution;
  r.note = std::move(note);
  return r;
}

SolveReport SolveReport::infeasible_input(std::string note) {
  SolveReport r;
  r.certificate = Certificate::InfeasibleInput;
  r.note = std::move(note);
  return r;
}

}  // namespace mn
