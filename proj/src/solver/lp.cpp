#include <algorithm>
#include <cmath>

#include "slice_embed/errors.hpp"
#include "slice_embed/solver.hpp"

namespace slice_embed {

namespace {

struct WorkRow {
  std::vector<Term> terms;  // live (non-fixed) columns only
  Sense sense;
  double rhs;
  double scale;  // magnitude of the original row, for tolerances
  bool active = true;
};

bool fixed(const VariableBounds& b) { return b.lo == b.hi; }

}  // namespace

LpSolution solve_lp(const MilpProblem& problem, std::span<const VariableBounds> bounds,
                    const SimplexOptions& options) {
  const std::size_t n = problem.variables.size();
  if (!bounds.empty() && bounds.size() != n) throw ConfigurationError("bound override size mismatch");
  std::vector<VariableBounds> box(n);
  for (std::size_t j = 0; j < n; ++j) {
    box[j] = bounds.empty() ? VariableBounds{problem.variables[j].lo, problem.variables[j].hi} : bounds[j];
  }
  LpSolution solution;
  const double eps = options.tolerance * 10.0;

  auto infeasible = [&]() {
    solution.status = LpStatus::kInfeasible;
    solution.values.clear();
    return solution;
  };
  for (const auto& b : box) {
    if (b.lo > b.hi) return infeasible();
  }

  std::vector<WorkRow> rows;
  rows.reserve(problem.rows.size());
  for (const auto& row : problem.rows) {
    double scale = 1.0 + std::fabs(row.rhs);
    for (const auto& term : row.expr.terms) scale += std::fabs(term.coef);
    rows.push_back(WorkRow{row.expr.terms, row.sense, row.rhs, scale});
  }

  // Substitute fixed columns, then turn singleton rows into bounds until
  // nothing changes.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& row : rows) {
      if (!row.active) continue;
      std::size_t keep = 0;
      for (const auto& term : row.terms) {
        if (term.coef == 0.0) continue;
        if (fixed(box[term.var])) {
          row.rhs -= term.coef * box[term.var].lo;
        } else {
          row.terms[keep++] = term;
        }
      }
      row.terms.resize(keep);
      if (row.terms.empty()) {
        const double slack = eps * row.scale;
        const bool ok = row.sense == Sense::kLessEqual      ? row.rhs >= -slack
                        : row.sense == Sense::kGreaterEqual ? row.rhs <= slack
                                                            : std::fabs(row.rhs) <= slack;
        if (!ok) return infeasible();
        row.active = false;
        continue;
      }
      if (row.terms.size() != 1) continue;
      const auto [var, coef] = row.terms.front();
      const double limit = row.rhs / coef;
      auto& b = box[var];
      const bool upper = (row.sense == Sense::kLessEqual) == (coef > 0.0);
      if (row.sense == Sense::kEqual) {
        b.lo = std::max(b.lo, limit);
        b.hi = std::min(b.hi, limit);
      } else if (upper) {
        b.hi = std::min(b.hi, limit);
      } else {
        b.lo = std::max(b.lo, limit);
      }
      if (b.lo > b.hi) {
        if (b.lo - b.hi > eps * (1.0 + std::fabs(b.lo))) return infeasible();
        b.hi = b.lo;
      }
      row.active = false;
      changed = true;
    }
  }

  std::vector<std::ptrdiff_t> column(n, -1);
  LinearProgram lp;
  for (std::size_t j = 0; j < n; ++j) {
    if (fixed(box[j])) continue;
    column[j] = static_cast<std::ptrdiff_t>(lp.cost.size());
    lp.cost.push_back(0.0);
    lp.lower.push_back(box[j].lo);
    lp.upper.push_back(box[j].hi);
  }
  for (const auto& term : problem.objective.terms) {
    if (column[term.var] >= 0) lp.cost[static_cast<std::size_t>(column[term.var])] += term.coef;
  }
  for (const auto& row : rows) {
    if (!row.active) continue;
    LpRow lp_row;
    lp_row.sense = row.sense;
    lp_row.rhs = row.rhs;
    for (const auto& term : row.terms) {
      lp_row.index.push_back(static_cast<std::size_t>(column[term.var]));
      lp_row.coef.push_back(term.coef);
    }
    lp.rows.push_back(std::move(lp_row));
  }

  const LpResult result = solve_simplex(lp, options);
  solution.iterations = result.iterations;
  solution.status = result.status;
  if (result.status != LpStatus::kOptimal) return solution;
  solution.values.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    solution.values[j] = column[j] >= 0 ? result.x[static_cast<std::size_t>(column[j])] : box[j].lo;
  }
  solution.objective = problem.objective.evaluate(solution.values);
  return solution;
}

}  // namespace slice_embed
