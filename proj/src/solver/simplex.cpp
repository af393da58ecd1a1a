#include "slice_embed/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "slice_embed/errors.hpp"

namespace slice_embed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kReinvertInterval = 100;
constexpr std::uint64_t kDegenerateLimit = 60;

struct NumericalTrouble {
  std::string reason;
};

struct ColumnEntry {
  std::size_t row;
  double value;
};

class Simplex {
 public:
  Simplex(const LinearProgram& lp, double tolerance, bool bland, std::uint64_t limit)
      : lp_(lp), tol_(tolerance), bland_(bland), limit_(limit) {}

  LpResult run();
  std::uint64_t iterations() const { return iterations_; }

 private:
  enum class PhaseResult { kOptimal, kUnbounded };

  void setup();
  void reinvert();
  PhaseResult optimize(const std::vector<double>& cost);
  std::optional<std::pair<std::size_t, int>> choose_entering() const;
  void pivot(std::size_t r, std::size_t q);
  void drive_out_artificials();
  double row_scale(std::size_t i) const;

  double& t(std::size_t i, std::size_t j) { return tableau_[i * cols_ + j]; }
  double t(std::size_t i, std::size_t j) const { return tableau_[i * cols_ + j]; }

  const LinearProgram& lp_;
  double tol_;
  bool bland_;
  std::uint64_t limit_;
  std::uint64_t iterations_ = 0;

  std::size_t n_ = 0;     // structural columns
  std::size_t m_ = 0;     // rows
  std::size_t cols_ = 0;  // structural + slack + artificial
  std::vector<std::vector<ColumnEntry>> columns_;
  std::vector<double> lo_, hi_, x_, cost_, d_, tableau_;
  std::vector<std::size_t> basic_;
  std::vector<std::ptrdiff_t> position_;  // row of a basic column, -1 otherwise
  std::size_t first_artificial_ = 0;
  bool phase_bland_ = false;
};

double Simplex::row_scale(std::size_t i) const {
  double scale = 1.0 + std::fabs(lp_.rows[i].rhs);
  const auto& row = lp_.rows[i];
  for (std::size_t k = 0; k < row.index.size(); ++k) scale += std::fabs(row.coef[k] * x_[row.index[k]]);
  return scale;
}

void Simplex::setup() {
  n_ = lp_.column_count();
  m_ = lp_.rows.size();
  columns_.assign(n_ + m_, {});
  for (std::size_t i = 0; i < m_; ++i) {
    const auto& row = lp_.rows[i];
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      if (row.coef[k] != 0.0) columns_[row.index[k]].push_back({i, row.coef[k]});
    }
    columns_[n_ + i].push_back({i, 1.0});
  }
  lo_.assign(lp_.lower.begin(), lp_.lower.end());
  hi_.assign(lp_.upper.begin(), lp_.upper.end());
  x_.assign(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
    } else if (std::isfinite(hi_[j])) {
      x_[j] = hi_[j];
    }
  }
  // Slack s_i with a_i.x + s_i = rhs.
  std::vector<double> activity(m_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    for (const auto& e : columns_[j]) activity[e.row] += e.value * x_[j];
  }
  basic_.assign(m_, 0);
  first_artificial_ = n_ + m_;
  for (std::size_t i = 0; i < m_; ++i) {
    const auto sense = lp_.rows[i].sense;
    const double slo = sense == Sense::kGreaterEqual ? -kInf : 0.0;
    const double shi = sense == Sense::kLessEqual ? kInf : 0.0;
    lo_.push_back(slo);
    hi_.push_back(shi);
    const double need = lp_.rows[i].rhs - activity[i];
    if (need >= slo && need <= shi) {
      x_.push_back(need);
      basic_[i] = n_ + i;
    } else {
      x_.push_back(std::clamp(need, slo, shi));
    }
  }
  for (std::size_t i = 0; i < m_; ++i) {
    if (basic_[i] == n_ + i) continue;
    const double gap = lp_.rows[i].rhs - activity[i] - x_[n_ + i];
    const double sign = gap >= 0.0 ? 1.0 : -1.0;
    columns_.push_back({{i, sign}});
    lo_.push_back(0.0);
    hi_.push_back(kInf);
    x_.push_back(std::fabs(gap));
    basic_[i] = columns_.size() - 1;
  }
  cols_ = columns_.size();
  cost_.assign(cols_, 0.0);
  position_.assign(cols_, -1);
  for (std::size_t i = 0; i < m_; ++i) position_[basic_[i]] = static_cast<std::ptrdiff_t>(i);
}

// Rebuilds the tableau, basic values and reduced costs from the original
// data for the current basis.
void Simplex::reinvert() {
  std::vector<double> binv(m_ * m_, 0.0), b(m_ * m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    for (const auto& e : columns_[basic_[i]]) b[e.row * m_ + i] = e.value;
    binv[i * m_ + i] = 1.0;
  }
  for (std::size_t c = 0; c < m_; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < m_; ++r) {
      if (std::fabs(b[r * m_ + c]) > std::fabs(b[p * m_ + c])) p = r;
    }
    if (std::fabs(b[p * m_ + c]) < 1e-11) throw NumericalTrouble{"singular basis"};
    if (p != c) {
      for (std::size_t k = 0; k < m_; ++k) {
        std::swap(b[p * m_ + k], b[c * m_ + k]);
        std::swap(binv[p * m_ + k], binv[c * m_ + k]);
      }
    }
    const double inv = 1.0 / b[c * m_ + c];
    for (std::size_t k = 0; k < m_; ++k) {
      b[c * m_ + k] *= inv;
      binv[c * m_ + k] *= inv;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const double f = b[r * m_ + c];
      if (r == c || f == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) {
        b[r * m_ + k] -= f * b[c * m_ + k];
        binv[r * m_ + k] -= f * binv[c * m_ + k];
      }
    }
  }
  tableau_.assign(m_ * cols_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    for (const auto& e : columns_[j]) {
      for (std::size_t i = 0; i < m_; ++i) t(i, j) += binv[i * m_ + e.row] * e.value;
    }
  }
  std::vector<double> rhs(m_);
  for (std::size_t i = 0; i < m_; ++i) rhs[i] = lp_.rows[i].rhs;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (position_[j] >= 0) continue;
    for (const auto& e : columns_[j]) rhs[e.row] -= e.value * x_[j];
  }
  for (std::size_t i = 0; i < m_; ++i) {
    double v = 0.0;
    for (std::size_t k = 0; k < m_; ++k) v += binv[i * m_ + k] * rhs[k];
    x_[basic_[i]] = v;
  }
  d_ = cost_;
  for (std::size_t i = 0; i < m_; ++i) {
    const double cb = cost_[basic_[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * t(i, j);
  }
  for (std::size_t i = 0; i < m_; ++i) d_[basic_[i]] = 0.0;
}

std::optional<std::pair<std::size_t, int>> Simplex::choose_entering() const {
  std::optional<std::pair<std::size_t, int>> best;
  double best_score = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (position_[j] >= 0 || lo_[j] == hi_[j]) continue;
    int dir = 0;
    if (x_[j] == lo_[j]) {
      if (d_[j] < -tol_) dir = 1;
    } else if (x_[j] == hi_[j]) {
      if (d_[j] > tol_) dir = -1;
    } else if (std::fabs(d_[j]) > tol_) {
      dir = d_[j] < 0.0 ? 1 : -1;
    }
    if (dir == 0) continue;
    if (phase_bland_) return std::make_pair(j, dir);
    const double score = std::fabs(d_[j]);
    if (score > best_score) {
      best_score = score;
      best = std::make_pair(j, dir);
    }
  }
  return best;
}

void Simplex::pivot(std::size_t r, std::size_t q) {
  const double inv = 1.0 / t(r, q);
  std::vector<std::size_t> nz;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (t(r, j) != 0.0) {
      t(r, j) *= inv;
      nz.push_back(j);
    }
  }
  t(r, q) = 1.0;
  for (std::size_t i = 0; i < m_; ++i) {
    const double f = t(i, q);
    if (i == r || f == 0.0) continue;
    for (const auto j : nz) t(i, j) -= f * t(r, j);
    t(i, q) = 0.0;
  }
  const double f = d_[q];
  if (f != 0.0) {
    for (const auto j : nz) d_[j] -= f * t(r, j);
  }
  d_[q] = 0.0;
  position_[basic_[r]] = -1;
  basic_[r] = q;
  position_[q] = static_cast<std::ptrdiff_t>(r);
}

Simplex::PhaseResult Simplex::optimize(const std::vector<double>& cost) {
  cost_ = cost;
  reinvert();
  phase_bland_ = bland_;
  std::uint64_t degenerate = 0, since_reinvert = 0, recheck = 0;
  const double pivot_tol = std::max(1e-9, tol_);
  while (true) {
    if (iterations_ >= limit_) throw NumericalTrouble{"iteration limit"};
    const auto entering = choose_entering();
    if (!entering) {
      // Confirm optimality on freshly computed reduced costs.
      if (since_reinvert == 0 || recheck >= 3) return PhaseResult::kOptimal;
      ++recheck;
      reinvert();
      since_reinvert = 0;
      continue;
    }
    const auto [q, dir] = *entering;
    double step = std::isfinite(lo_[q]) && std::isfinite(hi_[q]) ? hi_[q] - lo_[q] : kInf;
    std::ptrdiff_t leave = -1;
    double leave_alpha = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = dir * t(i, q);
      if (std::fabs(alpha) <= pivot_tol) continue;
      const std::size_t b = basic_[i];
      double limit;
      if (alpha > 0.0) {
        if (!std::isfinite(lo_[b])) continue;
        limit = (x_[b] - lo_[b]) / alpha;
      } else {
        if (!std::isfinite(hi_[b])) continue;
        limit = (hi_[b] - x_[b]) / -alpha;
      }
      limit = std::max(limit, 0.0);
      bool take = limit < step - 1e-12;
      if (!take && leave >= 0 && limit <= step + 1e-12) {
        take = phase_bland_ ? b < basic_[static_cast<std::size_t>(leave)]
                            : std::fabs(alpha) > std::fabs(leave_alpha);
      }
      if (take) {
        step = std::min(step, limit);
        leave = static_cast<std::ptrdiff_t>(i);
        leave_alpha = alpha;
      }
    }
    if (!std::isfinite(step)) return PhaseResult::kUnbounded;

    ++iterations_;
    degenerate = step <= tol_ ? degenerate + 1 : 0;
    if (degenerate > kDegenerateLimit) phase_bland_ = true;
    x_[q] += dir * step;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = dir * t(i, q);
      if (alpha != 0.0) x_[basic_[i]] -= alpha * step;
    }
    if (leave < 0) {
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
      continue;
    }
    const std::size_t r = static_cast<std::size_t>(leave);
    const std::size_t out = basic_[r];
    pivot(r, q);
    x_[out] = leave_alpha > 0.0 ? lo_[out] : hi_[out];
    if (++since_reinvert >= kReinvertInterval) {
      reinvert();
      since_reinvert = 0;
    }
  }
}

void Simplex::drive_out_artificials() {
  for (std::size_t r = 0; r < m_; ++r) {
    if (basic_[r] < first_artificial_) continue;
    std::size_t best = cols_;
    double best_abs = 1e-7;
    for (std::size_t j = 0; j < first_artificial_; ++j) {
      if (position_[j] >= 0) continue;
      if (std::fabs(t(r, j)) > best_abs) {
        best_abs = std::fabs(t(r, j));
        best = j;
      }
    }
    if (best == cols_) continue;  // redundant row; artificial stays basic at zero
    const std::size_t out = basic_[r];
    pivot(r, best);
    x_[out] = 0.0;
  }
  for (std::size_t j = first_artificial_; j < cols_; ++j) {
    hi_[j] = 0.0;
    if (position_[j] < 0) x_[j] = 0.0;
  }
}

LpResult Simplex::run() {
  setup();
  LpResult result;
  result.tolerance_used = tol_;
  if (cols_ > first_artificial_) {
    std::vector<double> phase1(cols_, 0.0);
    for (std::size_t j = first_artificial_; j < cols_; ++j) phase1[j] = 1.0;
    optimize(phase1);
    double infeasibility = 0.0, scale = 1.0;
    for (std::size_t j = first_artificial_; j < cols_; ++j) infeasibility += x_[j];
    for (const auto& row : lp_.rows) scale = std::max(scale, std::fabs(row.rhs));
    if (infeasibility > std::max(1e-9, 100.0 * tol_) * scale) {
      result.status = LpStatus::kInfeasible;
      result.iterations = iterations_;
      return result;
    }
    drive_out_artificials();
  }
  std::vector<double> phase2(cols_, 0.0);
  std::copy(lp_.cost.begin(), lp_.cost.end(), phase2.begin());
  if (optimize(phase2) == PhaseResult::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    result.iterations = iterations_;
    return result;
  }

  // Bound and row checks on the final, freshly inverted basis.
  const double feas = std::max(tol_, 1e-12);
  for (std::size_t j = 0; j < cols_; ++j) {
    const double slack = feas * (1.0 + std::fabs(x_[j]));
    if (x_[j] < lo_[j]) {
      if (x_[j] < lo_[j] - slack * 10.0) throw NumericalTrouble{"bound violation after optimisation"};
      x_[j] = lo_[j];
    } else if (x_[j] > hi_[j]) {
      if (x_[j] > hi_[j] + slack * 10.0) throw NumericalTrouble{"bound violation after optimisation"};
      x_[j] = hi_[j];
    }
  }
  for (std::size_t i = 0; i < m_; ++i) {
    const auto& row = lp_.rows[i];
    double activity = 0.0;
    for (std::size_t k = 0; k < row.index.size(); ++k) activity += row.coef[k] * x_[row.index[k]];
    const double excess = row.sense == Sense::kLessEqual      ? activity - row.rhs
                          : row.sense == Sense::kGreaterEqual ? row.rhs - activity
                                                              : std::fabs(activity - row.rhs);
    if (excess > 10.0 * feas * row_scale(i)) throw NumericalTrouble{"row violation after optimisation"};
  }
  result.status = LpStatus::kOptimal;
  result.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  for (std::size_t j = 0; j < n_; ++j) result.objective += lp_.cost[j] * result.x[j];
  result.iterations = iterations_;
  return result;
}

}  // namespace

LpResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options) {
  const std::size_t n = lp.column_count();
  if (lp.lower.size() != n || lp.upper.size() != n) throw ConfigurationError("bound vectors do not match");
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower[j] > lp.upper[j]) {
      LpResult result;
      result.status = LpStatus::kInfeasible;
      return result;
    }
  }
  std::uint64_t spent = 0;
  std::string first_reason;
  Simplex simplex(lp, options.tolerance, false, options.iteration_limit);
  try {
    return simplex.run();
  } catch (const NumericalTrouble& trouble) {
    spent = simplex.iterations();
    first_reason = trouble.reason;
  }
  Simplex retry(lp, options.fallback_tolerance, true, options.iteration_limit);
  try {
    auto result = retry.run();
    result.iterations += spent;
    return result;
  } catch (const NumericalTrouble& trouble) {
    throw SolverFailure("simplex failed on " + std::to_string(lp.rows.size()) + " rows x " +
                        std::to_string(n) + " columns: " + first_reason + " at tolerance " +
                        std::to_string(options.tolerance) + ", then " + trouble.reason + " at fallback " +
                        std::to_string(options.fallback_tolerance) + " after " +
                        std::to_string(spent + retry.iterations()) + " iterations");
  }
}

}  // namespace slice_embed
