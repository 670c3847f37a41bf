// Copyright 2026 The dsmopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Two-phase primal simplex for boxed variables.
//
// Each row i gets a logical (slack) column s_i so that A x + s = b, with
// s_i in [0, inf) for <=, (-inf, 0] for >=, and [0, 0] for = rows. Rows whose
// slack cannot absorb the initial residual get an artificial column; phase 1
// minimises the sum of artificials, phase 2 the model objective with the
// artificials pinned to zero.

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsmopt/errors.hpp"
#include "lp_engine.hpp"

namespace dsmopt {
namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr std::size_t kRefactorInterval = 100;

}  // namespace

class SimplexRun {
 public:
  SimplexRun(const LpEngine& lp, const std::vector<double>& lower, const std::vector<double>& upper)
      : lp_(lp), m_(lp.rows_), n_(lp.cols_) {
    setup(lower, upper);
  }

  LpSolution run() {
    LpSolution out;
    if (infeasible_bounds_) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
    if (!artificial_row_.empty()) {
      std::fill(cost_.begin(), cost_.end(), 0.0);
      for (std::size_t a = 0; a < artificial_row_.size(); ++a) cost_[n_ + m_ + a] = 1.0;
      compute_duals();
      const SolveStatus s1 = iterate();
      if (s1 != SolveStatus::kOptimal) {
        // Phase 1 is bounded below by zero; anything else is numerical trouble.
        throw NumericalBreakdown("simplex phase 1 did not converge");
      }
      double infeasibility = 0.0;
      for (std::size_t a = 0; a < artificial_row_.size(); ++a) infeasibility += x_[n_ + m_ + a];
      if (infeasibility > phase1_tol_) {
        out.status = SolveStatus::kInfeasible;
        out.iterations = iterations_;
        return out;
      }
      for (std::size_t a = 0; a < artificial_row_.size(); ++a) {
        const std::size_t j = n_ + m_ + a;
        ub_[j] = 0.0;
        if (position_[j] < 0) x_[j] = 0.0;
      }
    }
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(lp_.cost_.begin(), lp_.cost_.end(), cost_.begin());
    compute_duals();
    const SolveStatus s2 = iterate();
    out.iterations = iterations_;
    out.status = s2;
    if (s2 != SolveStatus::kOptimal) return out;

    refactor();
    out.values.resize(n_);
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      out.values[j] = std::clamp(x_[j], lb_[j], ub_[j]);
      out.objective += lp_.cost_[j] * out.values[j];
    }
    return out;
  }

 private:
  std::size_t total() const { return n_ + m_ + artificial_row_.size(); }

  template <typename F>
  void for_column(std::size_t j, F&& f) const {
    if (j < n_) {
      for (std::size_t p = lp_.col_start_[j]; p < lp_.col_start_[j + 1]; ++p) f(lp_.row_index_[p], lp_.value_[p]);
    } else if (j < n_ + m_) {
      f(j - n_, 1.0);
    } else {
      const std::size_t a = j - n_ - m_;
      f(artificial_row_[a], artificial_sign_[a]);
    }
  }

  void setup(const std::vector<double>& lower, const std::vector<double>& upper) {
    lb_.assign(n_ + m_, 0.0);
    ub_.assign(n_ + m_, 0.0);
    x_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lb_[j] = lower[j];
      ub_[j] = upper[j];
      if (lb_[j] > ub_[j] + kPrimalTol) infeasible_bounds_ = true;
      if (lb_[j] > ub_[j]) ub_[j] = lb_[j];
      if (std::isfinite(lb_[j])) {
        x_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        x_[j] = ub_[j];
      }
    }
    if (infeasible_bounds_) return;

    // Residual of each row with all structurals at their starting bound.
    std::vector<double> residual(lp_.rhs_);
    double scale = 1.0;
    for (double r : lp_.rhs_) scale = std::max(scale, std::abs(r));
    for (std::size_t j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (std::size_t p = lp_.col_start_[j]; p < lp_.col_start_[j + 1]; ++p) {
        residual[lp_.row_index_[p]] -= lp_.value_[p] * x_[j];
      }
    }
    phase1_tol_ = 1e-8 * scale;

    head_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      switch (lp_.relation_[i]) {
        case Relation::kLessEqual: lb_[s] = 0.0; ub_[s] = kInf; break;
        case Relation::kGreaterEqual: lb_[s] = -kInf; ub_[s] = 0.0; break;
        case Relation::kEqual: lb_[s] = 0.0; ub_[s] = 0.0; break;
      }
      const double r = residual[i];
      if (r >= lb_[s] - kPrimalTol && r <= ub_[s] + kPrimalTol) {
        x_[s] = r;
        head_[i] = s;
      } else {
        const double at = r < lb_[s] ? lb_[s] : ub_[s];
        x_[s] = at;
        const double excess = r - at;
        artificial_row_.push_back(i);
        artificial_sign_.push_back(excess > 0 ? 1.0 : -1.0);
        lb_.push_back(0.0);
        ub_.push_back(kInf);
        x_.push_back(std::abs(excess));
        head_[i] = n_ + m_ + artificial_row_.size() - 1;
      }
    }
    // Artificial indices depend on the final slack count, so fix them up now.
    position_.assign(total(), -1);
    for (std::size_t i = 0; i < m_; ++i) position_[head_[i]] = static_cast<long>(i);

    // The starting basis is diagonal with +-1 entries.
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double sign = 1.0;
      for_column(head_[i], [&](std::size_t, double v) { sign = v; });
      binv_[i * m_ + i] = 1.0 / sign;
    }
    cost_.assign(total(), 0.0);
    d_.assign(total(), 0.0);
    bland_after_ = 5 * total();
    max_iterations_ = 50 * (total() + m_) + 1000;
  }

  bool is_fixed(std::size_t j) const { return lb_[j] == ub_[j]; }

  void compute_duals() {
    std::vector<double> y(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const double cb = cost_[head_[k]];
      if (cb == 0.0) continue;
      const double* row = &binv_[k * m_];
      for (std::size_t i = 0; i < m_; ++i) y[i] += cb * row[i];
    }
    const std::size_t N = total();
    for (std::size_t j = 0; j < N; ++j) {
      if (position_[j] >= 0) {
        d_[j] = 0.0;
        continue;
      }
      double dj = cost_[j];
      for_column(j, [&](std::size_t i, double v) { dj -= y[i] * v; });
      d_[j] = dj;
    }
  }

  void recompute_primal() {
    std::vector<double> r(lp_.rhs_);
    const std::size_t N = total();
    for (std::size_t j = 0; j < N; ++j) {
      if (position_[j] >= 0 || x_[j] == 0.0) continue;
      const double xj = x_[j];
      for_column(j, [&](std::size_t i, double v) { r[i] -= v * xj; });
    }
    for (std::size_t k = 0; k < m_; ++k) {
      const double* row = &binv_[k * m_];
      double acc = 0.0;
      for (std::size_t i = 0; i < m_; ++i) acc += row[i] * r[i];
      x_[head_[k]] = acc;
    }
  }

  // Gauss-Jordan inversion of the current basis, skipping structural zeros.
  void refactor() {
    std::vector<double> w(m_ * m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      for_column(head_[k], [&](std::size_t i, double v) { w[i * m_ + k] = v; });
    }
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;

    std::vector<std::size_t> nz_w, nz_inv;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      double best = std::abs(w[c * m_ + c]);
      for (std::size_t r = c + 1; r < m_; ++r) {
        const double a = std::abs(w[r * m_ + c]);
        if (a > best) {
          best = a;
          piv = r;
        }
      }
      if (best < kSingularTol) throw NumericalBreakdown("simplex basis is singular");
      if (piv != c) {
        std::swap_ranges(w.begin() + piv * m_, w.begin() + (piv + 1) * m_, w.begin() + c * m_);
        std::swap_ranges(binv_.begin() + piv * m_, binv_.begin() + (piv + 1) * m_, binv_.begin() + c * m_);
      }
      double* wc = &w[c * m_];
      double* ic = &binv_[c * m_];
      const double inv = 1.0 / wc[c];
      nz_w.clear();
      nz_inv.clear();
      for (std::size_t k = c; k < m_; ++k) {
        if (wc[k] != 0.0) {
          wc[k] *= inv;
          nz_w.push_back(k);
        }
      }
      for (std::size_t k = 0; k < m_; ++k) {
        if (ic[k] != 0.0) {
          ic[k] *= inv;
          nz_inv.push_back(k);
        }
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = w[r * m_ + c];
        if (f == 0.0) continue;
        double* wr = &w[r * m_];
        double* ir = &binv_[r * m_];
        for (std::size_t k : nz_w) wr[k] -= f * wc[k];
        wr[c] = 0.0;
        for (std::size_t k : nz_inv) ir[k] -= f * ic[k];
      }
    }
    // Row swaps above permute rows of the inverse consistently with W, so
    // binv_ now holds B^-1 with rows indexed by basis position.
    recompute_primal();
    compute_duals();
    since_refactor_ = 0;
  }

  // Candidate entering column, or npos.
  std::size_t price(bool bland) const {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t best = npos;
    double best_score = 0.0;
    const std::size_t N = total();
    for (std::size_t j = 0; j < N; ++j) {
      if (position_[j] >= 0 || is_fixed(j)) continue;
      const double dj = d_[j];
      const bool at_lower = std::isfinite(lb_[j]) && x_[j] == lb_[j];
      const bool at_upper = std::isfinite(ub_[j]) && x_[j] == ub_[j];
      double score = 0.0;
      if (at_lower && dj < -kDualTol) score = -dj;
      else if (at_upper && dj > kDualTol) score = dj;
      else if (!at_lower && !at_upper && std::abs(dj) > kDualTol) score = std::abs(dj);
      if (score == 0.0) continue;
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  SolveStatus iterate() {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<double> alpha(m_);
    std::vector<double> rho(m_);
    while (true) {
      if (iterations_ >= max_iterations_) throw NumericalBreakdown("simplex iteration limit reached");
      if (since_refactor_ >= kRefactorInterval) refactor();
      const bool bland = iterations_ >= bland_after_;
      const std::size_t q = price(bland);
      if (q == npos) {
        // Confirm optimality on fresh factors before stopping.
        if (since_refactor_ > 0) {
          refactor();
          if (price(bland) != npos) continue;
        }
        return SolveStatus::kOptimal;
      }
      const double sigma = d_[q] < 0 ? 1.0 : -1.0;

      std::fill(alpha.begin(), alpha.end(), 0.0);
      for_column(q, [&](std::size_t i, double v) {
        for (std::size_t k = 0; k < m_; ++k) alpha[k] += binv_[k * m_ + i] * v;
      });

      // Ratio test. delta_k is the rate of change of basic k per unit step.
      const double flip = ub_[q] - lb_[q];
      std::size_t leave = npos;
      double theta = kInf;
      if (!bland) {
        double theta_max = kInf;
        for (std::size_t k = 0; k < m_; ++k) {
          if (std::abs(alpha[k]) <= kPivotTol) continue;
          const std::size_t b = head_[k];
          const double delta = -sigma * alpha[k];
          const double room = delta < 0 ? x_[b] - lb_[b] + kPrimalTol : ub_[b] - x_[b] + kPrimalTol;
          if (!std::isfinite(room)) continue;
          theta_max = std::min(theta_max, std::max(room, 0.0) / std::abs(delta));
        }
        double best_pivot = 0.0;
        for (std::size_t k = 0; k < m_; ++k) {
          if (std::abs(alpha[k]) <= kPivotTol) continue;
          const std::size_t b = head_[k];
          const double delta = -sigma * alpha[k];
          const double room = delta < 0 ? x_[b] - lb_[b] : ub_[b] - x_[b];
          if (!std::isfinite(room)) continue;
          const double ratio = std::max(room, 0.0) / std::abs(delta);
          if (ratio <= theta_max && std::abs(alpha[k]) > best_pivot) {
            best_pivot = std::abs(alpha[k]);
            leave = k;
            theta = ratio;
          }
        }
        if (std::isfinite(flip) && flip <= theta_max) {
          leave = npos;
          theta = flip;
        }
      } else {
        for (std::size_t k = 0; k < m_; ++k) {
          if (std::abs(alpha[k]) <= kPivotTol) continue;
          const std::size_t b = head_[k];
          const double delta = -sigma * alpha[k];
          const double room = delta < 0 ? x_[b] - lb_[b] : ub_[b] - x_[b];
          if (!std::isfinite(room)) continue;
          const double ratio = std::max(room, 0.0) / std::abs(delta);
          if (ratio < theta || (ratio == theta && leave != npos && b < head_[leave])) {
            theta = ratio;
            leave = k;
          }
        }
        if (std::isfinite(flip) && flip <= theta) {
          leave = npos;
          theta = flip;
        }
      }
      if (!std::isfinite(theta)) return SolveStatus::kUnbounded;

      ++iterations_;
      ++since_refactor_;
      const double step = sigma * theta;
      for (std::size_t k = 0; k < m_; ++k) {
        if (alpha[k] != 0.0) x_[head_[k]] -= step * alpha[k];
      }

      if (leave == npos) {
        x_[q] = sigma > 0 ? ub_[q] : lb_[q];
        continue;
      }

      const std::size_t out = head_[leave];
      const double delta_out = -sigma * alpha[leave];
      x_[out] = delta_out < 0 ? lb_[out] : ub_[out];
      x_[q] += step;

      // Reduced-cost update from the pivot row.
      std::copy(binv_.begin() + leave * m_, binv_.begin() + (leave + 1) * m_, rho.begin());
      const double ratio_d = d_[q] / alpha[leave];
      head_[leave] = q;
      position_[q] = static_cast<long>(leave);
      position_[out] = -1;
      const std::size_t N = total();
      for (std::size_t j = 0; j < N; ++j) {
        if (position_[j] >= 0 || is_fixed(j)) continue;
        double arj = 0.0;
        for_column(j, [&](std::size_t i, double v) { arj += rho[i] * v; });
        d_[j] -= ratio_d * arj;
      }
      d_[q] = 0.0;

      // Basis inverse update: eliminate alpha from every row but the pivot.
      double* prow = &binv_[leave * m_];
      const double inv = 1.0 / alpha[leave];
      for (std::size_t i = 0; i < m_; ++i) prow[i] *= inv;
      for (std::size_t k = 0; k < m_; ++k) {
        if (k == leave || alpha[k] == 0.0) continue;
        const double f = alpha[k];
        double* row = &binv_[k * m_];
        for (std::size_t i = 0; i < m_; ++i) row[i] -= f * prow[i];
      }
    }
  }

  const LpEngine& lp_;
  std::size_t m_;
  std::size_t n_;

  std::vector<double> lb_, ub_, x_, cost_, d_;
  std::vector<std::size_t> artificial_row_;
  std::vector<double> artificial_sign_;
  std::vector<std::size_t> head_;
  std::vector<long> position_;
  std::vector<double> binv_;
  bool infeasible_bounds_ = false;
  double phase1_tol_ = 1e-8;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t bland_after_ = 0;
  std::size_t max_iterations_ = 0;
};

LpEngine::LpEngine(const MilpModel& m) : rows_(m.constraints().size()), cols_(m.num_vars()) {
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const LinearConstraint& c = m.constraints()[i];
    for (const Term& t : c.terms) cols[t.var].push_back({i, t.coef});
    relation_.push_back(c.relation);
    rhs_.push_back(c.rhs);
  }
  col_start_.push_back(0);
  for (const auto& col : cols) {
    for (const auto& [i, v] : col) {
      row_index_.push_back(i);
      value_.push_back(v);
    }
    col_start_.push_back(row_index_.size());
  }
  cost_.assign(cols_, 0.0);
  for (const Term& t : m.objective()) cost_[t.var] += t.coef;
}

LpSolution LpEngine::solve(const std::vector<double>& lower, const std::vector<double>& upper) const {
  SimplexRun run(*this, lower, upper);
  return run.run();
}

}  // namespace detail

LpSolution solve_lp(const MilpModel& m) { return solve_lp(m, m.lower(), m.upper()); }

LpSolution solve_lp(const MilpModel& m, const std::vector<double>& lower,
                    const std::vector<double>& upper) {
  return detail::LpEngine(m).solve(lower, upper);
}

double max_constraint_violation(const MilpModel& m, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < m.num_vars(); ++j) {
    worst = std::max(worst, m.lower()[j] - x[j]);
    worst = std::max(worst, x[j] - m.upper()[j]);
  }
  for (const LinearConstraint& c : m.constraints()) {
    double lhs = 0.0;
    for (const Term& t : c.terms) lhs += t.coef * x[t.var];
    switch (c.relation) {
      case Relation::kLessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

}  // namespace dsmopt
