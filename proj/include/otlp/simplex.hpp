// Copyright 2026 The otlp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace otlp {

enum class LpRowType { kLe, kGe, kEq };

struct LpRow {
  std::vector<double> coeffs;
  LpRowType type = LpRowType::kLe;
  double rhs = 0.0;
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::int64_t iterations = 0;
};

/// Dense two-phase primal simplex minimizing c.x subject to the given rows
/// and x >= 0, with Bland's anti-cycling rule (lowest-index entering column,
/// lowest-index basic variable on ratio ties). Sized for the small LPs that
/// arise as relaxations of threshold-selection problems: a handful of rows,
/// hundreds of columns.
class DenseSimplex {
 public:
  static constexpr double kEps = 1e-9;
  static constexpr double kFeasEps = 1e-7;

  static LpSolution minimize(const std::vector<double>& objective,
                             const std::vector<LpRow>& rows) {
    DenseSimplex s(objective, rows);
    return s.run();
  }

 private:
  DenseSimplex(const std::vector<double>& objective,
               const std::vector<LpRow>& rows)
      : n_(objective.size()), m_(rows.size()), cost_(objective) {
    // Column layout: structural | slack/surplus | artificial.
    std::size_t extra = 0, artificial = 0;
    std::vector<LpRow> normalized = rows;
    for (auto& row : normalized) {
      if (row.rhs < 0) {
        for (auto& a : row.coeffs) a = -a;
        row.rhs = -row.rhs;
        if (row.type == LpRowType::kLe) {
          row.type = LpRowType::kGe;
        } else if (row.type == LpRowType::kGe) {
          row.type = LpRowType::kLe;
        }
      }
      if (row.type != LpRowType::kEq) ++extra;
      if (row.type != LpRowType::kLe) ++artificial;
    }
    cols_ = n_ + extra + artificial;
    art_start_ = n_ + extra;
    tableau_.assign(m_, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m_, 0);

    std::size_t next_extra = n_;
    std::size_t next_art = art_start_;
    for (std::size_t i = 0; i < m_; ++i) {
      const LpRow& row = normalized[i];
      if (row.coeffs.size() != n_) {
        throw std::logic_error("LP row width mismatch");
      }
      for (std::size_t j = 0; j < n_; ++j) tableau_[i][j] = row.coeffs[j];
      tableau_[i][cols_] = row.rhs;
      switch (row.type) {
        case LpRowType::kLe:
          tableau_[i][next_extra] = 1.0;
          basis_[i] = next_extra++;
          break;
        case LpRowType::kGe:
          tableau_[i][next_extra] = -1.0;
          ++next_extra;
          tableau_[i][next_art] = 1.0;
          basis_[i] = next_art++;
          break;
        case LpRowType::kEq:
          tableau_[i][next_art] = 1.0;
          basis_[i] = next_art++;
          break;
      }
    }
  }

  LpSolution run() {
    LpSolution result;
    // Phase 1: drive the artificials to zero.
    if (art_start_ < cols_) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t j = art_start_; j < cols_; ++j) phase1[j] = 1.0;
      reduced_ = reduced_costs(phase1);
      if (!iterate(/*allow_artificial=*/true)) {
        throw std::logic_error("phase-1 LP cannot be unbounded");
      }
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= art_start_) infeas += tableau_[i][cols_];
      }
      if (infeas > kFeasEps * (1.0 + scale())) {
        result.status = LpStatus::kInfeasible;
        result.iterations = iterations_;
        return result;
      }
      pivot_out_artificials();
    }
    // Phase 2: optimize the real objective over non-artificial columns.
    std::vector<double> phase2(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = cost_[j];
    reduced_ = reduced_costs(phase2);
    if (!iterate(/*allow_artificial=*/false)) {
      // The selection-problem relaxations are bounded by construction.
      throw std::logic_error("unbounded LP relaxation");
    }
    result.status = LpStatus::kOptimal;
    result.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) result.x[basis_[i]] = tableau_[i][cols_];
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      result.objective += cost_[j] * result.x[j];
    }
    result.iterations = iterations_;
    return result;
  }

  double scale() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      s = std::max(s, std::fabs(tableau_[i][cols_]));
    }
    return s;
  }

  // Last slot accumulates the (negated) objective offset alongside the rhs.
  std::vector<double> reduced_costs(const std::vector<double>& c) const {
    std::vector<double> r(cols_ + 1, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = c[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) {
        r[j] -= cb * tableau_[i][j];
      }
    }
    return r;
  }

  // Bland iterations until optimal (true) or unbounded (false).
  bool iterate(bool allow_artificial) {
    const std::size_t limit = allow_artificial ? cols_ : art_start_;
    for (;;) {
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < limit; ++j) {
        if (reduced_[j] < -kEps) {
          entering = j;
          break;
        }
      }
      if (entering == cols_) return true;
      std::size_t leaving = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = tableau_[i][entering];
        if (a > kEps) {
          const double ratio = tableau_[i][cols_] / a;
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps &&
               (leaving == m_ || basis_[i] < basis_[leaving]))) {
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving == m_) return false;
      pivot(leaving, entering);
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    ++iterations_;
    basis_[pr] = pc;
    std::vector<double>& prow = tableau_[pr];
    const double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j <= cols_; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == pr) continue;
      const double f = tableau_[i][pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) {
        tableau_[i][j] -= f * prow[j];
      }
      tableau_[i][pc] = 0.0;
    }
    if (!reduced_.empty()) {
      const double f = reduced_[pc];
      if (f != 0.0) {
        for (std::size_t j = 0; j <= cols_; ++j) {
          reduced_[j] -= f * prow[j];
        }
        reduced_[pc] = 0.0;
      }
    }
  }

  void pivot_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_start_) continue;
      for (std::size_t j = 0; j < art_start_; ++j) {
        if (std::fabs(tableau_[i][j]) > kEps) {
          pivot(i, j);
          break;
        }
      }
      // A row whose artificial cannot be pivoted out is redundant; the
      // artificial stays basic at zero and is excluded from phase 2.
    }
  }

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t cols_ = 0;
  std::size_t art_start_ = 0;
  std::vector<double> cost_;
  std::vector<std::vector<double>> tableau_;
  std::vector<std::size_t> basis_;
  std::vector<double> reduced_;
  std::int64_t iterations_ = 0;
};

inline LpSolution solve_lp_min(const std::vector<double>& objective,
                               const std::vector<LpRow>& rows) {
  return DenseSimplex::minimize(objective, rows);
}

}  // namespace otlp
