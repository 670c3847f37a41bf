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

#pragma once

#include <cstddef>
#include <vector>

#include "dsmopt/model.hpp"
#include "dsmopt/solver.hpp"

namespace dsmopt::detail {

/// Row/column data of a model's LP relaxation, prepared once and solved
/// repeatedly under different variable bounds.
class LpEngine {
 public:
  explicit LpEngine(const MilpModel& m);

  LpSolution solve(const std::vector<double>& lower, const std::vector<double>& upper) const;

  std::size_t num_rows() const { return rows_; }
  std::size_t num_cols() const { return cols_; }

 private:
  friend class SimplexRun;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  // Structural columns in compressed sparse column form.
  std::vector<std::size_t> col_start_;
  std::vector<std::size_t> row_index_;
  std::vector<double> value_;
  std::vector<Relation> relation_;
  std::vector<double> rhs_;
  std::vector<double> cost_;
};

}  // namespace dsmopt::detail
