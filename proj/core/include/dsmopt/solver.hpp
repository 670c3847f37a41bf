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

// Bundled MILP solver.
//
// LP relaxations are solved by a primal simplex method for boxed variables
// (two phases, explicit basis inverse with periodic refactorisation). Pricing
// is Dantzig's rule with a Harris ratio test; after 5 * (number of columns)
// pivots the solve switches to Bland's rule for the rest of the run so it
// always terminates.
//
// Integer search is best-first branch-and-bound on the LP bound. Among open
// nodes whose bounds tie (within 1e-9 relative) the earliest created one is
// taken. Branching picks
// the most fractional binary, lowest index on ties; the 0-child is created
// before the 1-child. Every step is deterministic.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dsmopt/model.hpp"

namespace dsmopt {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNodeBudgetExceeded };

std::string_view to_string(SolveStatus status);

struct SolverOptions {
  double int_tol = 1e-6;
  double rel_gap = 1e-6;
  double abs_feas_tol = 1e-7;
  std::size_t max_nodes = 1'000'000;
  /// When set, one `node,bound,incumbent` line per solved node.
  std::ostream* trace = nullptr;
};

struct LpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
  std::size_t iterations = 0;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;  // empty unless an incumbent exists
  std::size_t node_count = 0;
  double bound = 0.0;
  std::size_t lp_iterations = 0;

  bool has_incumbent() const { return !values.empty(); }
};

/// LP relaxation of `m` (integrality dropped). Throws NumericalBreakdown when
/// the basis becomes singular or the iteration limit is hit.
LpSolution solve_lp(const MilpModel& m);

/// Same with the variable bounds replaced.
LpSolution solve_lp(const MilpModel& m, const std::vector<double>& lower,
                    const std::vector<double>& upper);

MilpSolution solve_milp(const MilpModel& m, const SolverOptions& opts = {});

/// Exhaustive oracle: fixes every free binary to each of its 2^n assignments
/// and solves the remaining LP. Throws TooManyBinaries when more than `cap`
/// binaries are free (binaries whose bounds are already fixed do not count).
MilpSolution brute_force_milp(const MilpModel& m, std::size_t cap = 20,
                              const SolverOptions& opts = {});

/// Largest violation of any row or bound by `x`.
double max_constraint_violation(const MilpModel& m, const std::vector<double>& x);

/// Pluggable solver contract; an external MILP backend can implement it.
class MilpSolver {
 public:
  virtual ~MilpSolver() = default;
  virtual std::string name() const = 0;
  virtual MilpSolution solve(const MilpModel& m, const SolverOptions& opts) const = 0;
};

class BranchAndBoundSolver : public MilpSolver {
 public:
  std::string name() const override { return "branch-and-bound"; }
  MilpSolution solve(const MilpModel& m, const SolverOptions& opts) const override {
    return solve_milp(m, opts);
  }
};

class BruteForceSolver : public MilpSolver {
 public:
  explicit BruteForceSolver(std::size_t cap = 20) : cap_(cap) {}
  std::string name() const override { return "brute-force"; }
  MilpSolution solve(const MilpModel& m, const SolverOptions& opts) const override {
    return brute_force_milp(m, cap_, opts);
  }

 private:
  std::size_t cap_;
};

}  // namespace dsmopt
