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

// Solver output as a domain schedule, its independent verification against
// the scenario, operating cost, and side-by-side comparison of two runs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsmopt/model.hpp"
#include "dsmopt/scenario.hpp"
#include "dsmopt/solver.hpp"
#include "dsmopt/timeseries.hpp"

namespace dsmopt {

struct StorageTrace {
  std::string name;
  std::vector<double> charge_kw;     // T
  std::vector<double> discharge_kw;  // T
  std::vector<double> soc_pct;       // T + 1 boundaries

  bool operator==(const StorageTrace&) const = default;
};

struct LoadTrace {
  std::string name;
  int type = 1;  // 1 interruptible, 2 contiguous
  double power_kw = 0.0;
  std::vector<int> on_off;  // T, entries 0 or 1

  bool operator==(const LoadTrace&) const = default;
};

struct Schedule {
  TimeGrid time{0.5, 48};
  std::vector<StorageTrace> storages;
  std::vector<LoadTrace> loads;  // type 1 loads first, then type 2
  std::vector<double> import_kw;
  std::vector<double> export_kw;
  std::uint64_t scenario_hash = 0;
  ModelVariant variant = ModelVariant::kCorrect;

  std::size_t num_steps() const { return time.num_steps(); }
  /// Power drawn by all scheduled loads at step t.
  double load_kw(std::size_t t) const;
  bool operator==(const Schedule&) const = default;
};

/// Throws StatusNotOptimal unless sol.status is Optimal. Binaries are rounded
/// to exact 0/1. For the misformulated variant the loads are reported as
/// running over their whole window, which is what that model assumed.
Schedule extract_schedule(const MilpModel& m, const MilpSolution& sol, const Scenario& s);

struct FamilyCheck {
  std::string family;
  double max_residual = 0.0;
  std::size_t violations = 0;

  bool operator==(const FamilyCheck&) const = default;
};

struct VerificationReport {
  std::vector<FamilyCheck> families;
  double tolerance = 0.0;
  bool pass = true;

  const FamilyCheck* find(const std::string& family) const;
};

/// Re-checks every constraint family of the scenario directly from the
/// schedule's series. Never consults a MilpModel.
VerificationReport verify_schedule(const Schedule& sch, const Scenario& s, double tol);

struct CostStep {
  double import_cost = 0.0;
  double export_revenue = 0.0;
};

struct CostReport {
  std::vector<CostStep> per_step;
  double import_cost = 0.0;
  double export_revenue = 0.0;
  double total_cost = 0.0;
};

CostReport cost_of(const std::vector<double>& import_kw, const std::vector<double>& export_kw,
                   const Series& import_price, const Series& export_price, double delta_t_hours);

CostReport cost_of(const Schedule& sch, const Scenario& s);

/// (a - b) / a * 100. Zero when a is zero.
double percent_reduction(double cost_a, double cost_b);

struct StepDelta {
  double import_kw = 0.0;
  double export_kw = 0.0;
  double demand_kw = 0.0;  // base load + dispatchable loads
};

struct ComparisonReport {
  double cost_a = 0.0;
  double cost_b = 0.0;
  double cost_delta = 0.0;         // a - b
  double percent_reduction = 0.0;  // (a - b) / a * 100
  std::vector<StepDelta> per_step; // a - b
};

/// Household consumption per step: base load plus dispatchable loads.
/// Storage charging is not counted.
std::vector<double> demand_kw(const Schedule& sch, const Scenario& s);

/// Throws GridMismatch when the time grids differ.
ComparisonReport compare(const Schedule& a, const CostReport& cost_a, const Scenario& sa,
                         const Schedule& b, const CostReport& cost_b, const Scenario& sb);

/// One row per boundary 0..T: SoC at the boundary, then the step's powers
/// (blank on the final row). kW to 3 decimals, SoC to 2.
void write_schedule_csv(std::ostream& out, const Schedule& sch);

void write_comparison_csv(std::ostream& out, const ComparisonReport& r);

}  // namespace dsmopt
