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


#include "dsmopt/schedule.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "dsmopt/errors.hpp"
#include "oracles.hpp"
#include "random_scenario.hpp"

namespace dsmopt {
namespace {

StorageSpec table_two_es() {
  StorageSpec st;
  st.name = "ES";
  st.eta_ch = 0.95;
  st.eta_disch = 0.95;
  st.e_rated_kwh = 12;
  st.soc_min_pct = 20;
  st.soc_max_pct = 100;
  st.soc_init_pct = 20;
  st.soc_req_pct = 20;
  st.t_req = 0;
  st.p_ch_max_kw = 4;
  st.p_disch_max_kw = 4;
  return st;
}

// One step of 0.5 h, grid large enough for anything below.
Scenario one_storage_scenario(std::size_t steps) {
  Scenario s = make_empty_scenario(TimeGrid(0.5, steps), 50.0);
  StorageSpec st = table_two_es();
  st.availability = constant_series(1, SeriesUnit::kBinary, s.time);
  s.storages.push_back(st);
  return s;
}

Schedule empty_schedule(const Scenario& s) {
  Schedule sch;
  sch.time = s.time;
  const std::size_t T = s.num_steps();
  for (const StorageSpec& st : s.storages) {
    sch.storages.push_back({st.name, std::vector<double>(T, 0.0), std::vector<double>(T, 0.0),
                            std::vector<double>(T + 1, st.soc_init_pct)});
  }
  for (const LoadSpec& l : s.type1_loads) sch.loads.push_back({l.name, 1, l.power_kw, std::vector<int>(T, 0)});
  for (const LoadSpec& l : s.type2_loads) sch.loads.push_back({l.name, 2, l.power_kw, std::vector<int>(T, 0)});
  sch.import_kw.assign(T, 0.0);
  sch.export_kw.assign(T, 0.0);
  return sch;
}

// Fills imports so every step balances.
void balance_with_import(Schedule& sch, const Scenario& s) {
  for (std::size_t t = 0; t < s.num_steps(); ++t) {
    double need = s.base_load[t] - s.pv[t] + sch.load_kw(t);
    for (const StorageTrace& tr : sch.storages) need += tr.charge_kw[t] - tr.discharge_kw[t];
    sch.import_kw[t] = std::max(0.0, need);
    sch.export_kw[t] = std::max(0.0, -need);
  }
}

// 20 + 0.95 * 4 * 100 * 0.5 / 12 = 35.8333...
TEST(VerifySchedule, OneChargingStepOfTheTableTwoBattery) {
  const Scenario s = one_storage_scenario(1);
  Schedule sch = empty_schedule(s);
  sch.storages[0].charge_kw[0] = 4.0;
  sch.storages[0].soc_pct[1] = 20.0 + 0.95 * 4.0 * 100.0 * 0.5 / 12.0;
  balance_with_import(sch, s);
  EXPECT_NEAR(sch.storages[0].soc_pct[1], 35.8333333333, 1e-9);
  const VerificationReport r = verify_schedule(sch, s, 1e-6);
  EXPECT_TRUE(r.pass);
  ASSERT_NE(r.find("soc_recursion"), nullptr);
  EXPECT_EQ(r.find("soc_recursion")->max_residual, 0.0);

  sch.storages[0].soc_pct[1] = 36.0;
  const VerificationReport bad = verify_schedule(sch, s, 1e-6);
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(bad.find("soc_recursion")->violations, 1u);
}

TEST(VerifySchedule, FlagsEachStorageFamily) {
  const Scenario s = one_storage_scenario(2);
  Schedule sch = empty_schedule(s);
  sch.storages[0].charge_kw = {5.0, 1.0};
  sch.storages[0].discharge_kw = {0.0, 1.0};
  sch.storages[0].soc_pct = testing::hand_soc(s.storages[0], sch.storages[0].charge_kw,
                                              sch.storages[0].discharge_kw, 0.5);
  balance_with_import(sch, s);
  const VerificationReport r = verify_schedule(sch, s, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.find("charge_bound")->violations, 1u);
  EXPECT_EQ(r.find("mutual_exclusion")->violations, 1u);
  EXPECT_EQ(r.find("soc_recursion")->violations, 0u);
  EXPECT_EQ(r.find("power_balance")->violations, 0u);
}

TEST(VerifySchedule, TargetAndBounds) {
  Scenario s = one_storage_scenario(2);
  s.storages[0].soc_req_pct = 50;
  s.storages[0].t_req = 2;
  Schedule sch = empty_schedule(s);
  balance_with_import(sch, s);
  const VerificationReport r = verify_schedule(sch, s, 1e-6);
  EXPECT_EQ(r.find("soc_target")->violations, 1u);
  EXPECT_NEAR(r.find("soc_target")->max_residual, 30.0, 1e-12);
}

TEST(VerifySchedule, CleanerDrawsTwoPointFourKwh) {
  Scenario s = make_empty_scenario(TimeGrid(0.5, 48), 10.0);
  s.type1_loads.push_back(LoadSpec{"Cleaner", 0.6, 8, {0, 47}});
  Schedule sch = empty_schedule(s);
  for (std::size_t t : {1, 3, 5, 7, 20, 21, 40, 47}) sch.loads[0].on_off[t] = 1;
  balance_with_import(sch, s);
  double energy = 0.0;
  for (std::size_t t = 0; t < 48; ++t) energy += sch.loads[0].power_kw * sch.loads[0].on_off[t] * 0.5;
  EXPECT_NEAR(energy, 2.4, 1e-12);
  const VerificationReport r = verify_schedule(sch, s, 1e-6);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.find("load_energy")->max_residual, 1e-12);
}

TEST(VerifySchedule, SplitDishwasherBreaksContiguity) {
  Scenario s = make_empty_scenario(TimeGrid(0.5, 6), 10.0);
  s.type2_loads.push_back(LoadSpec{"Dishwasher", 1.0, 2, {0, 5}});
  Schedule sch = empty_schedule(s);
  sch.loads[0].on_off = {0, 1, 0, 0, 1, 0};
  balance_with_import(sch, s);
  const VerificationReport r = verify_schedule(sch, s, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.find("type2_contiguity")->violations, 1u);
  EXPECT_EQ(r.find("load_duration")->violations, 0u);

  sch.loads[0].on_off = {0, 0, 1, 1, 0, 0};
  balance_with_import(sch, s);
  EXPECT_TRUE(verify_schedule(sch, s, 1e-6).pass);
}

TEST(VerifySchedule, WindowBalanceAndGrid) {
  Scenario s = make_empty_scenario(TimeGrid(1.0, 3), 2.0);
  s.grid.export_enabled = false;
  s.type1_loads.push_back(LoadSpec{"L", 1.0, 1, {1, 2}});
  Schedule sch = empty_schedule(s);
  sch.loads[0].on_off = {1, 0, 0};
  sch.import_kw = {1.0, 0.5, 3.0};
  sch.export_kw = {0.0, 0.0, 3.0};
  const VerificationReport r = verify_schedule(sch, s, 1e-6);
  EXPECT_EQ(r.find("load_window")->violations, 1u);
  EXPECT_EQ(r.find("power_balance")->violations, 1u);
  EXPECT_EQ(r.find("grid_import_cap")->violations, 1u);
  EXPECT_EQ(r.find("grid_export_cap")->violations, 1u);
  EXPECT_EQ(r.find("grid_exclusion"), nullptr);
}

TEST(VerifySchedule, WrongLengthsFailEarly) {
  const Scenario s = one_storage_scenario(3);
  Schedule sch = empty_schedule(s);
  sch.import_kw.pop_back();
  const VerificationReport r = verify_schedule(sch, s, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.find("series_length")->violations, 1u);
}

TEST(ExtractSchedule, RoundsNearlyIntegralBinaries) {
  Scenario s = make_empty_scenario(TimeGrid(1.0, 2), 10.0);
  s.type1_loads.push_back(LoadSpec{"L", 1.0, 1, {0, 1}});
  const MilpModel m = build_model(s);
  MilpSolution sol;
  sol.status = SolveStatus::kOptimal;
  sol.values.assign(m.num_vars(), 0.0);
  sol.values[m.at({VarKind::kLambda, 0, 0})] = 0.9999995;
  sol.values[m.at({VarKind::kLambda, 0, 1})] = 0.0000004;
  sol.values[m.at({VarKind::kPImp, VarId::kNoDevice, 0})] = 1.0;
  const Schedule sch = extract_schedule(m, sol, s);
  EXPECT_EQ(sch.loads[0].on_off, (std::vector<int>{1, 0}));
  EXPECT_EQ(sch.import_kw, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(sch.scenario_hash, scenario_hash(s));
  EXPECT_EQ(sch.variant, ModelVariant::kCorrect);
}

TEST(ExtractSchedule, RequiresAnOptimalSolve) {
  const Scenario s = make_empty_scenario(TimeGrid(1.0, 2), 10.0);
  const MilpModel m = build_model(s);
  MilpSolution sol;
  sol.status = SolveStatus::kInfeasible;
  EXPECT_THROW(extract_schedule(m, sol, s), StatusNotOptimal);
  sol.status = SolveStatus::kNodeBudgetExceeded;
  sol.values.assign(m.num_vars(), 0.0);
  EXPECT_THROW(extract_schedule(m, sol, s), StatusNotOptimal);
}

TEST(ExtractSchedule, MisformulatedLoadsRunOverTheirWindow) {
  Scenario s = make_empty_scenario(TimeGrid(1.0, 4), 10.0);
  s.type1_loads.push_back(LoadSpec{"L", 1.0, 1, {1, 2}});
  const MilpModel m = build_misformulated_model(s);
  const MilpSolution sol = solve_milp(m);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  const Schedule sch = extract_schedule(m, sol, s);
  EXPECT_EQ(sch.loads[0].on_off, (std::vector<int>{0, 1, 1, 0}));
  EXPECT_EQ(sch.export_kw, (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(sch.variant, ModelVariant::kMisformulated);
}

TEST(CostOf, HandExample) {
  const CostReport r = cost_of({2, 0}, {0, 1}, Series("c", SeriesUnit::kCurrencyPerKwh, {0.10, 0.20}),
                               Series("r", SeriesUnit::kCurrencyPerKwh, {0.05, 0.15}), 0.5);
  EXPECT_NEAR(r.total_cost, 0.025, 1e-15);
  EXPECT_NEAR(r.import_cost, 0.1, 1e-15);
  EXPECT_NEAR(r.export_revenue, 0.075, 1e-15);
  ASSERT_EQ(r.per_step.size(), 2u);
  EXPECT_NEAR(r.per_step[1].export_revenue, 0.075, 1e-15);
}

TEST(CostOf, ZeroFlowsCostNothing) {
  const Series p("c", SeriesUnit::kCurrencyPerKwh, {0.3, 0.3, 0.3});
  EXPECT_EQ(cost_of({0, 0, 0}, {0, 0, 0}, p, p, 0.5).total_cost, 0.0);
  EXPECT_THROW(cost_of({0, 0}, {0, 0, 0}, p, p, 0.5), GridMismatch);
}

TEST(CostOfProperty, MatchesHandSum) {
  testing::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = rng.pick(1, 96);
    std::vector<double> imp(n), exp(n), ci(n), ce(n);
    for (std::size_t t = 0; t < n; ++t) {
      imp[t] = rng.uniform(0, 10);
      exp[t] = rng.uniform(0, 10);
      ci[t] = rng.uniform(0, 1);
      ce[t] = rng.uniform(0, 1);
    }
    const double dt = rng.chance(0.5) ? 0.5 : 0.25;
    const CostReport r = cost_of(imp, exp, Series("c", SeriesUnit::kCurrencyPerKwh, ci),
                                 Series("r", SeriesUnit::kCurrencyPerKwh, ce), dt);
    EXPECT_NEAR(r.total_cost, testing::hand_cost(imp, exp, ci, ce, dt), 1e-12);
    EXPECT_NEAR(r.total_cost, r.import_cost - r.export_revenue, 1e-12);
  }
}

TEST(PercentReduction, ReportedPairGivesEightPointOneThree) {
  const double p = percent_reduction(25.33, 23.27);
  EXPECT_EQ(std::round(p * 100.0) / 100.0, 8.13);
  EXPECT_EQ(percent_reduction(0.0, 5.0), 0.0);
  EXPECT_EQ(percent_reduction(10.0, 10.0), 0.0);
}

TEST(Compare, IdenticalSchedulesHaveZeroDeltas) {
  Scenario s = one_storage_scenario(4);
  s.import_price = Series("c", SeriesUnit::kCurrencyPerKwh, {0.1, 0.2, 0.3, 0.4});
  s.export_price = s.import_price;
  s.base_load = Series("b", SeriesUnit::kKw, {1, 2, 3, 4});
  Schedule sch = empty_schedule(s);
  balance_with_import(sch, s);
  const CostReport c = cost_of(sch, s);
  const ComparisonReport r = compare(sch, c, s, sch, c, s);
  EXPECT_EQ(r.cost_delta, 0.0);
  EXPECT_EQ(r.percent_reduction, 0.0);
  ASSERT_EQ(r.per_step.size(), 4u);
  for (const StepDelta& d : r.per_step) {
    EXPECT_EQ(d.import_kw, 0.0);
    EXPECT_EQ(d.export_kw, 0.0);
    EXPECT_EQ(d.demand_kw, 0.0);
  }
  Scenario other = one_storage_scenario(5);
  Schedule longer = empty_schedule(other);
  EXPECT_THROW(compare(sch, c, s, longer, cost_of(longer, other), other), GridMismatch);
}

TEST(ScheduleCsv, Layout) {
  Scenario s = one_storage_scenario(2);
  s.type1_loads.push_back(LoadSpec{"L", 1.0, 1, {0, 1}});
  Schedule sch = empty_schedule(s);
  sch.storages[0].charge_kw = {4.0, 0.0};
  sch.storages[0].soc_pct = {20.0, 35.833333333, 35.833333333};
  sch.loads[0].on_off = {0, 1};
  sch.import_kw = {4.0, 1.0};
  sch.export_kw = {0.0, -0.0};
  std::ostringstream out;
  write_schedule_csv(out, sch);
  EXPECT_EQ(out.str(),
            "step,soc_ES,p_ch_ES,p_disch_ES,lambda_L,p_imp,p_exp\n"
            "0,20.00,4.000,0.000,0,4.000,0.000\n"
            "1,35.83,0.000,0.000,1,1.000,0.000\n"
            "2,35.83,,,,,\n");

  ComparisonReport r;
  r.per_step = {{1.0, -0.5, 0.0}};
  std::ostringstream cmp;
  write_comparison_csv(cmp, r);
  EXPECT_EQ(cmp.str(), "step,delta_import_kw,delta_export_kw,delta_demand_kw\n0,1.000,-0.500,0.000\n");
}

// Every optimal solve re-verifies from the scenario alone, and the SoC the
// solver reports matches the recursion recomputed here.
TEST(ScheduleProperty, OptimalSolvesVerify) {
  testing::Rng rng(55);
  int solved = 0;
  for (int i = 0; i < 60; ++i) {
    const Scenario s = testing::random_scenario(rng);
    const MilpModel m = build_model(s);
    const MilpSolution sol = solve_milp(m);
    if (sol.status != SolveStatus::kOptimal) continue;
    ++solved;
    const Schedule sch = extract_schedule(m, sol, s);
    const VerificationReport r = verify_schedule(sch, s, 1e-6);
    EXPECT_TRUE(r.pass) << "case " << i;
    for (std::size_t j = 0; j < s.storages.size(); ++j) {
      const auto soc = testing::hand_soc(s.storages[j], sch.storages[j].charge_kw,
                                         sch.storages[j].discharge_kw, s.time.delta_t_hours());
      for (std::size_t t = 0; t < soc.size(); ++t) EXPECT_NEAR(sch.storages[j].soc_pct[t], soc[t], 1e-6);
    }
    for (std::size_t k = 0; k < sch.loads.size(); ++k) {
      int on = 0;
      int runs = 0;
      for (std::size_t t = 0; t < sch.loads[k].on_off.size(); ++t) {
        on += sch.loads[k].on_off[t];
        if (sch.loads[k].on_off[t] && (t == 0 || !sch.loads[k].on_off[t - 1])) ++runs;
      }
      const LoadSpec& l = k < s.type1_loads.size() ? s.type1_loads[k] : s.type2_loads[k - s.type1_loads.size()];
      EXPECT_EQ(static_cast<std::size_t>(on), l.duration_steps);
      if (sch.loads[k].type == 2) EXPECT_EQ(runs, 1);
    }
    EXPECT_NEAR(cost_of(sch, s).total_cost, sol.objective, 1e-9 * std::max(1.0, std::abs(sol.objective)));
  }
  EXPECT_GT(solved, 20);
}

// A later, lower target with discharge allowed admits every schedule of the
// stricter scenario whose storages cannot discharge.
TEST(ScheduleProperty, RelaxedTargetsNeverCostMore) {
  testing::Rng rng(56);
  int checked = 0;
  for (int i = 0; i < 80 && checked < 25; ++i) {
    Scenario strict = testing::random_scenario(rng);
    if (strict.storages.empty()) continue;
    for (StorageSpec& st : strict.storages) st.discharge_enabled = false;
    const MilpSolution a = solve_milp(build_model(strict));
    if (a.status != SolveStatus::kOptimal) continue;
    Scenario relaxed = strict;
    for (StorageSpec& st : relaxed.storages) {
      st.soc_req_pct = std::min(st.soc_req_pct, std::max(st.soc_init_pct, 0.8 * st.soc_req_pct));
      st.t_req = rng.pick(st.t_req, relaxed.num_steps());
      st.discharge_enabled = true;
    }
    if (build_model(relaxed).free_binary_count() > 40) continue;
    const MilpSolution b = solve_milp(build_model(relaxed));
    ASSERT_EQ(b.status, SolveStatus::kOptimal);
    EXPECT_LE(b.objective, a.objective + 1e-6 * std::max(1.0, std::abs(a.objective)));
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

// With non-negative prices and export headroom, the correct model can take
// any baseline schedule, switch loads off outside their chosen steps, and
// export or stop importing what that frees; so its optimum is never dearer.
TEST(ScheduleProperty, MisformulationNeverBeatsTheCorrectOptimum) {
  testing::Rng rng(57);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 25; ++i) {
    Scenario s = testing::random_scenario(rng);
    if (!validate_scenario(s).empty()) continue;
    s.grid.export_enabled = true;
    s.grid.exclusive_exchange = false;
    s.grid.p_export_max = constant_series(100.0, SeriesUnit::kKw, s.time, "export_max_kw");
    const MilpModel bad = build_misformulated_model(s);
    const MilpSolution mis = solve_milp(bad);
    if (mis.status != SolveStatus::kOptimal) continue;
    const MilpSolution good = solve_milp(build_model(s));
    ASSERT_EQ(good.status, SolveStatus::kOptimal) << "case " << i;
    const double mis_cost = cost_of(extract_schedule(bad, mis, s), s).total_cost;
    EXPECT_LE(good.objective, mis_cost + 1e-6 * std::max(1.0, std::abs(mis_cost))) << "case " << i;
    ++checked;
  }
  EXPECT_GE(checked, 15);
}

}  // namespace
}  // namespace dsmopt
