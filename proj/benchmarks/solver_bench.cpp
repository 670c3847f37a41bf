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


#include <benchmark/benchmark.h>

#include <string>

#include "dsmopt/model.hpp"
#include "dsmopt/scenario.hpp"
#include "dsmopt/solver.hpp"

namespace {

const std::string kData = DSMOPT_DATA_DIR;

void BM_BuildModel(benchmark::State& state) {
  const dsmopt::Scenario s = dsmopt::load_scenario_file(kData + "/default.scenario");
  for (auto _ : state) benchmark::DoNotOptimize(dsmopt::build_model(s));
}
BENCHMARK(BM_BuildModel);

void BM_RootRelaxation(benchmark::State& state) {
  const dsmopt::MilpModel m = dsmopt::build_model(dsmopt::load_scenario_file(kData + "/default.scenario"));
  std::size_t iterations = 0;
  for (auto _ : state) {
    const dsmopt::LpSolution r = dsmopt::solve_lp(m);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.objective);
  }
  state.counters["pivots"] = static_cast<double>(iterations);
}
BENCHMARK(BM_RootRelaxation)->Unit(benchmark::kMillisecond);

void BM_SolveDay(benchmark::State& state, const char* file) {
  const dsmopt::MilpModel m = dsmopt::build_model(dsmopt::load_scenario_file(kData + "/" + file));
  std::size_t nodes = 0;
  for (auto _ : state) {
    const dsmopt::MilpSolution r = dsmopt::solve_milp(m);
    nodes = r.node_count;
    benchmark::DoNotOptimize(r.objective);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK_CAPTURE(BM_SolveDay, default_day, "default.scenario")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveDay, customized_day, "customized.scenario")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
