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

// Microgrid description: storage units, dispatchable loads, grid exchange
// limits and the exogenous price / generation / demand profiles.
//
// All clock labels are resolved to step-boundary indices when a scenario is
// parsed, so everything downstream works purely on indices. The file grammar
// is documented in docs/scenario-format.md.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dsmopt/timeseries.hpp"

namespace dsmopt {

/// Inclusive range of step indices.
struct StepWindow {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last >= first ? last - first + 1 : 0; }
  bool contains(std::size_t t) const { return t >= first && t <= last; }
  bool operator==(const StepWindow&) const = default;
};

/// Battery or EV. SoC quantities are percent of rated capacity.
struct StorageSpec {
  std::string name;
  double eta_ch = 1.0;
  double eta_disch = 1.0;
  double e_rated_kwh = 1.0;
  double soc_min_pct = 0.0;
  double soc_max_pct = 100.0;
  double soc_init_pct = 0.0;
  double soc_req_pct = 0.0;
  std::size_t t_req = 0;  // step boundary, 0..T
  double p_ch_max_kw = 0.0;
  double p_disch_max_kw = 0.0;
  Series availability;  // binary, length T
  bool discharge_enabled = true;

  bool operator==(const StorageSpec&) const = default;
};

/// Dispatchable appliance running at constant power for `duration_steps`
/// steps inside `window`. The energy it draws is derived, never given.
struct LoadSpec {
  std::string name;
  double power_kw = 0.0;
  std::size_t duration_steps = 0;
  StepWindow window;

  double energy_kwh(double delta_t_hours) const {
    return power_kw * static_cast<double>(duration_steps) * delta_t_hours;
  }
  bool operator==(const LoadSpec&) const = default;
};

/// Interruptible load: its steps may be spread out.
using Type1LoadSpec = LoadSpec;
/// Non-interruptible load: one contiguous run.
using Type2LoadSpec = LoadSpec;

struct GridSpec {
  Series p_import_max;  // kW
  Series p_export_max;  // kW
  bool export_enabled = true;
  bool exclusive_exchange = false;

  bool operator==(const GridSpec&) const = default;
};

struct Scenario {
  TimeGrid time{0.5, 48};
  GridSpec grid;
  Series import_price;  // currency/kWh
  Series export_price;  // currency/kWh
  Series pv;            // kW
  Series base_load;     // kW, non-dispatchable
  std::vector<StorageSpec> storages;
  std::vector<Type1LoadSpec> type1_loads;
  std::vector<Type2LoadSpec> type2_loads;

  std::size_t num_steps() const { return time.num_steps(); }
  bool operator==(const Scenario&) const = default;
};

/// A zero-price, zero-profile scenario with no devices and grid limits of
/// `grid_limit_kw` in both directions. Starting point for programmatic use.
Scenario make_empty_scenario(const TimeGrid& grid, double grid_limit_kw = 10.0);

/// Parses the scenario format. Relative series paths resolve against
/// `base_dir`. Throws ParseError (message carries line and field),
/// UnknownSeriesRef for missing series files, and propagates timeseries
/// errors (OffGridLabel, OutOfHorizon, RowCountMismatch, ...).
Scenario parse_scenario(std::istream& config, const std::filesystem::path& base_dir = {});

/// Opens `path` and parses it with its parent directory as base.
Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical text form: all series inlined, clock targets as step indices.
/// parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// FNV-1a over the canonical text form.
std::uint64_t scenario_hash(const Scenario& s);

enum class ViolationCode {
  kSeriesLengthMismatch,
  kDuplicateName,
  kEfficiencyOutOfRange,
  kNonPositiveCapacity,
  kSocRangeInverted,
  kSocOutOfRange,
  kInitOutOfRange,
  kTargetExceedsMax,
  kTargetTimeOutOfHorizon,
  kTargetUnreachable,
  kNonPositivePower,
  kZeroDuration,
  kWindowOutOfHorizon,
  kDurationExceedsWindow,
  kRunDoesNotFit,
};

std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string device;  // empty for scenario-level findings
  std::string message;
  /// Structural violations break model construction; the rest only predict
  /// infeasibility and are left for the solver to confirm.
  bool structural = false;

  bool operator==(const Violation&) const = default;
};

/// Pure structural and reachability screen. Ordered by device declaration
/// (scenario-level first, then storages, Type 1, Type 2), then by code.
std::vector<Violation> validate_scenario(const Scenario& s);

bool has_structural_violation(const std::vector<Violation>& violations);

}  // namespace dsmopt
