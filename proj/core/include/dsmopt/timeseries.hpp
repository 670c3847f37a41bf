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

// Exogenous time series aligned to a fixed-step horizon.
//
// Series files are plain text: a `step,value` header followed by one row per
// step, steps numbered 0..T-1 in order. Values are decimal reals with at most
// nine fractional digits. No resampling happens anywhere: a file must already
// be on the scenario's step size.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dsmopt {

/// Uniform time discretisation of the scheduling horizon.
class TimeGrid {
 public:
  /// Throws InvalidValue unless delta_t_hours > 0 and num_steps >= 1.
  /// `start_label` is a wall-clock "HH:MM" used only to resolve clock
  /// targets; it is validated here.
  TimeGrid(double delta_t_hours, std::size_t num_steps,
           std::string start_label = "00:00");

  double delta_t_hours() const { return delta_t_hours_; }
  std::size_t num_steps() const { return num_steps_; }
  const std::string& start_label() const { return start_label_; }
  double horizon_hours() const { return delta_t_hours_ * static_cast<double>(num_steps_); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double delta_t_hours_;
  std::size_t num_steps_;
  std::string start_label_;
};

enum class SeriesUnit { kCurrencyPerKwh, kKw, kFraction, kBinary };

std::string_view to_string(SeriesUnit unit);
/// Accepts "currency/kWh", "kW", "fraction", "binary".
SeriesUnit parse_series_unit(std::string_view text);

/// A named, unit-tagged vector of per-step values. Immutable once built.
class Series {
 public:
  Series() = default;
  /// Validates every entry against the unit: finite; kW >= 0; fraction in
  /// [0,1]; binary in {0,1}. Throws NegativeValue or InvalidValue.
  Series(std::string name, SeriesUnit unit, std::vector<double> values);

  const std::string& name() const { return name_; }
  SeriesUnit unit() const { return unit_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t t) const { return values_[t]; }

  /// True when every entry equals the first one.
  bool is_constant() const;

  /// Same values multiplied by `factor`, same name and unit.
  Series scaled(double factor) const;

  bool operator==(const Series&) const = default;

 private:
  std::string name_;
  SeriesUnit unit_ = SeriesUnit::kKw;
  std::vector<double> values_;
};

/// Reads a series file. Throws RowCountMismatch when the row count differs
/// from grid.num_steps(), MalformedRow (with 1-based line number) for bad
/// rows, NegativeValue / InvalidValue for unit violations.
Series load_series(std::istream& source, const TimeGrid& grid, std::string name,
                   SeriesUnit unit);

/// Writes the file format read by load_series.
void write_series(std::ostream& out, const Series& series);

Series constant_series(double value, SeriesUnit unit, const TimeGrid& grid,
                       std::string name = "constant");

/// Formats a value with up to nine fractional digits, trailing zeros removed.
std::string format_decimal(double value);

/// Parses "H:MM" / "HH:MM" (hours 0..24, "24:00" only at the day end) into
/// minutes after midnight. Throws OffGridLabel for malformed labels.
int parse_clock_minutes(std::string_view label);

/// Maps a wall-clock label onto the step boundary it denotes. Boundary k is
/// the instant after step k-1, so with a 00:00 start and 30-minute steps
/// "07:30" is boundary 15. Labels earlier than the start wrap to the next day.
/// Throws OffGridLabel when the label is not on a boundary and OutOfHorizon
/// when it lies past boundary T.
std::size_t step_of_clock(std::string_view label, const TimeGrid& grid);

}  // namespace dsmopt
