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

#include "dsmopt/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "dsmopt/errors.hpp"
#include "text_util.hpp"

namespace dsmopt {

namespace {

constexpr int kMaxFractionDigits = 9;

void check_value(const std::string& name, SeriesUnit unit, double v, std::size_t t) {
  const std::string where = "series '" + name + "' step " + std::to_string(t);
  if (!std::isfinite(v)) throw InvalidValue(where + ": value is not finite");
  switch (unit) {
    case SeriesUnit::kKw:
      if (v < 0.0) throw NegativeValue(where + ": negative kW value " + format_decimal(v));
      break;
    case SeriesUnit::kFraction:
      if (v < 0.0) throw NegativeValue(where + ": negative fraction");
      if (v > 1.0) throw InvalidValue(where + ": fraction above 1");
      break;
    case SeriesUnit::kBinary:
      if (v != 0.0 && v != 1.0) throw InvalidValue(where + ": binary series must hold 0 or 1");
      break;
    case SeriesUnit::kCurrencyPerKwh:
      break;
  }
}

// Strict decimal: [+-]digits[.digits], at most nine fractional digits.
bool parse_decimal(std::string_view text, double& out) {
  if (text.empty()) return false;
  std::size_t i = 0;
  if (text[0] == '+' || text[0] == '-') ++i;
  std::size_t int_digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    ++i;
    ++int_digits;
  }
  std::size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      ++frac_digits;
    }
  }
  if (i != text.size() || int_digits + frac_digits == 0) return false;
  if (frac_digits > kMaxFractionDigits) return false;
  std::string_view body = text;
  if (body[0] == '+') body.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  return ec == std::errc() && ptr == body.data() + body.size();
}

}  // namespace

TimeGrid::TimeGrid(double delta_t_hours, std::size_t num_steps, std::string start_label)
    : delta_t_hours_(delta_t_hours), num_steps_(num_steps), start_label_(std::move(start_label)) {
  if (!(delta_t_hours_ > 0.0) || !std::isfinite(delta_t_hours_)) {
    throw InvalidValue("time grid: delta_t_hours must be positive");
  }
  if (num_steps_ < 1) throw InvalidValue("time grid: num_steps must be at least 1");
  (void)parse_clock_minutes(start_label_);
}

std::string_view to_string(SeriesUnit unit) {
  switch (unit) {
    case SeriesUnit::kCurrencyPerKwh: return "currency/kWh";
    case SeriesUnit::kKw: return "kW";
    case SeriesUnit::kFraction: return "fraction";
    case SeriesUnit::kBinary: return "binary";
  }
  return "?";
}

SeriesUnit parse_series_unit(std::string_view text) {
  if (text == "currency/kWh") return SeriesUnit::kCurrencyPerKwh;
  if (text == "kW") return SeriesUnit::kKw;
  if (text == "fraction") return SeriesUnit::kFraction;
  if (text == "binary") return SeriesUnit::kBinary;
  throw InvalidValue("unknown series unit '" + std::string(text) + "'");
}

Series::Series(std::string name, SeriesUnit unit, std::vector<double> values)
    : name_(std::move(name)), unit_(unit), values_(std::move(values)) {
  for (std::size_t t = 0; t < values_.size(); ++t) check_value(name_, unit_, values_[t], t);
}

bool Series::is_constant() const {
  return std::all_of(values_.begin(), values_.end(),
                     [&](double v) { return v == values_.front(); });
}

Series Series::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return Series(name_, unit_, std::move(v));
}

Series load_series(std::istream& source, const TimeGrid& grid, std::string name,
                   SeriesUnit unit) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> values;
  while (std::getline(source, line)) {
    ++line_no;
    std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    if (!have_header) {
      if (row != "step,value") {
        throw MalformedRow("series '" + name + "' line " + std::to_string(line_no) +
                           ": expected header 'step,value'");
      }
      have_header = true;
      continue;
    }
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw MalformedRow("series '" + name + "' line " + std::to_string(line_no) +
                         ": expected two comma-separated columns");
    }
    std::string_view step_text = detail::trim(row.substr(0, comma));
    std::string_view value_text = detail::trim(row.substr(comma + 1));
    std::size_t step = 0;
    auto [sp, sec] = std::from_chars(step_text.data(), step_text.data() + step_text.size(), step);
    if (sec != std::errc() || sp != step_text.data() + step_text.size() || step != values.size()) {
      throw MalformedRow("series '" + name + "' line " + std::to_string(line_no) +
                         ": expected step " + std::to_string(values.size()));
    }
    double v = 0.0;
    if (!parse_decimal(value_text, v)) {
      throw MalformedRow("series '" + name + "' line " + std::to_string(line_no) +
                         ": non-numeric value '" + std::string(value_text) + "'");
    }
    values.push_back(v);
  }
  if (!have_header) throw MalformedRow("series '" + name + "': missing header 'step,value'");
  if (values.size() != grid.num_steps()) {
    throw RowCountMismatch("series '" + name + "': " + std::to_string(values.size()) +
                           " rows, horizon has " + std::to_string(grid.num_steps()) + " steps");
  }
  return Series(std::move(name), unit, std::move(values));
}

void write_series(std::ostream& out, const Series& series) {
  out << "step,value\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out << t << ',' << format_decimal(series[t]) << '\n';
  }
}

Series constant_series(double value, SeriesUnit unit, const TimeGrid& grid, std::string name) {
  return Series(std::move(name), unit, std::vector<double>(grid.num_steps(), value));
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

int parse_clock_minutes(std::string_view label) {
  const auto colon = label.find(':');
  auto bad = [&]() { return OffGridLabel("malformed clock label '" + std::string(label) + "'"); };
  if (colon == std::string_view::npos || colon == 0 || colon > 2 || label.size() != colon + 3) {
    throw bad();
  }
  int hours = 0;
  int minutes = 0;
  auto [hp, hec] = std::from_chars(label.data(), label.data() + colon, hours);
  auto [mp, mec] = std::from_chars(label.data() + colon + 1, label.data() + label.size(), minutes);
  if (hec != std::errc() || hp != label.data() + colon || mec != std::errc() ||
      mp != label.data() + label.size()) {
    throw bad();
  }
  if (hours < 0 || hours > 24 || minutes < 0 || minutes > 59) throw bad();
  if (hours == 24 && minutes != 0) throw bad();
  return hours * 60 + minutes;
}

std::size_t step_of_clock(std::string_view label, const TimeGrid& grid) {
  const int start = parse_clock_minutes(grid.start_label());
  int offset = parse_clock_minutes(label) - start;
  if (offset < 0) offset += 24 * 60;
  const double step_minutes = grid.delta_t_hours() * 60.0;
  const double k = static_cast<double>(offset) / step_minutes;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9) {
    throw OffGridLabel("clock label '" + std::string(label) + "' is not on a step boundary");
  }
  if (rounded > static_cast<double>(grid.num_steps())) {
    throw OutOfHorizon("clock label '" + std::string(label) + "' lies beyond the horizon");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace dsmopt
