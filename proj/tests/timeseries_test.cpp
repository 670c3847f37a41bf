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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "dsmopt/errors.hpp"
#include "random_scenario.hpp"

namespace dsmopt {
namespace {

std::string rows(std::size_t n, double v) {
  std::string out = "step,value\n";
  for (std::size_t t = 0; t < n; ++t) out += std::to_string(t) + "," + format_decimal(v) + "\n";
  return out;
}

TEST(TimeGrid, RejectsDegenerateGrids) {
  EXPECT_THROW(TimeGrid(0.0, 48), InvalidValue);
  EXPECT_THROW(TimeGrid(-0.5, 48), InvalidValue);
  EXPECT_THROW(TimeGrid(0.5, 0), InvalidValue);
  EXPECT_THROW(TimeGrid(0.5, 4, "7h30"), OffGridLabel);
  EXPECT_DOUBLE_EQ(TimeGrid(0.5, 48).horizon_hours(), 24.0);
}

TEST(LoadSeries, FortyEightRowsGiveFortyEightValues) {
  std::istringstream in(rows(48, 0.125));
  const Series s = load_series(in, TimeGrid(0.5, 48), "price", SeriesUnit::kCurrencyPerKwh);
  EXPECT_EQ(s.size(), 48u);
  EXPECT_EQ(s[47], 0.125);
}

TEST(LoadSeries, RowCountMustMatchHorizon) {
  std::istringstream short_in(rows(47, 1.0));
  EXPECT_THROW(load_series(short_in, TimeGrid(0.5, 48), "p", SeriesUnit::kKw), RowCountMismatch);
  std::istringstream long_in(rows(49, 1.0));
  EXPECT_THROW(load_series(long_in, TimeGrid(0.5, 48), "p", SeriesUnit::kKw), RowCountMismatch);
}

TEST(LoadSeries, NegativePvIsRejected) {
  std::istringstream in("step,value\n0,1\n1,-0.2\n");
  EXPECT_THROW(load_series(in, TimeGrid(0.5, 2), "pv", SeriesUnit::kKw), NegativeValue);
}

TEST(LoadSeries, MalformedRowsReportTheirLine) {
  std::istringstream no_header("0,1\n1,1\n");
  EXPECT_THROW(load_series(no_header, TimeGrid(1.0, 2), "x", SeriesUnit::kKw), MalformedRow);
  std::istringstream text("step,value\n0,1\n1,abc\n");
  try {
    load_series(text, TimeGrid(1.0, 2), "x", SeriesUnit::kKw);
    FAIL() << "expected MalformedRow";
  } catch (const MalformedRow& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream skipped("step,value\n0,1\n2,1\n");
  EXPECT_THROW(load_series(skipped, TimeGrid(1.0, 2), "x", SeriesUnit::kKw), MalformedRow);
  std::istringstream extra("step,value\n0,1,2\n");
  EXPECT_THROW(load_series(extra, TimeGrid(1.0, 1), "x", SeriesUnit::kKw), MalformedRow);
}

TEST(Series, UnitChecks) {
  EXPECT_THROW(Series("b", SeriesUnit::kBinary, {0.0, 0.5}), InvalidValue);
  EXPECT_THROW(Series("f", SeriesUnit::kFraction, {1.5}), InvalidValue);
  EXPECT_THROW(Series("f", SeriesUnit::kFraction, {-0.1}), NegativeValue);
  EXPECT_THROW(Series("k", SeriesUnit::kKw, {std::nan("")}), InvalidValue);
  EXPECT_NO_THROW(Series("c", SeriesUnit::kCurrencyPerKwh, {-0.05}));
}

TEST(ConstantSeries, Examples) {
  EXPECT_EQ(constant_series(1, SeriesUnit::kBinary, TimeGrid(0.5, 4)).values(),
            (std::vector<double>{1, 1, 1, 1}));
  EXPECT_EQ(constant_series(7, SeriesUnit::kKw, TimeGrid(0.5, 2)).values(), (std::vector<double>{7, 7}));
  EXPECT_THROW(constant_series(-1, SeriesUnit::kKw, TimeGrid(0.5, 2)), NegativeValue);
}

TEST(StepOfClock, Examples) {
  const TimeGrid half_hour(0.5, 48, "00:00");
  EXPECT_EQ(step_of_clock("07:30", half_hour), 15u);
  EXPECT_EQ(step_of_clock("00:00", half_hour), 0u);
  EXPECT_EQ(step_of_clock("00:00", TimeGrid(1.0, 24)), 0u);
  EXPECT_EQ(step_of_clock("23:00", half_hour), 46u);
  EXPECT_EQ(step_of_clock("24:00", half_hour), 48u);
  EXPECT_THROW(step_of_clock("07:45", half_hour), OffGridLabel);
  EXPECT_THROW(step_of_clock("12:00", TimeGrid(0.5, 8)), OutOfHorizon);
  EXPECT_THROW(parse_clock_minutes("25:00"), OffGridLabel);
  EXPECT_THROW(parse_clock_minutes("24:30"), OffGridLabel);
  EXPECT_EQ(parse_clock_minutes("7:30"), 450);
}

TEST(StepOfClock, LabelsBeforeStartWrapToNextDay) {
  const TimeGrid evening(0.5, 24, "18:00");
  EXPECT_EQ(step_of_clock("18:30", evening), 1u);
  EXPECT_EQ(step_of_clock("02:00", evening), 16u);
}

TEST(FormatDecimal, TrimsTrailingZeros) {
  EXPECT_EQ(format_decimal(0.5), "0.5");
  EXPECT_EQ(format_decimal(3.0), "3");
  EXPECT_EQ(format_decimal(0.123456789), "0.123456789");
  EXPECT_EQ(format_decimal(-0.0), "0");
}

// Values with at most nine fractional digits survive write -> load unchanged.
TEST(SeriesProperty, WriteLoadRoundTrip) {
  testing::Rng rng(20260101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.pick(1, 60);
    std::vector<double> v(n);
    for (double& x : v) {
      const auto micro = static_cast<double>(rng.pick(0, 50'000'000'000ULL));
      x = micro / 1e9;
    }
    const Series s("x", SeriesUnit::kKw, v);
    std::ostringstream out;
    write_series(out, s);
    std::istringstream in(out.str());
    const Series back = load_series(in, TimeGrid(0.5, n), "x", SeriesUnit::kKw);
    ASSERT_EQ(back.values(), s.values()) << out.str();
  }
}

TEST(ShippedData, SeriesFilesMatchTheDay) {
  const TimeGrid day(0.5, 48);
  for (const char* name : {"price_import.csv", "pv.csv", "base_load.csv"}) {
    std::ifstream in(std::string(DSMOPT_DATA_DIR) + "/" + name);
    ASSERT_TRUE(in) << name;
    EXPECT_EQ(load_series(in, day, name, SeriesUnit::kKw).size(), 48u) << name;
  }
}

}  // namespace
}  // namespace dsmopt
