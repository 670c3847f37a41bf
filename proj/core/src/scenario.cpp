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

#include "dsmopt/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "dsmopt/errors.hpp"
#include "text_util.hpp"

namespace dsmopt {

namespace {

// ---------------------------------------------------------------------------
// Minimal reader for the sectioned key/value grammar.

struct Value {
  enum class Kind { kNumber, kBool, kString, kArray };
  Kind kind = Kind::kNumber;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<Value> items;
};

struct Entry {
  Value value;
  int line = 0;
  bool used = false;
};

struct Table {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

class ValueReader {
 public:
  ValueReader(std::string_view text, int line) : text_(text), line_(line) {}

  Value read_all() {
    Value v = read_value();
    skip_space();
    if (pos_ != text_.size()) fail(line_, "unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
    return v;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  Value read_value() {
    skip_space();
    if (pos_ >= text_.size()) fail(line_, "missing value");
    const char c = text_[pos_];
    if (c == '"') return read_string();
    if (c == '[') return read_array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      Value v;
      v.kind = Value::Kind::kBool;
      v.boolean = true;
      return v;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      Value v;
      v.kind = Value::Kind::kBool;
      return v;
    }
    return read_number();
  }

  Value read_string() {
    ++pos_;
    Value v;
    v.kind = Value::Kind::kString;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      v.text.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) fail(line_, "unterminated string");
    ++pos_;
    return v;
  }

  Value read_array() {
    ++pos_;
    Value v;
    v.kind = Value::Kind::kArray;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      Value item = read_value();
      if (item.kind == Value::Kind::kArray) fail(line_, "nested arrays are not supported");
      v.items.push_back(std::move(item));
      skip_space();
      if (pos_ >= text_.size()) fail(line_, "unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail(line_, "expected ',' or ']' in array");
    }
  }

  Value read_number() {
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ']' && text_[end] != ' ' &&
           text_[end] != '\t') {
      ++end;
    }
    std::string_view tok = text_.substr(pos_, end - pos_);
    std::string_view body = tok;
    if (!body.empty() && body[0] == '+') body.remove_prefix(1);
    Value v;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v.number);
    if (body.empty() || ec != std::errc() || ptr != body.data() + body.size() ||
        !std::isfinite(v.number)) {
      fail(line_, "invalid value '" + std::string(tok) + "'");
    }
    pos_ = end;
    return v;
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

struct Document {
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> arrays;
};

Document read_document(std::istream& in) {
  static const std::set<std::string> kTables = {"time", "grid", "prices", "profiles"};
  static const std::set<std::string> kArrays = {"storage", "type1_load", "type2_load"};
  Document doc;
  Table* current = nullptr;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      const bool is_array = line.size() > 1 && line[1] == '[';
      const std::size_t open = is_array ? 2 : 1;
      if (line.size() < open * 2 + 1 || line.substr(line.size() - open) != (is_array ? "]]" : "]")) {
        fail(line_no, "malformed section header");
      }
      std::string name(detail::trim(line.substr(open, line.size() - 2 * open)));
      if (is_array) {
        if (!kArrays.count(name)) fail(line_no, "unknown array section [[" + name + "]]");
        auto& list = doc.arrays[name];
        list.push_back(Table{name, line_no, {}});
        current = &list.back();
      } else {
        if (!kTables.count(name)) fail(line_no, "unknown section [" + name + "]");
        if (doc.tables.count(name)) fail(line_no, "duplicate section [" + name + "]");
        current = &(doc.tables[name] = Table{name, line_no, {}});
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) fail(line_no, "empty key");
    if (current == nullptr) fail(line_no, "key '" + key + "' outside of any section");
    if (current->entries.count(key)) fail(line_no, "duplicate key '" + key + "'");
    Value v = ValueReader(detail::trim(line.substr(eq + 1)), line_no).read_all();
    current->entries.emplace(key, Entry{std::move(v), line_no, false});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Typed field access with line-aware errors.

class Fields {
 public:
  explicit Fields(Table& table) : table_(table) {}

  bool has(const std::string& key) const { return table_.entries.count(key) > 0; }

  Entry* find(const std::string& key) {
    auto it = table_.entries.find(key);
    if (it == table_.entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  Entry& require(const std::string& key) {
    Entry* e = find(key);
    if (e == nullptr) fail(table_.line, "[" + table_.name + "] missing field '" + key + "'");
    return *e;
  }

  double number(const std::string& key) { return as_number(require(key), key); }
  double number_or(const std::string& key, double fallback) {
    Entry* e = find(key);
    return e ? as_number(*e, key) : fallback;
  }

  std::string string(const std::string& key) { return as_string(require(key), key); }
  std::optional<std::string> string_opt(const std::string& key) {
    Entry* e = find(key);
    if (e == nullptr) return std::nullopt;
    return as_string(*e, key);
  }

  bool boolean_or(const std::string& key, bool fallback) {
    Entry* e = find(key);
    if (e == nullptr) return fallback;
    if (e->value.kind != Value::Kind::kBool) fail(e->line, "field '" + key + "' must be true or false");
    return e->value.boolean;
  }

  std::size_t count(Entry& e, const std::string& key) {
    const double v = as_number(e, key);
    if (v < 0 || v != std::floor(v)) fail(e.line, "field '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  void reject(const std::string& key, const std::string& why) {
    if (Entry* e = find(key)) fail(e->line, "field '" + key + "' is not accepted: " + why);
  }

  void check_all_used() const {
    for (const auto& [key, entry] : table_.entries) {
      if (!entry.used) fail(entry.line, "[" + table_.name + "] unknown field '" + key + "'");
    }
  }

  int line() const { return table_.line; }

  static double as_number(const Entry& e, const std::string& key) {
    if (e.value.kind != Value::Kind::kNumber) fail(e.line, "field '" + key + "' must be a number");
    return e.value.number;
  }
  static std::string as_string(const Entry& e, const std::string& key) {
    if (e.value.kind != Value::Kind::kString) fail(e.line, "field '" + key + "' must be a string");
    return e.value.text;
  }

 private:
  Table& table_;
};

Series resolve_series(const Entry& e, const std::string& name, SeriesUnit unit,
                      const TimeGrid& grid, const std::filesystem::path& base_dir) {
  switch (e.value.kind) {
    case Value::Kind::kNumber:
      return constant_series(e.value.number, unit, grid, name);
    case Value::Kind::kArray: {
      std::vector<double> values;
      for (const Value& item : e.value.items) {
        if (item.kind != Value::Kind::kNumber) fail(e.line, "series '" + name + "' holds a non-number");
        values.push_back(item.number);
      }
      if (values.size() != grid.num_steps()) {
        throw RowCountMismatch("line " + std::to_string(e.line) + ": series '" + name + "' has " +
                               std::to_string(values.size()) + " values, horizon has " +
                               std::to_string(grid.num_steps()) + " steps");
      }
      return Series(name, unit, std::move(values));
    }
    case Value::Kind::kString: {
      const std::filesystem::path path = base_dir / e.value.text;
      std::ifstream file(path);
      if (!file) {
        throw UnknownSeriesRef("line " + std::to_string(e.line) + ": series '" + name +
                               "' refers to missing file '" + e.value.text + "'");
      }
      return load_series(file, grid, name, unit);
    }
    case Value::Kind::kBool:
      break;
  }
  fail(e.line, "series '" + name + "' must be a number, an array or a file path");
}

std::size_t resolve_boundary(Fields& f, const std::string& clock_key, const std::string& step_key,
                             const TimeGrid& grid) {
  Entry* clock = f.find(clock_key);
  Entry* step = f.find(step_key);
  if (clock != nullptr && step != nullptr) {
    fail(step->line, "give either '" + clock_key + "' or '" + step_key + "', not both");
  }
  if (clock != nullptr) return step_of_clock(Fields::as_string(*clock, clock_key), grid);
  if (step != nullptr) return f.count(*step, step_key);
  fail(f.line(), "missing field '" + clock_key + "' (or '" + step_key + "')");
}

LoadSpec parse_load(Table& table, const TimeGrid& grid) {
  Fields f(table);
  LoadSpec load;
  load.name = f.string("name");
  load.power_kw = f.number("power_kw");
  f.reject("energy_kwh", "load energy is derived from power and duration");

  Entry* hours = f.find("duration_hours");
  Entry* steps = f.find("duration_steps");
  if ((hours == nullptr) == (steps == nullptr)) {
    fail(table.line, "load '" + load.name + "' needs exactly one of duration_hours / duration_steps");
  }
  if (steps != nullptr) {
    load.duration_steps = f.count(*steps, "duration_steps");
  } else {
    const double h = Fields::as_number(*hours, "duration_hours") / grid.delta_t_hours();
    if (h < 0 || std::abs(h - std::round(h)) > 1e-9) {
      fail(hours->line, "duration_hours is not a whole number of steps");
    }
    load.duration_steps = static_cast<std::size_t>(std::round(h));
  }

  Entry* window = f.find("window");
  Entry* window_steps = f.find("window_steps");
  if (window != nullptr && window_steps != nullptr) {
    fail(window_steps->line, "give either 'window' or 'window_steps', not both");
  }
  load.window = StepWindow{0, grid.num_steps() - 1};
  if (window != nullptr) {
    const Value& v = window->value;
    if (v.kind != Value::Kind::kArray || v.items.size() != 2 ||
        v.items[0].kind != Value::Kind::kString || v.items[1].kind != Value::Kind::kString) {
      fail(window->line, "window must be [\"HH:MM\", \"HH:MM\"]");
    }
    const std::size_t from = step_of_clock(v.items[0].text, grid);
    const std::size_t to = step_of_clock(v.items[1].text, grid);
    if (to <= from) fail(window->line, "window end must come after its start");
    load.window = StepWindow{from, to - 1};
  } else if (window_steps != nullptr) {
    const Value& v = window_steps->value;
    if (v.kind != Value::Kind::kArray || v.items.size() != 2 ||
        v.items[0].kind != Value::Kind::kNumber || v.items[1].kind != Value::Kind::kNumber ||
        v.items[0].number < 0 || v.items[1].number < 0 ||
        v.items[0].number != std::floor(v.items[0].number) ||
        v.items[1].number != std::floor(v.items[1].number)) {
      fail(window_steps->line, "window_steps must be [first, last] step indices");
    }
    load.window = StepWindow{static_cast<std::size_t>(v.items[0].number),
                             static_cast<std::size_t>(v.items[1].number)};
  }
  f.check_all_used();
  return load;
}

StorageSpec parse_storage(Table& table, const TimeGrid& grid, const std::filesystem::path& base) {
  Fields f(table);
  StorageSpec s;
  s.name = f.string("name");
  s.eta_ch = f.number("eta_ch");
  s.eta_disch = f.number("eta_disch");
  s.e_rated_kwh = f.number("capacity_kwh");
  s.soc_min_pct = f.number("soc_min_pct");
  s.soc_max_pct = f.number("soc_max_pct");
  s.soc_init_pct = f.number("soc_init_pct");
  s.soc_req_pct = f.number("soc_req_pct");
  s.t_req = resolve_boundary(f, "t_req", "t_req_step", grid);
  s.p_ch_max_kw = f.number("p_ch_max_kw");
  s.p_disch_max_kw = f.number("p_disch_max_kw");
  const std::string avail_name = "availability:" + s.name;
  if (Entry* e = f.find("availability")) {
    s.availability = resolve_series(*e, avail_name, SeriesUnit::kBinary, grid, base);
  } else {
    s.availability = constant_series(1.0, SeriesUnit::kBinary, grid, avail_name);
  }
  s.discharge_enabled = f.boolean_or("discharge_enabled", true);
  f.check_all_used();
  return s;
}

Table& require_table(Document& doc, const std::string& name) {
  auto it = doc.tables.find(name);
  if (it == doc.tables.end()) fail(0, "missing section [" + name + "]");
  return it->second;
}

// ---------------------------------------------------------------------------
// Canonical writer.

std::string number_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s == "-0") s = "0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string series_text(const Series& s) {
  if (!s.values().empty() && s.is_constant()) return number_text(s[0]);
  std::string out = "[";
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (t > 0) out += ", ";
    out += number_text(s[t]);
  }
  return out + "]";
}

void write_load(std::ostream& out, const char* section, const LoadSpec& l) {
  out << "\n[[" << section << "]]\n"
      << "name = " << quoted(l.name) << "\n"
      << "power_kw = " << number_text(l.power_kw) << "\n"
      << "duration_steps = " << l.duration_steps << "\n"
      << "window_steps = [" << l.window.first << ", " << l.window.last << "]\n";
}

}  // namespace

Scenario make_empty_scenario(const TimeGrid& grid, double grid_limit_kw) {
  Scenario s;
  s.time = grid;
  s.grid.p_import_max = constant_series(grid_limit_kw, SeriesUnit::kKw, grid, "import_max_kw");
  s.grid.p_export_max = constant_series(grid_limit_kw, SeriesUnit::kKw, grid, "export_max_kw");
  s.import_price = constant_series(0.0, SeriesUnit::kCurrencyPerKwh, grid, "import_price");
  s.export_price = constant_series(0.0, SeriesUnit::kCurrencyPerKwh, grid, "export_price");
  s.pv = constant_series(0.0, SeriesUnit::kKw, grid, "pv");
  s.base_load = constant_series(0.0, SeriesUnit::kKw, grid, "base_load");
  return s;
}

Scenario parse_scenario(std::istream& config, const std::filesystem::path& base_dir) {
  Document doc = read_document(config);

  Fields time_fields(require_table(doc, "time"));
  const double dt = time_fields.number("delta_t_hours");
  std::size_t steps = 48;
  if (Entry* e = time_fields.find("num_steps")) steps = time_fields.count(*e, "num_steps");
  std::string start = time_fields.string_opt("start").value_or("00:00");
  time_fields.check_all_used();
  if (!(dt > 0.0) || steps < 1) fail(time_fields.line(), "[time] needs delta_t_hours > 0 and num_steps >= 1");
  const TimeGrid grid(dt, steps, start);

  Scenario s;
  s.time = grid;

  Fields g(require_table(doc, "grid"));
  s.grid.p_import_max = resolve_series(g.require("import_max_kw"), "import_max_kw", SeriesUnit::kKw, grid, base_dir);
  s.grid.p_export_max = resolve_series(g.require("export_max_kw"), "export_max_kw", SeriesUnit::kKw, grid, base_dir);
  s.grid.export_enabled = g.boolean_or("export_enabled", true);
  s.grid.exclusive_exchange = g.boolean_or("exclusive_exchange", false);
  g.check_all_used();

  Fields p(require_table(doc, "prices"));
  s.import_price = resolve_series(p.require("import"), "import_price", SeriesUnit::kCurrencyPerKwh, grid, base_dir);
  s.export_price = resolve_series(p.require("export"), "export_price", SeriesUnit::kCurrencyPerKwh, grid, base_dir);
  p.check_all_used();

  s.pv = constant_series(0.0, SeriesUnit::kKw, grid, "pv");
  s.base_load = constant_series(0.0, SeriesUnit::kKw, grid, "base_load");
  if (auto it = doc.tables.find("profiles"); it != doc.tables.end()) {
    Fields pr(it->second);
    if (Entry* e = pr.find("pv")) s.pv = resolve_series(*e, "pv", SeriesUnit::kKw, grid, base_dir);
    if (Entry* e = pr.find("base_load")) s.base_load = resolve_series(*e, "base_load", SeriesUnit::kKw, grid, base_dir);
    pr.check_all_used();
  }

  std::set<std::string> names;
  auto claim = [&](const std::string& name, int line) {
    if (name.empty()) fail(line, "device name must not be empty");
    if (!names.insert(name).second) fail(line, "duplicate device name '" + name + "'");
  };
  for (Table& t : doc.arrays["storage"]) {
    s.storages.push_back(parse_storage(t, grid, base_dir));
    claim(s.storages.back().name, t.line);
  }
  for (Table& t : doc.arrays["type1_load"]) {
    s.type1_loads.push_back(parse_load(t, grid));
    claim(s.type1_loads.back().name, t.line);
  }
  for (Table& t : doc.arrays["type2_load"]) {
    s.type2_loads.push_back(parse_load(t, grid));
    claim(s.type2_loads.back().name, t.line);
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open scenario file '" + path.string() + "'");
  return parse_scenario(file, path.parent_path());
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[time]\n"
      << "delta_t_hours = " << number_text(s.time.delta_t_hours()) << "\n"
      << "num_steps = " << s.time.num_steps() << "\n"
      << "start = " << quoted(s.time.start_label()) << "\n"
      << "\n[grid]\n"
      << "import_max_kw = " << series_text(s.grid.p_import_max) << "\n"
      << "export_max_kw = " << series_text(s.grid.p_export_max) << "\n"
      << "export_enabled = " << (s.grid.export_enabled ? "true" : "false") << "\n"
      << "exclusive_exchange = " << (s.grid.exclusive_exchange ? "true" : "false") << "\n"
      << "\n[prices]\n"
      << "import = " << series_text(s.import_price) << "\n"
      << "export = " << series_text(s.export_price) << "\n"
      << "\n[profiles]\n"
      << "pv = " << series_text(s.pv) << "\n"
      << "base_load = " << series_text(s.base_load) << "\n";
  for (const StorageSpec& st : s.storages) {
    out << "\n[[storage]]\n"
        << "name = " << quoted(st.name) << "\n"
        << "eta_ch = " << number_text(st.eta_ch) << "\n"
        << "eta_disch = " << number_text(st.eta_disch) << "\n"
        << "capacity_kwh = " << number_text(st.e_rated_kwh) << "\n"
        << "soc_min_pct = " << number_text(st.soc_min_pct) << "\n"
        << "soc_max_pct = " << number_text(st.soc_max_pct) << "\n"
        << "soc_init_pct = " << number_text(st.soc_init_pct) << "\n"
        << "soc_req_pct = " << number_text(st.soc_req_pct) << "\n"
        << "t_req_step = " << st.t_req << "\n"
        << "p_ch_max_kw = " << number_text(st.p_ch_max_kw) << "\n"
        << "p_disch_max_kw = " << number_text(st.p_disch_max_kw) << "\n"
        << "availability = " << series_text(st.availability) << "\n"
        << "discharge_enabled = " << (st.discharge_enabled ? "true" : "false") << "\n";
  }
  for (const LoadSpec& l : s.type1_loads) write_load(out, "type1_load", l);
  for (const LoadSpec& l : s.type2_loads) write_load(out, "type2_load", l);
  return out.str();
}

std::uint64_t scenario_hash(const Scenario& s) { return detail::fnv1a64(serialize_scenario(s)); }

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::kSeriesLengthMismatch: return "SERIES_LENGTH_MISMATCH";
    case ViolationCode::kDuplicateName: return "DUPLICATE_NAME";
    case ViolationCode::kEfficiencyOutOfRange: return "EFFICIENCY_OUT_OF_RANGE";
    case ViolationCode::kNonPositiveCapacity: return "NON_POSITIVE_CAPACITY";
    case ViolationCode::kSocRangeInverted: return "SOC_RANGE_INVERTED";
    case ViolationCode::kSocOutOfRange: return "SOC_OUT_OF_RANGE";
    case ViolationCode::kInitOutOfRange: return "INIT_OUT_OF_RANGE";
    case ViolationCode::kTargetExceedsMax: return "TARGET_EXCEEDS_MAX";
    case ViolationCode::kTargetTimeOutOfHorizon: return "TARGET_TIME_OUT_OF_HORIZON";
    case ViolationCode::kTargetUnreachable: return "TARGET_UNREACHABLE";
    case ViolationCode::kNonPositivePower: return "NON_POSITIVE_POWER";
    case ViolationCode::kZeroDuration: return "ZERO_DURATION";
    case ViolationCode::kWindowOutOfHorizon: return "WINDOW_OUT_OF_HORIZON";
    case ViolationCode::kDurationExceedsWindow: return "DURATION_EXCEEDS_WINDOW";
    case ViolationCode::kRunDoesNotFit: return "RUN_DOES_NOT_FIT";
  }
  return "UNKNOWN";
}

namespace {

class ViolationSink {
 public:
  explicit ViolationSink(std::vector<Violation>& out) : out_(out) {}

  void begin(std::string device) {
    flush();
    device_ = std::move(device);
  }
  void add(ViolationCode code, std::string message, bool structural) {
    pending_.push_back(Violation{code, device_, std::move(message), structural});
  }
  void flush() {
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const Violation& a, const Violation& b) { return a.code < b.code; });
    out_.insert(out_.end(), pending_.begin(), pending_.end());
    pending_.clear();
  }

 private:
  std::vector<Violation>& out_;
  std::vector<Violation> pending_;
  std::string device_;
};

void check_length(ViolationSink& sink, const Series& s, std::size_t steps) {
  if (s.size() != steps) {
    sink.add(ViolationCode::kSeriesLengthMismatch,
             "series '" + s.name() + "' has " + std::to_string(s.size()) + " values, expected " +
                 std::to_string(steps),
             true);
  }
}

void check_load(ViolationSink& sink, const LoadSpec& l, std::size_t steps, bool contiguous) {
  if (!(l.power_kw > 0.0)) sink.add(ViolationCode::kNonPositivePower, "load power must be positive", true);
  if (l.duration_steps == 0) sink.add(ViolationCode::kZeroDuration, "duration must be at least one step", true);
  if (l.window.first > l.window.last || l.window.last >= steps) {
    sink.add(ViolationCode::kWindowOutOfHorizon,
             "window [" + std::to_string(l.window.first) + ", " + std::to_string(l.window.last) +
                 "] is not inside steps 0.." + std::to_string(steps - 1),
             true);
    return;
  }
  if (l.duration_steps > l.window.length()) {
    const std::string msg = "duration of " + std::to_string(l.duration_steps) +
                            " steps exceeds the " + std::to_string(l.window.length()) +
                            "-step window";
    if (contiguous) {
      sink.add(ViolationCode::kRunDoesNotFit, "contiguous run does not fit: " + msg, false);
    } else {
      sink.add(ViolationCode::kDurationExceedsWindow, msg, false);
    }
  }
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  ViolationSink sink(out);
  const std::size_t steps = s.num_steps();
  const double dt = s.time.delta_t_hours();

  sink.begin("");
  for (const Series* series : {&s.grid.p_import_max, &s.grid.p_export_max, &s.import_price,
                               &s.export_price, &s.pv, &s.base_load}) {
    check_length(sink, *series, steps);
  }
  std::set<std::string> seen;
  auto note_name = [&](const std::string& name) {
    if (!seen.insert(name).second) {
      sink.add(ViolationCode::kDuplicateName, "device name '" + name + "' is used twice", true);
    }
  };
  for (const auto& st : s.storages) note_name(st.name);
  for (const auto& l : s.type1_loads) note_name(l.name);
  for (const auto& l : s.type2_loads) note_name(l.name);

  for (const StorageSpec& st : s.storages) {
    sink.begin(st.name);
    check_length(sink, st.availability, steps);
    if (!(st.eta_ch > 0.0 && st.eta_ch <= 1.0) || !(st.eta_disch > 0.0 && st.eta_disch <= 1.0)) {
      sink.add(ViolationCode::kEfficiencyOutOfRange, "efficiencies must lie in (0, 1]", true);
    }
    if (!(st.e_rated_kwh > 0.0)) {
      sink.add(ViolationCode::kNonPositiveCapacity, "rated capacity must be positive", true);
    }
    if (st.p_ch_max_kw < 0.0 || st.p_disch_max_kw < 0.0) {
      sink.add(ViolationCode::kNonPositivePower, "power limits must not be negative", true);
    }
    if (st.soc_min_pct < 0.0 || st.soc_max_pct > 100.0) {
      sink.add(ViolationCode::kSocOutOfRange, "SoC limits must lie in [0, 100] percent", true);
    }
    if (st.soc_min_pct > st.soc_max_pct) {
      sink.add(ViolationCode::kSocRangeInverted, "minimum SoC exceeds maximum SoC", true);
    }
    if (st.soc_init_pct < st.soc_min_pct || st.soc_init_pct > st.soc_max_pct) {
      sink.add(ViolationCode::kInitOutOfRange, "initial SoC lies outside [min, max]", false);
    }
    if (st.t_req > steps) {
      sink.add(ViolationCode::kTargetTimeOutOfHorizon,
               "target boundary " + std::to_string(st.t_req) + " lies beyond boundary " +
                   std::to_string(steps),
               true);
    }
    if (st.soc_req_pct > st.soc_max_pct) {
      sink.add(ViolationCode::kTargetExceedsMax,
               "target SoC " + format_decimal(st.soc_req_pct) + "% exceeds maximum SoC " +
                   format_decimal(st.soc_max_pct) + "%",
               false);
    } else if (st.t_req <= steps && st.availability.size() == steps && st.e_rated_kwh > 0.0) {
      // Best case: charge flat out at every available step before the target.
      double soc = st.soc_init_pct;
      const double gain = st.eta_ch * st.p_ch_max_kw * 100.0 * dt / st.e_rated_kwh;
      for (std::size_t t = 0; t < st.t_req; ++t) {
        if (st.availability[t] > 0.5) soc = std::min(st.soc_max_pct, soc + gain);
      }
      if (soc < st.soc_req_pct - 1e-9) {
        sink.add(ViolationCode::kTargetUnreachable,
                 "target SoC " + format_decimal(st.soc_req_pct) + "% unreachable by boundary " +
                     std::to_string(st.t_req) + " (best case " + format_decimal(soc) + "%)",
                 false);
      }
    }
  }
  for (const LoadSpec& l : s.type1_loads) {
    sink.begin(l.name);
    check_load(sink, l, steps, false);
  }
  for (const LoadSpec& l : s.type2_loads) {
    sink.begin(l.name);
    check_load(sink, l, steps, true);
  }
  sink.flush();
  return out;
}

bool has_structural_violation(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.structural; });
}

}  // namespace dsmopt
