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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dsmopt/errors.hpp"

namespace dsmopt {

namespace {

std::vector<double> gather(const MilpModel& m, const std::vector<double>& x, VarKind kind,
                           int device) {
  std::vector<double> out;
  for (std::size_t j : m.block_indices(kind, device)) out.push_back(x[j]);
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

class Checker {
 public:
  explicit Checker(double tol) { report_.tolerance = tol; }

  // Residual is a non-negative amount of violation.
  void add(const std::string& family, double residual) {
    FamilyCheck& f = get(family);
    f.max_residual = std::max(f.max_residual, residual);
    if (residual > report_.tolerance) ++f.violations;
  }

  // Exact check with no tolerance.
  void require(const std::string& family, bool ok, double residual = 1.0) {
    FamilyCheck& f = get(family);
    if (!ok) {
      f.max_residual = std::max(f.max_residual, residual);
      ++f.violations;
    }
  }

  VerificationReport finish() {
    report_.pass = true;
    for (const FamilyCheck& f : report_.families) report_.pass = report_.pass && f.violations == 0;
    return report_;
  }

 private:
  FamilyCheck& get(const std::string& family) {
    for (FamilyCheck& f : report_.families) {
      if (f.family == family) return f;
    }
    report_.families.push_back(FamilyCheck{family, 0.0, 0});
    return report_.families.back();
  }

  VerificationReport report_;
};

bool lengths_ok(const Schedule& sch, const Scenario& s) {
  const std::size_t T = s.num_steps();
  if (sch.num_steps() != T || sch.import_kw.size() != T || sch.export_kw.size() != T) return false;
  if (sch.storages.size() != s.storages.size()) return false;
  if (sch.loads.size() != s.type1_loads.size() + s.type2_loads.size()) return false;
  for (const StorageTrace& st : sch.storages) {
    if (st.charge_kw.size() != T || st.discharge_kw.size() != T || st.soc_pct.size() != T + 1) return false;
  }
  for (const LoadTrace& l : sch.loads) {
    if (l.on_off.size() != T) return false;
  }
  return true;
}

}  // namespace

double Schedule::load_kw(std::size_t t) const {
  double sum = 0.0;
  for (const LoadTrace& l : loads) sum += l.power_kw * l.on_off[t];
  return sum;
}

Schedule extract_schedule(const MilpModel& m, const MilpSolution& sol, const Scenario& s) {
  if (sol.status != SolveStatus::kOptimal || !sol.has_incumbent()) {
    throw StatusNotOptimal("cannot extract a schedule from a " + std::string(to_string(sol.status)) +
                           " solve");
  }
  const std::vector<double>& x = sol.values;
  const std::size_t T = s.num_steps();
  Schedule sch;
  sch.time = s.time;
  sch.scenario_hash = scenario_hash(s);
  sch.variant = m.variant();

  for (std::size_t j = 0; j < s.storages.size(); ++j) {
    const int d = static_cast<int>(j);
    sch.storages.push_back(StorageTrace{s.storages[j].name, gather(m, x, VarKind::kPCh, d),
                                        gather(m, x, VarKind::kPDisch, d),
                                        gather(m, x, VarKind::kSoc, d)});
  }

  std::vector<std::pair<const LoadSpec*, int>> loads;
  for (const LoadSpec& l : s.type1_loads) loads.push_back({&l, 1});
  for (const LoadSpec& l : s.type2_loads) loads.push_back({&l, 2});
  for (std::size_t k = 0; k < loads.size(); ++k) {
    const LoadSpec& l = *loads[k].first;
    LoadTrace trace{l.name, loads[k].second, l.power_kw, std::vector<int>(T, 0)};
    if (m.variant() == ModelVariant::kCorrect) {
      const std::vector<double> lam = gather(m, x, VarKind::kLambda, static_cast<int>(k));
      for (std::size_t t = 0; t < T; ++t) trace.on_off[t] = std::round(lam[t]) != 0.0 ? 1 : 0;
    } else {
      for (std::size_t t = 0; t < T; ++t) trace.on_off[t] = l.window.contains(t) ? 1 : 0;
    }
    sch.loads.push_back(std::move(trace));
  }

  sch.import_kw = gather(m, x, VarKind::kPImp, VarId::kNoDevice);
  if (m.has_kind(VarKind::kPExp)) {
    sch.export_kw = gather(m, x, VarKind::kPExp, VarId::kNoDevice);
  } else {
    sch.export_kw.assign(T, 0.0);
  }
  return sch;
}

const FamilyCheck* VerificationReport::find(const std::string& family) const {
  for (const FamilyCheck& f : families) {
    if (f.family == family) return &f;
  }
  return nullptr;
}

VerificationReport verify_schedule(const Schedule& sch, const Scenario& s, double tol) {
  Checker c(tol);
  if (!lengths_ok(sch, s)) {
    c.require("series_length", false);
    return c.finish();
  }
  c.require("series_length", true);
  const std::size_t T = s.num_steps();
  const double dt = s.time.delta_t_hours();

  for (std::size_t j = 0; j < s.storages.size(); ++j) {
    const StorageSpec& spec = s.storages[j];
    const StorageTrace& tr = sch.storages[j];
    const double k = 100.0 * dt / spec.e_rated_kwh;

    double soc = spec.soc_init_pct;
    c.add("soc_recursion", std::abs(tr.soc_pct[0] - soc));
    for (std::size_t t = 0; t < T; ++t) {
      soc = soc - (tr.discharge_kw[t] / spec.eta_disch - spec.eta_ch * tr.charge_kw[t]) * k;
      c.add("soc_recursion", std::abs(tr.soc_pct[t + 1] - soc));
    }

    for (std::size_t t = 0; t < T; ++t) {
      const bool here = spec.availability[t] > 0.5;
      const double ch_cap = here ? spec.p_ch_max_kw : 0.0;
      const double dis_cap = here && spec.discharge_enabled ? spec.p_disch_max_kw : 0.0;
      c.add("charge_bound", std::max({0.0, -tr.charge_kw[t], tr.charge_kw[t] - ch_cap}));
      c.add("discharge_bound", std::max({0.0, -tr.discharge_kw[t], tr.discharge_kw[t] - dis_cap}));
      c.add("mutual_exclusion", std::max(0.0, std::min(tr.charge_kw[t], tr.discharge_kw[t])));
    }
    for (std::size_t t = 1; t <= T; ++t) {
      const double e = tr.soc_pct[t];
      c.add("soc_bounds", std::max({0.0, spec.soc_min_pct - e, e - spec.soc_max_pct}));
    }
    if (spec.t_req <= T) {
      c.add("soc_target", std::max(0.0, spec.soc_req_pct - tr.soc_pct[spec.t_req]));
    } else {
      c.require("soc_target", false);
    }
  }

  std::vector<const LoadSpec*> specs;
  for (const LoadSpec& l : s.type1_loads) specs.push_back(&l);
  for (const LoadSpec& l : s.type2_loads) specs.push_back(&l);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const LoadSpec& spec = *specs[k];
    const LoadTrace& tr = sch.loads[k];
    std::size_t on = 0;
    double energy = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const int v = tr.on_off[t];
      c.require("load_binary", v == 0 || v == 1);
      c.require("load_window", v == 0 || spec.window.contains(t));
      if (v != 0) ++on;
      energy += spec.power_kw * v * dt;
    }
    c.require("load_duration", on == spec.duration_steps,
              std::abs(static_cast<double>(on) - static_cast<double>(spec.duration_steps)));
    c.add("load_energy", std::abs(energy - spec.energy_kwh(dt)));

    if (k >= s.type1_loads.size()) {
      std::size_t runs = 0;
      std::size_t longest = 0;
      std::size_t len = 0;
      for (std::size_t t = 0; t <= T; ++t) {
        if (t < T && tr.on_off[t] != 0) {
          ++len;
          continue;
        }
        if (len > 0) {
          ++runs;
          longest = std::max(longest, len);
        }
        len = 0;
      }
      c.require("type2_contiguity", runs == 1 && longest == spec.duration_steps,
                static_cast<double>(runs == 0 ? 1 : runs));
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    double supply = s.pv[t] + sch.import_kw[t];
    double demand = s.base_load[t] + sch.export_kw[t] + sch.load_kw(t);
    for (const StorageTrace& tr : sch.storages) {
      supply += tr.discharge_kw[t];
      demand += tr.charge_kw[t];
    }
    c.add("power_balance", std::abs(supply - demand));

    const double imp_cap = s.grid.p_import_max[t];
    const double exp_cap = s.grid.export_enabled ? s.grid.p_export_max[t] : 0.0;
    c.add("grid_import_cap", std::max({0.0, -sch.import_kw[t], sch.import_kw[t] - imp_cap}));
    c.add("grid_export_cap", std::max({0.0, -sch.export_kw[t], sch.export_kw[t] - exp_cap}));
    if (s.grid.exclusive_exchange) {
      c.add("grid_exclusion", std::max(0.0, std::min(sch.import_kw[t], sch.export_kw[t])));
    }
  }
  return c.finish();
}

CostReport cost_of(const std::vector<double>& import_kw, const std::vector<double>& export_kw,
                   const Series& import_price, const Series& export_price, double delta_t_hours) {
  const std::size_t T = import_kw.size();
  if (export_kw.size() != T || import_price.size() != T || export_price.size() != T) {
    throw GridMismatch("cost_of: flow and price series have different lengths");
  }
  CostReport r;
  for (std::size_t t = 0; t < T; ++t) {
    CostStep step{import_kw[t] * import_price[t] * delta_t_hours,
                  export_kw[t] * export_price[t] * delta_t_hours};
    r.import_cost += step.import_cost;
    r.export_revenue += step.export_revenue;
    r.total_cost += step.import_cost - step.export_revenue;
    r.per_step.push_back(step);
  }
  return r;
}

CostReport cost_of(const Schedule& sch, const Scenario& s) {
  return cost_of(sch.import_kw, sch.export_kw, s.import_price, s.export_price, s.time.delta_t_hours());
}

double percent_reduction(double cost_a, double cost_b) {
  if (cost_a == 0.0) return 0.0;
  return (cost_a - cost_b) / cost_a * 100.0;
}

std::vector<double> demand_kw(const Schedule& sch, const Scenario& s) {
  std::vector<double> d(sch.num_steps());
  for (std::size_t t = 0; t < d.size(); ++t) d[t] = s.base_load[t] + sch.load_kw(t);
  return d;
}

ComparisonReport compare(const Schedule& a, const CostReport& cost_a, const Scenario& sa,
                         const Schedule& b, const CostReport& cost_b, const Scenario& sb) {
  if (!(a.time == b.time) || a.import_kw.size() != b.import_kw.size()) {
    throw GridMismatch("compared schedules use different time grids");
  }
  ComparisonReport r;
  r.cost_a = cost_a.total_cost;
  r.cost_b = cost_b.total_cost;
  r.cost_delta = r.cost_a - r.cost_b;
  r.percent_reduction = percent_reduction(r.cost_a, r.cost_b);
  const std::vector<double> da = demand_kw(a, sa);
  const std::vector<double> db = demand_kw(b, sb);
  for (std::size_t t = 0; t < a.num_steps(); ++t) {
    r.per_step.push_back(StepDelta{a.import_kw[t] - b.import_kw[t], a.export_kw[t] - b.export_kw[t],
                                   da[t] - db[t]});
  }
  return r;
}

void write_schedule_csv(std::ostream& out, const Schedule& sch) {
  const std::size_t T = sch.num_steps();
  out << "step";
  for (const StorageTrace& s : sch.storages) out << ",soc_" << s.name;
  for (const StorageTrace& s : sch.storages) out << ",p_ch_" << s.name;
  for (const StorageTrace& s : sch.storages) out << ",p_disch_" << s.name;
  for (const LoadTrace& l : sch.loads) out << ",lambda_" << l.name;
  out << ",p_imp,p_exp\n";
  for (std::size_t t = 0; t <= T; ++t) {
    out << t;
    for (const StorageTrace& s : sch.storages) out << ',' << fixed(s.soc_pct[t], 2);
    const bool last = t == T;
    for (const StorageTrace& s : sch.storages) out << ',' << (last ? "" : fixed(s.charge_kw[t], 3));
    for (const StorageTrace& s : sch.storages) out << ',' << (last ? "" : fixed(s.discharge_kw[t], 3));
    for (const LoadTrace& l : sch.loads) out << ',' << (last ? "" : std::to_string(l.on_off[t]));
    out << ',' << (last ? "" : fixed(sch.import_kw[t], 3));
    out << ',' << (last ? "" : fixed(sch.export_kw[t], 3));
    out << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& r) {
  out << "step,delta_import_kw,delta_export_kw,delta_demand_kw\n";
  for (std::size_t t = 0; t < r.per_step.size(); ++t) {
    const StepDelta& d = r.per_step[t];
    out << t << ',' << fixed(d.import_kw, 3) << ',' << fixed(d.export_kw, 3) << ','
        << fixed(d.demand_kw, 3) << '\n';
  }
}

}  // namespace dsmopt
