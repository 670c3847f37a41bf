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

#include "dsmopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "dsmopt/timeseries.hpp"

namespace dsmopt {

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::kPCh: return "P_CH";
    case VarKind::kPDisch: return "P_DISCH";
    case VarKind::kMuCh: return "MU_CH";
    case VarKind::kMuDisch: return "MU_DISCH";
    case VarKind::kSoc: return "SOC";
    case VarKind::kLambda: return "LAMBDA";
    case VarKind::kNuStart: return "NU_START";
    case VarKind::kNuEnd: return "NU_END";
    case VarKind::kPImp: return "P_IMP";
    case VarKind::kPExp: return "P_EXP";
    case VarKind::kMuImp: return "MU_IMP";
    case VarKind::kMuExp: return "MU_EXP";
  }
  return "?";
}

bool is_binary_kind(VarKind kind) {
  switch (kind) {
    case VarKind::kMuCh:
    case VarKind::kMuDisch:
    case VarKind::kLambda:
    case VarKind::kNuStart:
    case VarKind::kNuEnd:
    case VarKind::kMuImp:
    case VarKind::kMuExp:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(Relation rel) {
  switch (rel) {
    case Relation::kLessEqual: return "<=";
    case Relation::kEqual: return "=";
    case Relation::kGreaterEqual: return ">=";
  }
  return "?";
}

std::string_view to_string(ModelVariant v) {
  return v == ModelVariant::kCorrect ? "correct" : "misformulated";
}

std::string_view LinearConstraint::family() const {
  std::string_view t = tag;
  return t.substr(0, t.find('['));
}

// ---------------------------------------------------------------------------
// MilpModel

std::optional<std::size_t> MilpModel::index_of(const VarId& id) const {
  for (const Block& b : blocks_) {
    if (b.kind == id.kind && b.device == id.device) {
      if (id.t >= b.length) return std::nullopt;
      return b.offset + id.t;
    }
  }
  return std::nullopt;
}

std::size_t MilpModel::at(const VarId& id) const {
  auto idx = index_of(id);
  if (!idx) {
    throw std::out_of_range("model has no variable " + std::string(to_string(id.kind)) + "[" +
                            std::to_string(id.device) + "][" + std::to_string(id.t) + "]");
  }
  return *idx;
}

VarId MilpModel::id_of(std::size_t index) const {
  for (const Block& b : blocks_) {
    if (index >= b.offset && index < b.offset + b.length) return VarId{b.kind, b.device, index - b.offset};
  }
  throw std::out_of_range("variable index " + std::to_string(index) + " out of range");
}

std::string MilpModel::name_of(std::size_t index) const {
  const VarId id = id_of(index);
  std::string name(to_string(id.kind));
  if (id.device != VarId::kNoDevice) name += "[" + std::to_string(id.device) + "]";
  return name + "[" + std::to_string(id.t) + "]";
}

bool MilpModel::has_kind(VarKind kind) const {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.kind == kind; });
}

std::vector<std::size_t> MilpModel::block_indices(VarKind kind, int device) const {
  std::vector<std::size_t> out;
  for (const Block& b : blocks_) {
    if (b.kind == kind && b.device == device) {
      for (std::size_t t = 0; t < b.length; ++t) out.push_back(b.offset + t);
    }
  }
  return out;
}

std::vector<std::size_t> MilpModel::binaries() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < binary_.size(); ++i) {
    if (binary_[i]) out.push_back(i);
  }
  return out;
}

std::size_t MilpModel::free_binary_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < binary_.size(); ++i) {
    if (binary_[i] && lower_[i] < upper_[i]) ++n;
  }
  return n;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
  double v = 0.0;
  for (const Term& t : objective_) v += t.coef * x[t.var];
  return v;
}

std::size_t MilpModel::add_block(VarKind kind, int device, std::size_t length, double lo, double hi) {
  if (!blocks_.empty()) {
    const Block& last = blocks_.back();
    if (kind < last.kind || (kind == last.kind && device <= last.device)) {
      throw std::logic_error("variable blocks must be added kind-major, then by device");
    }
  }
  const std::size_t offset = lower_.size();
  blocks_.push_back(Block{kind, device, offset, length});
  lower_.insert(lower_.end(), length, lo);
  upper_.insert(upper_.end(), length, hi);
  binary_.insert(binary_.end(), length, is_binary_kind(kind) ? 1 : 0);
  return offset;
}

void MilpModel::set_bounds(std::size_t index, double lo, double hi) {
  lower_.at(index) = lo;
  upper_.at(index) = hi;
}

void MilpModel::add_constraint(LinearConstraint c) { constraints_.push_back(std::move(c)); }

void MilpModel::add_objective_term(std::size_t var, double coef) {
  if (coef != 0.0) objective_.push_back(Term{var, coef});
}

MilpModel MilpModel::with_fixed_binaries(const std::vector<double>& values) const {
  MilpModel copy = *this;
  for (std::size_t i = 0; i < binary_.size(); ++i) {
    if (binary_[i]) {
      const double v = std::round(values.at(i));
      copy.lower_[i] = v;
      copy.upper_[i] = v;
    }
  }
  return copy;
}

MilpModel MilpModel::with_scaled_objective(double factor) const {
  MilpModel copy = *this;
  for (Term& t : copy.objective_) t.coef *= factor;
  return copy;
}

std::vector<std::string> MilpModel::check_invariants() const {
  std::vector<std::string> problems;
  const std::size_t n = num_vars();
  for (std::size_t i = 0; i < n; ++i) {
    if (binary_[i] && (lower_[i] < 0.0 || upper_[i] > 1.0)) {
      problems.push_back("binary " + name_of(i) + " has bounds outside [0,1]");
    }
    if (!(lower_[i] <= upper_[i])) problems.push_back("variable " + name_of(i) + " has empty bounds");
  }
  std::set<std::string> tags;
  for (const LinearConstraint& c : constraints_) {
    if (!tags.insert(c.tag).second) problems.push_back("duplicate tag " + c.tag);
    std::set<std::size_t> seen;
    for (const Term& t : c.terms) {
      if (t.var >= n) problems.push_back(c.tag + " references missing variable");
      if (!seen.insert(t.var).second) problems.push_back(c.tag + " repeats a variable");
      if (!std::isfinite(t.coef)) problems.push_back(c.tag + " has a non-finite coefficient");
    }
    if (!std::isfinite(c.rhs)) problems.push_back(c.tag + " has a non-finite right-hand side");
  }
  for (const Term& t : objective_) {
    if (t.var >= n) problems.push_back("objective references missing variable");
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

std::string pad(std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", v);
  return buf;
}

std::string tag_of(std::string_view family, std::size_t t) {
  return std::string(family) + "[" + pad(t) + "]";
}

std::string tag_of(std::string_view family, int device, std::size_t t) {
  return std::string(family) + "[" + std::to_string(device) + "][" + pad(t) + "]";
}

std::string tag_of_device(std::string_view family, int device) {
  return std::string(family) + "[" + std::to_string(device) + "]";
}

LinearConstraint row(std::string tag, Relation rel, double rhs, std::vector<Term> terms) {
  std::erase_if(terms, [](const Term& t) { return t.coef == 0.0; });
  return LinearConstraint{std::move(terms), rel, rhs, std::move(tag)};
}

struct StorageVars {
  std::size_t p_ch, p_disch, mu_ch, mu_disch, soc;  // block offsets
};

// Declares storage variable blocks (kinds P_CH..SOC) for every storage.
std::vector<StorageVars> add_storage_blocks(MilpModel& m, const Scenario& s) {
  const std::size_t T = s.num_steps();
  const int n = static_cast<int>(s.storages.size());
  std::vector<StorageVars> v(s.storages.size());
  for (int j = 0; j < n; ++j) v[j].p_ch = m.add_block(VarKind::kPCh, j, T, 0.0, 0.0);
  for (int j = 0; j < n; ++j) v[j].p_disch = m.add_block(VarKind::kPDisch, j, T, 0.0, 0.0);
  for (int j = 0; j < n; ++j) v[j].mu_ch = m.add_block(VarKind::kMuCh, j, T, 0.0, 1.0);
  for (int j = 0; j < n; ++j) v[j].mu_disch = m.add_block(VarKind::kMuDisch, j, T, 0.0, 1.0);
  for (int j = 0; j < n; ++j) v[j].soc = m.add_block(VarKind::kSoc, j, T + 1, 0.0, 0.0);

  for (int j = 0; j < n; ++j) {
    const StorageSpec& st = s.storages[j];
    for (std::size_t t = 0; t < T; ++t) {
      const bool available = st.availability[t] > 0.5;
      const bool can_discharge = available && st.discharge_enabled;
      // Availability is data, so the three-factor bound is linear: when the
      // unit is away both its power and its mode binary are pinned to zero.
      m.set_bounds(v[j].p_ch + t, 0.0, available ? st.p_ch_max_kw : 0.0);
      m.set_bounds(v[j].mu_ch + t, 0.0, available ? 1.0 : 0.0);
      m.set_bounds(v[j].p_disch + t, 0.0, can_discharge ? st.p_disch_max_kw : 0.0);
      m.set_bounds(v[j].mu_disch + t, 0.0, can_discharge ? 1.0 : 0.0);
    }
    m.set_bounds(v[j].soc, st.soc_init_pct, st.soc_init_pct);
    for (std::size_t t = 1; t <= T; ++t) m.set_bounds(v[j].soc + t, st.soc_min_pct, st.soc_max_pct);
  }
  return v;
}

void add_storage_rows(MilpModel& m, const Scenario& s, const std::vector<StorageVars>& v) {
  const std::size_t T = s.num_steps();
  const double dt = s.time.delta_t_hours();
  for (std::size_t jj = 0; jj < s.storages.size(); ++jj) {
    const int j = static_cast<int>(jj);
    const StorageSpec& st = s.storages[jj];
    const double k = 100.0 * dt / st.e_rated_kwh;
    for (std::size_t t = 0; t < T; ++t) {
      // E(t+1) = E(t) - (P_disch/eta_disch - eta_ch*P_ch) * 100*dt/E_rated
      m.add_constraint(row(tag_of("soc_recursion", j, t), Relation::kEqual, 0.0,
                           {{v[jj].soc + t + 1, 1.0},
                            {v[jj].soc + t, -1.0},
                            {v[jj].p_disch + t, k / st.eta_disch},
                            {v[jj].p_ch + t, -k * st.eta_ch}}));
      m.add_constraint(row(tag_of("charge_bound", j, t), Relation::kLessEqual, 0.0,
                           {{v[jj].p_ch + t, 1.0}, {v[jj].mu_ch + t, -st.p_ch_max_kw}}));
      m.add_constraint(row(tag_of("discharge_bound", j, t), Relation::kLessEqual, 0.0,
                           {{v[jj].p_disch + t, 1.0}, {v[jj].mu_disch + t, -st.p_disch_max_kw}}));
      m.add_constraint(row(tag_of("mutual_exclusion", j, t), Relation::kLessEqual, 1.0,
                           {{v[jj].mu_ch + t, 1.0}, {v[jj].mu_disch + t, 1.0}}));
    }
    m.add_constraint(row(tag_of_device("soc_target", j), Relation::kGreaterEqual, st.soc_req_pct,
                         {{v[jj].soc + st.t_req, 1.0}}));
  }
}

std::vector<const LoadSpec*> all_loads(const Scenario& s) {
  std::vector<const LoadSpec*> loads;
  for (const LoadSpec& l : s.type1_loads) loads.push_back(&l);
  for (const LoadSpec& l : s.type2_loads) loads.push_back(&l);
  return loads;
}

bool run_fits(const LoadSpec& l, std::size_t start, std::size_t T) {
  const std::size_t end = start + l.duration_steps - 1;
  return l.duration_steps >= 1 && start >= l.window.first && end <= l.window.last && end < T;
}

}  // namespace

MilpModel build_model(const Scenario& s) { return build_model(s, ModelVariant::kCorrect); }

MilpModel build_misformulated_model(const Scenario& s) {
  return build_model(s, ModelVariant::kMisformulated);
}

MilpModel build_model(const Scenario& s, ModelVariant variant) {
  const bool correct = variant == ModelVariant::kCorrect;
  const std::size_t T = s.num_steps();
  const double dt = s.time.delta_t_hours();
  const auto loads = all_loads(s);
  const int n_type1 = static_cast<int>(s.type1_loads.size());
  const int n_loads = static_cast<int>(loads.size());
  const bool exclusive = correct && s.grid.exclusive_exchange;

  MilpModel m;
  m.set_variant(variant);

  // Variable blocks, kind-major.
  const auto sv = add_storage_blocks(m, s);
  std::vector<std::size_t> lambda(loads.size()), nu_s(loads.size()), nu_e(loads.size());
  if (correct) {
    for (int k = 0; k < n_loads; ++k) lambda[k] = m.add_block(VarKind::kLambda, k, T, 0.0, 1.0);
    for (int k = n_type1; k < n_loads; ++k) nu_s[k] = m.add_block(VarKind::kNuStart, k, T, 0.0, 1.0);
    for (int k = n_type1; k < n_loads; ++k) nu_e[k] = m.add_block(VarKind::kNuEnd, k, T, 0.0, 1.0);
  }
  const std::size_t p_imp = m.add_block(VarKind::kPImp, VarId::kNoDevice, T, 0.0, 0.0);
  std::size_t p_exp = 0;
  if (correct) p_exp = m.add_block(VarKind::kPExp, VarId::kNoDevice, T, 0.0, 0.0);
  std::size_t mu_imp = 0;
  std::size_t mu_exp = 0;
  if (exclusive) {
    mu_imp = m.add_block(VarKind::kMuImp, VarId::kNoDevice, T, 0.0, 1.0);
    mu_exp = m.add_block(VarKind::kMuExp, VarId::kNoDevice, T, 0.0, 1.0);
  }

  // Grid limits as variable bounds.
  for (std::size_t t = 0; t < T; ++t) {
    m.set_bounds(p_imp + t, 0.0, s.grid.p_import_max[t]);
    if (correct) m.set_bounds(p_exp + t, 0.0, s.grid.export_enabled ? s.grid.p_export_max[t] : 0.0);
  }

  // Load masking.
  if (correct) {
    for (int k = 0; k < n_loads; ++k) {
      const LoadSpec& l = *loads[k];
      const bool contiguous = k >= n_type1;
      for (std::size_t t = 0; t < T; ++t) {
        if (!l.window.contains(t)) m.set_bounds(lambda[k] + t, 0.0, 0.0);
        if (contiguous) {
          if (!run_fits(l, t, T)) m.set_bounds(nu_s[k] + t, 0.0, 0.0);
          // No run can end before its first H-1 steps have elapsed.
          if (t + 1 < l.duration_steps) m.set_bounds(nu_e[k] + t, 0.0, 0.0);
        }
      }
    }
  }

  add_storage_rows(m, s, sv);

  if (correct) {
    for (int k = 0; k < n_loads; ++k) {
      const LoadSpec& l = *loads[k];
      const std::size_t H = l.duration_steps;
      std::vector<Term> energy, duration;
      for (std::size_t t = 0; t < T; ++t) {
        energy.push_back({lambda[k] + t, l.power_kw * dt});
        duration.push_back({lambda[k] + t, 1.0});
      }
      m.add_constraint(row(tag_of_device("load_energy", k), Relation::kEqual, l.energy_kwh(dt), energy));
      m.add_constraint(row(tag_of_device("load_duration", k), Relation::kEqual,
                           static_cast<double>(H), duration));
      if (k < n_type1) continue;

      if (T >= H) {
        for (std::size_t t = 0; t + H <= T; ++t) {
          std::vector<Term> run;
          for (std::size_t i = 0; i < H; ++i) run.push_back({lambda[k] + t + i, 1.0});
          run.push_back({nu_s[k] + t, -static_cast<double>(H)});
          m.add_constraint(row(tag_of("type2_run", k, t), Relation::kGreaterEqual, 0.0, run));
        }
      }
      std::vector<Term> starts;
      for (std::size_t t = 0; t < T; ++t) starts.push_back({nu_s[k] + t, 1.0});
      m.add_constraint(row(tag_of_device("type2_start_once", k), Relation::kEqual, 1.0, starts));
      if (T >= H) {
        for (std::size_t t = 0; t + H <= T; ++t) {
          m.add_constraint(row(tag_of("type2_link", k, t), Relation::kEqual, 0.0,
                               {{nu_e[k] + t + H - 1, 1.0}, {nu_s[k] + t, -1.0}}));
        }
      }
      for (std::size_t t = 0; t < T; ++t) {
        std::vector<Term> track{{lambda[k] + t, 1.0}};
        const std::size_t from = t + 1 >= H ? t + 1 - H : 0;
        for (std::size_t j = from; j <= t; ++j) track.push_back({nu_s[k] + j, -1.0});
        m.add_constraint(row(tag_of("type2_consistency", k, t), Relation::kLessEqual, 0.0, track));
      }
    }
  }

  // Power balance: supply side on the left, dispatchable demand moved over.
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < sv.size(); ++j) {
      terms.push_back({sv[j].p_disch + t, 1.0});
      terms.push_back({sv[j].p_ch + t, -1.0});
    }
    terms.push_back({p_imp + t, 1.0});
    double rhs = s.base_load[t] - s.pv[t];
    if (correct) {
      terms.push_back({p_exp + t, -1.0});
      for (int k = 0; k < n_loads; ++k) terms.push_back({lambda[k] + t, -loads[k]->power_kw});
    } else {
      for (const LoadSpec* l : loads) {
        if (l->window.contains(t)) rhs += l->power_kw;
      }
    }
    m.add_constraint(row(tag_of("power_balance", t), Relation::kEqual, rhs, terms));
  }

  if (exclusive) {
    for (std::size_t t = 0; t < T; ++t) {
      const double emax = s.grid.export_enabled ? s.grid.p_export_max[t] : 0.0;
      m.add_constraint(row(tag_of("grid_import_switch", t), Relation::kLessEqual, 0.0,
                           {{p_imp + t, 1.0}, {mu_imp + t, -s.grid.p_import_max[t]}}));
      m.add_constraint(row(tag_of("grid_export_switch", t), Relation::kLessEqual, 0.0,
                           {{p_exp + t, 1.0}, {mu_exp + t, -emax}}));
      m.add_constraint(row(tag_of("grid_exclusion", t), Relation::kLessEqual, 1.0,
                           {{mu_imp + t, 1.0}, {mu_exp + t, 1.0}}));
    }
  }

  // Operating cost: purchases minus export revenue.
  for (std::size_t t = 0; t < T; ++t) m.add_objective_term(p_imp + t, s.import_price[t] * dt);
  if (correct) {
    for (std::size_t t = 0; t < T; ++t) m.add_objective_term(p_exp + t, -s.export_price[t] * dt);
  }
  return m;
}

ModelStats model_stats(const MilpModel& m) {
  ModelStats st;
  st.num_vars = m.num_vars();
  st.num_constraints = m.constraints().size();
  for (const auto& b : m.blocks()) st.vars_by_kind[std::string(to_string(b.kind))] += b.length;
  for (std::size_t i = 0; i < m.num_vars(); ++i) {
    if (m.is_binary(i)) {
      ++st.num_binaries;
      if (m.lower()[i] < m.upper()[i]) ++st.num_free_binaries;
    }
  }
  for (const auto& c : m.constraints()) ++st.constraints_by_family[std::string(c.family())];
  return st;
}

namespace {

void write_terms(std::ostream& out, const MilpModel& m, const std::vector<Term>& terms) {
  for (const Term& t : terms) {
    out << ' ' << (t.coef < 0 ? "-" : "+") << format_decimal(std::abs(t.coef)) << '*'
        << m.name_of(t.var);
  }
}

}  // namespace

void dump_model(std::ostream& out, const MilpModel& m) {
  out << "\\ variant: " << to_string(m.variant()) << "\n";
  out << "minimize:";
  write_terms(out, m, m.objective());
  out << "\nsubject to:\n";
  std::vector<const LinearConstraint*> rows;
  for (const auto& c : m.constraints()) rows.push_back(&c);
  std::sort(rows.begin(), rows.end(),
            [](const LinearConstraint* a, const LinearConstraint* b) { return a->tag < b->tag; });
  for (const LinearConstraint* c : rows) {
    out << c->tag << ':';
    write_terms(out, m, c->terms);
    out << ' ' << to_string(c->relation) << ' ' << format_decimal(c->rhs) << '\n';
  }
  out << "bounds:\n";
  for (std::size_t i = 0; i < m.num_vars(); ++i) {
    out << format_decimal(m.lower()[i]) << " <= " << m.name_of(i) << " <= "
        << format_decimal(m.upper()[i]) << (m.is_binary(i) ? " binary" : "") << '\n';
  }
}

}  // namespace dsmopt
