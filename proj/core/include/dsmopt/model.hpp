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

// MILP encoding of the demand-side-management problem.
//
// Variable layout
// ---------------
// Variables are grouped into blocks, one block per (kind, device). Blocks are
// ordered kind-major (in VarKind declaration order), then by device ordinal,
// and each block holds one variable per step t = 0..len-1. The dense index of
// a variable is its block offset plus t. SOC blocks have T+1 entries (step
// boundaries 0..T); all other blocks have T entries.
//
// Device ordinals: storages are numbered in declaration order for the storage
// kinds. Loads are numbered over the concatenation type1_loads ++ type2_loads
// for LAMBDA, NU_START and NU_END (the NU kinds only exist for Type 2 loads).
// Grid kinds have no device.
//
// Units: power kW, energy kWh, SoC percent, delta_t hours.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsmopt/scenario.hpp"

namespace dsmopt {

enum class VarKind {
  kPCh,
  kPDisch,
  kMuCh,
  kMuDisch,
  kSoc,
  kLambda,
  kNuStart,
  kNuEnd,
  kPImp,
  kPExp,
  kMuImp,
  kMuExp,
};

inline constexpr int kVarKindCount = 12;

/// "P_CH", "MU_DISCH", "NU_START", ...
std::string_view to_string(VarKind kind);
bool is_binary_kind(VarKind kind);

struct VarId {
  static constexpr int kNoDevice = -1;

  VarKind kind;
  int device = kNoDevice;
  std::size_t t = 0;

  bool operator==(const VarId&) const = default;
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

std::string_view to_string(Relation rel);

struct Term {
  std::size_t var;  // dense index
  double coef;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Relation relation = Relation::kEqual;
  double rhs = 0.0;
  /// Unique label: family name, then device and step, e.g.
  /// "soc_recursion[1][0007]" or "power_balance[0031]".
  std::string tag;

  /// Tag up to the first '['.
  std::string_view family() const;
};

enum class ModelVariant { kCorrect, kMisformulated };

std::string_view to_string(ModelVariant v);

class MilpModel {
 public:
  struct Block {
    VarKind kind;
    int device;
    std::size_t offset;
    std::size_t length;
  };

  std::size_t num_vars() const { return lower_.size(); }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Dense index of `id`, or nullopt when the model has no such variable.
  std::optional<std::size_t> index_of(const VarId& id) const;
  /// Dense index of `id`; throws std::out_of_range when absent.
  std::size_t at(const VarId& id) const;
  VarId id_of(std::size_t index) const;
  /// "P_CH[0][5]" for device variables, "P_IMP[5]" for grid variables.
  std::string name_of(std::size_t index) const;

  bool has_kind(VarKind kind) const;
  /// Dense indices of one block in t order; empty when absent.
  std::vector<std::size_t> block_indices(VarKind kind, int device) const;

  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  bool is_binary(std::size_t index) const { return binary_[index] != 0; }
  std::vector<std::size_t> binaries() const;
  /// Binaries whose bounds are not fixed.
  std::size_t free_binary_count() const;

  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  /// Linear objective, to be minimised.
  const std::vector<Term>& objective() const { return objective_; }
  double objective_value(const std::vector<double>& x) const;

  ModelVariant variant() const { return variant_; }

  // Construction. Blocks must be added in kind-major order.
  std::size_t add_block(VarKind kind, int device, std::size_t length, double lo, double hi);
  void set_bounds(std::size_t index, double lo, double hi);
  void add_constraint(LinearConstraint c);
  void add_objective_term(std::size_t var, double coef);
  void set_variant(ModelVariant v) { variant_ = v; }

  /// Copy with every binary fixed to round(values[i]).
  MilpModel with_fixed_binaries(const std::vector<double>& values) const;
  /// Copy with every objective coefficient multiplied by `factor`.
  MilpModel with_scaled_objective(double factor) const;

  /// Structural self-check used by tests: binaries bounded in [0,1], terms
  /// reference existing variables without duplicates, finite coefficients,
  /// unique tags. Returns a list of problems (empty when sound).
  std::vector<std::string> check_invariants() const;

 private:
  std::vector<Block> blocks_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<char> binary_;
  std::vector<LinearConstraint> constraints_;
  std::vector<Term> objective_;
  ModelVariant variant_ = ModelVariant::kCorrect;
};

/// Full formulation: cost objective, storage dynamics and limits, Type 1 /
/// Type 2 load scheduling, power balance, grid exchange limits.
/// Precondition: validate_scenario(s) reports no structural violation.
MilpModel build_model(const Scenario& s);

/// Baseline with the two known formulation errors: no export variable (so
/// no export revenue in the objective) and dispatchable loads added to the
/// balance as fixed demand over their whole window, without on/off control.
MilpModel build_misformulated_model(const Scenario& s);

MilpModel build_model(const Scenario& s, ModelVariant variant);

struct ModelStats {
  std::size_t num_vars = 0;
  std::size_t num_binaries = 0;
  std::size_t num_free_binaries = 0;
  std::size_t num_constraints = 0;
  std::map<std::string, std::size_t> vars_by_kind;
  std::map<std::string, std::size_t> constraints_by_family;

  bool operator==(const ModelStats&) const = default;
};

ModelStats model_stats(const MilpModel& m);

/// LP-style listing: objective line, one line per constraint sorted by tag
/// (`tag: +c*name ... REL rhs`), then bounds and the binary list.
void dump_model(std::ostream& out, const MilpModel& m);

}  // namespace dsmopt
