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

#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dsmopt/errors.hpp"
#include "dsmopt/model.hpp"
#include "dsmopt/retrieval.hpp"
#include "dsmopt/scenario.hpp"
#include "dsmopt/schedule.hpp"
#include "dsmopt/solver.hpp"
#include "json.hpp"

namespace dsmopt::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CommonFlags {
  std::string out_dir = "dsmopt-out";
  std::string variant = "correct";
  double tol = 1e-6;
  std::size_t max_nodes = SolverOptions{}.max_nodes;
  bool no_timestamp = false;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json violation_json(const Violation& v) {
  return json{{"code", std::string(to_string(v.code))},
              {"device", v.device},
              {"message", v.message},
              {"structural", v.structural}};
}

// Outcome of solving one scenario.
struct Run {
  int exit = kExitOk;
  Scenario scenario;
  ModelVariant variant = ModelVariant::kCorrect;
  ModelStats stats;
  MilpSolution solution;
  std::optional<Schedule> schedule;
  std::optional<VerificationReport> verification;
  std::optional<CostReport> cost;
  std::vector<Violation> warnings;
  double elapsed_s = 0.0;
};

Run solve_scenario(const std::string& path, ModelVariant variant, const CommonFlags& f,
                   std::ostream& err) {
  Run r;
  r.variant = variant;
  try {
    r.scenario = load_scenario_file(path);
  } catch (const std::exception& e) {
    err << "error: " << path << ": " << e.what() << "\n";
    r.exit = kExitInputError;
    return r;
  }
  const std::vector<Violation> violations = validate_scenario(r.scenario);
  for (const Violation& v : violations) {
    err << (v.structural ? "error: " : "warning: ") << to_string(v.code)
        << (v.device.empty() ? "" : " [" + v.device + "]") << ": " << v.message << "\n";
    if (!v.structural) r.warnings.push_back(v);
  }
  if (has_structural_violation(violations)) {
    r.exit = kExitInputError;
    return r;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const MilpModel m = build_model(r.scenario, variant);
  r.stats = model_stats(m);
  SolverOptions opts;
  opts.max_nodes = f.max_nodes;
  try {
    r.solution = solve_milp(m, opts);
  } catch (const NumericalBreakdown& e) {
    err << "error: solver breakdown: " << e.what() << "\n";
    r.exit = kExitInputError;
    return r;
  }
  r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  switch (r.solution.status) {
    case SolveStatus::kOptimal:
      break;
    case SolveStatus::kNodeBudgetExceeded:
      err << "error: node budget of " << f.max_nodes << " exhausted\n";
      r.exit = kExitNodeBudget;
      return r;
    case SolveStatus::kInfeasible:
    case SolveStatus::kUnbounded:
      err << "error: scenario " << path << " is " << to_string(r.solution.status) << "\n";
      for (const Violation& v : r.warnings) err << "  likely cause: " << to_string(v.code) << "\n";
      r.exit = kExitInfeasible;
      return r;
  }
  r.schedule = extract_schedule(m, r.solution, r.scenario);
  r.verification = verify_schedule(*r.schedule, r.scenario, f.tol);
  r.cost = cost_of(*r.schedule, r.scenario);
  if (!r.verification->pass) err << "warning: schedule fails verification at tol " << f.tol << "\n";
  return r;
}

json verification_json(const VerificationReport& v) {
  json fam = json::object();
  for (const FamilyCheck& c : v.families) {
    fam[c.family] = json{{"max_residual", c.max_residual}, {"violations", c.violations}};
  }
  return json{{"pass", v.pass}, {"tolerance", v.tolerance}, {"families", fam}};
}

json cost_json(const CostReport& c) {
  return json{{"import_cost", c.import_cost},
              {"export_revenue", c.export_revenue},
              {"total_cost", c.total_cost},
              {"total_cost_rounded", fixed(c.total_cost, 2)}};
}

json summary_json(const Run& r, const std::string& path, const CommonFlags& f) {
  json j;
  j["scenario"] = json{{"path", path}, {"hash", hex64(scenario_hash(r.scenario))}};
  j["variant"] = std::string(to_string(r.variant));
  j["solver"] = json{{"status", std::string(to_string(r.solution.status))},
                     {"objective", r.solution.objective},
                     {"bound", r.solution.bound},
                     {"node_count", r.solution.node_count},
                     {"lp_iterations", r.solution.lp_iterations},
                     {"num_vars", r.stats.num_vars},
                     {"num_binaries", r.stats.num_binaries},
                     {"num_constraints", r.stats.num_constraints}};
  j["cost"] = cost_json(*r.cost);
  j["verification"] = verification_json(*r.verification);
  json storages = json::object();
  for (std::size_t i = 0; i < r.scenario.storages.size(); ++i) {
    const StorageSpec& s = r.scenario.storages[i];
    const double soc = r.schedule->storages[i].soc_pct[s.t_req];
    storages[s.name] = json{{"target_boundary", s.t_req},
                            {"target_pct", s.soc_req_pct},
                            {"soc_at_target_pct", soc},
                            {"target_met", soc >= s.soc_req_pct - f.tol}};
  }
  j["storages"] = storages;
  json warnings = json::array();
  for (const Violation& v : r.warnings) warnings.push_back(violation_json(v));
  j["warnings"] = warnings;
  if (!f.no_timestamp) {
    j["timestamp"] = utc_now();
    j["elapsed_seconds"] = r.elapsed_s;
  }
  return j;
}

std::optional<ModelVariant> parse_variant(const std::string& s) {
  if (s == "correct") return ModelVariant::kCorrect;
  if (s == "misformulated") return ModelVariant::kMisformulated;
  return std::nullopt;
}

void write_schedule(const fs::path& path, const Schedule& sch) {
  std::ostringstream csv;
  write_schedule_csv(csv, sch);
  write_text(path, csv.str());
}

int cmd_optimize(const std::string& path, const CommonFlags& f, std::ostream& out, std::ostream& err) {
  const ModelVariant variant = *parse_variant(f.variant);
  Run r = solve_scenario(path, variant, f, err);
  if (r.exit != kExitOk) return r.exit;
  fs::create_directories(f.out_dir);
  write_schedule(fs::path(f.out_dir) / "schedule.csv", *r.schedule);
  write_json(fs::path(f.out_dir) / "summary.json", summary_json(r, path, f));
  out << "status " << to_string(r.solution.status) << "\n"
      << "cost " << fixed(r.cost->total_cost, 2) << "\n"
      << "verification " << (r.verification->pass ? "pass" : "fail") << "\n";
  return kExitOk;
}

json side_json(const Run& r, const std::string& label, const std::string& path) {
  return json{{"label", label},
              {"scenario", path},
              {"variant", std::string(to_string(r.variant))},
              {"status", std::string(to_string(r.solution.status))},
              {"cost", cost_json(*r.cost)},
              {"verification_pass", r.verification->pass}};
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const CommonFlags& f,
                std::ostream& out, std::ostream& err) {
  const ModelVariant variant = *parse_variant(f.variant);
  std::string label_a = "a";
  std::string label_b = "b";
  std::string pb = path_b;
  ModelVariant va = ModelVariant::kCorrect;
  const ModelVariant vb = ModelVariant::kCorrect;
  if (path_b.empty()) {
    if (variant != ModelVariant::kMisformulated) {
      err << "error: compare needs a second scenario or --variant misformulated\n";
      return kExitInputError;
    }
    pb = path_a;
    va = ModelVariant::kMisformulated;
    label_a = "misformulated";
    label_b = "correct";
  }
  Run a = solve_scenario(path_a, va, f, err);
  if (a.exit != kExitOk) return a.exit;
  Run b = solve_scenario(pb, vb, f, err);
  if (b.exit != kExitOk) return b.exit;

  ComparisonReport rep;
  try {
    rep = compare(*a.schedule, *a.cost, a.scenario, *b.schedule, *b.cost, b.scenario);
  } catch (const GridMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  json j;
  j["a"] = side_json(a, label_a, path_a);
  j["b"] = side_json(b, label_b, pb);
  j["cost_delta"] = rep.cost_delta;
  j["percent_reduction"] = rep.percent_reduction;
  j["percent_reduction_rounded"] = fixed(rep.percent_reduction, 2);
  j["b_not_costlier"] = rep.cost_b <= rep.cost_a;
  if (!f.no_timestamp) {
    j["timestamp"] = utc_now();
    j["elapsed_seconds"] = a.elapsed_s + b.elapsed_s;
  }

  fs::create_directories(f.out_dir);
  const fs::path dir(f.out_dir);
  write_json(dir / "comparison.json", j);
  std::ostringstream steps;
  write_comparison_csv(steps, rep);
  write_text(dir / "comparison_steps.csv", steps.str());
  write_schedule(dir / ("schedule_" + label_a + ".csv"), *a.schedule);
  write_schedule(dir / ("schedule_" + label_b + ".csv"), *b.schedule);

  out << "cost " << label_a << " " << fixed(rep.cost_a, 2) << "\n"
      << "cost " << label_b << " " << fixed(rep.cost_b, 2) << "\n"
      << "delta " << fixed(rep.cost_delta, 2) << "\n"
      << "reduction " << fixed(rep.percent_reduction, 2) << "%\n";
  return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = load_scenario_file(path);
  } catch (const std::exception& e) {
    err << "error: " << path << ": " << e.what() << "\n";
    return kExitInputError;
  }
  const std::vector<Violation> violations = validate_scenario(s);
  for (const Violation& v : violations) out << violation_json(v).dump() << "\n";
  return violations.empty() ? kExitOk : kExitViolations;
}

int cmd_index(const std::string& corpus, const std::string& out_path, const ChunkParams& params,
              std::size_t dim, std::ostream& out, std::ostream& err) {
  try {
    const std::vector<Chunk> chunks = chunk_corpus(read_corpus(corpus), params);
    const HashingEmbeddingBackend backend(dim);
    const RetrievalIndex idx = RetrievalIndex::build(chunks, backend);
    idx.save(fs::path(out_path));
    out << "indexed " << idx.size() << " chunks, backend " << idx.backend_id() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

int cmd_retrieve(const std::string& index_path, const std::string& query, std::size_t k,
                 std::ostream& out, std::ostream& err) {
  try {
    const RetrievalIndex idx = RetrievalIndex::load(fs::path(index_path));
    const HashingEmbeddingBackend backend(idx.dim() == 0 ? 1 : idx.dim());
    if (idx.size() == 0) throw EmptyIndex("index holds no chunks");
    if (idx.backend_id() != backend.id()) {
      throw DimMismatch("index was built with backend '" + idx.backend_id() + "', expected '" +
                        backend.id() + "'");
    }
    const std::vector<ScoredChunk> hits = idx.top_k(backend.embed(query), k);
    for (const ScoredChunk& h : hits) {
      out << json{{"id", h.chunk->id},
                  {"doc_id", h.chunk->doc_id},
                  {"score", h.score},
                  {"span", {h.chunk->span_start, h.chunk->span_end}}}
                 .dump()
          << "\n";
    }
    out << json{{"context", aggregate_context(query, hits).context_text}}.dump() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool variant) {
  cmd->add_option("--out", f.out_dir, "Output directory");
  if (variant) {
    cmd->add_option("--variant", f.variant, "Model variant")
        ->check(CLI::IsMember({"correct", "misformulated"}));
  }
  cmd->add_option("--tol", f.tol, "Verification tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-nodes", f.max_nodes, "Branch-and-bound node budget")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-timestamp", f.no_timestamp, "Omit timestamps from JSON output");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Demand-side management scheduler and retrieval toolkit", "dsmopt"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string scenario, scenario_b, corpus, index_path, query;
  std::size_t k = 3;
  std::size_t dim = 256;
  ChunkParams chunk;

  CLI::App* optimize = app.add_subcommand("optimize", "Solve a scenario and write its schedule");
  optimize->add_option("scenario", scenario, "Scenario file")->required();
  add_common(optimize, flags, true);

  CLI::App* cmp = app.add_subcommand("compare", "Compare two scenarios or the two model variants");
  cmp->add_option("scenario_a", scenario, "Scenario file")->required();
  cmp->add_option("scenario_b", scenario_b, "Second scenario file");
  add_common(cmp, flags, true);

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario for inconsistencies");
  validate->add_option("scenario", scenario, "Scenario file")->required();

  CLI::App* index = app.add_subcommand("index", "Build a retrieval index from a corpus directory");
  index->add_option("corpus", corpus, "Corpus directory")->required();
  index->add_option("index", index_path, "Index file to write")->required();
  index->add_option("--window", chunk.window_chars, "Chunk window in characters")
      ->check(CLI::PositiveNumber);
  index->add_option("--overlap", chunk.overlap_chars, "Chunk overlap in characters");
  index->add_option("--dim", dim, "Embedding dimension")->check(CLI::PositiveNumber);

  CLI::App* retrieve = app.add_subcommand("retrieve", "Query a retrieval index");
  retrieve->add_option("index", index_path, "Index file")->required();
  retrieve->add_option("query", query, "Query text")->required();
  retrieve->add_option("--k", k, "Number of chunks")->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (chunk.window_chars <= chunk.overlap_chars) {
    err << "error: --window must exceed --overlap\n";
    return kExitInputError;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(scenario, flags, out, err);
    if (cmp->parsed()) return cmd_compare(scenario, scenario_b, flags, out, err);
    if (validate->parsed()) return cmd_validate(scenario, out, err);
    if (index->parsed()) return cmd_index(corpus, index_path, chunk, dim, out, err);
    if (retrieve->parsed()) return cmd_retrieve(index_path, query, k, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace dsmopt::cli
