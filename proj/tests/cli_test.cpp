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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsmopt/retrieval.hpp"
#include "json.hpp"

namespace dsmopt {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const std::string kData = DSMOPT_DATA_DIR;
const std::string kFixtures = DSMOPT_FIXTURE_DIR;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "dsmopt");
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh directory per test, named after it.
fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "dsmopt_cli_tests" /
                       (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(CliOptimize, DefaultDay) {
  const fs::path dir = scratch();
  const Result r = run({"optimize", kData + "/default.scenario", "--out", dir.string(), "--no-timestamp"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("status Optimal\n"), std::string::npos);
  EXPECT_NE(r.out.find("verification pass\n"), std::string::npos);
  const json summary = json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["solver"]["status"], "Optimal");
  EXPECT_EQ(summary["solver"]["num_vars"], 770);
  EXPECT_EQ(summary["solver"]["num_binaries"], 384);
  EXPECT_EQ(summary["solver"]["num_constraints"], 581);
  EXPECT_TRUE(summary["verification"]["pass"].get<bool>());
  EXPECT_TRUE(summary["storages"]["EV"]["target_met"].get<bool>());
  EXPECT_FALSE(summary.contains("timestamp"));
  const std::string csv = slurp(dir / "schedule.csv");
  // Header, 48 steps, then the closing SoC boundary.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 50);
}

TEST(CliOptimize, LiteralTableIsInfeasible) {
  const fs::path dir = scratch();
  const Result r = run({"optimize", kData + "/table2_literal.scenario", "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kExitInfeasible);
  EXPECT_NE(r.err.find("TARGET_EXCEEDS_MAX"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "summary.json"));
}

TEST(CliOptimize, InputErrors) {
  const fs::path dir = scratch();
  EXPECT_EQ(run({"optimize", (dir / "missing.scenario").string()}).code, cli::kExitInputError);
  EXPECT_EQ(run({"optimize", kFixtures + "/scenarios/duplicate.scenario", "--out", dir.string()}).code,
            cli::kExitInputError);
  EXPECT_EQ(run({"optimize", kData + "/default.scenario", "--variant", "other"}).code, cli::kExitInputError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitInputError);
  EXPECT_EQ(run({}).code, cli::kExitInputError);
}

TEST(CliOptimize, NodeBudget) {
  const fs::path dir = scratch();
  const Result r = run({"optimize", kData + "/default.scenario", "--max-nodes", "1", "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kExitNodeBudget) << r.err;
}

TEST(CliValidate, ExitCodes) {
  const Result clean = run({"validate", kData + "/default.scenario"});
  EXPECT_EQ(clean.code, cli::kExitOk);
  EXPECT_EQ(clean.out, "");

  const Result no_fit = run({"validate", kFixtures + "/scenarios/no_fit.scenario"});
  EXPECT_EQ(no_fit.code, cli::kExitViolations);
  const json first = json::parse(no_fit.out.substr(0, no_fit.out.find('\n')));
  EXPECT_EQ(first["code"], "RUN_DOES_NOT_FIT");
  EXPECT_EQ(first["device"], "Oven");

  EXPECT_EQ(run({"validate", kData + "/table2_literal.scenario"}).code, cli::kExitViolations);
  EXPECT_EQ(run({"validate", kFixtures + "/scenarios/duplicate.scenario"}).code, cli::kExitInputError);
}

TEST(CliCompare, SelfComparisonIsZero) {
  const fs::path dir = scratch();
  const std::string s = kData + "/default.scenario";
  const Result r = run({"compare", s, s, "--out", dir.string(), "--no-timestamp"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("reduction 0.00%"), std::string::npos);
  const json j = json::parse(slurp(dir / "comparison.json"));
  EXPECT_EQ(j["cost_delta"].get<double>(), 0.0);
  EXPECT_TRUE(j["b_not_costlier"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "comparison_steps.csv"));
  EXPECT_TRUE(fs::exists(dir / "schedule_a.csv"));
  EXPECT_TRUE(fs::exists(dir / "schedule_b.csv"));
}

TEST(CliCompare, CustomizedAgainstDefault) {
  const fs::path dir = scratch();
  const Result r = run({"compare", kData + "/default.scenario", kData + "/customized.scenario", "--out",
                        dir.string(), "--no-timestamp"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json j = json::parse(slurp(dir / "comparison.json"));
  EXPECT_GE(j["percent_reduction"].get<double>(), 1.0);
}

TEST(CliCompare, MisformulatedIsNeverCheaper) {
  const fs::path dir = scratch();
  const Result r = run({"compare", kData + "/default.scenario", "--variant", "misformulated", "--out",
                        dir.string(), "--no-timestamp"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json j = json::parse(slurp(dir / "comparison.json"));
  EXPECT_EQ(j["a"]["label"], "misformulated");
  EXPECT_EQ(j["b"]["label"], "correct");
  EXPECT_TRUE(j["b_not_costlier"].get<bool>());
  EXPECT_TRUE(j["b"]["verification_pass"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "schedule_misformulated.csv"));
  EXPECT_EQ(run({"compare", kData + "/default.scenario", "--out", dir.string()}).code, cli::kExitInputError);
}

TEST(CliRetrieval, IndexAndQueryFixtureCorpus) {
  const fs::path dir = scratch();
  const std::string idx = (dir / "corpus.idx").string();
  const Result built = run({"index", kFixtures + "/corpus", idx});
  ASSERT_EQ(built.code, cli::kExitOk) << built.err;
  EXPECT_EQ(built.out, "indexed 3 chunks, backend hash-bow-v1-fnv1a-d256\n");

  const std::string query = "dishwasher cycle start window";
  const Result r = run({"retrieve", idx, query, "--k", "2"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::vector<json> lines;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));
  ASSERT_EQ(lines.size(), 3u);

  // Oracle: score every chunk of the saved index directly.
  const RetrievalIndex loaded = RetrievalIndex::load(fs::path(idx));
  const Embedding q = HashingEmbeddingBackend(256).embed(query);
  std::size_t best = 0;
  for (std::size_t i = 1; i < loaded.size(); ++i) {
    if (similarity(q, loaded.vectors()[i]) > similarity(q, loaded.vectors()[best])) best = i;
  }
  EXPECT_EQ(lines[0]["id"], loaded.chunks()[best].id);
  EXPECT_EQ(lines[0]["doc_id"], "dishwasher_cycle.txt");
  EXPECT_EQ(lines[0]["score"].get<double>(), similarity(q, loaded.vectors()[best]));
  EXPECT_GE(lines[0]["score"].get<double>(), lines[1]["score"].get<double>());
  EXPECT_EQ(lines[2]["context"].get<std::string>().rfind(query, 0), 0u);
}

TEST(CliRetrieval, Errors) {
  const fs::path dir = scratch();
  const std::string idx = (dir / "corpus.idx").string();
  ASSERT_EQ(run({"index", kFixtures + "/corpus", idx}).code, cli::kExitOk);
  EXPECT_EQ(run({"retrieve", idx, "q", "--k", "0"}).code, cli::kExitInputError);
  EXPECT_EQ(run({"retrieve", (dir / "missing.idx").string(), "q"}).code, cli::kExitInputError);
  EXPECT_EQ(run({"index", (dir / "empty").string(), idx}).code, cli::kExitInputError);
  EXPECT_EQ(run({"index", kFixtures + "/corpus", idx, "--window", "10", "--overlap", "10"}).code,
            cli::kExitInputError);

  // An index with no chunks loads but cannot answer.
  const std::string empty_idx = (dir / "empty.idx").string();
  RetrievalIndex("hash-bow-v1-fnv1a-d256", 256).save(fs::path(empty_idx));
  const Result r = run({"retrieve", empty_idx, "q"});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("no chunks"), std::string::npos);

  // The query backend takes its dimension from the index.
  const std::string d8 = (dir / "d8.idx").string();
  ASSERT_EQ(run({"index", kFixtures + "/corpus", d8, "--dim", "8"}).code, cli::kExitOk);
  EXPECT_EQ(run({"retrieve", d8, "battery"}).code, cli::kExitOk);
}

TEST(CliDeterminism, RepeatedRunsAreByteIdentical) {
  const fs::path dir = scratch();
  for (const char* name : {"one", "two"}) {
    ASSERT_EQ(run({"optimize", kData + "/customized.scenario", "--out", (dir / name).string(), "--no-timestamp"})
                  .code,
              cli::kExitOk);
    ASSERT_EQ(run({"index", kFixtures + "/corpus", (dir / name / "c.idx").string()}).code, cli::kExitOk);
  }
  for (const char* file : {"schedule.csv", "summary.json", "c.idx"}) {
    EXPECT_EQ(slurp(dir / "one" / file), slurp(dir / "two" / file)) << file;
  }
  const Result a = run({"retrieve", (dir / "one" / "c.idx").string(), "battery charging", "--k", "3"});
  const Result b = run({"retrieve", (dir / "two" / "c.idx").string(), "battery charging", "--k", "3"});
  EXPECT_EQ(a.out, b.out);
}

}  // namespace
}  // namespace dsmopt
