/* Copyright 2026 The Meshsearch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "meshsearch/cli.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "meshsearch/json_io.h"
#include "meshsearch/model_zoo.h"
#include "test_graphs.h"

namespace meshsearch {
namespace {

using ::meshsearch::testing::Fig2Graph;
using ::meshsearch::testing::MakeMesh;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Temp(const std::string& name) {
  return ::testing::TempDir() + "/" + name;
}

std::string WriteJson(const std::string& name, const Json& j) {
  const std::string path = Temp(name);
  EXPECT_TRUE(WriteTextFile(path, j.dump()).ok());
  return path;
}

std::string Fig2File() {
  const Mesh mesh = MakeMesh("b=2");
  return WriteJson("fig2.json", GraphToJson(Fig2Graph(), &mesh));
}

const std::vector<std::string> kDesk = {"--model", "transformer", "--mesh",
                                        "batch=2,model=2"};

std::vector<std::string> With(const std::string& cmd,
                              const std::vector<std::string>& base,
                              const std::vector<std::string>& more) {
  std::vector<std::string> args = {cmd};
  args.insert(args.end(), base.begin(), base.end());
  args.insert(args.end(), more.begin(), more.end());
  return args;
}

TEST(CliSearchTest, DeskTransformerFindsZeroPattern) {
  CliRun r = Cli(With("search", kDesk,
                   {"--schedule", "RT1_RT2_MEM1", "--budget", "2000", "--seed",
                    "7"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = Json::parse(r.out);
  EXPECT_GT(report["cost"]["counts"]["AllGather"].get<int>(), 0);
  EXPECT_GT(report["cost"]["counts"]["ReduceScatter"].get<int>(), 0);
  EXPECT_EQ(report["goals"].size(), 3u);
  EXPECT_EQ(report["seed"], 7);
  EXPECT_EQ(report["collectives"]["AllGather"].size(),
            report["cost"]["counts"]["AllGather"].get<size_t>());
}

TEST(CliSearchTest, GraphFileWithNoneSchedule) {
  CliRun r = Cli({"search", "--graph", Fig2File(), "--schedule", "NONE",
               "--budget", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = Json::parse(r.out);
  EXPECT_EQ(report["goals"].size(), 1u);
  EXPECT_EQ(report["mesh"], "b=2");
  EXPECT_TRUE(report["plan"].contains("actions"));
}

TEST(CliSearchTest, IndivisibleMeshExitsTwoNamingTheDim) {
  CliRun r = Cli({"search", "--model", "transformer", "--mesh", "batch=3,model=2",
               "--budget", "10"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("'batch'"), std::string::npos) << r.err;
}

TEST(CliSearchTest, ConfigErrorsExitThree) {
  EXPECT_EQ(Cli(With("search", kDesk, {"--schedule", "FAST"})).code,
            kExitConfig);
  EXPECT_EQ(Cli(With("search", kDesk, {"--budget", "0"})).code, kExitConfig);
  EXPECT_EQ(Cli({"search", "--graph", Temp("missing.json")}).code,
            kExitConfig);
  EXPECT_EQ(Cli({"search", "--model", "transformer"}).code, kExitConfig);
  EXPECT_EQ(Cli({"search", "--mesh", "b=2"}).code, kExitConfig);
  EXPECT_EQ(Cli(With("search", kDesk, {"--model-cfg", "{\"depth\": 2}"})).code,
            kExitConfig);
  const std::string bad_cost =
      WriteJson("bad_cost.json", Json{{"flops_per_second", -1}});
  EXPECT_EQ(Cli(With("search", kDesk, {"--cost-cfg", bad_cost})).code,
            kExitConfig);
  EXPECT_EQ(Cli({}).code, kExitConfig);
  EXPECT_EQ(Cli({"search", "--bogus"}).code, kExitConfig);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST(CliSearchTest, InvalidGraphExitsTwo) {
  const Mesh mesh = MakeMesh("b=2");
  Json j = GraphToJson(Fig2Graph(), &mesh);
  j["ops"][1]["operands"][1] = "nothing";
  CliRun r = Cli({"search", "--graph", WriteJson("invalid.json", j)});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("nothing"), std::string::npos) << r.err;
}

TEST(CliSearchTest, IdenticalInvocationsAreIdentical) {
  const std::vector<std::string> args =
      With("search", kDesk, {"--budget", "300", "--seed", "3", "--seeds", "2",
                             "--trace", Temp("trace.tsv")});
  CliRun a = Cli(args);
  std::ifstream t1(Temp("trace.tsv"));
  const std::string trace_a((std::istreambuf_iterator<char>(t1)), {});
  CliRun b = Cli(args);
  std::ifstream t2(Temp("trace.tsv"));
  const std::string trace_b((std::istreambuf_iterator<char>(t2)), {});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(trace_a, trace_b);
  EXPECT_EQ(trace_a.rfind("goal\ttrajectory\tdepth\tfingerprint\treward\tbest_cost\n",
                          0),
            0u);
  const Json report = Json::parse(a.out);
  EXPECT_EQ(report["runs"].size(), 2u);
  int64_t rows = std::count(trace_a.begin(), trace_a.end(), '\n') - 1;
  int64_t used = 0;
  for (const Json& g : report["goals"]) used += g["trajectories_used"].get<int64_t>();
  EXPECT_EQ(rows, used);

  std::vector<std::string> parallel = args;
  parallel.push_back("--parallel");
  EXPECT_EQ(Cli(parallel).out, a.out);
}

TEST(CliRoundTripTest, ReportPlanReproducesCost) {
  const std::string report_path = Temp("report.json");
  CliRun s = Cli(With("search", kDesk,
                   {"--budget", "600", "--seed", "1", "--out", report_path}));
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("actions"), std::string::npos);
  const Json report = *ReadJsonFile(report_path);
  CliRun e = Cli(With("estimate", kDesk, {"--plan", report_path}));
  ASSERT_EQ(e.code, 0) << e.err;
  const Json estimate = Json::parse(e.out);
  EXPECT_EQ(estimate["cost"], report["cost"]);
  EXPECT_EQ(estimate["fingerprint"], report["plan"]["fingerprint"]);
  EXPECT_EQ(estimate["collectives"], report["collectives"]);
  // The bare plan object works too.
  const std::string plan_path = WriteJson("plan.json", report["plan"]);
  EXPECT_EQ(Json::parse(Cli(With("estimate", kDesk, {"--plan", plan_path})).out),
            estimate);
}

TEST(CliEstimateTest, EmptyPlanIsUnshardedBaseline) {
  CliRun r = Cli(With("estimate", kDesk, {}));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  for (const char* kind : {"AllReduce", "AllGather", "ReduceScatter"}) {
    EXPECT_EQ(j["cost"]["counts"][kind], 0);
  }
}

TEST(CliEstimateTest, BatchPlanIsAllReduceOnly) {
  Json plan = Json::array();
  for (const Action& a : TransformerExpertPlan(TransformerStrategy::kBatch)) {
    plan.push_back({{"group", a.group}, {"dim", a.dim}, {"axis", "batch"}});
  }
  CliRun r = Cli(With("estimate", kDesk, {"--plan", WriteJson("bp.json", plan)}));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_GT(j["cost"]["counts"]["AllReduce"].get<int>(), 0);
  EXPECT_EQ(j["cost"]["counts"]["AllGather"], 0);
  EXPECT_EQ(j["cost"]["counts"]["ReduceScatter"], 0);
}

TEST(CliEstimateTest, CorruptedPlanExitsTwoWithIndex) {
  const Json plan = Json::parse(
      R"([{"group": 0, "dim": 0, "axis": "batch"},
          {"group": 2, "dim": 0, "axis": "pipeline"}])");
  CliRun r = Cli(With("estimate", kDesk, {"--plan", WriteJson("bad.json", plan)}));
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("plan action 1"), std::string::npos) << r.err;
  const std::string malformed = WriteJson("malformed.json", Json{{"x", 1}});
  EXPECT_EQ(Cli(With("estimate", kDesk, {"--plan", malformed})).code,
            kExitValidation);
}

TEST(CliOracleTest, SingleGroupCsv) {
  GraphBuilder b("single");
  ValueId x = b.AddArg("x", {{8, 8}}, ArgRole::kData, 0);
  b.AddOutput(b.Unary("y", "tanh", x));
  const Mesh mesh = MakeMesh("b=2");
  const std::string path =
      WriteJson("single.json", GraphToJson(*std::move(b).Build(), &mesh));
  CliRun r = Cli({"oracle", "--graph", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  EXPECT_NE(r.out.find("\"0:b,_\""), std::string::npos);
  EXPECT_NE(r.out.find("\"0:_,b\""), std::string::npos);
  EXPECT_NE(r.err.find("3 states"), std::string::npos) << r.err;
}

TEST(CliOracleTest, Fig2SharedStateAppearsOnce) {
  CliRun r = Cli({"oracle", "--graph", Fig2File(), "--max-depth", "2",
               "--objective", "runtime"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string row = "\"0:b,_|1:_,_|2:b,_\"";
  const size_t first = r.out.find(row);
  ASSERT_NE(first, std::string::npos) << r.out;
  EXPECT_EQ(r.out.find(row, first + 1), std::string::npos);
}

TEST(CliOracleTest, GuardAndBadAxisExitThree) {
  EXPECT_EQ(Cli(With("oracle", kDesk, {})).code, kExitConfig);
  EXPECT_EQ(Cli({"oracle", "--graph", Fig2File(), "--axes", "q"}).code,
            kExitConfig);
  EXPECT_EQ(Cli({"oracle", "--graph", Fig2File(), "--objective", "x"}).code,
            kExitConfig);
}

TEST(CliDumpGraphTest, DumpsParseableGraph) {
  CliRun r = Cli({"dump-graph", "--model", "unet", "--mesh", "batch=2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  absl::StatusOr<GraphFile> file = GraphFromJson(j);
  ASSERT_TRUE(file.ok()) << file.status();
  EXPECT_TRUE(ValidateGraph(file->graph).empty());
  const std::string path = WriteJson("unet.json", j);
  CliRun again = Cli({"dump-graph", "--graph", path});
  EXPECT_EQ(again.out, r.out);
}

}  // namespace
}  // namespace meshsearch
