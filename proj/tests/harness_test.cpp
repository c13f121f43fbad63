#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "harness.hpp"
#include "hogt/error.hpp"
#include "hogt/generators.hpp"
#include "hogt/graph_io.hpp"
#include "hogt/rng.hpp"
#include "json.hpp"

using namespace hogt;
using namespace hogt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("hogt_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentSpec spec_for(Task t, std::uint64_t seed = 0) {
  ExperimentSpec s;
  s.task = t;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(TaskNames, RoundTripAllThirteen) {
  EXPECT_EQ(all_tasks().size(), 13u);
  std::set<std::string> names;
  for (Task t : all_tasks()) {
    names.insert(to_string(t));
    EXPECT_EQ(parse_task(to_string(t)), t);
  }
  EXPECT_EQ(names.size(), 13u);
  EXPECT_TRUE(names.count("substructure_oracle"));
}

TEST(TaskNames, UnknownRejected) {
  try {
    parse_task("csl2");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
  EXPECT_THROW(parse_task(""), Error);
}

TEST(TaskSeed, DerivedFromTaskName) {
  EXPECT_EQ(task_seed(7, Task::Csl), splitmix64_mix(7 ^ fnv1a64("csl")));
  EXPECT_NE(task_seed(7, Task::Csl), task_seed(7, Task::EdgeDetect));
  EXPECT_NE(task_seed(7, Task::Csl), task_seed(8, Task::Csl));
}

TEST(Report, SameSeedGivesIdenticalGoldenJson) {
  for (Task t : {Task::EdgeDetect, Task::HodgeProps, Task::SubstructureOracle, Task::KernelEquiv}) {
    auto a = run(spec_for(t, 11)), b = run(spec_for(t, 11));
    EXPECT_TRUE(a.passed()) << to_string(t) << ": " << to_json(a);
    EXPECT_EQ(to_json(a, true), to_json(b, true)) << to_string(t);
  }
}

TEST(Report, DifferentSeedChangesMetrics) {
  auto a = run(spec_for(Task::HodgeProps, 1)), b = run(spec_for(Task::HodgeProps, 2));
  EXPECT_NE(to_json(a, true), to_json(b, true));
}

TEST(Report, GoldenFormOmitsRuntimesAndKeysAreSorted) {
  auto r = run(spec_for(Task::EdgeDetect));
  const std::string full = to_json(r), golden = to_json(r, true);
  EXPECT_NE(full.find("\"nongolden\""), std::string::npos);
  EXPECT_NE(full.find("\"threads\""), std::string::npos);
  EXPECT_EQ(golden.find("nongolden"), std::string::npos);
  EXPECT_EQ(golden.find("seconds"), std::string::npos);
  std::size_t last = 0;
  for (const char* key : {"\"assertions\"", "\"metrics\"", "\"nongolden\"", "\"passed\"", "\"spec\""}) {
    std::size_t at = full.find(key);
    ASSERT_NE(at, std::string::npos) << key;
    EXPECT_GT(at, last) << key;
    last = at;
  }
  auto parsed = nlohmann::json::parse(full);
  EXPECT_EQ(parsed["spec"]["task"], "edge_detect");
  EXPECT_EQ(parsed["spec"]["task_seed"].get<std::uint64_t>(), task_seed(0, Task::EdgeDetect));
  EXPECT_EQ(parsed["metrics"]["graphs"], 100);
}

TEST(Report, PassedNeedsAssertionsAndNoError) {
  Report r;
  EXPECT_FALSE(r.passed());
  r.assertions["a"] = true;
  EXPECT_TRUE(r.passed());
  r.assertions["b"] = false;
  EXPECT_FALSE(r.passed());
  r.assertions["b"] = true;
  r.error = "boom";
  EXPECT_FALSE(r.passed());
}

TEST(Report, ModuleErrorsAreReported) {
  auto s = spec_for(Task::HodgeProps);
  s.graphs = {"/nonexistent/graph.txt"};
  Report r;
  EXPECT_NO_THROW(r = run(s));
  EXPECT_FALSE(r.error.empty());
  EXPECT_FALSE(r.passed());
  EXPECT_NE(to_json(r).find("\"error\""), std::string::npos);
}

TEST(Tasks, CslSmallNAgreesWithIsomorphismOracle) {
  auto s = spec_for(Task::Csl);
  s.n = 11;
  auto r = run(s);
  ASSERT_TRUE(r.error.empty()) << r.error;
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(std::get<std::int64_t>(r.metrics.at("pairs")), 6);  // skips 2,3,4,5
  EXPECT_GE(std::get<std::int64_t>(r.metrics.at("pairs_distinguished")), 1);
}

TEST(Tasks, WlCompareOnGraphFiles) {
  auto dir = scratch_dir("wl");
  auto [g, h] = fig2_pair();
  write_graph_file((dir / "g.txt").string(), g);
  write_graph_file((dir / "h.txt").string(), h);
  auto s = spec_for(Task::WlCompare);
  s.graphs = {(dir / "g.txt").string(), (dir / "h.txt").string()};
  s.k = 2;
  auto r = run(s);
  ASSERT_TRUE(r.error.empty()) << r.error;
  EXPECT_TRUE(std::get<bool>(r.metrics.at("distinguished")));
  auto parsed = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(parsed["metrics"]["refinement"]["rounds_to_distinguish"], 1);
  EXPECT_TRUE(parsed["metrics"]["refinement"].contains("per_round_histograms"));

  s.graphs.pop_back();
  EXPECT_FALSE(run(s).error.empty());
}

TEST(Tasks, SubstructureOracleOnFile) {
  auto dir = scratch_dir("sub");
  write_graph_file((dir / "k4.txt").string(), make_complete(4));
  auto s = spec_for(Task::SubstructureOracle);
  s.graphs = {(dir / "k4.txt").string()};
  auto r = run(s);
  EXPECT_TRUE(r.passed()) << to_json(r);
  EXPECT_EQ(std::get<std::int64_t>(r.metrics.at("total_triangles")), 4);
  EXPECT_EQ(std::get<std::int64_t>(r.metrics.at("total_stars")), 4);
}

TEST(Golden, RecordsThenMatchesThenDetectsDrift) {
  auto dir = scratch_dir("golden");
  auto r = run(spec_for(Task::EdgeDetect, 5));
  auto first = check_golden(r, dir.string());
  EXPECT_TRUE(first.recorded);
  EXPECT_TRUE(first.matched);
  auto second = check_golden(run(spec_for(Task::EdgeDetect, 5)), dir.string());
  EXPECT_FALSE(second.recorded);
  EXPECT_TRUE(second.matched);
  std::ofstream(first.path, std::ios::app) << " ";
  EXPECT_FALSE(check_golden(r, dir.string()).matched);
}

TEST(Scaling, RejectsUnsortedSizes) {
  ScalingOptions o;
  o.sizes = {8, 4};
  auto r = scaling_smoke(o);
  EXPECT_FALSE(r.error.empty());
  EXPECT_FALSE(r.passed());
}

TEST(Scaling, ReportLayout) {
  ScalingOptions o;
  o.variants = {"dense", "ngbh"};
  o.sizes = {4, 6};
  o.runs = 1;
  o.min_run_seconds = 0.005;
  auto r = scaling_smoke(o);
  ASSERT_TRUE(r.error.empty()) << r.error;
  EXPECT_TRUE(r.assertions.count("dense.slope_within_0.7"));
  EXPECT_TRUE(r.assertions.count("ngbh_slope_below_dense_by_0.5"));
  EXPECT_TRUE(r.runtimes.count("dense.slope"));
  EXPECT_DOUBLE_EQ(std::get<double>(r.metrics.at("dense.expected_exponent")), 4.0);
  EXPECT_DOUBLE_EQ(std::get<double>(r.metrics.at("ngbh.expected_exponent")), 3.0);
  // Slopes are timing-dependent and stay out of the golden form.
  EXPECT_EQ(to_json(r, true).find("slope\":"), std::string::npos);
}
