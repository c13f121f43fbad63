// Named, seeded experiments with canonical JSON reports.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hogt::harness {

enum class Task {
  Csl,
  EdgeDetect,
  Fig2Separation,
  WlCompare,
  NgbhEquiv,
  KernelEquiv,
  GradcheckAll,
  RookShrikhande,
  HodgeProps,
  MpsnRecovery,
  SpectralMono,
  SubstructureOracle,
  ScalingSmoke,
};

const std::vector<Task>& all_tasks();
std::string to_string(Task t);
// Throws Error(ParseError) for unknown names.
Task parse_task(std::string_view name);

struct ExperimentSpec {
  std::string name;  // defaults to the task name
  Task task = Task::Csl;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n;
  std::optional<std::size_t> k;
  std::vector<std::string> graphs;  // graph files in the text format
};

// Seed stream of one task: independent of which other tasks exist.
std::uint64_t task_seed(std::uint64_t seed, Task task);

// Serialized verbatim as a nested JSON value.
struct RawJson {
  std::string text;
};
using Metric = std::variant<bool, std::int64_t, double, std::string, std::vector<double>, RawJson>;

struct Report {
  ExperimentSpec spec;
  std::map<std::string, bool> assertions;
  std::map<std::string, Metric> metrics;
  // Timing-dependent values; kept out of golden comparison.
  std::map<std::string, double> runtimes;
  std::string error;  // set when a module error aborted the task

  bool passed() const;
};

Report run(const ExperimentSpec& spec);

struct ScalingOptions {
  std::vector<std::string> variants = {"dense", "ngbh", "virtual_tuple"};
  std::size_t k = 2;
  std::vector<std::size_t> sizes = {8, 12, 16, 24};
  std::size_t d = 8;
  std::size_t runs = 5;       // median of this many after one warmup
  double min_run_seconds = 0.1;
};
Report scaling_smoke(const ScalingOptions& options, std::uint64_t seed = 0);

// Sorted-key JSON. The golden form omits the "nongolden" section
// (runtimes and environment).
std::string to_json(const Report& r, bool golden = false);

struct GoldenOutcome {
  bool matched = true;
  bool recorded = false;  // no golden existed; one was written
  std::string path;
};
// Compares against dir/<spec.name>.json, writing it when absent.
GoldenOutcome check_golden(const Report& r, const std::string& dir);

}  // namespace hogt::harness
