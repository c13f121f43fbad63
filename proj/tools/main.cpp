// hogt: run named experiments, dump Hodge spectra, or apply one layer to a graph.
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "harness.hpp"
#include "hogt/attention.hpp"
#include "hogt/error.hpp"
#include "hogt/graph_io.hpp"
#include "hogt/layer_spec.hpp"
#include "hogt/linalg.hpp"
#include "hogt/rng.hpp"
#include "hogt/simplicial.hpp"
#include "hogt/tensor_io.hpp"
#include "hogt/tuple_features.hpp"

using namespace hogt;

namespace {

struct Options {
  std::string command;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n, k;
  std::string out;
  std::vector<std::string> graphs;
  std::string golden;
  bool parallel = false;
  std::string layer;
  std::string weights;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidParameter, "cannot write " + path);
  f << text;
}

harness::ExperimentSpec make_spec(const Options& o, harness::Task task) {
  harness::ExperimentSpec spec;
  spec.task = task;
  spec.name = harness::to_string(task);
  spec.seed = o.seed;
  spec.n = o.n;
  spec.k = o.k;
  spec.graphs = o.graphs;
  return spec;
}

// Returns false when the golden file exists and differs.
bool golden_ok(const harness::Report& r, const Options& o) {
  if (o.golden.empty()) return true;
  auto g = harness::check_golden(r, o.golden);
  if (g.recorded) std::fprintf(stderr, "recorded golden %s\n", g.path.c_str());
  if (!g.matched) std::fprintf(stderr, "golden mismatch: %s\n", g.path.c_str());
  return g.matched;
}

int run_task(const Options& o) {
  harness::Report r = harness::run(make_spec(o, harness::parse_task(o.command)));
  write_text(o.out, harness::to_json(r));
  if (!r.error.empty()) std::fprintf(stderr, "%s: %s\n", r.spec.name.c_str(), r.error.c_str());
  bool golden = golden_ok(r, o);
  return r.passed() && golden ? 0 : 1;
}

int run_all(const Options& o) {
  std::vector<harness::Report> reports;
  if (o.parallel) {
    // Timing is only meaningful on a quiet machine, so the scaling smoke runs afterwards.
    std::vector<std::future<harness::Report>> pending;
    for (auto t : harness::all_tasks())
      if (t != harness::Task::ScalingSmoke)
        pending.push_back(std::async(std::launch::async, [&o, t] { return harness::run(make_spec(o, t)); }));
    for (auto& f : pending) reports.push_back(f.get());
    reports.push_back(harness::run(make_spec(o, harness::Task::ScalingSmoke)));
  } else {
    for (auto t : harness::all_tasks()) reports.push_back(harness::run(make_spec(o, t)));
  }
  bool ok = true;
  std::string text = "{\n  \"reports\": [\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    bool golden = golden_ok(r, o);
    ok = ok && r.passed() && golden;
    std::fprintf(stderr, "%s %s\n", r.passed() && golden ? "PASS" : "FAIL", r.spec.name.c_str());
    std::string body = harness::to_json(r);
    body.pop_back();  // trailing newline
    text += body + (i + 1 < reports.size() ? ",\n" : "\n");
  }
  text += std::string("  ],\n  \"passed\": ") + (ok ? "true" : "false") + "\n}\n";
  write_text(o.out, text);
  return ok ? 0 : 1;
}

Graph single_graph(const Options& o) {
  if (o.graphs.size() != 1) throw Error(ErrorKind::InvalidParameter, o.command + " needs exactly one --graph");
  return read_graph_file(o.graphs[0]);
}

// CSV of Hodge Laplacian eigenvalues: dim,index,eigenvalue.
int run_hodge(const Options& o) {
  Graph g = single_graph(o);
  auto c = clique_complex(g, o.k ? *o.k : kDefaultMaxSimplexDim);
  auto l = hodge(c);
  std::string text = "dim,index,eigenvalue\n";
  char buf[96];
  for (std::size_t dim = 0; dim < l.per_dim.size(); ++dim) {
    if (!l.per_dim[dim].size()) continue;
    auto eig = sym_eigvals(l.per_dim[dim]);
    for (std::size_t i = 0; i < eig.size(); ++i) {
      double v = std::abs(eig[i]) < 1e-12 ? 0.0 : eig[i];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g\n", dim, i, v);
      text += buf;
    }
  }
  write_text(o.out, text);
  return 0;
}

// One layer on the tuple features of a graph; writes the output rows in the tensor format.
int run_forward(const Options& o) {
  if (o.layer.empty()) throw Error(ErrorKind::InvalidParameter, "forward needs --layer spec.json");
  Graph g = single_graph(o);
  LayerSpec spec = read_layer_spec_file(o.layer);
  const LayerConfig& cfg = spec.cfg;
  LayerWeights w = init_layer_weights(cfg, spec.seed);
  if (!o.weights.empty()) write_tensors_file(o.weights, flatten_weights(w));
  TupleFeatures x = init_tuple_features(g, cfg.k, cfg.d_in, splitmix64_mix(spec.seed ^ o.seed));

  std::vector<Tensor> outputs;
  if (cfg.variant == AttentionVariant::Cross12) {
    const std::size_t n = g.n();
    Rng rng(o.seed);
    Tensor nodes = randn({n, cfg.d_in}, rng, 1.0);
    Tensor edges({n * n, cfg.d_edge}, 0.0);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (g.adjacent(u, v)) edges(u * n + v, 0) = 1.0;
    auto r = forward_cross_1_2(nodes, x, edges, w, cfg, g);
    outputs = {r.nodes, r.tuples.x, r.edges};
  } else {
    auto r = forward(x, w, cfg, &g);
    outputs.push_back(r.x);
    if (r.virtual_x.size()) outputs.push_back(r.virtual_x);
  }
  if (!o.out.empty()) write_tensors_file(o.out, outputs);
  Tensor pooled = pool(outputs[0]);
  std::printf("variant %s, %zu output tensor(s), first %zu x %zu, pooled", to_string(cfg.variant).c_str(),
              outputs.size(), outputs[0].rows(), outputs[0].cols());
  for (std::size_t i = 0; i < pooled.size(); ++i) std::printf(" %.6g", pooled[i]);
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order graph transformer experiments"};
  Options o;
  std::vector<std::string> commands;
  for (auto t : harness::all_tasks()) commands.push_back(harness::to_string(t));
  for (const char* extra : {"all", "hodge", "forward"}) commands.push_back(extra);

  app.add_option("task", o.command, "Task name, or all / hodge / forward")->required()->check(CLI::IsMember(commands));
  app.add_option("--seed", o.seed, "Top-level seed");
  app.add_option("--n", o.n, "Graph size parameter of the task");
  app.add_option("--k", o.k, "Tuple order or maximum simplex dimension");
  app.add_option("--out", o.out, "Write the report (or tensors / CSV) here instead of stdout");
  app.add_option("--graph", o.graphs, "Graph file in the text format (repeatable)")->check(CLI::ExistingFile);
  app.add_option("--golden", o.golden, "Directory of golden reports to compare against (missing ones are recorded)");
  app.add_flag("--parallel", o.parallel, "Run independent tasks concurrently (task all)");
  app.add_option("--layer", o.layer, "Layer spec JSON (forward)")->check(CLI::ExistingFile);
  app.add_option("--weights", o.weights, "Dump the initialized layer weights here (forward)");
  CLI11_PARSE(app, argc, argv);

  try {
    if (o.command == "all") return run_all(o);
    if (o.command == "hodge") return run_hodge(o);
    if (o.command == "forward") return run_forward(o);
    return run_task(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
