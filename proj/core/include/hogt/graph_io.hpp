#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "hogt/graph.hpp"

namespace hogt {

// Text format:
//   n m
//   u v [edge_label]      (m lines, 0-indexed)
//   labels: l0 ... l(n-1) (optional)
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);
void write_graph_file(const std::string& path, const Graph& g);

}  // namespace hogt
