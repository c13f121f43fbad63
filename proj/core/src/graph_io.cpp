#include "hogt/graph_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "hogt/error.hpp"

namespace hogt {

namespace {

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

long parse_int(const std::string& token, const std::string& what) {
  try {
    std::size_t used = 0;
    long v = std::stol(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "expected integer for " + what + ", got '" + token + "'");
  }
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Graph read_graph(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw Error(ErrorKind::ParseError, "empty graph input");
  auto header = split(line);
  if (header.size() != 2) throw Error(ErrorKind::ParseError, "header must be 'n m'");
  long n = parse_int(header[0], "n");
  long m = parse_int(header[1], "m");
  if (n <= 0 || m < 0) throw Error(ErrorKind::ParseError, "n must be positive and m non-negative");

  Graph g(static_cast<std::size_t>(n));
  int labeled = -1;
  for (long e = 0; e < m; ++e) {
    if (!next_content_line(in, line))
      throw Error(ErrorKind::ParseError, "expected " + std::to_string(m) + " edge lines");
    auto tok = split(line);
    if (tok.size() != 2 && tok.size() != 3)
      throw Error(ErrorKind::ParseError, "edge line must be 'u v [label]'");
    int has_label = tok.size() == 3 ? 1 : 0;
    if (labeled == -1) labeled = has_label;
    if (labeled != has_label)
      throw Error(ErrorKind::ParseError, "either all edges carry labels or none do");
    long u = parse_int(tok[0], "u"), v = parse_int(tok[1], "v");
    if (u < 0 || v < 0 || u >= n || v >= n || u == v)
      throw Error(ErrorKind::ParseError, "edge endpoint out of range: " + line);
    if (g.adjacent(u, v)) throw Error(ErrorKind::ParseError, "duplicate edge: " + line);
    if (has_label)
      g.add_edge(u, v, static_cast<int>(parse_int(tok[2], "edge label")));
    else
      g.add_edge(u, v);
  }
  if (next_content_line(in, line)) {
    auto tok = split(line);
    if (tok.empty() || tok[0] != "labels:")
      throw Error(ErrorKind::ParseError, "unexpected trailing line: " + line);
    if (tok.size() != static_cast<std::size_t>(n) + 1)
      throw Error(ErrorKind::ParseError, "labels line must list n labels");
    std::vector<int> labels;
    for (std::size_t i = 1; i < tok.size(); ++i)
      labels.push_back(static_cast<int>(parse_int(tok[i], "node label")));
    g.set_node_labels(labels);
    if (next_content_line(in, line))
      throw Error(ErrorKind::ParseError, "unexpected content after labels line");
  }
  return g;
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open graph file " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.n() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) {
    out << u << ' ' << v;
    if (auto label = g.edge_label(u, v)) out << ' ' << *label;
    out << '\n';
  }
  bool any_label = false;
  for (int l : g.node_labels()) any_label = any_label || l != 0;
  if (any_label) {
    out << "labels:";
    for (int l : g.node_labels()) out << ' ' << l;
    out << '\n';
  }
}

void write_graph_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write graph file " + path);
  write_graph(out, g);
}

}  // namespace hogt
