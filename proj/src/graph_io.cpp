#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "gehm/error.hpp"
#include "gehm/graph.hpp"

namespace gehm {

namespace {

constexpr std::string_view kHeaderPrefix = "gehm-graph v1 n=";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

void write_graph(const WeightedGraph& graph, std::ostream& out) {
  out << kHeaderPrefix << graph.nodes() << '\n';
  char buf[64];
  for (const auto& e : graph.edges()) {
    std::snprintf(buf, sizeof buf, "%u %u %.17g\n", e.i, e.j, e.w);
    out << buf;
  }
}

WeightedGraph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  std::string_view header(line);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header.substr(0, kHeaderPrefix.size()) != kHeaderPrefix) {
    throw ParseError("expected header 'gehm-graph v1 n=<n>'", 1);
  }
  std::uint64_t n = 0;
  if (!parse_number(header.substr(kHeaderPrefix.size()), n)) {
    throw ParseError("malformed node count in header", 1);
  }

  std::vector<Edge> entries;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 3) throw ParseError("expected 'i j w_ij'", lineno);
    std::uint64_t i = 0, j = 0;
    double w = 0.0;
    if (!parse_number(tok[0], i) || !parse_number(tok[1], j) || !parse_number(tok[2], w)) {
      throw ParseError("expected 'i j w_ij'", lineno);
    }
    if (i >= n || j >= n) {
      throw ValidationError("line " + std::to_string(lineno) + ": node id out of range for n=" +
                            std::to_string(n));
    }
    entries.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), w});
  }
  return WeightedGraph::from_directed(n, std::move(entries));
}

void write_graph(const WeightedGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_graph(graph, out);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

WeightedGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_graph(in);
}

}  // namespace gehm
