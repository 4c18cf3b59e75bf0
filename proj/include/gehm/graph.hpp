#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gehm {

using NodeId = std::uint32_t;

struct Edge {
  NodeId i;
  NodeId j;
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Read-only compressed-row view consumed by the numerical kernels.
struct CsrView {
  std::span<const std::size_t> row_ptr;
  std::span<const NodeId> col;
  std::span<const double> weight;

  std::size_t nodes() const noexcept { return row_ptr.empty() ? 0 : row_ptr.size() - 1; }
};

/// Finite weighted graph stored as a compressed row structure with one entry
/// per directed edge. Every undirected edge appears twice, once per
/// direction, and the two directions may carry different weights (row
/// normalization breaks value symmetry but never structural symmetry).
///
/// Immutable after construction; safe to share across threads.
class WeightedGraph {
public:
  WeightedGraph() = default;

  /// Builds from a list of directed entries. Throws ValidationError on
  /// out-of-range ids, self-loops, duplicates, missing reverse entries, or
  /// negative / non-finite weights.
  static WeightedGraph from_directed(std::size_t n, std::vector<Edge> entries);

  /// Builds a unit-weight graph from unordered pairs. Duplicate pairs are an
  /// error.
  static WeightedGraph from_pairs(std::size_t n, std::span<const std::pair<NodeId, NodeId>> pairs);

  std::size_t nodes() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t directed_edges() const noexcept { return col_.size(); }
  std::size_t undirected_edges() const noexcept { return col_.size() / 2; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const NodeId> col() const noexcept { return col_; }
  std::span<const double> weights() const noexcept { return weight_; }
  CsrView csr() const noexcept { return {row_ptr_, col_, weight_}; }

  std::span<const NodeId> neighbors(NodeId i) const noexcept {
    return std::span<const NodeId>(col_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }
  std::span<const double> neighbor_weights(NodeId i) const noexcept {
    return std::span<const double>(weight_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }

  /// Number of structural neighbours of each node.
  std::span<const std::uint32_t> degrees() const noexcept { return degree_; }

  /// w_ij, or 0 when (i, j) is not an edge.
  double weight(NodeId i, NodeId j) const noexcept;
  bool has_edge(NodeId i, NodeId j) const noexcept;

  /// Directed entries in storage order (row-major, columns ascending).
  std::vector<Edge> edges() const;

  bool is_value_symmetric() const noexcept;

  /// Same graph with every weight replaced. The span must be aligned with
  /// the storage order.
  WeightedGraph with_weights(std::vector<double> weights) const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

private:
  std::vector<std::size_t> row_ptr_;
  std::vector<NodeId> col_;
  std::vector<double> weight_;
  std::vector<std::uint32_t> degree_;
};

// ---------------------------------------------------------------------------
// Generators

struct BarabasiAlbert {
  std::size_t m = 3;
};
struct ErdosRenyi {
  double prob = 0.0;
};
struct WattsStrogatz {
  std::size_t k = 4;
  double beta = 0.0;
};

using GraphModel = std::variant<BarabasiAlbert, ErdosRenyi, WattsStrogatz>;

struct GraphModelSpec {
  GraphModel model = BarabasiAlbert{};
  std::size_t n = 2000;
  std::uint64_t seed = 123456;
};

std::string model_name(const GraphModel& model);

/// Problems with the model parameters, empty when valid.
std::vector<std::string> validate(const GraphModelSpec& spec);

/// Unit-weight random graph; a pure function of the model parameters (seed included).
///
/// Barabasi-Albert starts from a complete graph on m nodes; each later node
/// attaches m edges to distinct existing nodes drawn proportionally to
/// degree, redrawing duplicate targets.
WeightedGraph generate_graph(const GraphModelSpec& spec);

// ---------------------------------------------------------------------------
// Weights

enum class Normalization { none, row, symmetric };

std::string to_string(Normalization scheme);
Normalization parse_normalization(const std::string& name);

/// row:       w_ij = a_ij / sum_k a_ik
/// symmetric: w_ij = a_ij / sqrt(deg(i) deg(j))
/// none:      unchanged
/// Here a_ij is the current weight. Isolated nodes keep an empty row.
WeightedGraph normalize_weights(const WeightedGraph& graph, Normalization scheme);

std::vector<std::uint32_t> degree_vector(const WeightedGraph& graph);

// ---------------------------------------------------------------------------
// Edge-list files
//
//   gehm-graph v1 n=<n>
//   i j w_ij
//   ...
//
// One line per directed entry, weights with 17 significant digits.

void write_graph(const WeightedGraph& graph, const std::filesystem::path& path);
WeightedGraph read_graph(const std::filesystem::path& path);

void write_graph(const WeightedGraph& graph, std::ostream& out);
WeightedGraph read_graph(std::istream& in);

}  // namespace gehm
