#include "gehm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "gehm/error.hpp"
#include "gehm/rng.hpp"

namespace gehm {

WeightedGraph WeightedGraph::from_directed(std::size_t n, std::vector<Edge> entries) {
  if (n > std::numeric_limits<NodeId>::max()) {
    throw ValidationError("node count exceeds 32-bit id range");
  }
  for (const auto& e : entries) {
    if (e.i >= n || e.j >= n) {
      throw ValidationError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") references a node outside [0, " + std::to_string(n) + ")");
    }
    if (e.i == e.j) {
      throw ValidationError("self-loop at node " + std::to_string(e.i));
    }
    if (!std::isfinite(e.w) || e.w < 0.0) {
      throw ValidationError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") has a negative or non-finite weight");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].i == entries[k - 1].i && entries[k].j == entries[k - 1].j) {
      throw ValidationError("duplicate edge (" + std::to_string(entries[k].i) + "," +
                            std::to_string(entries[k].j) + ")");
    }
  }

  WeightedGraph g;
  g.row_ptr_.assign(n + 1, 0);
  g.col_.reserve(entries.size());
  g.weight_.reserve(entries.size());
  for (const auto& e : entries) {
    ++g.row_ptr_[e.i + 1];
    g.col_.push_back(e.j);
    g.weight_.push_back(e.w);
  }
  for (std::size_t i = 0; i < n; ++i) g.row_ptr_[i + 1] += g.row_ptr_[i];
  g.degree_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.degree_[i] = static_cast<std::uint32_t>(g.row_ptr_[i + 1] - g.row_ptr_[i]);
  }
  for (const auto& e : entries) {
    if (!g.has_edge(e.j, e.i)) {
      throw ValidationError("asymmetric edge set: (" + std::to_string(e.i) + "," +
                            std::to_string(e.j) + ") has no reverse entry");
    }
  }
  return g;
}

WeightedGraph WeightedGraph::from_pairs(std::size_t n,
                                        std::span<const std::pair<NodeId, NodeId>> pairs) {
  std::vector<Edge> entries;
  entries.reserve(2 * pairs.size());
  for (auto [a, b] : pairs) {
    entries.push_back({a, b, 1.0});
    entries.push_back({b, a, 1.0});
  }
  return from_directed(n, std::move(entries));
}

bool WeightedGraph::has_edge(NodeId i, NodeId j) const noexcept {
  if (i >= nodes()) return false;
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

double WeightedGraph::weight(NodeId i, NodeId j) const noexcept {
  if (i >= nodes()) return 0.0;
  auto nb = neighbors(i);
  auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return 0.0;
  return weight_[row_ptr_[i] + static_cast<std::size_t>(it - nb.begin())];
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(col_.size());
  for (NodeId i = 0; i < nodes(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out.push_back({i, col_[k], weight_[k]});
    }
  }
  return out;
}

bool WeightedGraph::is_value_symmetric() const noexcept {
  for (NodeId i = 0; i < nodes(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (weight(col_[k], i) != weight_[k]) return false;
    }
  }
  return true;
}

WeightedGraph WeightedGraph::with_weights(std::vector<double> weights) const {
  if (weights.size() != weight_.size()) {
    throw InputError("weight vector length does not match the edge count");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("negative or non-finite weight");
  }
  WeightedGraph g = *this;
  g.weight_ = std::move(weights);
  return g;
}

// ---------------------------------------------------------------------------

std::string model_name(const GraphModel& model) {
  struct {
    std::string operator()(const BarabasiAlbert&) const { return "barabasi_albert"; }
    std::string operator()(const ErdosRenyi&) const { return "erdos_renyi"; }
    std::string operator()(const WattsStrogatz&) const { return "watts_strogatz"; }
  } visitor;
  return std::visit(visitor, model);
}

std::vector<std::string> validate(const GraphModelSpec& spec) {
  std::vector<std::string> issues;
  if (spec.n == 0) issues.emplace_back("graph.n must be at least 1");
  if (spec.n > std::numeric_limits<NodeId>::max()) issues.emplace_back("graph.n too large");
  if (const auto* ba = std::get_if<BarabasiAlbert>(&spec.model)) {
    if (ba->m < 1) issues.emplace_back("graph.m must be >= 1");
    if (ba->m >= spec.n) issues.emplace_back("graph.m must be < graph.n");
  } else if (const auto* er = std::get_if<ErdosRenyi>(&spec.model)) {
    if (!(er->prob >= 0.0 && er->prob <= 1.0)) issues.emplace_back("graph.prob must lie in [0, 1]");
  } else if (const auto* ws = std::get_if<WattsStrogatz>(&spec.model)) {
    if (ws->k % 2 != 0) issues.emplace_back("graph.k must be even");
    if (ws->k >= spec.n) issues.emplace_back("graph.k must be < graph.n");
    if (!(ws->beta >= 0.0 && ws->beta <= 1.0)) issues.emplace_back("graph.beta must lie in [0, 1]");
  }
  return issues;
}

namespace {

using Pair = std::pair<NodeId, NodeId>;

std::vector<Pair> barabasi_albert(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<Pair> pairs;
  std::vector<NodeId> endpoints;  // each node repeated once per incident edge
  for (NodeId a = 0; a < m; ++a) {
    for (NodeId b = a + 1; b < m; ++b) {
      pairs.emplace_back(a, b);
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  }
  std::vector<NodeId> targets;
  for (auto v = static_cast<NodeId>(m); v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      NodeId t;
      if (endpoints.empty()) {
        t = std::uniform_int_distribution<NodeId>(0, v - 1)(rng);
      } else {
        t = endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng)];
      }
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      pairs.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return pairs;
}

std::vector<Pair> erdos_renyi(std::size_t n, double prob, Rng& rng) {
  std::vector<Pair> pairs;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (unif(rng) < prob) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

std::vector<Pair> watts_strogatz(std::size_t n, std::size_t k, double beta, Rng& rng) {
  auto key = [](NodeId a, NodeId b) { return a < b ? Pair{a, b} : Pair{b, a}; };
  std::set<Pair> edges;
  std::vector<std::uint32_t> deg(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t j = 1; j <= k / 2; ++j) {
      edges.insert(key(i, static_cast<NodeId>((i + j) % n)));
    }
  }
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  // Rewire lattice edge (i, i+j) to (i, w) in the same sweep order as the
  // classic construction: offset-major, node-minor.
  for (std::size_t j = 1; j <= k / 2; ++j) {
    for (NodeId i = 0; i < n; ++i) {
      const auto v = static_cast<NodeId>((i + j) % n);
      if (unif(rng) >= beta) continue;
      if (deg[i] >= n - 1) continue;
      if (!edges.count(key(i, v))) continue;
      NodeId w = pick(rng);
      while (w == i || edges.count(key(i, w))) w = pick(rng);
      edges.erase(key(i, v));
      --deg[v];
      edges.insert(key(i, w));
      ++deg[w];
    }
  }
  return {edges.begin(), edges.end()};
}

}  // namespace

WeightedGraph generate_graph(const GraphModelSpec& spec) {
  if (auto issues = validate(spec); !issues.empty()) {
    std::string msg = "invalid graph spec:";
    for (const auto& s : issues) msg += " " + s + ";";
    throw ParameterError(msg);
  }
  Rng rng = make_rng(spec.seed, Stream::graph_gen);
  std::vector<Pair> pairs;
  if (const auto* ba = std::get_if<BarabasiAlbert>(&spec.model)) {
    pairs = barabasi_albert(spec.n, ba->m, rng);
  } else if (const auto* er = std::get_if<ErdosRenyi>(&spec.model)) {
    pairs = erdos_renyi(spec.n, er->prob, rng);
  } else {
    const auto& ws = std::get<WattsStrogatz>(spec.model);
    pairs = watts_strogatz(spec.n, ws.k, ws.beta, rng);
  }
  return WeightedGraph::from_pairs(spec.n, pairs);
}

// ---------------------------------------------------------------------------

std::string to_string(Normalization scheme) {
  switch (scheme) {
    case Normalization::none: return "none";
    case Normalization::row: return "row";
    case Normalization::symmetric: return "symmetric";
  }
  return "none";
}

Normalization parse_normalization(const std::string& name) {
  if (name == "none") return Normalization::none;
  if (name == "row") return Normalization::row;
  if (name == "symmetric") return Normalization::symmetric;
  throw ParameterError("unknown normalization scheme '" + name + "'");
}

WeightedGraph normalize_weights(const WeightedGraph& graph, Normalization scheme) {
  if (scheme == Normalization::none) return graph;
  const auto rp = graph.row_ptr();
  const auto col = graph.col();
  const auto w = graph.weights();
  const auto deg = graph.degrees();
  std::vector<double> out(w.begin(), w.end());
  for (NodeId i = 0; i < graph.nodes(); ++i) {
    if (scheme == Normalization::row) {
      double sum = 0.0;
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) sum += w[k];
      if (sum <= 0.0) continue;
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) out[k] = w[k] / sum;
    } else {
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
        out[k] = w[k] / std::sqrt(static_cast<double>(deg[i]) * static_cast<double>(deg[col[k]]));
      }
    }
  }
  return graph.with_weights(std::move(out));
}

std::vector<std::uint32_t> degree_vector(const WeightedGraph& graph) {
  auto d = graph.degrees();
  return {d.begin(), d.end()};
}

}  // namespace gehm
