#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gehm/graph.hpp"

namespace gehm::testing {

// Spanning tree plus random extra edges; weights in [0.5, 2] when weighted.
inline WeightedGraph random_connected_graph(std::size_t n, double extra, std::mt19937_64& rng,
                                            bool weighted = true) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.5, 2.0);
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  auto add = [&](std::size_t i, std::size_t j) {
    const double x = weighted ? wdist(rng) : 1.0;
    w[i][j] = w[j][i] = x;
  };
  for (std::size_t i = 1; i < n; ++i) add(i, std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w[i][j] == 0.0 && unif(rng) < extra) add(i, j);
    }
  }
  std::vector<Edge> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (w[i][j] != 0.0) entries.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), w[i][j]});
    }
  }
  return WeightedGraph::from_directed(n, std::move(entries));
}

inline WeightedGraph complete_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return WeightedGraph::from_pairs(n, pairs);
}

inline WeightedGraph cycle_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < n; ++i) pairs.emplace_back(i, static_cast<NodeId>((i + 1) % n));
  return WeightedGraph::from_pairs(n, pairs);
}

inline WeightedGraph path_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return WeightedGraph::from_pairs(n, pairs);
}

// L = D - W with rows built from the stored (possibly asymmetric) weights.
inline Eigen::MatrixXd dense_laplacian(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.nodes());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    L(e.i, e.j) -= e.w;
    L(e.i, e.i) += e.w;
  }
  return L;
}

inline Eigen::MatrixXd dense_adjacency(const WeightedGraph& g, bool unit) {
  const auto n = static_cast<Eigen::Index>(g.nodes());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) A(e.i, e.j) = unit ? 1.0 : e.w;
  return A;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gehm-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace gehm::testing
