#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtr/cluster_assignment.hpp"
#include "dtr/csv.hpp"
#include "dtr/errors.hpp"

namespace dtr {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable undirected graph in CSR form. Every undirected edge is stored in
/// both endpoint rows, neighbor lists are sorted ascending, input edges carry
/// weight 1.
class Graph {
 public:
  Graph() = default;

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }

  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {targets_.data() + offsets_[v], degree(v)};
  }

  std::span<const double> weights(NodeId v) const noexcept {
    return {weights_.data() + offsets_[v], degree(v)};
  }

  bool has_edge(NodeId u, NodeId v) const noexcept {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(node_count());
    for (NodeId v = 0; v < d.size(); ++v) d[v] = degree(v);
    return d;
  }

  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<NodeId>& targets() const noexcept { return targets_; }

  friend Graph build_graph(std::span<const Edge> edges, std::size_t node_count);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
};

/// Builds the deduplicated symmetric CSR graph. Both orientations and repeated
/// pairs are accepted and collapse to a single undirected edge.
inline Graph build_graph(std::span<const Edge> edges, std::size_t node_count) {
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u >= node_count || v >= node_count) {
      throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") references a node outside [0, " +
                       std::to_string(node_count) + ")");
    }
    if (u == v) throw InputError("self-loop (" + std::to_string(u) + "," + std::to_string(v) + ") is not allowed");
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.offsets_.assign(node_count + 1, 0);
  for (const auto& e : directed) ++g.offsets_[e.first + 1];
  for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.targets_.reserve(directed.size());
  for (const auto& e : directed) g.targets_.push_back(e.second);
  g.weights_.assign(directed.size(), 1.0);
  return g;
}

inline Graph build_graph(const std::vector<Edge>& edges, std::size_t node_count) {
  return build_graph(std::span<const Edge>(edges), node_count);
}

/// Reads an undirected edge list with header `src,dst`.
inline std::vector<Edge> read_edge_csv(const std::string& path) {
  csv::Reader reader(path);
  const auto& h = reader.header();
  if (h.size() != 2 || h[0] != "src" || h[1] != "dst") reader.fail("expected header 'src,dst'");
  std::vector<Edge> edges;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 2) reader.fail("expected 2 fields, got " + std::to_string(f.size()));
    const auto u = reader.to_int(f[0]);
    const auto v = reader.to_int(f[1]);
    if (u < 0 || v < 0) reader.fail("negative node id");
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return edges;
}

enum class NormalizationMode { kSymmetric, kRowStochastic };

/// Normalized propagation operator sharing the sparsity pattern of a Graph.
/// Weights are mutable only through reweight_edges, which returns a new value.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency() = default;

  NormalizationMode mode() const noexcept { return mode_; }
  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {targets_.data() + offsets_[v], degree(v)};
  }
  std::span<const double> weights(NodeId v) const noexcept {
    return {weights_.data() + offsets_[v], degree(v)};
  }

  /// Weight of entry (u, v); 0 when the edge does not exist.
  double weight(NodeId u, NodeId v) const noexcept {
    const auto nb = neighbors(u);
    const auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v) return 0.0;
    return weights_[offsets_[u] + static_cast<std::size_t>(it - nb.begin())];
  }

  double row_sum(NodeId v) const noexcept {
    double s = 0.0;
    for (double w : weights(v)) s += w;
    return s;
  }

  friend NormalizedAdjacency normalize(const Graph& graph, NormalizationMode mode);
  friend NormalizedAdjacency reweight_edges(const NormalizedAdjacency& adj, const ClusterAssignment& assignment,
                                            double alpha, double beta, bool renormalize);

 private:
  NormalizationMode mode_ = NormalizationMode::kSymmetric;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
};

/// symmetric: a_ij / sqrt(d_i d_j); row-stochastic: a_ij / d_i.
/// No self-loops are added; isolated nodes keep empty rows.
inline NormalizedAdjacency normalize(const Graph& graph, NormalizationMode mode) {
  NormalizedAdjacency adj;
  adj.mode_ = mode;
  adj.offsets_ = graph.offsets();
  adj.targets_ = graph.targets();
  adj.weights_.resize(adj.targets_.size());

  const std::size_t n = graph.node_count();
  std::vector<double> deg(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    for (double w : graph.weights(v)) deg[v] += w;
  }
  for (NodeId v = 0; v < n; ++v) {
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const double a = w[e];
      adj.weights_[adj.offsets_[v] + e] =
          mode == NormalizationMode::kSymmetric ? a / std::sqrt(deg[v] * deg[nb[e]]) : a / deg[v];
    }
  }
  return adj;
}

/// Scales intra-cluster entries by alpha and inter-cluster entries by beta,
/// then clips every weight to at most 1.
///
/// With `renormalize`, row sums are brought back under control afterwards:
/// in symmetric mode each row with sum s > 1 gets scale 1/s and the entry
/// (i, j) is multiplied by min(scale_i, scale_j), which keeps the matrix
/// symmetric and every row sum <= 1. In row-stochastic mode every non-empty
/// row is rescaled to sum exactly 1.
inline NormalizedAdjacency reweight_edges(const NormalizedAdjacency& adj, const ClusterAssignment& assignment,
                                          double alpha, double beta, bool renormalize = true) {
  if (!(alpha > 1.0)) throw ConfigError("alpha must be > 1, got " + std::to_string(alpha));
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1), got " + std::to_string(beta));
  const std::size_t n = adj.node_count();
  if (assignment.labels.size() != n) {
    throw InputError("cluster assignment covers " + std::to_string(assignment.labels.size()) + " nodes, graph has " +
                     std::to_string(n));
  }

  NormalizedAdjacency out = adj;
  const auto& c = assignment.labels;
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t e = out.offsets_[i]; e < out.offsets_[i + 1]; ++e) {
      const double scaled = out.weights_[e] * (c[i] == c[out.targets_[e]] ? alpha : beta);
      out.weights_[e] = std::min(scaled, 1.0);
    }
  }
  if (!renormalize) return out;

  std::vector<double> scale(n, 1.0);
  for (NodeId i = 0; i < n; ++i) {
    const double s = out.row_sum(i);
    if (out.mode_ == NormalizationMode::kSymmetric) {
      if (s > 1.0) scale[i] = 1.0 / s;
    } else if (s > 0.0) {
      scale[i] = 1.0 / s;
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t e = out.offsets_[i]; e < out.offsets_[i + 1]; ++e) {
      const double f = out.mode_ == NormalizationMode::kSymmetric ? std::min(scale[i], scale[out.targets_[e]]) : scale[i];
      out.weights_[e] *= f;
    }
  }
  return out;
}

}  // namespace dtr
