#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dtr/cluster_assignment.hpp"
#include "dtr/errors.hpp"
#include "dtr/graph.hpp"
#include "dtr/kmeans.hpp"
#include "dtr/matrix.hpp"

namespace dtr {

/// Node features together with the set of attribute-complete nodes whose
/// rows are pinned to their original values.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  FeatureMatrix(Matrix values, std::vector<bool> complete)
      : values_(std::move(values)), complete_(std::move(complete)), frozen_(values_) {
    if (complete_.size() != values_.rows()) {
      throw InputError("complete mask has " + std::to_string(complete_.size()) + " entries, feature matrix has " +
                       std::to_string(values_.rows()) + " rows");
    }
    if (!values_.all_finite()) throw InputError("feature matrix contains non-finite values");
  }

  const Matrix& values() const noexcept { return values_; }
  Matrix& mutable_values() noexcept { return values_; }
  const std::vector<bool>& complete_mask() const noexcept { return complete_; }
  bool is_complete(NodeId v) const noexcept { return complete_[v]; }

  /// H^(0) row of a complete node.
  std::span<const double> original_row(NodeId v) const noexcept { return frozen_.row(v); }

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t dim() const noexcept { return values_.cols(); }

  /// Writes the frozen rows back over every complete node.
  void restore_complete() {
    for (NodeId v = 0; v < rows(); ++v) {
      if (!complete_[v]) continue;
      const auto src = frozen_.row(v);
      std::copy(src.begin(), src.end(), values_.row(v).begin());
    }
  }

 private:
  Matrix values_;
  std::vector<bool> complete_;
  Matrix frozen_;
};

struct DcfpConfig {
  std::size_t f_max = 200;
  std::size_t t_period = 40;
  double alpha = 1.5;
  double beta = 0.5;
  std::size_t k = 2;
  std::uint64_t seed = 0;
  bool renormalize = true;

  /// alpha == beta == 1 turns reweighting off (plain feature propagation).
  bool reweighting_enabled() const noexcept { return !(alpha == 1.0 && beta == 1.0); }

  void validate() const {
    if (t_period == 0) throw ConfigError("t_period must be >= 1");
    if (k == 0) throw ConfigError("cluster count k must be >= 1");
    if (reweighting_enabled() && !(alpha > 1.0 && beta > 0.0 && beta < 1.0)) {
      throw ConfigError("need alpha > 1 > beta > 0 (or alpha = beta = 1 to disable reweighting), got alpha=" +
                        std::to_string(alpha) + " beta=" + std::to_string(beta));
    }
  }
};

/// One DCFP iteration as reported to the telemetry callback.
struct DcfpStep {
  std::size_t t = 0;
  double change_norm = 0.0;  // max |H^(t) - H^(t-1)| over missing rows
  bool reweighted = false;
};

struct DcfpResult {
  FeatureMatrix features;
  NormalizedAdjacency adjacency;
  ClusterAssignment assignment;
  std::size_t reweight_rounds = 0;
};

namespace detail {

// dst <- adj * src, then complete rows restored. Returns the max absolute
// change over missing rows.
inline double propagate_into(const NormalizedAdjacency& adj, const Matrix& src, Matrix& dst,
                             const FeatureMatrix& features) {
  const std::size_t d = src.cols();
  double change = 0.0;
  for (NodeId v = 0; v < src.rows(); ++v) {
    auto out = dst.row(v);
    if (features.is_complete(v)) {
      const auto orig = features.original_row(v);
      std::copy(orig.begin(), orig.end(), out.begin());
      continue;
    }
    std::fill(out.begin(), out.end(), 0.0);
    const auto nb = adj.neighbors(v);
    const auto w = adj.weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const auto in = src.row(nb[e]);
      for (std::size_t j = 0; j < d; ++j) out[j] += w[e] * in[j];
    }
    const auto prev = src.row(v);
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(out[j])) throw NumericError("propagation produced a non-finite value in row " + std::to_string(v));
      change = std::max(change, std::abs(out[j] - prev[j]));
    }
  }
  return change;
}

}  // namespace detail

/// H <- A_hat H followed by restoring every complete row to H^(0).
inline FeatureMatrix propagate_step(const NormalizedAdjacency& adj, const FeatureMatrix& features) {
  if (adj.node_count() != features.rows()) {
    throw InputError("adjacency has " + std::to_string(adj.node_count()) + " nodes, features have " +
                     std::to_string(features.rows()) + " rows");
  }
  FeatureMatrix out = features;
  detail::propagate_into(adj, features.values(), out.mutable_values(), features);
  return out;
}

/// Cluster-aware feature propagation. Every `t_period` iterations the current
/// features are clustered and the adjacency is reweighted in place, so the
/// scaling compounds across rounds. When no reweighting round happens (f_max <
/// t_period, or reweighting disabled) a single k-means on the final features
/// provides the returned assignment.
inline DcfpResult run_dcfp(const NormalizedAdjacency& adjacency, const FeatureMatrix& features, const DcfpConfig& config,
                           const std::function<void(const DcfpStep&)>& on_step = {}) {
  config.validate();
  if (adjacency.node_count() != features.rows()) {
    throw InputError("adjacency has " + std::to_string(adjacency.node_count()) + " nodes, features have " +
                     std::to_string(features.rows()) + " rows");
  }

  DcfpResult result{features, adjacency, {}, 0};
  Matrix scratch = features.values();
  bool have_assignment = false;

  for (std::size_t t = 1; t <= config.f_max; ++t) {
    DcfpStep step;
    step.t = t;
    step.change_norm = detail::propagate_into(result.adjacency, result.features.values(), scratch, result.features);
    std::swap(scratch, result.features.mutable_values());

    if (config.reweighting_enabled() && t % config.t_period == 0) {
      result.assignment = kmeans(result.features.values(), config.k, config.seed + t);
      result.adjacency = reweight_edges(result.adjacency, result.assignment, config.alpha, config.beta, config.renormalize);
      have_assignment = true;
      step.reweighted = true;
      ++result.reweight_rounds;
    }
    if (on_step) on_step(step);
  }

  if (!have_assignment) result.assignment = kmeans(result.features.values(), config.k, config.seed);
  return result;
}

}  // namespace dtr
