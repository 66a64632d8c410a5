#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dtr/cluster_assignment.hpp"
#include "dtr/errors.hpp"
#include "dtr/graph.hpp"
#include "dtr/kmeans.hpp"
#include "dtr/matrix.hpp"

namespace dtr {

/// Where a node stands relative to the attribute-complete set.
enum class Tier : std::uint8_t {
  kComplete,    // attribute-complete (original or promoted)
  kAllKnown,    // missing, every neighbor complete
  kSomeKnown,   // missing, some but not all neighbors complete
  kAllUnknown,  // missing, no complete neighbor (includes isolated nodes)
};

class TierPartition {
 public:
  TierPartition() = default;
  explicit TierPartition(std::vector<Tier> tiers) : tiers_(std::move(tiers)) {}

  std::size_t size() const noexcept { return tiers_.size(); }
  Tier tier(NodeId v) const noexcept { return tiers_[v]; }
  bool is_complete(NodeId v) const noexcept { return tiers_[v] == Tier::kComplete; }

  std::vector<NodeId> nodes(Tier t) const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < tiers_.size(); ++v) {
      if (tiers_[v] == t) out.push_back(v);
    }
    return out;
  }

  std::size_t count(Tier t) const noexcept {
    return static_cast<std::size_t>(std::count(tiers_.begin(), tiers_.end(), t));
  }

  std::vector<bool> complete_mask() const {
    std::vector<bool> m(tiers_.size());
    for (NodeId v = 0; v < tiers_.size(); ++v) m[v] = tiers_[v] == Tier::kComplete;
    return m;
  }

  /// Moves v into the complete set. Neighbor tiers are left stale until the
  /// next classify_missing.
  void promote(NodeId v) noexcept { tiers_[v] = Tier::kComplete; }

  const std::vector<Tier>& tiers() const noexcept { return tiers_; }

 private:
  std::vector<Tier> tiers_;
};

/// Splits the missing nodes by how many of their neighbors are complete.
inline TierPartition classify_missing(const Graph& graph, const std::vector<bool>& complete) {
  const std::size_t n = graph.node_count();
  if (complete.size() != n) throw InputError("complete mask size does not match node count");
  std::vector<Tier> tiers(n);
  for (NodeId v = 0; v < n; ++v) {
    if (complete[v]) {
      tiers[v] = Tier::kComplete;
      continue;
    }
    std::size_t known = 0;
    const auto nb = graph.neighbors(v);
    for (NodeId u : nb) known += complete[u];
    if (known == 0) {
      tiers[v] = Tier::kAllUnknown;
    } else if (known == nb.size()) {
      tiers[v] = Tier::kAllKnown;
    } else {
      tiers[v] = Tier::kSomeKnown;
    }
  }
  return TierPartition(std::move(tiers));
}

/// Nodes whose whole neighborhood is observed keep their propagated features
/// and join the complete set.
inline TierPartition promote_all_known(TierPartition partition) {
  for (NodeId v = 0; v < partition.size(); ++v) {
    if (partition.tier(v) == Tier::kAllKnown) partition.promote(v);
  }
  return partition;
}

struct RuleOutcome {
  Matrix features;
  std::vector<NodeId> promotions;  // IRS: ascending node order
  std::vector<NodeId> corrected;   // ICS: ascending node order
  double max_change = 0.0;         // largest absolute feature change
};

namespace detail {

inline void check_rule_inputs(const Graph& graph, const Matrix& features, const TierPartition& partition,
                              const ClusterAssignment& assignment, double gamma) {
  const std::size_t n = graph.node_count();
  if (features.rows() != n || partition.size() != n || assignment.labels.size() != n) {
    throw InputError("graph, features, partition and assignment disagree on node count");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1), got " + std::to_string(gamma));
}

// out_row <- gamma * out_row + (1 - gamma) * mean(source rows). Returns the
// largest absolute component change.
inline double ema_toward_mean(const Matrix& source, const std::vector<NodeId>& members, double gamma,
                              std::span<double> out_row) {
  const std::size_t d = source.cols();
  std::vector<double> mean(d, 0.0);
  for (NodeId u : members) {
    const auto r = source.row(u);
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  double change = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double updated = gamma * out_row[j] + (1.0 - gamma) * (mean[j] * inv);
    change = std::max(change, std::abs(updated - out_row[j]));
    out_row[j] = updated;
  }
  return change;
}

}  // namespace detail

/// Intra-cluster reinforcement and inter-cluster correction for the
/// some-known tier. A node whose complete neighbors all share its cluster is
/// queued for promotion; a node whose complete neighbors all sit in other
/// clusters is pulled toward their mean by one EMA step; mixed neighborhoods
/// are left alone. All rules read the features as they were on entry.
inline RuleOutcome apply_some_known_rules(const Graph& graph, const Matrix& features, const TierPartition& partition,
                                          const ClusterAssignment& assignment, double gamma) {
  detail::check_rule_inputs(graph, features, partition, assignment, gamma);
  const auto& c = assignment.labels;
  RuleOutcome out{features, {}, {}, 0.0};
  std::vector<NodeId> known;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (partition.tier(v) != Tier::kSomeKnown) continue;
    known.clear();
    bool all_same = true;
    bool all_diff = true;
    for (NodeId u : graph.neighbors(v)) {
      if (!partition.is_complete(u)) continue;
      known.push_back(u);
      if (c[u] == c[v]) {
        all_diff = false;
      } else {
        all_same = false;
      }
    }
    if (known.empty()) {
      throw ConsistencyError("some-known node " + std::to_string(v) + " has no complete neighbor (stale partition)");
    }
    if (all_same) {
      out.promotions.push_back(v);
    } else if (all_diff) {
      out.max_change = std::max(out.max_change, detail::ema_toward_mean(features, known, gamma, out.features.row(v)));
      out.corrected.push_back(v);
    }
  }
  return out;
}

/// Final pass over nodes still lacking any complete neighbor: when every
/// some-known neighbor lies in a different cluster, one EMA step toward their
/// mean. Nodes without some-known neighbors keep their values.
inline Matrix impute_all_unknown(const Graph& graph, const Matrix& features, const TierPartition& partition,
                                 const ClusterAssignment& assignment, double gamma) {
  detail::check_rule_inputs(graph, features, partition, assignment, gamma);
  const auto& c = assignment.labels;
  Matrix out = features;
  std::vector<NodeId> sources;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (partition.tier(v) != Tier::kAllUnknown) continue;
    sources.clear();
    bool all_diff = true;
    for (NodeId u : graph.neighbors(v)) {
      if (partition.tier(u) != Tier::kSomeKnown) continue;
      sources.push_back(u);
      if (c[u] == c[v]) all_diff = false;
    }
    if (sources.empty() || !all_diff) continue;
    detail::ema_toward_mean(features, sources, gamma, out.row(v));
  }
  return out;
}

struct HnaiConfig {
  std::size_t i_max = 10;
  double gamma = 0.9;
  std::size_t k = 2;
  std::uint64_t seed = 0;

  void validate() const {
    if (i_max == 0) throw ConfigError("i_max must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1), got " + std::to_string(gamma));
    if (k == 0) throw ConfigError("cluster count k must be >= 1");
  }
};

/// Tier sizes observed when an HNAI iteration classifies the missing nodes.
struct TierCount {
  std::size_t iteration = 0;
  std::size_t all_known = 0;
  std::size_t some_known = 0;
  std::size_t all_unknown = 0;

  friend bool operator==(const TierCount&, const TierCount&) = default;
};

using TierTrace = std::vector<TierCount>;

struct HnaiResult {
  Matrix features;
  TierPartition partition;  // classification after the last iteration
  ClusterAssignment assignment;
  TierTrace trace;
  std::size_t iterations = 0;
};

/// Hierarchical imputation: classify, promote all-known nodes, apply the
/// some-known rules, commit promotions, recluster. Repeats up to i_max times
/// and stops early once an iteration leaves membership and features
/// unchanged or no missing node is left. The all-unknown rule runs once at the end.
inline HnaiResult run_hnai(const Graph& graph, const Matrix& features, const std::vector<bool>& complete,
                           const ClusterAssignment& initial_assignment, const HnaiConfig& config) {
  config.validate();
  const std::size_t n = graph.node_count();
  if (features.rows() != n || complete.size() != n || initial_assignment.labels.size() != n) {
    throw InputError("run_hnai: graph, features, complete mask and assignment disagree on node count");
  }

  HnaiResult result;
  result.features = features;
  result.assignment = initial_assignment;
  std::vector<bool> known = complete;

  for (std::size_t i = 1; i <= config.i_max; ++i) {
    TierPartition part = classify_missing(graph, known);
    const TierCount counts{i, part.count(Tier::kAllKnown), part.count(Tier::kSomeKnown), part.count(Tier::kAllUnknown)};
    result.trace.push_back(counts);

    part = promote_all_known(std::move(part));
    RuleOutcome rules = apply_some_known_rules(graph, result.features, part, result.assignment, config.gamma);
    for (NodeId v : rules.promotions) part.promote(v);

    const bool changed = counts.all_known > 0 || !rules.promotions.empty() || rules.max_change > 1e-12;
    result.features = std::move(rules.features);
    known = part.complete_mask();
    result.assignment = kmeans(result.features, config.k, config.seed + i);
    result.iterations = i;
    const bool nothing_missing = std::find(known.begin(), known.end(), false) == known.end();
    if (!changed || nothing_missing) break;
  }

  result.partition = classify_missing(graph, known);
  result.features = impute_all_unknown(graph, result.features, result.partition, result.assignment, config.gamma);
  return result;
}

}  // namespace dtr
