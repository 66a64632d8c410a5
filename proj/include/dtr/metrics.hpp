#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtr/errors.hpp"

namespace dtr {

using Labels = std::vector<std::size_t>;

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(m^3)). Returns row_to_col.
inline std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t m = cost.size();
  if (m == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual start.
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(m);
  for (std::size_t j = 1; j <= m; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

namespace detail {

// Compresses arbitrary label values to 0..k-1 in ascending value order.
inline std::vector<std::size_t> compress(std::span<const std::size_t> labels, std::vector<std::size_t>* values = nullptr) {
  std::vector<std::size_t> uniq(labels.begin(), labels.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), labels[i]) - uniq.begin());
  }
  if (values) *values = std::move(uniq);
  return out;
}

struct Contingency {
  std::vector<std::vector<double>> table;  // [pred][truth]
  std::vector<double> pred_sums, truth_sums;
  std::vector<std::size_t> truth_values;
  double n = 0.0;
};

inline Contingency contingency(std::span<const std::size_t> pred, std::span<const std::size_t> truth) {
  if (pred.size() != truth.size()) {
    throw InputError("label vectors differ in length: " + std::to_string(pred.size()) + " vs " +
                     std::to_string(truth.size()));
  }
  if (pred.empty()) throw InputError("label vectors are empty");
  Contingency c;
  const auto p = compress(pred);
  const auto t = compress(truth, &c.truth_values);
  const std::size_t kp = *std::max_element(p.begin(), p.end()) + 1;
  const std::size_t kt = c.truth_values.size();
  c.table.assign(kp, std::vector<double>(kt, 0.0));
  c.pred_sums.assign(kp, 0.0);
  c.truth_sums.assign(kt, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    c.table[p[i]][t[i]] += 1.0;
    c.pred_sums[p[i]] += 1.0;
    c.truth_sums[t[i]] += 1.0;
  }
  c.n = static_cast<double>(pred.size());
  return c;
}

inline double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace detail

/// Relabels each predicted cluster with the truth class it is matched to under
/// the accuracy-maximizing bijection. Clusters left without a class (more
/// clusters than classes) get fresh values above every truth label.
inline Labels match_labels(std::span<const std::size_t> pred, std::span<const std::size_t> truth) {
  const auto c = detail::contingency(pred, truth);
  const std::size_t kp = c.table.size();
  const std::size_t kt = c.truth_values.size();
  const std::size_t m = std::max(kp, kt);
  std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < kp; ++i) {
    for (std::size_t j = 0; j < kt; ++j) cost[i][j] = -c.table[i][j];
  }
  const auto match = solve_assignment(cost);
  const std::size_t fresh = c.truth_values.back() + 1;
  std::vector<std::size_t> map(kp);
  for (std::size_t i = 0; i < kp; ++i) map[i] = match[i] < kt ? c.truth_values[match[i]] : fresh + i;
  const auto p = detail::compress(pred);
  Labels out(pred.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = map[p[i]];
  return out;
}

/// Fraction of points whose cluster maps to their class under the best
/// one-to-one matching of clusters to classes.
inline double clustering_accuracy(std::span<const std::size_t> pred, std::span<const std::size_t> truth) {
  const auto mapped = match_labels(pred, truth);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += mapped[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

/// Mutual information normalized by the arithmetic mean of the two entropies.
/// Two single-cluster partitions are identical and score 1.
inline double nmi(std::span<const std::size_t> pred, std::span<const std::size_t> truth) {
  const auto c = detail::contingency(pred, truth);
  auto entropy = [&](const std::vector<double>& sums) {
    double h = 0.0;
    for (double s : sums) {
      if (s > 0.0) h -= (s / c.n) * std::log(s / c.n);
    }
    return h;
  };
  const double hp = entropy(c.pred_sums);
  const double ht = entropy(c.truth_sums);
  if (hp == 0.0 && ht == 0.0) return 1.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < c.table.size(); ++i) {
    for (std::size_t j = 0; j < c.table[i].size(); ++j) {
      const double nij = c.table[i][j];
      if (nij == 0.0) continue;
      mi += (nij / c.n) * std::log(c.n * nij / (c.pred_sums[i] * c.truth_sums[j]));
    }
  }
  return std::clamp(mi / (0.5 * (hp + ht)), 0.0, 1.0);
}

/// Adjusted Rand index under the permutation (hypergeometric) model.
inline double ari(std::span<const std::size_t> pred, std::span<const std::size_t> truth) {
  const auto c = detail::contingency(pred, truth);
  double index = 0.0;
  for (const auto& row : c.table) {
    for (double nij : row) index += detail::comb2(nij);
  }
  double sum_a = 0.0, sum_b = 0.0;
  for (double a : c.pred_sums) sum_a += detail::comb2(a);
  for (double b : c.truth_sums) sum_b += detail::comb2(b);
  const double expected = sum_a * sum_b / detail::comb2(c.n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

/// Macro-averaged F1 over the truth classes. `mapped_pred` must already be
/// expressed in truth label values (see match_labels).
inline double macro_f1(std::span<const std::size_t> mapped_pred, std::span<const std::size_t> truth) {
  if (mapped_pred.size() != truth.size()) throw InputError("label vectors differ in length");
  if (truth.empty()) throw InputError("label vectors are empty");
  std::map<std::size_t, std::array<double, 3>> counts;  // class -> {tp, fp, fn}
  for (std::size_t t : truth) counts[t];
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (mapped_pred[i] == truth[i]) {
      counts[truth[i]][0] += 1.0;
    } else {
      counts[truth[i]][2] += 1.0;
      if (auto it = counts.find(mapped_pred[i]); it != counts.end()) it->second[1] += 1.0;
    }
  }
  double total = 0.0;
  for (const auto& [cls, tfp] : counts) {
    const double denom = 2.0 * tfp[0] + tfp[1] + tfp[2];
    total += denom > 0.0 ? 2.0 * tfp[0] / denom : 0.0;
  }
  return total / static_cast<double>(counts.size());
}

struct ClusteringScores {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  double f1 = 0.0;
};

inline ClusteringScores score_clustering(std::span<const std::size_t> pred, std::span<const std::size_t> truth) {
  ClusteringScores s;
  const auto mapped = match_labels(pred, truth);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += mapped[i] == truth[i];
  s.acc = static_cast<double>(hit) / static_cast<double>(truth.size());
  s.nmi = nmi(pred, truth);
  s.ari = ari(pred, truth);
  s.f1 = macro_f1(mapped, truth);
  return s;
}

/// Mean and (population) standard deviation of one metric over runs.
struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> values;

  double median() const {
    if (values.empty()) return 0.0;
    auto v = values;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  }

  static MetricSummary of(std::vector<double> values) {
    MetricSummary m;
    m.values = std::move(values);
    if (m.values.empty()) return m;
    const double n = static_cast<double>(m.values.size());
    for (double v : m.values) m.mean += v;
    m.mean /= n;
    double var = 0.0;
    for (double v : m.values) var += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(var / n);
    return m;
  }
};

struct MetricsReport {
  MetricSummary acc, nmi, ari, f1;
  std::size_t n_runs = 0;

  /// Per-run scores must be ordered by evaluation seed.
  static MetricsReport from_runs(const std::vector<ClusteringScores>& runs) {
    std::vector<double> a, n, r, f;
    for (const auto& s : runs) {
      a.push_back(s.acc);
      n.push_back(s.nmi);
      r.push_back(s.ari);
      f.push_back(s.f1);
    }
    MetricsReport rep;
    rep.acc = MetricSummary::of(std::move(a));
    rep.nmi = MetricSummary::of(std::move(n));
    rep.ari = MetricSummary::of(std::move(r));
    rep.f1 = MetricSummary::of(std::move(f));
    rep.n_runs = runs.size();
    return rep;
  }
};

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  auto entry = [&](const MetricSummary& m) {
    return nlohmann::ordered_json{{"mean", m.mean}, {"std", m.std}, {"runs", r.n_runs}};
  };
  return nlohmann::ordered_json{{"acc", entry(r.acc)}, {"nmi", entry(r.nmi)}, {"ari", entry(r.ari)}, {"f1", entry(r.f1)}};
}

}  // namespace dtr
