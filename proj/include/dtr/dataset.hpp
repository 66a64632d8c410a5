#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dtr/csv.hpp"
#include "dtr/dcfp.hpp"
#include "dtr/errors.hpp"
#include "dtr/graph.hpp"
#include "dtr/matrix.hpp"
#include "dtr/metrics.hpp"

namespace dtr {

struct Dataset {
  std::string name;
  Graph graph;
  Matrix features;
  std::optional<Labels> labels;

  std::size_t node_count() const noexcept { return graph.node_count(); }

  std::size_t class_count() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
  }
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace detail

/// `id,f0,...,f{d-1}` followed by one row per node in id order.
inline std::string feature_csv(const Matrix& m) {
  std::string s = "id";
  for (std::size_t j = 0; j < m.cols(); ++j) s += ",f" + std::to_string(j);
  s += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += std::to_string(i);
    for (double v : m.row(i)) {
      s += ',';
      csv::append_number(s, v);
    }
    s += '\n';
  }
  return s;
}

inline Matrix read_feature_csv(const std::string& path) {
  csv::Reader reader(path);
  const auto& h = reader.header();
  if (h.size() < 2 || h[0] != "id") reader.fail("expected header 'id,f0,...'");
  const std::size_t d = h.size() - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (h[j + 1] != "f" + std::to_string(j)) reader.fail("header column " + std::to_string(j + 1) + " should be 'f" + std::to_string(j) + "'");
  }

  std::vector<std::pair<std::int64_t, std::vector<double>>> rows;
  std::vector<std::string> f;
  std::int64_t max_id = -1;
  while (reader.next(f)) {
    if (f.size() != d + 1) {
      reader.fail("ragged row: expected " + std::to_string(d + 1) + " fields, got " + std::to_string(f.size()));
    }
    const auto id = reader.to_int(f[0]);
    if (id < 0) reader.fail("negative node id");
    std::vector<double> vals(d);
    for (std::size_t j = 0; j < d; ++j) {
      vals[j] = reader.to_double(f[j + 1]);
      if (!std::isfinite(vals[j])) reader.fail("non-finite feature value");
    }
    max_id = std::max(max_id, id);
    rows.emplace_back(id, std::move(vals));
  }
  if (static_cast<std::int64_t>(rows.size()) != max_id + 1) {
    throw InputError(path + ": ids must be dense 0..n-1, but there are " + std::to_string(rows.size()) +
                     " rows and the largest id is " + std::to_string(max_id));
  }
  Matrix m(rows.size(), d);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [id, vals] : rows) {
    if (seen[id]) throw InputError(path + ": duplicate node id " + std::to_string(id));
    seen[id] = true;
    std::copy(vals.begin(), vals.end(), m.row(id).begin());
  }
  return m;
}

inline Labels read_label_csv(const std::string& path, std::size_t node_count) {
  csv::Reader reader(path);
  const auto& h = reader.header();
  if (h.size() != 2 || h[0] != "id" || h[1] != "label") reader.fail("expected header 'id,label'");
  Labels labels(node_count);
  std::vector<bool> seen(node_count, false);
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 2) reader.fail("expected 2 fields, got " + std::to_string(f.size()));
    const auto id = reader.to_int(f[0]);
    const auto label = reader.to_int(f[1]);
    if (id < 0 || static_cast<std::size_t>(id) >= node_count) reader.fail("node id " + std::to_string(id) + " out of range");
    if (label < 0) reader.fail("negative label");
    if (seen[id]) reader.fail("duplicate node id " + std::to_string(id));
    seen[id] = true;
    labels[id] = static_cast<std::size_t>(label);
  }
  const auto missing = std::count(seen.begin(), seen.end(), false);
  if (missing > 0) throw InputError(path + ": " + std::to_string(missing) + " nodes have no label");
  return labels;
}

/// Loads `edges.csv`, `features.csv` and (optionally) `labels.csv` from a
/// directory. The node count is taken from the feature file.
inline Dataset load_dataset(const std::filesystem::path& dir) {
  const auto edges_path = dir / "edges.csv";
  const auto features_path = dir / "features.csv";
  const auto labels_path = dir / "labels.csv";
  if (!std::filesystem::is_directory(dir)) throw InputError("dataset directory '" + dir.string() + "' does not exist");
  if (!std::filesystem::exists(features_path)) throw InputError("missing file '" + features_path.string() + "'");
  if (!std::filesystem::exists(edges_path)) throw InputError("missing file '" + edges_path.string() + "'");

  Dataset ds;
  ds.name = dir.filename().string();
  ds.features = read_feature_csv(features_path.string());
  ds.graph = build_graph(read_edge_csv(edges_path.string()), ds.features.rows());
  if (std::filesystem::exists(labels_path)) ds.labels = read_label_csv(labels_path.string(), ds.features.rows());
  return ds;
}

inline void write_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  std::string edges = "src,dst\n";
  for (NodeId u = 0; u < ds.graph.node_count(); ++u) {
    for (NodeId v : ds.graph.neighbors(u)) {
      if (u < v) edges += std::to_string(u) + ',' + std::to_string(v) + '\n';
    }
  }
  detail::write_text_file(dir / "edges.csv", edges);
  detail::write_text_file(dir / "features.csv", feature_csv(ds.features));
  if (ds.labels) {
    std::string s = "id,label\n";
    for (std::size_t i = 0; i < ds.labels->size(); ++i) s += std::to_string(i) + ',' + std::to_string((*ds.labels)[i]) + '\n';
    detail::write_text_file(dir / "labels.csv", s);
  }
}

/// Which nodes lose their attributes.
struct MissingMask {
  std::vector<bool> missing;
  double rate = 0.0;
  std::uint64_t seed = 0;

  std::size_t missing_count() const noexcept {
    return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), true));
  }
  std::vector<bool> complete_mask() const {
    std::vector<bool> c(missing.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = !missing[i];
    return c;
  }
};

/// Exactly round(rate * n) nodes, drawn uniformly without replacement.
inline MissingMask make_mask(std::size_t n, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("missing rate must lie in [0, 1), got " + std::to_string(rate));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto m = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  MissingMask mask{std::vector<bool>(n, false), rate, seed};
  for (std::size_t i = 0; i < m; ++i) mask.missing[order[i]] = true;
  return mask;
}

/// Zeroes the masked rows; the remaining rows become the frozen complete set.
inline FeatureMatrix apply_mask(const Matrix& features, const MissingMask& mask) {
  if (mask.missing.size() != features.rows()) throw InputError("mask size does not match the feature row count");
  Matrix zeroed = features;
  for (std::size_t i = 0; i < zeroed.rows(); ++i) {
    if (!mask.missing[i]) continue;
    auto r = zeroed.row(i);
    std::fill(r.begin(), r.end(), 0.0);
  }
  return FeatureMatrix(std::move(zeroed), mask.complete_mask());
}

struct SbmParams {
  std::size_t blocks = 3;
  std::size_t per_block = 50;
  double p_in = 0.3;
  double p_out = 0.01;
  std::size_t feature_dim = 3;
  double separation = 3.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Visits Bernoulli(p) successes among `count` trials by geometric skipping.
template <typename F>
void bernoulli_hits(std::uint64_t count, double p, std::mt19937_64& rng, F&& hit) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < count; ++i) hit(i);
    return;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::uint64_t idx = 0;
  while (true) {
    const double u = 1.0 - unif(rng);  // (0, 1]
    const double skip = std::floor(std::log(u) / log_q);
    if (skip >= static_cast<double>(count - idx)) return;
    idx += static_cast<std::uint64_t>(skip);
    hit(idx);
    if (++idx >= count) return;
  }
}

}  // namespace detail

/// Planted-partition graph with Gaussian features around per-block means
/// (block b's mean is `separation` times unit vector e_{b mod dim}).
inline Dataset generate_sbm(const SbmParams& p) {
  if (!(p.p_in >= 0.0 && p.p_in <= 1.0 && p.p_out >= 0.0 && p.p_out <= 1.0)) {
    throw ConfigError("SBM probabilities must lie in [0, 1]");
  }
  if (!(p.separation >= 0.0)) throw ConfigError("separation must be >= 0");
  if (p.blocks == 0 || p.per_block == 0 || p.feature_dim == 0) throw ConfigError("blocks, per_block and feature_dim must be >= 1");

  const std::size_t m = p.per_block;
  const std::size_t n = p.blocks * m;
  std::mt19937_64 rng(p.seed);
  std::vector<Edge> edges;

  for (std::size_t a = 0; a < p.blocks; ++a) {
    const std::size_t base_a = a * m;
    // Pairs (u, w) with w < u inside the block, enumerated row by row.
    const std::uint64_t within = static_cast<std::uint64_t>(m) * (m - 1) / 2;
    detail::bernoulli_hits(within, p.p_in, rng, [&](std::uint64_t idx) {
      auto u = static_cast<std::size_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(idx))) / 2.0);
      while (static_cast<std::uint64_t>(u) * (u - 1) / 2 > idx) --u;
      while (static_cast<std::uint64_t>(u + 1) * u / 2 <= idx) ++u;
      const std::size_t w = static_cast<std::size_t>(idx - static_cast<std::uint64_t>(u) * (u - 1) / 2);
      edges.emplace_back(base_a + w, base_a + u);
    });
    for (std::size_t b = a + 1; b < p.blocks; ++b) {
      const std::size_t base_b = b * m;
      detail::bernoulli_hits(static_cast<std::uint64_t>(m) * m, p.p_out, rng, [&](std::uint64_t idx) {
        edges.emplace_back(base_a + idx / m, base_b + idx % m);
      });
    }
  }

  Dataset ds;
  ds.name = "sbm";
  ds.graph = build_graph(edges, n);
  ds.features = Matrix(n, p.feature_dim);
  ds.labels = Labels(n);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t block = v / m;
    (*ds.labels)[v] = block;
    auto r = ds.features.row(v);
    for (std::size_t j = 0; j < p.feature_dim; ++j) r[j] = noise(rng);
    r[block % p.feature_dim] += p.separation;
  }
  return ds;
}

}  // namespace dtr
