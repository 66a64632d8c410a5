#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dtr/dataset.hpp"
#include "dtr/dcfp.hpp"
#include "dtr/errors.hpp"
#include "dtr/graph.hpp"
#include "dtr/hnai.hpp"
#include "dtr/hre.hpp"
#include "dtr/kmeans.hpp"
#include "dtr/metrics.hpp"

namespace dtr {

struct PipelineConfig {
  // propagation
  std::size_t f_max = 200;
  std::size_t t_period = 40;
  double alpha = 1.5;
  double beta = 0.5;
  bool renormalize = true;
  NormalizationMode norm = NormalizationMode::kSymmetric;
  // tiered imputation
  std::size_t i_max = 10;
  double gamma = 0.9;
  // enhancement
  std::size_t hops = 3;
  // clustering; 0 means "number of label classes"
  std::size_t clusters = 0;
  std::size_t eval_runs = 10;
  std::uint64_t seed = 0;

  DcfpConfig dcfp(std::size_t k) const { return {f_max, t_period, alpha, beta, k, seed, renormalize}; }
  HnaiConfig hnai(std::size_t k) const { return {i_max, gamma, k, seed + 1'000'000}; }
  std::uint64_t eval_seed(std::size_t run) const { return seed + 2'000'000 + run; }

  void validate() const {
    dcfp(1).validate();
    hnai(1).validate();
    if (eval_runs == 0) throw ConfigError("evaluation runs must be >= 1");
  }

  /// Cluster count used by propagation and tiered imputation.
  std::size_t resolve_clusters(const Dataset& ds) const {
    const std::size_t k = clusters != 0 ? clusters : ds.class_count();
    if (k == 0) throw ConfigError("cluster count is required when the dataset has no labels");
    if (k > ds.node_count()) throw InputError("cluster count " + std::to_string(k) + " exceeds node count");
    return k;
  }
};

inline NormalizationMode parse_norm(std::string_view s) {
  if (s == "sym") return NormalizationMode::kSymmetric;
  if (s == "row") return NormalizationMode::kRowStochastic;
  throw ConfigError("unknown normalization '" + std::string(s) + "' (expected sym or row)");
}

/// k-means (k = number of classes) over `runs` consecutive seeds, scored
/// against the labels.
inline MetricsReport evaluate_clustering(const Matrix& features, const Labels& labels, const PipelineConfig& config) {
  if (labels.size() != features.rows()) throw InputError("label count does not match feature rows");
  std::size_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  std::vector<ClusteringScores> runs;
  runs.reserve(config.eval_runs);
  for (std::size_t r = 0; r < config.eval_runs; ++r) {
    const auto assignment = kmeans(features, k, config.eval_seed(r));
    runs.push_back(score_clustering(assignment.labels, labels));
  }
  return MetricsReport::from_runs(runs);
}

struct PipelineResult {
  EnhancedFeatures enhanced;
  TierTrace tiers;
  std::optional<MetricsReport> metrics;
  std::vector<DcfpStep> dcfp_trace;
  TierPartition final_partition;
  std::size_t hnai_iterations = 0;
};

/// Zero-fill, propagate with cluster-aware reweighting, tiered imputation,
/// hop-wise enhancement, and (when labels exist) clustering evaluation.
inline PipelineResult run_pipeline(const Dataset& ds, const MissingMask& mask, const PipelineConfig& config) {
  config.validate();
  if (ds.features.rows() != ds.node_count()) throw InputError("feature rows do not match node count");
  const std::size_t k = config.resolve_clusters(ds);

  PipelineResult out;
  const FeatureMatrix masked = apply_mask(ds.features, mask);
  const NormalizedAdjacency adjacency = normalize(ds.graph, config.norm);
  const DcfpResult dcfp =
      run_dcfp(adjacency, masked, config.dcfp(k), [&](const DcfpStep& s) { out.dcfp_trace.push_back(s); });
  HnaiResult hnai = run_hnai(ds.graph, dcfp.features.values(), mask.complete_mask(), dcfp.assignment, config.hnai(k));
  out.enhanced = enhance(dcfp.adjacency, hnai.features, config.hops);
  out.tiers = std::move(hnai.trace);
  out.final_partition = std::move(hnai.partition);
  out.hnai_iterations = hnai.iterations;
  if (ds.labels) out.metrics = evaluate_clustering(out.enhanced.values, *ds.labels, config);
  return out;
}

enum class BaselineKind { kZeroFill, kPlainFp, kMeanFill };

inline BaselineKind parse_baseline_kind(std::string_view s) {
  if (s == "zero-fill") return BaselineKind::kZeroFill;
  if (s == "plain-fp") return BaselineKind::kPlainFp;
  if (s == "mean-fill") return BaselineKind::kMeanFill;
  throw ConfigError("unknown baseline kind '" + std::string(s) + "' (expected zero-fill, plain-fp or mean-fill)");
}

/// Imputed feature matrix of a reference method.
inline Matrix baseline_features(const Dataset& ds, const MissingMask& mask, const PipelineConfig& config,
                                BaselineKind kind) {
  const FeatureMatrix masked = apply_mask(ds.features, mask);
  switch (kind) {
    case BaselineKind::kZeroFill:
      return masked.values();
    case BaselineKind::kPlainFp: {
      PipelineConfig plain = config;
      plain.alpha = 1.0;
      plain.beta = 1.0;
      const std::size_t k = std::max<std::size_t>(1, std::min(ds.class_count(), ds.node_count()));
      return run_dcfp(normalize(ds.graph, config.norm), masked, plain.dcfp(k)).features.values();
    }
    case BaselineKind::kMeanFill: {
      Matrix m = masked.values();
      std::vector<double> mean(m.cols(), 0.0);
      std::size_t count = 0;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (mask.missing[i]) continue;
        ++count;
        const auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += r[j];
      }
      if (count > 0) {
        for (double& v : mean) v /= static_cast<double>(count);
      }
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (mask.missing[i]) std::copy(mean.begin(), mean.end(), m.row(i).begin());
      }
      return m;
    }
  }
  throw ConfigError("unknown baseline kind");
}

inline MetricsReport run_baseline(const Dataset& ds, const MissingMask& mask, const PipelineConfig& config,
                                  BaselineKind kind) {
  config.validate();
  if (!ds.labels) throw InputError("baselines need ground-truth labels");
  return evaluate_clustering(baseline_features(ds, mask, config, kind), *ds.labels, config);
}

inline std::string tier_trace_csv(const TierTrace& trace) {
  std::string s = "iteration,all_known,some_known,all_unknown\n";
  for (const auto& t : trace) {
    s += std::to_string(t.iteration) + ',' + std::to_string(t.all_known) + ',' + std::to_string(t.some_known) + ',' +
         std::to_string(t.all_unknown) + '\n';
  }
  return s;
}

inline std::string dcfp_trace_csv(const std::vector<DcfpStep>& trace) {
  std::string s = "t,change_norm,reweighted\n";
  for (const auto& st : trace) {
    s += std::to_string(st.t) + ',';
    csv::append_number(s, st.change_norm);
    s += st.reweighted ? ",1\n" : ",0\n";
  }
  return s;
}

inline std::string metrics_json(const MetricsReport& report) { return to_json(report).dump(2) + "\n"; }

/// Writes a set of files only after every one of them has been staged, so a
/// failure leaves no partial output behind.
inline void write_files(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> staged;
  try {
    for (const auto& [name, text] : files) {
      const auto tmp = dir / (name + ".tmp");
      detail::write_text_file(tmp, text);
      staged.push_back(tmp);
    }
  } catch (...) {
    for (const auto& p : staged) std::filesystem::remove(p);
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(staged[i], dir / files[i].first);
}

/// h_e.csv, tiers.csv, and metrics.json when metrics were computed.
/// `with_dcfp_trace` adds dcfp_trace.csv.
inline void write_outputs(const std::filesystem::path& dir, const PipelineResult& result, bool with_dcfp_trace = false) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("h_e.csv", feature_csv(result.enhanced.values));
  files.emplace_back("tiers.csv", tier_trace_csv(result.tiers));
  if (result.metrics) files.emplace_back("metrics.json", metrics_json(*result.metrics));
  if (with_dcfp_trace) files.emplace_back("dcfp_trace.csv", dcfp_trace_csv(result.dcfp_trace));
  write_files(dir, files);
}

}  // namespace dtr
