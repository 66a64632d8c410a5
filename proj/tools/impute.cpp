// impute: command-line front end for attribute imputation on graphs.
//
//   impute run      --data DIR --out DIR [hyperparameters]
//   impute baseline --kind {zero-fill,plain-fp,mean-fill} --data DIR --out DIR
//   impute sbm      --blocks B --per-block M --out DIR
//
// Exit codes: 0 success, 2 input or configuration error, 3 numeric failure.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dtr/dtr.hpp"

namespace {

struct RunOptions {
  std::string data;
  std::string out;
  double missing_rate = 0.6;
  std::string norm = "sym";
  std::string kind = "zero-fill";
  bool trace = false;
  dtr::PipelineConfig config;
};

void add_common(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--data", o.data, "dataset directory (edges.csv, features.csv, optional labels.csv)")->required();
  cmd->add_option("--out", o.out, "output directory")->required();
  cmd->add_option("--missing-rate", o.missing_rate, "fraction of nodes whose attributes are removed")->capture_default_str();
  cmd->add_option("--seed", o.config.seed, "seed for the mask and every k-means call")->capture_default_str();
  cmd->add_option("--norm", o.norm, "adjacency normalization")->check(CLI::IsMember({"sym", "row"}))->capture_default_str();
  cmd->add_option("--t-period", o.config.t_period, "propagation steps between reweighting rounds")->capture_default_str();
  cmd->add_option("--f-max", o.config.f_max, "total propagation steps")->capture_default_str();
  cmd->add_option("--clusters", o.config.clusters, "cluster count (0 = number of label classes)")->capture_default_str();
  cmd->add_option("--runs", o.config.eval_runs, "evaluation k-means runs")->capture_default_str();
}

int run(const RunOptions& o) {
  auto config = o.config;
  config.norm = dtr::parse_norm(o.norm);
  const auto ds = dtr::load_dataset(o.data);
  const auto mask = dtr::make_mask(ds.node_count(), o.missing_rate, config.seed);
  const auto result = dtr::run_pipeline(ds, mask, config);
  dtr::write_outputs(o.out, result, o.trace);
  if (result.metrics) std::cout << dtr::metrics_json(*result.metrics);
  return 0;
}

int baseline(const RunOptions& o) {
  auto config = o.config;
  config.norm = dtr::parse_norm(o.norm);
  const auto kind = dtr::parse_baseline_kind(o.kind);
  const auto ds = dtr::load_dataset(o.data);
  const auto mask = dtr::make_mask(ds.node_count(), o.missing_rate, config.seed);
  const auto report = dtr::run_baseline(ds, mask, config, kind);
  dtr::write_files(o.out, {{"metrics.json", dtr::metrics_json(report)}});
  std::cout << dtr::metrics_json(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute imputation for graphs with missing node features"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "impute, enhance and (with labels) evaluate");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--alpha", run_opts.config.alpha, "intra-cluster weight factor (> 1)")->capture_default_str();
  run_cmd->add_option("--beta", run_opts.config.beta, "inter-cluster weight factor (in (0,1))")->capture_default_str();
  run_cmd->add_option("--gamma", run_opts.config.gamma, "EMA smoothing coefficient")->capture_default_str();
  run_cmd->add_option("--i-max", run_opts.config.i_max, "tiered imputation iterations")->capture_default_str();
  run_cmd->add_option("--hops", run_opts.config.hops, "enhancement hops K")->capture_default_str();
  run_cmd->add_flag("--trace", run_opts.trace, "also write dcfp_trace.csv (t,change_norm,reweighted)");

  RunOptions base_opts;
  auto* base_cmd = app.add_subcommand("baseline", "evaluate a reference imputation");
  add_common(base_cmd, base_opts);
  base_cmd->add_option("--kind", base_opts.kind, "baseline method")
      ->check(CLI::IsMember({"zero-fill", "plain-fp", "mean-fill"}))
      ->required();

  dtr::SbmParams sbm;
  std::string sbm_out;
  auto* sbm_cmd = app.add_subcommand("sbm", "write a stochastic block model dataset");
  sbm_cmd->add_option("--blocks", sbm.blocks, "number of blocks")->capture_default_str();
  sbm_cmd->add_option("--per-block", sbm.per_block, "nodes per block")->capture_default_str();
  sbm_cmd->add_option("--p-in", sbm.p_in, "intra-block edge probability")->capture_default_str();
  sbm_cmd->add_option("--p-out", sbm.p_out, "inter-block edge probability")->capture_default_str();
  sbm_cmd->add_option("--dim", sbm.feature_dim, "feature dimension")->capture_default_str();
  sbm_cmd->add_option("--separation", sbm.separation, "distance of block means from the origin")->capture_default_str();
  sbm_cmd->add_option("--seed", sbm.seed, "generator seed")->capture_default_str();
  sbm_cmd->add_option("--out", sbm_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run(run_opts);
    if (*base_cmd) return baseline(base_opts);
    if (*sbm_cmd) {
      dtr::write_dataset(sbm_out, dtr::generate_sbm(sbm));
      return 0;
    }
  } catch (const dtr::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const dtr::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const dtr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
