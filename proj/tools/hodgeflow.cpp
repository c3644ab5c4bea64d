#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "hodgeflow/cli.hpp"

namespace {

void add_common(CLI::App* cmd, hodgeflow::RunConfig& cfg, std::string& scope, std::string& mode) {
  cmd->add_option("--edges", cfg.edges, "Shared-patient edge list CSV");
  cmd->add_option("--providers", cfg.providers, "Provider table CSV");
  cmd->add_option("--crosswalk", cfg.crosswalk, "Zip/FIPS to region crosswalk CSV");
  cmd->add_option("--scope", scope, "Region scope")->check(CLI::IsMember({"hsa", "metro", "state"}));
  cmd->add_option("--mode", mode, "Laplacian normalization")
      ->check(CLI::IsMember({"normalized", "unnormalized"}));
  cmd->add_option("--k", cfg.k, "Number of clusters");
  cmd->add_option("--seed", cfg.seed, "Random seed");
  cmd->add_option("--tol-eigen", cfg.tol_eigen, "Relative eigenvalue cutoff for the harmonic kernel");
  cmd->add_option("--tol-solve", cfg.tol_solve, "Least-squares solver tolerance");
  cmd->add_option("--jobs", cfg.jobs, "Worker threads for region-year jobs");
}

}  // namespace

int main(int argc, char** argv) {
  hodgeflow::RunConfig cfg;
  std::string scope = "hsa";
  std::string mode = "normalized";

  CLI::App app{"Hodge decomposition of provider flow networks"};
  app.set_version_flag("--version", std::string(hodgeflow::kVersion));
  app.require_subcommand(1);
  app.add_option("--out", cfg.out, "Output directory");

  auto* decompose = app.add_subcommand("decompose", "Gradient/curl/harmonic split per region-year");
  add_common(decompose, cfg, scope, mode);
  decompose->add_option("--out", cfg.out, "Output directory");

  auto* cluster = app.add_subcommand("cluster", "Harmonic, geographic and system-pair edge clusters");
  add_common(cluster, cfg, scope, mode);
  cluster->add_option("--out", cfg.out, "Output directory");

  auto* metrics = app.add_subcommand("metrics", "Group summaries and histograms of region metrics");
  metrics->add_option("--metrics", cfg.metrics, "region_metrics.csv from decompose")->required();
  metrics->add_option("--groups", cfg.groups, "CSV of region,group");
  metrics->add_option("--bin-width", cfg.bin_width, "Histogram bin width");
  metrics->add_option("--out", cfg.out, "Output directory");

  auto* regress = app.add_subcommand("regress", "Panel regressions of outcomes on flow components");
  regress->add_option("--panel", cfg.panel, "Region-year panel CSV")->required();
  regress->add_option("--outcomes", cfg.outcomes, "Outcome columns")->required()->delimiter(',');
  regress->add_option("--controls", cfg.controls, "Control columns")->delimiter(',');
  regress->add_option("--out", cfg.out, "Output directory");

  auto* synth = app.add_subcommand("synth", "Synthetic provider networks with planted flows");
  synth->add_option("--regions", cfg.synth_regions, "Number of regions");
  synth->add_option("--nodes", cfg.synth_nodes, "Providers per region");
  synth->add_option("--p", cfg.synth_probability, "Edge probability");
  synth->add_option("--years", cfg.synth_years, "Years")->delimiter(',');
  synth->add_option("--seed", cfg.seed, "Random seed");
  synth->add_option("--out", cfg.out, "Output directory");

  auto* ami = app.add_subcommand("ami", "Adjusted mutual information between two cluster files");
  ami->add_option("--a", cfg.clusters_a, "First clusters CSV")->required();
  ami->add_option("--b", cfg.clusters_b, "Second clusters CSV")->required();
  ami->add_option("--method-a", cfg.method_a, "Keep only this method from the first file");
  ami->add_option("--method-b", cfg.method_b, "Keep only this method from the second file");
  ami->add_option("--out", cfg.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  cfg.scope = hodgeflow::parse_scope(scope);
  cfg.mode = hodgeflow::parse_mode(mode);
  if (const char* cache = std::getenv("HODGEFLOW_CACHE"); cache && *cache) {
    cfg.geocode_cache = cache;
  }

  if (decompose->parsed()) return hodgeflow::cmd_decompose(cfg, std::cerr);
  if (cluster->parsed()) return hodgeflow::cmd_cluster(cfg, std::cerr);
  if (metrics->parsed()) return hodgeflow::cmd_metrics(cfg, std::cerr);
  if (regress->parsed()) return hodgeflow::cmd_regress(cfg, std::cerr);
  if (synth->parsed()) return hodgeflow::cmd_synth(cfg, std::cerr);
  if (ami->parsed()) return hodgeflow::cmd_ami(cfg, std::cerr);
  return 1;
}
