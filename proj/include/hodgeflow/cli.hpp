// Pipeline commands behind the `hodgeflow` executable.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hodgeflow/hodge.hpp"
#include "hodgeflow/ingest.hpp"

namespace hodgeflow {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::filesystem::path edges;
  std::filesystem::path providers;
  std::filesystem::path crosswalk;
  std::filesystem::path panel;
  std::filesystem::path out = "hodgeflow-out";
  RegionScope scope = RegionScope::hsa;
  Mode mode = Mode::normalized;
  int k = 10;
  std::uint64_t seed = 42;
  double tol_eigen = 1e-8;
  double tol_solve = 1e-10;
  int jobs = 1;

  // regress
  std::vector<std::string> outcomes;
  std::vector<std::string> controls;
  // metrics
  std::filesystem::path metrics;
  std::filesystem::path groups;
  double bin_width = 0.05;
  // ami
  std::filesystem::path clusters_a;
  std::filesystem::path clusters_b;
  std::string method_a;
  std::string method_b;
  // synth
  int synth_regions = 2;
  int synth_nodes = 20;
  double synth_probability = 0.3;
  std::vector<int> synth_years = {2016, 2017};
  // geocode cache (HODGEFLOW_CACHE)
  std::optional<std::filesystem::path> geocode_cache;
};

// Each command returns the process exit code. Fatal errors are written to
// <out>/error.json and to `log`; warnings go to `log` and the manifest.
int cmd_decompose(const RunConfig& config, std::ostream& log);
int cmd_cluster(const RunConfig& config, std::ostream& log);
int cmd_metrics(const RunConfig& config, std::ostream& log);
int cmd_regress(const RunConfig& config, std::ostream& log);
int cmd_synth(const RunConfig& config, std::ostream& log);
int cmd_ami(const RunConfig& config, std::ostream& log);

// 64-bit FNV-1a, used for config and input fingerprints in manifests.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace hodgeflow
