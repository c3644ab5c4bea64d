// Network-level flow composition per region and year.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "hodgeflow/hodge.hpp"

namespace hodgeflow {

struct RegionMetrics {
  std::string region;
  int year = 0;
  std::size_t edges = 0;  // E
  double net_flow = 0.0;  // c, the signed sum of edge flows
  double gradient_sum = 0.0;
  double harmonic_sum = 0.0;
  double curl_sum = 0.0;
  double gradient_per_edge = 0.0;  // |sum g| / E
  double harmonic_per_edge = 0.0;  // |sum h| / E
  double curl_per_edge = 0.0;      // |sum r| / E
};

// Sums run over all edges; the absolute value is taken after summing.
RegionMetrics region_metrics(const HodgeDecomposition& decomposition, const Vector& flow,
                             const std::string& region, int year);

// From already-aggregated component sums; c = g + h + r.
RegionMetrics region_metrics_from_sums(const std::string& region, int year, std::size_t edges,
                                       double gradient_sum, double harmonic_sum, double curl_sum);

struct GroupSummary {
  std::string group;
  std::size_t count = 0;
  // mean and population standard deviation of g_bar, h_bar, r_bar, c
  double mean_gradient = 0.0, sd_gradient = 0.0;
  double mean_harmonic = 0.0, sd_harmonic = 0.0;
  double mean_curl = 0.0, sd_curl = 0.0;
  double mean_net_flow = 0.0, sd_net_flow = 0.0;
};

struct HistogramBin {
  std::string group;
  std::string measure;  // g_bar, h_bar or r_bar
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

struct MetricsTable {
  std::vector<RegionMetrics> rows;
  std::vector<GroupSummary> summaries;  // one per group, then "ALL"
  std::vector<HistogramBin> histograms;
  double bin_width = 0.05;
};

// Groups come from `region_groups` (region -> census grouping); unmapped
// regions only enter the "ALL" summary. Bins cover [0, max] per measure.
MetricsTable metrics_table(const std::vector<RegionMetrics>& batch,
                           const std::map<std::string, std::string>& region_groups = {},
                           double bin_width = 0.05);

std::string region_metrics_csv(const std::vector<RegionMetrics>& rows);
std::string summary_csv(const MetricsTable& table);
std::string histogram_csv(const MetricsTable& table);

}  // namespace hodgeflow
