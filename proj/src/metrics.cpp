#include "hodgeflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hodgeflow/csv.hpp"

namespace hodgeflow {

RegionMetrics region_metrics_from_sums(const std::string& region, int year, std::size_t edges,
                                       double gradient_sum, double harmonic_sum,
                                       double curl_sum) {
  if (edges == 0) throw std::invalid_argument("empty network");
  RegionMetrics m;
  m.region = region;
  m.year = year;
  m.edges = edges;
  m.gradient_sum = gradient_sum;
  m.harmonic_sum = harmonic_sum;
  m.curl_sum = curl_sum;
  m.net_flow = gradient_sum + harmonic_sum + curl_sum;
  const double e = static_cast<double>(edges);
  m.gradient_per_edge = std::abs(gradient_sum) / e;
  m.harmonic_per_edge = std::abs(harmonic_sum) / e;
  m.curl_per_edge = std::abs(curl_sum) / e;
  return m;
}

RegionMetrics region_metrics(const HodgeDecomposition& decomposition, const Vector& flow,
                             const std::string& region, int year) {
  if (flow.size() == 0) throw std::invalid_argument("empty network");
  if (decomposition.gradient.size() != flow.size()) {
    throw std::invalid_argument("decomposition and flow differ in length");
  }
  RegionMetrics m = region_metrics_from_sums(
      region, year, static_cast<std::size_t>(flow.size()), decomposition.gradient.sum(),
      decomposition.harmonic.sum(), decomposition.curl.sum());
  m.net_flow = flow.sum();
  return m;
}

namespace {

void mean_sd(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size()));
}

GroupSummary summarize(const std::string& group, const std::vector<const RegionMetrics*>& rows) {
  GroupSummary s;
  s.group = group;
  s.count = rows.size();
  std::vector<double> g, h, r, c;
  for (const auto* m : rows) {
    g.push_back(m->gradient_per_edge);
    h.push_back(m->harmonic_per_edge);
    r.push_back(m->curl_per_edge);
    c.push_back(m->net_flow);
  }
  mean_sd(g, s.mean_gradient, s.sd_gradient);
  mean_sd(h, s.mean_harmonic, s.sd_harmonic);
  mean_sd(r, s.mean_curl, s.sd_curl);
  mean_sd(c, s.mean_net_flow, s.sd_net_flow);
  return s;
}

void histogram(const std::string& group, const std::string& measure,
               const std::vector<double>& values, double width, std::vector<HistogramBin>& out) {
  const double top = *std::max_element(values.begin(), values.end());
  const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(top / width)) + 1);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::floor(v / width));
    counts[std::min(b, bins - 1)]++;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    out.push_back({group, measure, static_cast<double>(b) * width,
                   static_cast<double>(b + 1) * width, counts[b]});
  }
}

}  // namespace

MetricsTable metrics_table(const std::vector<RegionMetrics>& batch,
                           const std::map<std::string, std::string>& region_groups,
                           double bin_width) {
  if (batch.empty()) throw std::invalid_argument("metrics table needs at least one region");
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  MetricsTable table;
  table.rows = batch;
  table.bin_width = bin_width;

  std::map<std::string, std::vector<const RegionMetrics*>> groups;
  std::vector<const RegionMetrics*> all;
  for (const auto& m : table.rows) {
    all.push_back(&m);
    auto it = region_groups.find(m.region);
    if (it != region_groups.end()) groups[it->second].push_back(&m);
  }
  groups.erase("ALL");
  for (const auto& [name, rows] : groups) table.summaries.push_back(summarize(name, rows));
  table.summaries.push_back(summarize("ALL", all));

  auto add_histograms = [&](const std::string& name, const std::vector<const RegionMetrics*>& rows) {
    std::vector<double> g, h, r;
    for (const auto* m : rows) {
      g.push_back(m->gradient_per_edge);
      h.push_back(m->harmonic_per_edge);
      r.push_back(m->curl_per_edge);
    }
    histogram(name, "g_bar", g, bin_width, table.histograms);
    histogram(name, "h_bar", h, bin_width, table.histograms);
    histogram(name, "r_bar", r, bin_width, table.histograms);
  };
  for (const auto& [name, rows] : groups) add_histograms(name, rows);
  add_histograms("ALL", all);
  return table;
}

std::string region_metrics_csv(const std::vector<RegionMetrics>& rows) {
  std::string out = "region,year,E,c,g_sum,h_sum,r_sum,g_bar,h_bar,r_bar\n";
  for (const auto& m : rows) {
    out += csv_row({m.region, std::to_string(m.year), std::to_string(m.edges),
                    format_double(m.net_flow), format_double(m.gradient_sum),
                    format_double(m.harmonic_sum), format_double(m.curl_sum),
                    format_double(m.gradient_per_edge), format_double(m.harmonic_per_edge),
                    format_double(m.curl_per_edge)});
  }
  return out;
}

std::string summary_csv(const MetricsTable& table) {
  std::string out =
      "group,n,mean_g_bar,sd_g_bar,mean_h_bar,sd_h_bar,mean_r_bar,sd_r_bar,mean_c,sd_c\n";
  for (const auto& s : table.summaries) {
    out += csv_row({s.group, std::to_string(s.count), format_double(s.mean_gradient),
                    format_double(s.sd_gradient), format_double(s.mean_harmonic),
                    format_double(s.sd_harmonic), format_double(s.mean_curl),
                    format_double(s.sd_curl), format_double(s.mean_net_flow),
                    format_double(s.sd_net_flow)});
  }
  return out;
}

std::string histogram_csv(const MetricsTable& table) {
  std::string out = "group,measure,lower,upper,count\n";
  for (const auto& b : table.histograms) {
    out += csv_row({b.group, b.measure, format_double(b.lower), format_double(b.upper),
                    std::to_string(b.count)});
  }
  return out;
}

}  // namespace hodgeflow
