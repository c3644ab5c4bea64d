#include "hodgeflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "hodgeflow/cluster.hpp"
#include "hodgeflow/complex.hpp"
#include "hodgeflow/csv.hpp"
#include "hodgeflow/lsqr.hpp"
#include "hodgeflow/metrics.hpp"
#include "hodgeflow/regress.hpp"
#include "hodgeflow/synth.hpp"

namespace hodgeflow {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

void require_file(const fs::path& path, const char* flag) {
  if (path.empty()) throw ConfigError(fmt::format("{} is required", flag));
  if (!fs::is_regular_file(path)) {
    throw ConfigError(fmt::format("input file not found: {}", path.string()));
  }
}

void optional_file(const fs::path& path) {
  if (!path.empty() && !fs::is_regular_file(path)) {
    throw ConfigError(fmt::format("input file not found: {}", path.string()));
  }
}

void validate_common(const RunConfig& cfg) {
  if (!(cfg.tol_eigen > 0.0)) throw ConfigError("--tol-eigen must be positive");
  if (!(cfg.tol_solve > 0.0)) throw ConfigError("--tol-solve must be positive");
  if (cfg.k < 1) throw ConfigError("--k must be at least 1");
  if (cfg.jobs < 1) throw ConfigError("--jobs must be at least 1");
}

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string safe_name(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out.empty() ? std::string("_") : out;
}

fs::path network_dir(const RunConfig& cfg, const FlowNetwork& net) {
  return cfg.out / "networks" / fmt::format("{}_{}", safe_name(net.region()), net.year());
}

// Config as it affects results: the output directory and worker count are
// left out so runs into different directories share a fingerprint.
json config_json(const RunConfig& cfg, const std::string& command) {
  json c;
  c["command"] = command;
  auto path_or_null = [](const fs::path& p) { return p.empty() ? json(nullptr) : json(p.string()); };
  c["edges"] = path_or_null(cfg.edges);
  c["providers"] = path_or_null(cfg.providers);
  c["crosswalk"] = path_or_null(cfg.crosswalk);
  c["panel"] = path_or_null(cfg.panel);
  c["scope"] = to_string(cfg.scope);
  c["mode"] = to_string(cfg.mode);
  c["k"] = cfg.k;
  c["seed"] = cfg.seed;
  c["tol_eigen"] = cfg.tol_eigen;
  c["tol_solve"] = cfg.tol_solve;
  if (command == "regress") {
    c["outcomes"] = cfg.outcomes;
    c["controls"] = cfg.controls;
  }
  if (command == "metrics") {
    c["metrics"] = path_or_null(cfg.metrics);
    c["groups"] = path_or_null(cfg.groups);
    c["bin_width"] = cfg.bin_width;
  }
  if (command == "ami") {
    c["clusters_a"] = path_or_null(cfg.clusters_a);
    c["clusters_b"] = path_or_null(cfg.clusters_b);
    c["method_a"] = cfg.method_a;
    c["method_b"] = cfg.method_b;
  }
  if (command == "synth") {
    c["regions"] = cfg.synth_regions;
    c["nodes"] = cfg.synth_nodes;
    c["probability"] = cfg.synth_probability;
    c["years"] = cfg.synth_years;
  }
  c["geocode_cache"] = cfg.geocode_cache ? json(cfg.geocode_cache->string()) : json(nullptr);
  return c;
}

void write_manifest(const RunConfig& cfg, const std::string& command, json details,
                    const std::vector<std::string>& warnings) {
  json m;
  const json config = config_json(cfg, command);
  m["config"] = config;
  m["config_hash"] = hex(fnv1a(config.dump()));
  m["version"] = kVersion;
  m["eigen_version"] =
      fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  m["seeds"] = {{"seed", cfg.seed}};
  m["tolerances"] = {{"eigen", cfg.tol_eigen}, {"solve", cfg.tol_solve}};
  json inputs = json::object();
  for (const auto& [name, path] : {std::pair{"edges", cfg.edges}, std::pair{"providers", cfg.providers},
                                   std::pair{"crosswalk", cfg.crosswalk}, std::pair{"panel", cfg.panel},
                                   std::pair{"metrics", cfg.metrics}, std::pair{"groups", cfg.groups},
                                   std::pair{"clusters_a", cfg.clusters_a},
                                   std::pair{"clusters_b", cfg.clusters_b}}) {
    if (!path.empty() && fs::is_regular_file(path)) inputs[name] = hex(fnv1a(read_file(path)));
  }
  m["input_fnv1a"] = inputs;
  m["details"] = std::move(details);
  m["warnings"] = warnings;
  write_file(cfg.out / fmt::format("manifest_{}.json", command), m.dump(2) + "\n");
}

template <typename Fn>
int guarded(const RunConfig& cfg, const std::string& command, std::ostream& log, Fn&& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    log << "hodgeflow " << command << ": error: " << e.what() << '\n';
    try {
      json err = {{"command", command},
                  {"error", e.what()},
                  {"kind", dynamic_cast<const ConfigError*>(&e) ? "config" : "runtime"}};
      if (auto* se = dynamic_cast<const SolverError*>(&e)) {
        err["iterations"] = se->iterations();
        err["residual"] = se->residual();
      }
      write_file(cfg.out / "error.json", err.dump(2) + "\n");
    } catch (const std::exception&) {
      // The output directory itself may be unusable; stderr already has it.
    }
    return 2;
  }
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results
// into per-index slots, so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Inputs {
  std::vector<FlowNetwork> networks;
  std::map<std::string, ProviderRecord> providers;
  AssemblyReport report;
  std::size_t edge_row_errors = 0;
  std::size_t provider_row_errors = 0;
  std::optional<GeocodeReport> geocoding;
};

Inputs load_inputs(const RunConfig& cfg, bool fill_coordinates, std::vector<std::string>& warnings) {
  require_file(cfg.edges, "--edges");
  require_file(cfg.providers, "--providers");
  optional_file(cfg.crosswalk);

  Inputs in;
  auto edges = parse_edges_file(cfg.edges);
  auto providers = parse_providers_file(cfg.providers);
  for (const auto& e : edges.errors) {
    warnings.push_back(fmt::format("{}:{}: {}", cfg.edges.string(), e.line, e.message));
  }
  for (const auto& e : providers.errors) {
    warnings.push_back(fmt::format("{}:{}: {}", cfg.providers.string(), e.line, e.message));
  }
  in.edge_row_errors = edges.errors.size();
  in.provider_row_errors = providers.errors.size();

  RegionCrosswalk crosswalk;
  if (!cfg.crosswalk.empty()) {
    auto cw = parse_crosswalk_file(cfg.crosswalk);
    for (const auto& e : cw.errors) {
      warnings.push_back(fmt::format("{}:{}: {}", cfg.crosswalk.string(), e.line, e.message));
    }
    crosswalk = std::move(cw.crosswalk);
  }

  if (fill_coordinates && cfg.geocode_cache) {
    // Offline: only cached addresses resolve.
    StubGeocoder offline;
    GeocodeCache cache(*cfg.geocode_cache);
    in.geocoding = geocode(providers.records, offline, cache);
  }

  auto assembled = assemble_networks(edges.records, providers.records, crosswalk, cfg.scope);
  in.networks = std::move(assembled.networks);
  in.report = assembled.report;
  for (auto& p : providers.records) in.providers.emplace(p.id, std::move(p));
  return in;
}

json assembly_json(const Inputs& in) {
  const auto& r = in.report;
  json j = {{"input_rows", r.input_rows},
            {"retained", r.retained},
            {"cross_region_dropped", r.cross_region_dropped},
            {"unknown_endpoint_dropped", r.unknown_endpoint_dropped},
            {"filtered_provider_dropped", r.filtered_provider_dropped},
            {"self_arcs_dropped", r.self_arcs_dropped},
            {"edge_row_errors", in.edge_row_errors},
            {"provider_row_errors", in.provider_row_errors},
            {"networks", in.networks.size()}};
  if (in.geocoding) {
    j["geocoding"] = {{"already_coded", in.geocoding->already_coded},
                      {"cache_hits", in.geocoding->cache_hits},
                      {"lookups", in.geocoding->lookups},
                      {"resolved", in.geocoding->resolved},
                      {"uncoded", in.geocoding->uncoded}};
  }
  return j;
}

std::string decomposition_csv(const NetFlow& net, const HodgeDecomposition& d) {
  std::string out = "edge_index,from_id,to_id,f,g,r,h\n";
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(e);
    out += csv_row({std::to_string(e), net.node_ids[static_cast<std::size_t>(net.edges[e].tail)],
                    net.node_ids[static_cast<std::size_t>(net.edges[e].head)],
                    format_double(net.flow(i)), format_double(d.gradient(i)),
                    format_double(d.curl(i)), format_double(d.harmonic(i))});
  }
  return out;
}

}  // namespace

int cmd_decompose(const RunConfig& cfg, std::ostream& log) {
  return guarded(cfg, "decompose", log, [&] {
    validate_common(cfg);
    std::vector<std::string> warnings;
    Inputs in = load_inputs(cfg, false, warnings);

    struct Job {
      std::optional<RegionMetrics> metrics;
      std::string warning;
      json summary;
    };
    std::vector<Job> jobs(in.networks.size());
    parallel_for(in.networks.size(), cfg.jobs, [&](std::size_t i) {
      const FlowNetwork& net = in.networks[i];
      Job& job = jobs[i];
      const NetFlow flow = antisymmetrize(net);
      if (flow.edges.empty()) {
        job.warning = fmt::format("region {} year {}: empty network skipped", net.region(), net.year());
        return;
      }
      const OrientedComplex cx = build_clique_complex(flow.node_ids.size(), flow.edges);
      const BettiNumbers b = betti(cx);
      DecomposeOptions opts;
      opts.mode = cfg.mode;
      opts.solver_tolerance = cfg.tol_solve;
      const HodgeDecomposition d = decompose(flow.flow, cx, opts);
      job.metrics = region_metrics(d, flow.flow, net.region(), net.year());
      const fs::path dir = network_dir(cfg, net);
      write_file(dir / "complex.txt", complex_summary(cx, b));
      write_file(dir / "decomposition.csv", decomposition_csv(flow, d));
      job.summary = {{"region", net.region()}, {"year", net.year()}, {"n0", cx.n0()},
                     {"n1", cx.n1()},          {"n2", cx.n2()},     {"beta0", b.beta0},
                     {"beta1", b.beta1},       {"method", d.method == ProjectionMethod::dense ? "dense-qr" : "lsqr"}};
    });

    std::vector<RegionMetrics> rows;
    json summaries = json::array();
    for (auto& job : jobs) {
      if (!job.warning.empty()) {
        log << "warning: " << job.warning << '\n';
        warnings.push_back(job.warning);
      }
      if (job.metrics) {
        rows.push_back(*job.metrics);
        summaries.push_back(job.summary);
      }
    }
    write_file(cfg.out / "region_metrics.csv", region_metrics_csv(rows));
    json details = {{"assembly", assembly_json(in)},
                    {"networks", summaries},
                    {"mode", to_string(cfg.mode)},
                    {"projection", "dense QR up to 500 edges, LSQR above"}};
    write_manifest(cfg, "decompose", std::move(details), warnings);
  });
}

int cmd_cluster(const RunConfig& cfg, std::ostream& log) {
  return guarded(cfg, "cluster", log, [&] {
    validate_common(cfg);
    std::vector<std::string> warnings;
    Inputs in = load_inputs(cfg, true, warnings);

    struct Job {
      std::vector<std::string> warnings;
      std::vector<std::vector<std::string>> ami_rows;
      json summary;
      bool skipped = false;
    };
    std::vector<Job> jobs(in.networks.size());
    parallel_for(in.networks.size(), cfg.jobs, [&](std::size_t i) {
      const FlowNetwork& net = in.networks[i];
      Job& job = jobs[i];
      const NetFlow flow = antisymmetrize(net);
      if (flow.edges.empty()) {
        job.skipped = true;
        job.warnings.push_back(
            fmt::format("region {} year {}: empty network skipped", net.region(), net.year()));
        return;
      }
      const OrientedComplex cx = build_clique_complex(flow.node_ids.size(), flow.edges);

      std::vector<std::optional<GeoCoord>> coords;
      std::vector<std::optional<std::string>> systems;
      for (const auto& id : flow.node_ids) {
        const ProviderRecord& p = in.providers.at(id);
        coords.push_back(p.has_coordinates() ? std::optional<GeoCoord>(GeoCoord{*p.latitude, *p.longitude})
                                              : std::nullopt);
        systems.push_back(p.system_id);
      }

      std::vector<EdgeClustering> clusterings;
      HarmonicOptions hopts;
      hopts.mode = cfg.mode;
      hopts.eigen_tolerance = cfg.tol_eigen;
      const HarmonicBasis basis = harmonic_basis(cx, hopts);
      for (const auto& w : basis.warnings) {
        job.warnings.push_back(fmt::format("region {} year {}: {}", net.region(), net.year(), w));
      }
      if (basis.dimension() == 0) {
        job.warnings.push_back(fmt::format(
            "region {} year {}: harmonic clustering skipped: beta1 = 0, no harmonic structure to cluster",
            net.region(), net.year()));
      } else {
        clusterings.push_back(harmonic_cluster(basis, cfg.k, cfg.seed));
      }
      clusterings.push_back(geo_kmeans(cx.edges(), coords, cfg.k, cfg.seed));
      clusterings.push_back(system_pair_clusters(cx.edges(), systems));

      std::string csv = "edge_index,from_id,to_id,label,method,weak\n";
      for (const auto& c : clusterings) {
        for (std::size_t e = 0; e < cx.n1(); ++e) {
          if (c.labels[e] == kUnlabeled) continue;
          const bool weak = !c.weak.empty() && c.weak[e];
          csv += csv_row({std::to_string(e), flow.node_ids[static_cast<std::size_t>(cx.edges()[e].tail)],
                          flow.node_ids[static_cast<std::size_t>(cx.edges()[e].head)],
                          std::to_string(c.labels[e]), to_string(c.method), weak ? "1" : "0"});
        }
      }
      write_file(network_dir(cfg, net) / "clusters.csv", csv);

      for (std::size_t a = 0; a < clusterings.size(); ++a) {
        for (std::size_t b = a + 1; b < clusterings.size(); ++b) {
          std::string value = "NA";
          std::size_t common = 0;
          try {
            const AmiResult r = adjusted_mutual_information(clusterings[a], clusterings[b]);
            value = format_double(r.value);
            common = r.common;
          } catch (const std::invalid_argument& e) {
            job.warnings.push_back(fmt::format("region {} year {}: AMI {} vs {}: {}", net.region(),
                                               net.year(), to_string(clusterings[a].method),
                                               to_string(clusterings[b].method), e.what()));
          }
          job.ami_rows.push_back({net.region(), std::to_string(net.year()),
                                  to_string(clusterings[a].method), to_string(clusterings[b].method),
                                  std::to_string(common), value});
        }
      }
      json counts = json::object();
      for (const auto& c : clusterings) {
        counts[to_string(c.method)] = {{"k", c.k}, {"excluded", c.excluded}};
      }
      job.summary = {{"region", net.region()}, {"year", net.year()}, {"n1", cx.n1()},
                     {"harmonic_dimension", basis.dimension()},
                     {"eigenvalue_gap", basis.eigenvalue_gap}, {"clusterings", counts}};
    });

    std::string ami = "region,year,method_a,method_b,n_common,ami\n";
    json summaries = json::array();
    for (auto& job : jobs) {
      for (auto& w : job.warnings) {
        log << "warning: " << w << '\n';
        warnings.push_back(w);
      }
      for (const auto& row : job.ami_rows) ami += csv_row(row);
      if (!job.skipped) summaries.push_back(job.summary);
    }
    write_file(cfg.out / "ami.csv", ami);
    json details = {{"assembly", assembly_json(in)},
                    {"networks", summaries},
                    {"k", cfg.k},
                    {"harmonic_clusterer",
                     "abs-cosine spectral clustering of unit-normalized harmonic rows "
                     "(stand-in for elastic-net subspace clustering)"},
                    {"ami_normalizer", "arithmetic mean of entropies"},
                    {"ami_expected_mi", "hypergeometric"}};
    write_manifest(cfg, "cluster", std::move(details), warnings);
  });
}

int cmd_metrics(const RunConfig& cfg, std::ostream& log) {
  return guarded(cfg, "metrics", log, [&] {
    require_file(cfg.metrics, "--metrics");
    optional_file(cfg.groups);
    if (!(cfg.bin_width > 0.0)) throw ConfigError("--bin-width must be positive");

    std::ifstream in(cfg.metrics, std::ios::binary);
    CsvReader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f)) throw std::runtime_error("metrics file has no header");
    const CsvHeader h(f);
    const auto c_region = h.require("region");
    const auto c_year = h.require("year");
    const auto c_e = h.require("E");
    const auto c_g = h.require("g_sum");
    const auto c_h = h.require("h_sum");
    const auto c_r = h.require("r_sum");
    const auto c_c = h.find("c");
    std::vector<RegionMetrics> batch;
    while (reader.next(f)) {
      if (f.size() == 1 && f[0].empty()) continue;
      auto num = [&](std::size_t i) {
        auto v = i < f.size() ? parse_double(f[i]) : std::nullopt;
        if (!v) throw std::runtime_error(fmt::format("{}:{}: bad number", cfg.metrics.string(), reader.line()));
        return *v;
      };
      RegionMetrics m = region_metrics_from_sums(f[c_region], static_cast<int>(num(c_year)),
                                                 static_cast<std::size_t>(num(c_e)), num(c_g),
                                                 num(c_h), num(c_r));
      if (c_c) m.net_flow = num(*c_c);
      batch.push_back(std::move(m));
    }

    std::map<std::string, std::string> groups;
    if (!cfg.groups.empty()) {
      std::ifstream gin(cfg.groups, std::ios::binary);
      CsvReader gr(gin);
      if (!gr.next(f)) throw std::runtime_error("groups file has no header");
      const CsvHeader gh(f);
      const auto g_region = gh.require("region");
      const auto g_group = gh.require("group");
      while (gr.next(f)) {
        if (f.size() > std::max(g_region, g_group)) groups[trim(f[g_region])] = trim(f[g_group]);
      }
    }
    const MetricsTable table = metrics_table(batch, groups, cfg.bin_width);
    write_file(cfg.out / "summary.csv", summary_csv(table));
    write_file(cfg.out / "histogram.csv", histogram_csv(table));
    log << "metrics: " << batch.size() << " region-years summarized\n";
    write_manifest(cfg, "metrics",
                   {{"rows", batch.size()}, {"sd", "population"}, {"bin_width", cfg.bin_width}}, {});
  });
}

int cmd_regress(const RunConfig& cfg, std::ostream& log) {
  return guarded(cfg, "regress", log, [&] {
    require_file(cfg.panel, "--panel");
    if (cfg.outcomes.empty()) throw ConfigError("--outcomes is required");
    std::ifstream in(cfg.panel, std::ios::binary);
    const PanelParseResult panel = parse_panel(in);

    std::vector<RegressionResult> fitted;
    std::vector<std::string> warnings;
    json models = json::array();
    for (const auto& outcome : cfg.outcomes) {
      ModelSpec spec;
      spec.outcome = outcome;
      spec.controls = cfg.controls;
      spec.flows.clear();
      for (const auto& c : kFlowColumns) {
        if (std::find(panel.columns.begin(), panel.columns.end(), c) != panel.columns.end()) {
          spec.flows.push_back(c);
        }
      }
      try {
        fitted.push_back(fit_panel(panel.rows, spec));
        const auto& r = fitted.back();
        models.push_back({{"outcome", outcome}, {"n", r.observations}, {"clusters", r.clusters},
                          {"wald", r.wald.has_value()}});
      } catch (const std::exception& e) {
        const std::string w = fmt::format("model for '{}' failed: {}", outcome, e.what());
        log << "warning: " << w << '\n';
        warnings.push_back(w);
        models.push_back({{"outcome", outcome}, {"error", e.what()}});
      }
    }
    std::string table = format_regression_table(fitted);
    for (const auto& w : warnings) table += "Note: " + w + "\n";
    write_file(cfg.out / "regression_table.txt", table);
    write_file(cfg.out / "regression.csv", regression_csv(fitted));
    write_manifest(cfg, "regress",
                   {{"models", models},
                    {"covariance", "CR1: G/(G-1) * (N-1)/(N-K), clustered on region"},
                    {"wald_reference", "F(3, G-1)"},
                    {"reference_year", "earliest"},
                    {"skipped_panel_rows", panel.skipped}},
                   warnings);
    if (fitted.empty()) throw std::runtime_error("every model failed");
  });
}

int cmd_synth(const RunConfig& cfg, std::ostream& log) {
  return guarded(cfg, "synth", log, [&] {
    if (cfg.synth_regions < 1 || cfg.synth_nodes < 2) {
      throw ConfigError("synth needs at least one region and two nodes");
    }
    std::vector<SyntheticRegion> regions;
    for (int r = 0; r < cfg.synth_regions; ++r) {
      regions.push_back({fmt::format("R{}", r + 1), cfg.synth_nodes, cfg.synth_probability});
    }
    const SyntheticDataset data = synthetic_dataset(regions, cfg.synth_years, cfg.seed);
    write_file(cfg.out / "edges.csv", edges_csv(data.edges));
    write_file(cfg.out / "providers.csv", providers_csv(data.providers));
    log << "synth: " << data.providers.size() << " providers, " << data.edges.size() << " arcs\n";
    write_manifest(cfg, "synth", {{"providers", data.providers.size()}, {"arcs", data.edges.size()}}, {});
  });
}

namespace {

std::map<long long, int> read_cluster_file(const fs::path& path, const std::string& method) {
  std::ifstream in(path, std::ios::binary);
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f)) throw std::runtime_error("cluster file '" + path.string() + "' is empty");
  const CsvHeader h(f);
  const auto c_edge = h.require("edge_index");
  const auto c_label = h.require("label");
  const auto c_method = h.find("method");
  if (!method.empty() && !c_method) {
    throw std::runtime_error("cluster file '" + path.string() + "' has no method column");
  }
  std::map<long long, int> labels;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (!method.empty() && trim(f.at(*c_method)) != method) continue;
    const auto e = parse_integer(f.at(c_edge));
    const auto l = parse_integer(f.at(c_label));
    if (!e || !l) {
      throw std::runtime_error(fmt::format("{}:{}: bad row", path.string(), reader.line()));
    }
    labels[*e] = static_cast<int>(*l);
  }
  return labels;
}

}  // namespace

int cmd_ami(const RunConfig& cfg, std::ostream& log) {
  return guarded(cfg, "ami", log, [&] {
    require_file(cfg.clusters_a, "--a");
    require_file(cfg.clusters_b, "--b");
    const auto a = read_cluster_file(cfg.clusters_a, cfg.method_a);
    const auto b = read_cluster_file(cfg.clusters_b, cfg.method_b);
    std::vector<int> la;
    std::vector<int> lb;
    for (const auto& [edge, label] : a) {
      auto it = b.find(edge);
      if (it == b.end()) continue;
      la.push_back(label);
      lb.push_back(it->second);
    }
    const double value = adjusted_mutual_information(la, lb);
    const std::string name_a = cfg.method_a.empty() ? cfg.clusters_a.filename().string() : cfg.method_a;
    const std::string name_b = cfg.method_b.empty() ? cfg.clusters_b.filename().string() : cfg.method_b;
    std::string report = "method_a,method_b,n_common,ami\n";
    report += csv_row({name_a, name_b, std::to_string(la.size()), format_double(value)});
    write_file(cfg.out / "ami.csv", report);
    log << report;
    write_manifest(cfg, "ami", {{"n_common", la.size()}, {"ami", value}}, {});
  });
}

}  // namespace hodgeflow
