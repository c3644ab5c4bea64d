#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "hodgeflow/cli.hpp"
#include "hodgeflow/cluster.hpp"
#include "hodgeflow/csv.hpp"

using namespace hodgeflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hodgeflow-cli-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  CsvReader r(in);
  std::vector<std::string> header;
  std::vector<std::string> f;
  r.next(header);
  std::vector<std::map<std::string, std::string>> rows;
  while (r.next(f)) {
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < f.size(); ++i) row[header[i]] = f[i];
    rows.push_back(row);
  }
  return rows;
}

// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
  }
  return files;
}

// Squares a-b-c-d and e-f-g-h joined by d-x-e, all in one region, with a
// unit circulation on each square.
void write_two_cycles(const fs::path& dir) {
  std::string edges = "from_id,to_id,weight,year\n";
  auto loop = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      edges += v[i] + "," + v[(i + 1) % v.size()] + ",3,2017\n";
      edges += v[(i + 1) % v.size()] + "," + v[i] + ",1,2017\n";
    }
  };
  loop({"a", "b", "c", "d"});
  loop({"e", "f", "g", "h"});
  edges += "d,x,2,2017\nx,e,2,2017\n";
  spit(dir / "edges.csv", edges);
  std::string providers = "id,address,region_id,lat,lon,system_id,taxonomy,entity_type\n";
  int i = 0;
  for (const char* id : {"a", "b", "c", "d", "x", "e", "f", "g", "h"}) {
    providers += fmt::format("{},{} Elm St,H1,{},{},S{},207R00000X,individual\n", id, i,
                             44.0 + 0.01 * i, -93.0, i % 2);
    ++i;
  }
  spit(dir / "providers.csv", providers);
}

}  // namespace

TEST_CASE("decompose on a synthetic region") {
  const fs::path dir = fresh_dir("decompose");
  std::ostringstream log;
  RunConfig synth;
  synth.out = dir / "data";
  synth.synth_regions = 1;
  REQUIRE(cmd_synth(synth, log) == 0);

  RunConfig cfg;
  cfg.edges = dir / "data/edges.csv";
  cfg.providers = dir / "data/providers.csv";
  cfg.out = dir / "out";
  REQUIRE(cmd_decompose(cfg, log) == 0);
  const auto rows = read_csv(cfg.out / "region_metrics.csv");
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    const double c = *parse_double(row.at("c"));
    const double sum = *parse_double(row.at("g_sum")) + *parse_double(row.at("h_sum")) +
                       *parse_double(row.at("r_sum"));
    CHECK(c == doctest::Approx(sum).epsilon(1e-9));
  }
  CHECK(fs::exists(cfg.out / "networks/R1_2016/decomposition.csv"));
  CHECK(fs::exists(cfg.out / "networks/R1_2016/complex.txt"));
  const auto decomposition = read_csv(cfg.out / "networks/R1_2016/decomposition.csv");
  for (const auto& row : decomposition) {
    const double f = *parse_double(row.at("f"));
    const double parts = *parse_double(row.at("g")) + *parse_double(row.at("r")) +
                         *parse_double(row.at("h"));
    CHECK(f == doctest::Approx(parts).epsilon(1e-9).scale(1.0));
  }
  const auto manifest = nlohmann::json::parse(slurp(cfg.out / "manifest_decompose.json"));
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["seeds"]["seed"] == 42);
  CHECK(manifest["tolerances"]["solve"] == 1e-10);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  CHECK(manifest["details"]["assembly"]["input_rows"] ==
        manifest["details"]["assembly"]["retained"]);
}

TEST_CASE("empty network is skipped with a warning") {
  const fs::path dir = fresh_dir("empty");
  spit(dir / "edges.csv", "from_id,to_id,weight,year\na,b,2,2017\n");
  spit(dir / "providers.csv",
       "id,address,region_id,lat,lon,system_id,taxonomy,entity_type\n"
       "a,1 A,H1,,,,t,individual\nb,2 B,H1,,,,t,individual\nz,3 C,H2,,,,t,individual\n");
  RunConfig cfg;
  cfg.edges = dir / "edges.csv";
  cfg.providers = dir / "providers.csv";
  cfg.out = dir / "out";
  std::ostringstream log;
  CHECK(cmd_decompose(cfg, log) == 0);
  CHECK(log.str().find("region H2 year 2017: empty network skipped") != std::string::npos);
  CHECK(read_csv(cfg.out / "region_metrics.csv").size() == 1);
  const auto manifest = nlohmann::json::parse(slurp(cfg.out / "manifest_decompose.json"));
  CHECK(manifest["warnings"].size() == 1);
}

TEST_CASE("fatal errors produce a machine-readable report") {
  const fs::path dir = fresh_dir("missing");
  RunConfig cfg;
  cfg.edges = dir / "nope.csv";
  cfg.providers = dir / "nope2.csv";
  cfg.out = dir / "out";
  std::ostringstream log;
  CHECK(cmd_decompose(cfg, log) != 0);
  const auto err = nlohmann::json::parse(slurp(cfg.out / "error.json"));
  CHECK(err["error"].get<std::string>().find((dir / "nope.csv").string()) != std::string::npos);
  CHECK(err["kind"] == "config");

  spit(dir / "e.csv", "from_id,to_id,weight,year\n");
  spit(dir / "p.csv", "id,address,region_id,lat,lon,system_id,taxonomy,entity_type\n");
  cfg.edges = dir / "e.csv";
  cfg.providers = dir / "p.csv";
  cfg.tol_solve = 0.0;
  CHECK(cmd_decompose(cfg, log) != 0);
  CHECK(slurp(cfg.out / "error.json").find("--tol-solve") != std::string::npos);
}

TEST_CASE("the executable exits nonzero on a missing input") {
  const fs::path dir = fresh_dir("binary");
  const std::string cmd = fmt::format("\"{}\" decompose --edges \"{}\" --providers \"{}\" --out \"{}\" 2>/dev/null",
                                      HODGEFLOW_BINARY, (dir / "missing.csv").string(),
                                      (dir / "missing.csv").string(), (dir / "out").string());
  CHECK(std::system(cmd.c_str()) != 0);
  CHECK(fs::exists(dir / "out/error.json"));
  const std::string ok = fmt::format("\"{}\" synth --regions 1 --nodes 6 --out \"{}\" 2>/dev/null",
                                     HODGEFLOW_BINARY, (dir / "synth").string());
  CHECK(std::system(ok.c_str()) == 0);
  CHECK(fs::exists(dir / "synth/edges.csv"));
}

TEST_CASE("cluster recovers the two cycles") {
  const fs::path dir = fresh_dir("cluster");
  write_two_cycles(dir);
  RunConfig cfg;
  cfg.edges = dir / "edges.csv";
  cfg.providers = dir / "providers.csv";
  cfg.out = dir / "out";
  cfg.k = 2;
  std::ostringstream log;
  REQUIRE(cmd_cluster(cfg, log) == 0);

  const std::set<std::string> first = {"a", "b", "c", "d"};
  const std::set<std::string> second = {"e", "f", "g", "h"};
  std::string planted = "edge_index,label\n";
  for (const auto& row : read_csv(cfg.out / "networks/H1_2017/clusters.csv")) {
    if (row.at("method") != "harmonic") continue;
    const auto& u = row.at("from_id");
    const auto& v = row.at("to_id");
    if (first.count(u) && first.count(v)) planted += row.at("edge_index") + ",0\n";
    if (second.count(u) && second.count(v)) planted += row.at("edge_index") + ",1\n";
  }
  spit(dir / "planted.csv", planted);

  RunConfig ami;
  ami.clusters_a = cfg.out / "networks/H1_2017/clusters.csv";
  ami.method_a = "harmonic";
  ami.clusters_b = dir / "planted.csv";
  ami.out = dir / "ami";
  REQUIRE(cmd_ami(ami, log) == 0);
  const auto rows = read_csv(ami.out / "ami.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("n_common") == "8");
  CHECK(*parse_double(rows[0].at("ami")) == doctest::Approx(1.0).epsilon(1e-12));

  const auto table = read_csv(cfg.out / "ami.csv");
  CHECK(table.size() == 3);
}

TEST_CASE("cluster defaults, skips and determinism") {
  const fs::path dir = fresh_dir("cluster-defaults");
  CHECK(RunConfig{}.k == 10);

  // A filled triangle: no harmonic structure.
  spit(dir / "edges.csv", "from_id,to_id,weight,year\na,b,2,2017\nb,c,1,2017\na,c,4,2017\n");
  spit(dir / "providers.csv",
       "id,address,region_id,lat,lon,system_id,taxonomy,entity_type\n"
       "a,1 A,H1,44,-93,S1,t,individual\nb,2 B,H1,45,-93,S1,t,individual\n"
       "c,3 C,H1,,,S2,t,individual\n");
  spit(dir / "cache.csv", "address,lat,lon,confidence\n3 C,44.5,-92.5,1\n");
  RunConfig cfg;
  cfg.edges = dir / "edges.csv";
  cfg.providers = dir / "providers.csv";
  cfg.out = dir / "out";
  cfg.geocode_cache = dir / "cache.csv";
  std::ostringstream log;
  REQUIRE(cmd_cluster(cfg, log) == 0);
  CHECK(log.str().find("harmonic clustering skipped: beta1 = 0") != std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(cfg.out / "manifest_cluster.json"));
  CHECK(manifest["details"]["assembly"]["geocoding"]["cache_hits"] == 1);
  CHECK(manifest["details"]["networks"][0]["clusterings"]["geo-kmeans"]["excluded"] == 0);

  SUBCASE("same seed twice, any worker count") {
    RunConfig synth;
    synth.out = dir / "data";
    REQUIRE(cmd_synth(synth, log) == 0);
    RunConfig run;
    run.edges = dir / "data/edges.csv";
    run.providers = dir / "data/providers.csv";
    run.out = dir / "run1";
    REQUIRE(cmd_cluster(run, log) == 0);
    REQUIRE(cmd_decompose(run, log) == 0);
    const auto first = snapshot(run.out);
    fs::remove_all(run.out);
    run.jobs = 3;
    REQUIRE(cmd_decompose(run, log) == 0);
    REQUIRE(cmd_cluster(run, log) == 0);
    CHECK(first == snapshot(run.out));
  }
}

TEST_CASE("metrics command") {
  const fs::path dir = fresh_dir("metrics");
  spit(dir / "rm.csv",
       "region,year,E,c,g_sum,h_sum,r_sum,g_bar,h_bar,r_bar\n"
       "A,2017,10,5,2,1,2,0.2,0.1,0.2\nB,2017,10,9,6,1,2,0.6,0.1,0.2\n");
  spit(dir / "groups.csv", "region,group\nA,Midwest\nB,Midwest\n");
  RunConfig cfg;
  cfg.metrics = dir / "rm.csv";
  cfg.groups = dir / "groups.csv";
  cfg.out = dir / "out";
  std::ostringstream log;
  REQUIRE(cmd_metrics(cfg, log) == 0);
  const auto rows = read_csv(cfg.out / "summary.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].at("group") == "Midwest");
  CHECK(*parse_double(rows[0].at("mean_g_bar")) == doctest::Approx(0.4));
  CHECK(*parse_double(rows[0].at("sd_g_bar")) == doctest::Approx(0.2));
  CHECK(fs::exists(cfg.out / "histogram.csv"));
}

TEST_CASE("regress command isolates failing models") {
  const fs::path dir = fresh_dir("regress");
  std::string panel = "region,year,cost,quality,g_bar,h_bar,r_bar\n";
  for (int r = 0; r < 6; ++r) {
    for (int y = 2015; y <= 2016; ++y) {
      const double g = (r * 7 + y) % 5, h = (r * 3 + y * 2) % 7, c = (r + y * 5) % 3;
      panel += fmt::format("R{},{},{},NA,{},{},{}\n", r, y, 1 + g - 2 * h + 0.1 * r * r, g, h, c);
    }
  }
  spit(dir / "panel.csv", panel);
  RunConfig cfg;
  cfg.panel = dir / "panel.csv";
  cfg.outcomes = {"cost", "quality"};
  cfg.out = dir / "out";
  std::ostringstream log;
  CHECK(cmd_regress(cfg, log) == 0);
  CHECK(log.str().find("model for 'quality' failed") != std::string::npos);
  const std::string table = slurp(cfg.out / "regression_table.txt");
  CHECK(table.find("cost") != std::string::npos);
  CHECK(table.find("3.00") != std::string::npos);
  CHECK(fs::exists(cfg.out / "regression.csv"));
}
