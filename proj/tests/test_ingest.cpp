#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hodgeflow/csv.hpp"
#include "hodgeflow/ingest.hpp"

using namespace hodgeflow;
namespace fs = std::filesystem;

namespace {

EdgeParseResult edges_from(const std::string& text) {
  std::istringstream in(text);
  return parse_edges(in);
}

ProviderParseResult providers_from(const std::string& text) {
  std::istringstream in(text);
  return parse_providers(in);
}

ProviderRecord provider(const std::string& id, const std::string& region) {
  ProviderRecord p;
  p.id = id;
  p.region_id = region;
  p.address = id + " Main St";
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hodgeflow-tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

class FlakyGeocoder : public Geocoder {
 public:
  explicit FlakyGeocoder(int failures) : failures_(failures) {}
  std::optional<GeoPoint> lookup(const std::string&) override {
    ++calls;
    if (failures_-- > 0) throw TransportError("connection reset");
    return GeoPoint{1.0, 2.0, 0.9};
  }
  int calls = 0;

 private:
  int failures_;
};

}  // namespace

TEST_CASE("CSV reader") {
  std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\n\"multi\nline\",x\n");
  CsvReader r(in);
  std::vector<std::string> f;
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"a", "b,c", "say \"hi\""});
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"multi\nline", "x"});
  CHECK(r.line() == 2);
  CHECK_FALSE(r.next(f));

  std::istringstream bad("\"open");
  CsvReader rb(bad);
  CHECK_THROWS(rb.next(f));

  CHECK(csv_row({"a", "b,c", "q\""}) == "a,\"b,c\",\"q\"\"\"\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "0");
  CHECK(parse_double("1.5x") == std::nullopt);
  CHECK(parse_double(" 2.5 ") == 2.5);
  CHECK(parse_integer("2017") == 2017);
}

TEST_CASE("CSV numbers round-trip") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = normal(rng);
    CHECK(parse_double(format_double(v)) == v);
  }
}

TEST_CASE("edge parsing") {
  auto r = edges_from("from_id,to_id,weight,year\na,b,12,2017\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].from_id == "a");
  CHECK(r.records[0].weight == 12.0);
  CHECK(r.records[0].year == 2017);
  CHECK(r.errors.empty());

  r = edges_from("from_id,to_id,weight,year\na,b,-3,2017\nc,d,x,2017\ne,f,1,2017\n");
  CHECK(r.records.size() == 1);
  REQUIRE(r.errors.size() == 2);
  CHECK(r.errors[0].line == 2);
  CHECK(r.errors[0].message.find("negative") != std::string::npos);

  r = edges_from("year,weight,to_id,from_id,extra\n2016,4,b,a,zzz\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].from_id == "a");

  r = edges_from("from_id,to_id,weight,year\n");
  CHECK(r.records.empty());
  CHECK(r.errors.empty());

  CHECK_THROWS_WITH(edges_from("from_id,to_id,year\na,b,2017\n"),
                    "missing required column 'weight'");
}

TEST_CASE("provider parsing") {
  const auto r = providers_from(
      "id,address,region_id,lat,lon,system_id,taxonomy,entity_type\n"
      "p1,1 A St,H1,44.9,-93.2,S1,207R00000X,1\n"
      "p2,2 B St,H1,,,,207R00000X,organization\n"
      "p3,3 C St,H1,999,0,,207R00000X,individual\n");
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].has_coordinates());
  CHECK(r.records[0].system_id == "S1");
  CHECK(r.records[1].entity_type == EntityType::organization);
  CHECK_FALSE(r.records[1].system_id.has_value());
  CHECK_FALSE(r.records[2].has_coordinates());
  CHECK(r.errors.size() == 1);
}

TEST_CASE("network assembly") {
  SUBCASE("same region") {
    const auto res = assemble_networks({{"a", "b", 3, 2017}},
                                       {provider("a", "H1"), provider("b", "H1")}, {},
                                       RegionScope::hsa);
    REQUIRE(res.networks.size() == 1);
    CHECK(res.networks[0].arcs().size() == 1);
    CHECK(res.report.conserved());
  }
  SUBCASE("different regions") {
    const auto res = assemble_networks({{"a", "b", 3, 2017}},
                                       {provider("a", "H1"), provider("b", "H2")}, {},
                                       RegionScope::hsa);
    CHECK(res.networks.size() == 2);
    for (const auto& n : res.networks) CHECK(n.arcs().empty());
    CHECK(res.report.cross_region_dropped == 1);
  }
  SUBCASE("organizational provider") {
    auto org = provider("b", "H1");
    org.entity_type = EntityType::organization;
    const auto res =
        assemble_networks({{"a", "b", 3, 2017}}, {provider("a", "H1"), org}, {}, RegionScope::hsa);
    CHECK(res.report.filtered_provider_dropped == 1);
    CHECK(res.networks[0].arcs().empty());
  }
  SUBCASE("crosswalk resolves metro regions") {
    RegionCrosswalk cw;
    cw.add("55401", RegionScope::metro, "MSP");
    cw.add("55402", RegionScope::metro, "MSP");
    const auto res = assemble_networks({{"a", "b", 3, 2017}},
                                       {provider("a", "55401"), provider("b", "55402")}, cw,
                                       RegionScope::metro);
    REQUIRE(res.networks.size() == 1);
    CHECK(res.networks[0].region() == "MSP");
  }
  SUBCASE("conservation on random inputs") {
    std::mt19937_64 rng(3);
    std::vector<ProviderRecord> providers;
    for (int i = 0; i < 30; ++i) {
      auto p = provider("p" + std::to_string(i), "H" + std::to_string(i % 3));
      if (i % 7 == 0) p.entity_type = EntityType::organization;
      providers.push_back(p);
    }
    std::vector<EdgeRecord> edges;
    for (int i = 0; i < 500; ++i) {
      edges.push_back({"p" + std::to_string(rng() % 35), "p" + std::to_string(rng() % 35),
                       static_cast<double>(rng() % 10), 2015 + static_cast<int>(rng() % 3)});
    }
    const auto res = assemble_networks(edges, providers, {}, RegionScope::hsa);
    CHECK(res.report.conserved());
    CHECK(res.report.input_rows == 500);
    CHECK(res.report.unknown_endpoint_dropped > 0);
    CHECK(res.report.self_arcs_dropped > 0);
    std::size_t arcs_in = 0;
    for (const auto& n : res.networks) arcs_in += n.arcs().size() + n.duplicates_merged();
    CHECK(arcs_in + res.report.self_arcs_dropped == res.report.retained);
  }
}

TEST_CASE("crosswalk parsing and scopes") {
  std::istringstream in("zip_or_fips,region_id,scope\n55401,MSP,metro\n55401,H12,hsa\n,X,metro\n");
  const auto r = parse_crosswalk(in);
  CHECK(r.crosswalk.resolve("55401", RegionScope::metro) == "MSP");
  CHECK(r.crosswalk.resolve("55401", RegionScope::hsa) == "H12");
  CHECK_FALSE(r.crosswalk.covers(RegionScope::state));
  CHECK(r.errors.size() == 1);
  CHECK(parse_scope("state") == RegionScope::state);
  CHECK_THROWS(parse_scope("county"));
}

TEST_CASE("geocoding") {
  SUBCASE("stub lookup and cache round trip") {
    const fs::path path = scratch("cache.csv");
    std::vector<ProviderRecord> providers = {provider("a", "H1")};
    providers[0].address = "X St";
    StubGeocoder stub({{"X St", GeoPoint{44.98, -93.27, 1.0}}});
    {
      GeocodeCache cache(path);
      const auto rep = geocode(providers, stub, cache);
      CHECK(rep.lookups == 1);
      CHECK(rep.resolved == 1);
    }
    CHECK(*providers[0].latitude == 44.98);
    CHECK(*providers[0].longitude == -93.27);

    std::vector<ProviderRecord> again = {provider("b", "H1")};
    again[0].address = "X St";
    StubGeocoder empty;
    GeocodeCache reloaded(path);
    const auto rep = geocode(again, empty, reloaded);
    CHECK(rep.cache_hits == 1);
    CHECK(empty.calls() == 0);
    CHECK(*again[0].latitude == 44.98);
  }
  SUBCASE("unresolvable address") {
    std::vector<ProviderRecord> providers = {provider("a", "H1")};
    StubGeocoder stub;
    GeocodeCache cache;
    const auto rep = geocode(providers, stub, cache);
    CHECK(rep.uncoded == 1);
    CHECK(providers[0].uncoded);
  }
  SUBCASE("transport errors are retried, then surfaced with the retry count") {
    std::vector<ProviderRecord> providers = {provider("a", "H1")};
    FlakyGeocoder recovers(2);
    GeocodeCache cache;
    CHECK(geocode(providers, recovers, cache, 2).resolved == 1);
    CHECK(recovers.calls == 3);

    std::vector<ProviderRecord> more = {provider("b", "H1")};
    FlakyGeocoder broken(10);
    GeocodeCache cache2;
    try {
      geocode(more, broken, cache2, 2);
      FAIL("expected GeocodeError");
    } catch (const GeocodeError& e) {
      CHECK(e.retries() == 2);
    }
  }
}
