// Input files: edge lists, provider tables, region crosswalks and the geocode
// cache; assembly of per-region, per-year flow networks.
#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodgeflow/complex.hpp"

namespace hodgeflow {

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct EdgeRecord {
  std::string from_id;
  std::string to_id;
  double weight = 0.0;  // shared-patient count
  int year = 0;
};

struct EdgeParseResult {
  std::vector<EdgeRecord> records;
  std::vector<RowError> errors;
};

// Header must name from_id, to_id, weight, year (any order, extra columns
// ignored). Bad rows are reported, not fatal; a missing column is.
EdgeParseResult parse_edges(std::istream& in);
EdgeParseResult parse_edges_file(const std::filesystem::path& path);

enum class EntityType { individual, organization };

struct ProviderRecord {
  std::string id;
  std::string address;
  std::string region_id;
  std::optional<double> latitude;
  std::optional<double> longitude;
  std::optional<std::string> system_id;
  std::string taxonomy;
  EntityType entity_type = EntityType::individual;
  bool uncoded = false;  // geocoding attempted and failed

  bool has_coordinates() const { return latitude && longitude; }
};

struct ProviderParseResult {
  std::vector<ProviderRecord> records;
  std::vector<RowError> errors;
};

// Columns: id,address,region_id,lat,lon,system_id,taxonomy,entity_type.
// entity_type accepts individual/organization or the NPPES codes 1/2.
ProviderParseResult parse_providers(std::istream& in);
ProviderParseResult parse_providers_file(const std::filesystem::path& path);

enum class RegionScope { hsa, metro, state };

const char* to_string(RegionScope scope);
RegionScope parse_scope(const std::string& text);

// zip_or_fips,region_id,scope rows.
class RegionCrosswalk {
 public:
  void add(const std::string& key, RegionScope scope, const std::string& region_id);
  std::optional<std::string> resolve(const std::string& key, RegionScope scope) const;
  bool covers(RegionScope scope) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::pair<std::string, RegionScope>, std::string> table_;
  std::set<RegionScope> scopes_;
};

struct CrosswalkParseResult {
  RegionCrosswalk crosswalk;
  std::vector<RowError> errors;
};

CrosswalkParseResult parse_crosswalk(std::istream& in);
CrosswalkParseResult parse_crosswalk_file(const std::filesystem::path& path);

// Taxonomy allow/deny lists. An empty allow list admits every taxonomy.
struct ProviderFilter {
  std::set<std::string> allowed_taxonomies;
  std::set<std::string> denied_taxonomies;

  bool admits(const ProviderRecord& provider) const;
};

struct AssemblyReport {
  std::size_t input_rows = 0;
  std::size_t retained = 0;
  std::size_t cross_region_dropped = 0;
  std::size_t unknown_endpoint_dropped = 0;
  std::size_t filtered_provider_dropped = 0;
  std::size_t self_arcs_dropped = 0;  // retained rows later dropped as self-arcs

  bool conserved() const {
    return input_rows ==
           retained + cross_region_dropped + unknown_endpoint_dropped + filtered_provider_dropped;
  }
};

struct AssemblyResult {
  std::vector<FlowNetwork> networks;  // sorted by (region, year)
  AssemblyReport report;
};

// A provider's region is its region_id resolved through the crosswalk for the
// scope. Without crosswalk rows for the scope, hsa falls back to region_id
// itself. Providers whose region cannot be resolved are filtered. One network
// is emitted per (region with an eligible provider) x (year seen in edges).
AssemblyResult assemble_networks(const std::vector<EdgeRecord>& edges,
                                 const std::vector<ProviderRecord>& providers,
                                 const RegionCrosswalk& crosswalk, RegionScope scope,
                                 const ProviderFilter& filter = {});

// ---- geocoding ----

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
  double confidence = 0.0;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeocodeError : public std::runtime_error {
 public:
  GeocodeError(const std::string& what, int retries)
      : std::runtime_error(what), retries_(retries) {}
  int retries() const { return retries_; }

 private:
  int retries_;
};

// Address lookup. Returns nullopt when the address cannot be resolved; throws
// TransportError for retryable failures.
class Geocoder {
 public:
  virtual ~Geocoder() = default;
  virtual std::optional<GeoPoint> lookup(const std::string& address) = 0;
};

// Exact-match table lookup, for tests and offline runs.
class StubGeocoder : public Geocoder {
 public:
  StubGeocoder() = default;
  explicit StubGeocoder(std::map<std::string, GeoPoint> table) : table_(std::move(table)) {}
  std::optional<GeoPoint> lookup(const std::string& address) override;
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::string, GeoPoint> table_;
  std::size_t calls_ = 0;
};

// Append-only address -> (lat, lon, confidence) file. All writes go through
// one mutex.
class GeocodeCache {
 public:
  GeocodeCache() = default;  // in-memory only
  explicit GeocodeCache(std::filesystem::path path);

  std::optional<GeoPoint> find(const std::string& address) const;
  void append(const std::string& address, const GeoPoint& point);
  const std::map<std::string, GeoPoint>& entries() const { return entries_; }

 private:
  std::optional<std::filesystem::path> path_;
  std::map<std::string, GeoPoint> entries_;
  mutable std::mutex mutex_;
};

struct GeocodeReport {
  std::size_t already_coded = 0;
  std::size_t cache_hits = 0;
  std::size_t lookups = 0;
  std::size_t resolved = 0;
  std::size_t uncoded = 0;
};

// Fills missing coordinates: cache first, then the geocoder (retrying
// transport errors up to max_retries times before throwing GeocodeError).
GeocodeReport geocode(std::vector<ProviderRecord>& providers, Geocoder& geocoder,
                      GeocodeCache& cache, int max_retries = 2);

}  // namespace hodgeflow
