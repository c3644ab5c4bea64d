#include "hodgeflow/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <fmt/format.h>

#include "hodgeflow/csv.hpp"

namespace hodgeflow {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return in;
}

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

// Reads the header row; an empty stream has no header and is an error.
CsvHeader read_header(CsvReader& reader) {
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (!blank(fields)) return CsvHeader(fields);
  }
  throw std::runtime_error("missing header row");
}

const std::string& field_at(const std::vector<std::string>& fields, std::size_t i) {
  static const std::string empty;
  return i < fields.size() ? fields[i] : empty;
}

}  // namespace

EdgeParseResult parse_edges(std::istream& in) {
  CsvReader reader(in);
  const CsvHeader header = read_header(reader);
  const std::size_t c_from = header.require("from_id");
  const std::size_t c_to = header.require("to_id");
  const std::size_t c_weight = header.require("weight");
  const std::size_t c_year = header.require("year");

  EdgeParseResult out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (blank(f)) continue;
    const std::size_t line = reader.line();
    EdgeRecord rec;
    rec.from_id = trim(field_at(f, c_from));
    rec.to_id = trim(field_at(f, c_to));
    if (rec.from_id.empty() || rec.to_id.empty()) {
      out.errors.push_back({line, "empty node id"});
      continue;
    }
    const auto weight = parse_double(field_at(f, c_weight));
    if (!weight) {
      out.errors.push_back({line, fmt::format("bad weight '{}'", field_at(f, c_weight))});
      continue;
    }
    if (*weight < 0.0) {
      out.errors.push_back({line, fmt::format("negative weight {}", *weight)});
      continue;
    }
    const auto year = parse_integer(field_at(f, c_year));
    if (!year) {
      out.errors.push_back({line, fmt::format("bad year '{}'", field_at(f, c_year))});
      continue;
    }
    rec.weight = *weight;
    rec.year = static_cast<int>(*year);
    out.records.push_back(std::move(rec));
  }
  return out;
}

EdgeParseResult parse_edges_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_edges(in);
}

ProviderParseResult parse_providers(std::istream& in) {
  CsvReader reader(in);
  const CsvHeader header = read_header(reader);
  const std::size_t c_id = header.require("id");
  const auto c_address = header.find("address");
  const std::size_t c_region = header.require("region_id");
  const auto c_lat = header.find("lat");
  const auto c_lon = header.find("lon");
  const auto c_system = header.find("system_id");
  const auto c_taxonomy = header.find("taxonomy");
  const auto c_entity = header.find("entity_type");

  ProviderParseResult out;
  std::set<std::string> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (blank(f)) continue;
    const std::size_t line = reader.line();
    ProviderRecord rec;
    rec.id = trim(field_at(f, c_id));
    if (rec.id.empty()) {
      out.errors.push_back({line, "empty provider id"});
      continue;
    }
    if (!seen.insert(rec.id).second) {
      out.errors.push_back({line, "duplicate provider id '" + rec.id + "'"});
      continue;
    }
    if (c_address) rec.address = trim(field_at(f, *c_address));
    rec.region_id = trim(field_at(f, c_region));
    if (c_lat && c_lon) {
      const std::string lat_text = trim(field_at(f, *c_lat));
      const std::string lon_text = trim(field_at(f, *c_lon));
      if (!lat_text.empty() || !lon_text.empty()) {
        const auto lat = parse_double(lat_text);
        const auto lon = parse_double(lon_text);
        if (!lat || !lon || *lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0) {
          out.errors.push_back({line, fmt::format("bad coordinates '{}','{}'; left uncoded",
                                                  lat_text, lon_text)});
        } else {
          rec.latitude = lat;
          rec.longitude = lon;
        }
      }
    }
    if (c_system) {
      std::string sys = trim(field_at(f, *c_system));
      if (!sys.empty()) rec.system_id = std::move(sys);
    }
    if (c_taxonomy) rec.taxonomy = trim(field_at(f, *c_taxonomy));
    if (c_entity) {
      const std::string e = trim(field_at(f, *c_entity));
      if (e.empty() || e == "1" || e == "individual") {
        rec.entity_type = EntityType::individual;
      } else if (e == "2" || e == "organization" || e == "organizational") {
        rec.entity_type = EntityType::organization;
      } else {
        out.errors.push_back({line, "unknown entity_type '" + e + "'"});
        continue;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

ProviderParseResult parse_providers_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_providers(in);
}

const char* to_string(RegionScope scope) {
  switch (scope) {
    case RegionScope::hsa: return "hsa";
    case RegionScope::metro: return "metro";
    case RegionScope::state: return "state";
  }
  return "?";
}

RegionScope parse_scope(const std::string& text) {
  if (text == "hsa") return RegionScope::hsa;
  if (text == "metro") return RegionScope::metro;
  if (text == "state") return RegionScope::state;
  throw std::invalid_argument("unknown region scope '" + text + "'");
}

void RegionCrosswalk::add(const std::string& key, RegionScope scope,
                          const std::string& region_id) {
  table_[{key, scope}] = region_id;
  scopes_.insert(scope);
}

std::optional<std::string> RegionCrosswalk::resolve(const std::string& key,
                                                    RegionScope scope) const {
  auto it = table_.find({key, scope});
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

bool RegionCrosswalk::covers(RegionScope scope) const { return scopes_.count(scope) > 0; }

CrosswalkParseResult parse_crosswalk(std::istream& in) {
  CsvReader reader(in);
  const CsvHeader header = read_header(reader);
  const std::size_t c_key = header.require("zip_or_fips");
  const std::size_t c_region = header.require("region_id");
  const std::size_t c_scope = header.require("scope");
  CrosswalkParseResult out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (blank(f)) continue;
    const std::string key = trim(field_at(f, c_key));
    const std::string region = trim(field_at(f, c_region));
    if (key.empty() || region.empty()) {
      out.errors.push_back({reader.line(), "empty key or region"});
      continue;
    }
    try {
      out.crosswalk.add(key, parse_scope(trim(field_at(f, c_scope))), region);
    } catch (const std::invalid_argument& e) {
      out.errors.push_back({reader.line(), e.what()});
    }
  }
  return out;
}

CrosswalkParseResult parse_crosswalk_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_crosswalk(in);
}

bool ProviderFilter::admits(const ProviderRecord& provider) const {
  if (provider.entity_type != EntityType::individual) return false;
  if (denied_taxonomies.count(provider.taxonomy)) return false;
  if (!allowed_taxonomies.empty() && !allowed_taxonomies.count(provider.taxonomy)) return false;
  return true;
}

AssemblyResult assemble_networks(const std::vector<EdgeRecord>& edges,
                                 const std::vector<ProviderRecord>& providers,
                                 const RegionCrosswalk& crosswalk, RegionScope scope,
                                 const ProviderFilter& filter) {
  // Eligible provider -> region; known-but-ineligible providers map to nullopt.
  std::unordered_map<std::string, std::optional<std::string>> region_of;
  std::set<std::string> regions;
  const bool use_crosswalk = crosswalk.covers(scope);
  for (const auto& p : providers) {
    std::optional<std::string> region;
    if (filter.admits(p) && !p.region_id.empty()) {
      if (use_crosswalk) {
        region = crosswalk.resolve(p.region_id, scope);
      } else if (scope == RegionScope::hsa) {
        region = p.region_id;
      }
    }
    if (region) regions.insert(*region);
    region_of.emplace(p.id, std::move(region));
  }

  AssemblyResult out;
  auto& rep = out.report;
  std::set<int> years;
  std::map<std::pair<std::string, int>, std::vector<Arc>> arcs;
  for (const auto& e : edges) {
    ++rep.input_rows;
    years.insert(e.year);
    auto from = region_of.find(e.from_id);
    auto to = region_of.find(e.to_id);
    if (from == region_of.end() || to == region_of.end()) {
      ++rep.unknown_endpoint_dropped;
      continue;
    }
    if (!from->second || !to->second) {
      ++rep.filtered_provider_dropped;
      continue;
    }
    if (*from->second != *to->second) {
      ++rep.cross_region_dropped;
      continue;
    }
    ++rep.retained;
    arcs[{*from->second, e.year}].push_back({e.from_id, e.to_id, e.weight});
  }

  for (const auto& region : regions) {
    for (int year : years) {
      auto it = arcs.find({region, year});
      std::vector<Arc> list = it == arcs.end() ? std::vector<Arc>{} : std::move(it->second);
      FlowNetwork net(region, year, std::move(list));
      rep.self_arcs_dropped += net.self_arcs_dropped();
      out.networks.push_back(std::move(net));
    }
  }
  return out;
}

std::optional<GeoPoint> StubGeocoder::lookup(const std::string& address) {
  ++calls_;
  auto it = table_.find(address);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

GeocodeCache::GeocodeCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(*path_)) return;
  auto in = open_input(*path_);
  CsvReader reader(in);
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (blank(f)) continue;
    if (first) {
      first = false;
      if (f.size() >= 1 && f[0] == "address") continue;
    }
    if (f.size() < 4) {
      throw std::runtime_error(fmt::format("{}:{}: malformed geocode cache row",
                                           path_->string(), reader.line()));
    }
    const auto lat = parse_double(f[1]);
    const auto lon = parse_double(f[2]);
    const auto conf = parse_double(f[3]);
    if (!lat || !lon || !conf) {
      throw std::runtime_error(fmt::format("{}:{}: malformed geocode cache row",
                                           path_->string(), reader.line()));
    }
    entries_[f[0]] = {*lat, *lon, *conf};
  }
}

std::optional<GeoPoint> GeocodeCache::find(const std::string& address) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(address);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void GeocodeCache::append(const std::string& address, const GeoPoint& point) {
  std::lock_guard lock(mutex_);
  entries_[address] = point;
  if (!path_) return;
  const bool fresh = !std::filesystem::exists(*path_) || std::filesystem::file_size(*path_) == 0;
  std::ofstream out(*path_, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write geocode cache '" + path_->string() + "'");
  if (fresh) out << "address,lat,lon,confidence\n";
  out << csv_row({address, format_double(point.latitude), format_double(point.longitude),
                  format_double(point.confidence)});
}

GeocodeReport geocode(std::vector<ProviderRecord>& providers, Geocoder& geocoder,
                      GeocodeCache& cache, int max_retries) {
  GeocodeReport rep;
  for (auto& p : providers) {
    if (p.has_coordinates()) {
      ++rep.already_coded;
      continue;
    }
    std::optional<GeoPoint> point = cache.find(p.address);
    if (point) {
      ++rep.cache_hits;
    } else if (!p.address.empty()) {
      ++rep.lookups;
      for (int attempt = 0;; ++attempt) {
        try {
          point = geocoder.lookup(p.address);
          break;
        } catch (const TransportError& e) {
          if (attempt >= max_retries) {
            throw GeocodeError(fmt::format("geocoding '{}' failed after {} retries: {}",
                                           p.address, attempt, e.what()),
                               attempt);
          }
        }
      }
      if (point) cache.append(p.address, *point);
    }
    if (point) {
      p.latitude = point->latitude;
      p.longitude = point->longitude;
      p.uncoded = false;
      ++rep.resolved;
    } else {
      p.uncoded = true;
      ++rep.uncoded;
    }
  }
  return rep;
}

}  // namespace hodgeflow
