#include "hodgeflow/synth.hpp"

#include <random>
#include <stdexcept>

#include <Eigen/QR>
#include <fmt/format.h>

#include "hodgeflow/csv.hpp"

namespace hodgeflow {

PlantedFlow plant(const OrientedComplex& complex, const Vector& potential,
                  const Vector& curl_weights, const Vector& harmonic_coeffs, Mode mode) {
  const auto n0 = static_cast<Eigen::Index>(complex.n0());
  const auto n1 = static_cast<Eigen::Index>(complex.n1());
  const auto n2 = static_cast<Eigen::Index>(complex.n2());
  if (potential.size() != 0 && potential.size() != n0) {
    throw std::invalid_argument(fmt::format("potential has {} entries, complex has {} nodes",
                                            potential.size(), n0));
  }
  if (curl_weights.size() != 0 && curl_weights.size() != n2) {
    throw std::invalid_argument(fmt::format(
        "curl weights have {} entries, complex has {} triangles", curl_weights.size(), n2));
  }

  PlantedFlow out;
  out.complex = complex;
  out.mode = mode;
  out.gradient = potential.size() ? Vector(gradient_operator(complex, mode) * potential)
                                  : Vector(Vector::Zero(n1));
  out.curl = curl_weights.size() ? Vector(curl_operator(complex, mode) * curl_weights)
                                 : Vector(Vector::Zero(n1));
  out.harmonic = Vector::Zero(n1);
  if (harmonic_coeffs.size() != 0) {
    HarmonicOptions opts;
    opts.mode = mode;
    const HarmonicBasis basis = harmonic_basis(complex, opts);
    if (basis.dimension() == 0) {
      throw std::invalid_argument("harmonic coefficients given but the complex has beta1 = 0");
    }
    if (harmonic_coeffs.size() != basis.dimension()) {
      throw std::invalid_argument(fmt::format("{} harmonic coefficients for a basis of size {}",
                                              harmonic_coeffs.size(), basis.dimension()));
    }
    out.harmonic = basis.vectors * harmonic_coeffs;
  }
  out.flow = out.gradient + out.curl + out.harmonic;
  return out;
}

std::vector<Edge> random_support(int nodes, double probability, std::uint64_t seed) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw std::invalid_argument("edge probability must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) {
      if (unit(rng) < probability) edges.push_back({i, j});
    }
  }
  return edges;
}

namespace {

Vector project_through_basis(const SparseMatrix& generator, const Vector& f) {
  if (generator.cols() == 0) return Vector::Zero(f.size());
  const Matrix a(generator);
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(static_cast<double>(std::max(a.rows(), a.cols())) *
                  std::numeric_limits<double>::epsilon());
  const Eigen::Index rank = qr.rank();
  if (rank == 0) return Vector::Zero(f.size());
  const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), rank);
  return q * (q.transpose() * f);
}

}  // namespace

HodgeDecomposition dense_oracle(const Vector& flow, const OrientedComplex& complex, Mode mode) {
  if (complex.n1() > 2000) {
    throw std::invalid_argument(fmt::format("dense oracle limited to 2000 edges, got {}",
                                            complex.n1()));
  }
  if (static_cast<std::size_t>(flow.size()) != complex.n1()) {
    throw std::invalid_argument("flow length does not match the complex");
  }
  HodgeDecomposition out;
  out.mode = mode;
  out.method = ProjectionMethod::dense;
  out.gradient = project_through_basis(gradient_operator(complex, mode), flow);
  out.curl = project_through_basis(curl_operator(complex, mode), flow);
  out.harmonic = flow - out.gradient - out.curl;
  out.residual_norm = (flow - out.gradient - out.curl - out.harmonic).norm();
  return out;
}

SyntheticDataset synthetic_dataset(const std::vector<SyntheticRegion>& regions,
                                   const std::vector<int>& years, std::uint64_t seed,
                                   double base_weight) {
  SyntheticDataset out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> system_pick(0, 2);
  std::uniform_int_distribution<std::uint64_t> seed_pick;

  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& spec = regions[r];
    const double lat0 = 40.0 + 2.0 * static_cast<double>(r);
    const double lon0 = -95.0 + 3.0 * static_cast<double>(r);
    std::vector<std::string> ids;
    for (int i = 0; i < spec.nodes; ++i) {
      ProviderRecord p;
      p.id = fmt::format("{}-P{:03d}", spec.region, i);
      p.address = fmt::format("{} Synthetic Way, {}", i + 1, spec.region);
      p.region_id = spec.region;
      p.latitude = lat0 + 0.2 * normal(rng);
      p.longitude = lon0 + 0.2 * normal(rng);
      p.system_id = fmt::format("SYS{}", system_pick(rng));
      p.taxonomy = "207R00000X";
      ids.push_back(p.id);
      out.providers.push_back(std::move(p));
    }
    // Support is fixed per region; flows vary by year.
    const auto support = random_support(spec.nodes, spec.edge_probability, seed_pick(rng));
    const OrientedComplex cx = build_clique_complex(static_cast<std::size_t>(spec.nodes), support);
    const auto beta1 = betti(cx).beta1;
    for (int year : years) {
      Vector p(static_cast<Eigen::Index>(cx.n0()));
      for (auto& v : p) v = 3.0 * normal(rng);
      Vector w(static_cast<Eigen::Index>(cx.n2()));
      for (auto& v : w) v = 2.0 * normal(rng);
      Vector h(static_cast<Eigen::Index>(beta1));
      for (auto& v : h) v = 4.0 * normal(rng);
      const PlantedFlow planted = plant(cx, p, w, h, Mode::unnormalized);
      for (std::size_t e = 0; e < cx.n1(); ++e) {
        const auto& edge = cx.edges()[e];
        const double f = planted.flow(static_cast<Eigen::Index>(e));
        const auto& a = ids[static_cast<std::size_t>(edge.tail)];
        const auto& b = ids[static_cast<std::size_t>(edge.head)];
        out.edges.push_back({a, b, (f > 0.0 ? f : 0.0) + base_weight, year});
        out.edges.push_back({b, a, (f < 0.0 ? -f : 0.0) + base_weight, year});
      }
    }
  }
  return out;
}

std::string edges_csv(const std::vector<EdgeRecord>& edges) {
  std::string out = "from_id,to_id,weight,year\n";
  for (const auto& e : edges) {
    out += csv_row({e.from_id, e.to_id, format_double(e.weight), std::to_string(e.year)});
  }
  return out;
}

std::string providers_csv(const std::vector<ProviderRecord>& providers) {
  std::string out = "id,address,region_id,lat,lon,system_id,taxonomy,entity_type\n";
  for (const auto& p : providers) {
    out += csv_row({p.id, p.address, p.region_id,
                    p.latitude ? format_double(*p.latitude) : std::string(),
                    p.longitude ? format_double(*p.longitude) : std::string(),
                    p.system_id.value_or(""), p.taxonomy,
                    p.entity_type == EntityType::individual ? "individual" : "organization"});
  }
  return out;
}

}  // namespace hodgeflow
