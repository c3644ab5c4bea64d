#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hodgeflow/metrics.hpp"
#include "hodgeflow/synth.hpp"

using namespace hodgeflow;

TEST_CASE("region metrics from component sums") {
  const auto m = region_metrics_from_sums("Minneapolis", 2017, 21995, 10933.5, -9834.5, 17605.4);
  CHECK(m.net_flow == doctest::Approx(18704.4).epsilon(1e-12));
  CHECK(std::abs(m.gradient_per_edge - 0.50) <= 0.005);
  CHECK(std::abs(m.harmonic_per_edge - 0.45) <= 0.005);
  CHECK(std::abs(m.curl_per_edge - 0.80) <= 0.005);

  const auto a = region_metrics_from_sums("Albany", 2017, 19562, 7047.3, -6813.1, 13611.6);
  CHECK(std::abs(a.gradient_per_edge - 0.36) <= 0.005);
  CHECK(std::abs(a.harmonic_per_edge - 0.35) <= 0.005);
  CHECK(std::abs(a.curl_per_edge - 0.70) <= 0.005);
}

TEST_CASE("region metrics from a decomposition") {
  const auto cx = fixtures::cycle4();
  const Vector zero = Vector::Zero(4);
  const auto z = region_metrics(decompose(zero, cx), zero, "R", 2016);
  CHECK(z.net_flow == 0.0);
  CHECK(z.gradient_per_edge == 0.0);
  CHECK(z.harmonic_per_edge == 0.0);
  CHECK(z.curl_per_edge == 0.0);

  std::mt19937_64 rng(12);
  const auto big = build_clique_complex(20, random_support(20, 0.3, 5));
  const Vector f = fixtures::random_vector(static_cast<Eigen::Index>(big.n1()), rng);
  const auto m = region_metrics(decompose(f, big), f, "R", 2016);
  CHECK(m.net_flow == doctest::Approx(m.gradient_sum + m.harmonic_sum + m.curl_sum).epsilon(1e-9));
  CHECK(m.edges == big.n1());
  CHECK(m.curl_per_edge == doctest::Approx(std::abs(m.curl_sum) / double(big.n1())));

  CHECK_THROWS_WITH(region_metrics(HodgeDecomposition{}, Vector(), "R", 2016), "empty network");
}

TEST_CASE("group summaries use population SD") {
  SUBCASE("single region") {
    const auto t = metrics_table({region_metrics_from_sums("A", 1, 10, 3, 1, 2)});
    REQUIRE(t.summaries.size() == 1);
    CHECK(t.summaries[0].group == "ALL");
    CHECK(t.summaries[0].mean_gradient == doctest::Approx(0.3));
    CHECK(t.summaries[0].sd_gradient == 0.0);
  }
  SUBCASE("two regions") {
    const auto t = metrics_table({region_metrics_from_sums("A", 1, 10, 2, 0, 0),
                                  region_metrics_from_sums("B", 1, 10, 6, 0, 0)},
                                 {{"A", "Midwest"}, {"B", "Midwest"}});
    REQUIRE(t.summaries.size() == 2);
    CHECK(t.summaries[0].group == "Midwest");
    CHECK(t.summaries[0].mean_gradient == doctest::Approx(0.4));
    CHECK(t.summaries[0].sd_gradient == doctest::Approx(0.2));
    CHECK(t.summaries[1].group == "ALL");
  }
}

TEST_CASE("histograms") {
  const auto t = metrics_table({region_metrics_from_sums("A", 1, 100, 12, 0, 3),
                                region_metrics_from_sums("B", 1, 100, 7, 0, 1),
                                region_metrics_from_sums("C", 1, 100, 1, 0, 0)});
  std::size_t g_total = 0;
  for (const auto& b : t.histograms) {
    CHECK(b.upper - b.lower == doctest::Approx(0.05));
    if (b.measure == "g_bar" && b.group == "ALL") g_total += b.count;
  }
  CHECK(g_total == 3);
  const std::string csv = histogram_csv(t);
  CHECK(csv.rfind("group,measure,lower,upper,count\n", 0) == 0);
  CHECK(region_metrics_csv(t.rows).rfind("region,year,E,c,g_sum,h_sum,r_sum,g_bar,h_bar,r_bar\n", 0) == 0);
}
