#include <doctest.h>

#include <random>

#include "hetcache/deployment.hpp"
#include "hetcache/numeric.hpp"

using namespace hetcache;
using doctest::Approx;

namespace {

const PopularityModel& zipf() {
  static const PopularityModel m = build_zipf(1000, 0.56);
  return m;
}

NetworkParams table3() { return NetworkParams::reference(); }

}  // namespace

TEST_CASE("no cache needed at 1.2 Gbps of SBS backhaul") {
  CHECK(required_cache_budget(table3(), zipf(), 1.2e9) == 0.0);
}

TEST_CASE("required cache budget without SBS backhaul") {
  const auto p = table3();
  auto q = p;
  q.sbs_backhaul_bps = 1e9;
  const auto caps = cap_loads(q);
  const double expected = p.sbs_density * zipf().inverse_cumulative(caps.sr / (caps.mr + caps.sr));
  CHECK(required_cache_budget(p, zipf(), 0.0) == Approx(expected).epsilon(1e-9));
  // anything below the requirement carries no backhaul user
  CHECK(required_cache_budget(p, zipf(), 1e3) == Approx(expected).epsilon(1e-9));
  CHECK_THROWS_AS(required_cache_budget(p, zipf(), -1.0), InvalidParameter);
}

TEST_CASE("more backhaul needs less cache") {
  const auto p = table3();
  CHECK(required_cache_budget(p, zipf(), 0.2e9) > required_cache_budget(p, zipf(), 0.8e9));
  double prev = INFINITY;
  for (double u = 0.0; u <= 2e9; u += 0.01e9) {
    const double c = required_cache_budget(p, zipf(), u);
    CHECK(c <= prev);
    prev = c;
    auto q = p;
    q.sbs_backhaul_bps = u;
    const auto caps = cap_loads(q, CapMode::kLenient);
    CHECK((c == 0.0) == (caps.sbh >= caps.sr));
  }
}

TEST_CASE("cost inversion round trip") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    CostModel cost;
    cost.k_bh = 1e-4 + 0.01 * u(rng);
    cost.zeta_bh = 0.1 + 1.9 * u(rng);
    cost.k_c = 1e-3 + u(rng);
    cost.zeta_c = 0.1 + 1.9 * u(rng);
    cost.budget = 50.0 + 500.0 * u(rng);
    const double rho = 1.0 + 49.0 * u(rng);
    const auto bh = cost.affordable_backhaul(rho);
    const auto cs = cost.affordable_cache(rho);
    REQUIRE(bh.has_value());
    REQUIRE(cs.has_value());
    CHECK(cost.backhaul_cost(rho, *bh) == Approx(cost.budget).epsilon(1e-9));
    CHECK(cost.caching_cost(rho, *cs) == Approx(cost.budget).epsilon(1e-9));
  }
}

TEST_CASE("cost conventions") {
  CostModel cost;
  // 1 Gbps is 1e6 kbps: K·U^ζ = 0.001·1000 = 1, as much as the SBS itself
  CHECK(cost.backhaul_cost(1.0, 1e9) == Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(cost.affordable_backhaul(cost.budget * 1.01).has_value());
  CHECK(*cost.affordable_backhaul(cost.budget) == 0.0);
  cost.k_bh = 0.0;
  CHECK(is_unbounded(*cost.affordable_backhaul(10.0)));
  CostModel bad;
  bad.zeta_c = 2.5;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = CostModel{};
  bad.k_bh = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("density sweep with backhaul cost") {
  const auto p = table3();
  SUBCASE("reference cost has an interior optimum") {
    const auto curve = optimize_sbs_density_backhaul(p, zipf(), CostModel{}, 500.0, default_density_grid());
    CHECK(curve.points.size() == 40);
    CHECK(curve.interior);
    CHECK(curve.unimodal);
    for (const auto& pt : curve.points) {
      if (pt.feasible) CHECK(pt.mu <= curve.points[curve.best].mu);
    }
  }
  SUBCASE("free backhaul never hurts density") {
    CostModel cost;
    cost.k_bh = 0.0;
    const auto curve = optimize_sbs_density_backhaul(p, zipf(), cost, 500.0, default_density_grid());
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      if (curve.points[i].feasible && curve.points[i - 1].feasible) {
        CHECK(curve.points[i].mu >= curve.points[i - 1].mu * (1 - 1e-12));
      }
    }
  }
  SUBCASE("budget equal to the equipment cost leaves no backhaul") {
    CostModel cost;
    const auto curve = optimize_sbs_density_backhaul(p, zipf(), cost, 500.0, {50.0, 100.0, 150.0});
    CHECK(curve.points[1].feasible);
    CHECK(curve.points[1].control == 0.0);
    CHECK_FALSE(curve.points[2].feasible);
  }
  SUBCASE("nothing affordable") {
    CHECK_THROWS_AS(optimize_sbs_density_backhaul(p, zipf(), CostModel{}, 500.0, {150.0, 200.0}), InfeasiblePart);
  }
}

TEST_CASE("caching stations") {
  const auto p = table3();
  SUBCASE("empty cache equals the no-cache MBS path") {
    auto q = p;
    q.sbs_backhaul_bps = kUnbounded;
    const auto expected = capacity(cap_loads(q), HitRates{}, 0.0);
    const auto got = caching_station_capacity(p, zipf(), 0.0);
    CHECK(got.mu == expected.mu);
    CHECK(got.mu == std::min(got.mr, got.mbh));
    CHECK(is_unbounded(got.sr));
    CHECK(is_unbounded(got.sbh));
  }
  SUBCASE("SBS tier carries only its own hits") {
    const auto caps = cap_loads(p);
    const auto got = caching_station_capacity(p, zipf(), 100.0);
    CHECK(got.sr == Approx(caps.sr / zipf().cumulative(100.0)).epsilon(1e-12));
  }
  SUBCASE("free caching fills the catalog") {
    CostModel cost;
    cost.k_c = 0.0;
    const auto curve = optimize_sbs_density_caching_station(p, zipf(), cost, {20.0, 50.0});
    CHECK(curve.points[0].control == 1000.0);
  }
  SUBCASE("reference cost has an interior optimum") {
    const auto curve = optimize_sbs_density_caching_station(p, zipf(), CostModel{}, default_density_grid());
    CHECK(curve.interior);
    CHECK(curve.unimodal);
  }
}

TEST_CASE("calibration reproduces the documented constant") {
  auto p = table3();
  p.sbs_backhaul_bps = 1e9;
  const auto cal = calibrate_sbs_backhaul(p, zipf(), 900.0);
  CHECK(cal.sbs_backhaul_bps == Approx(kCalibratedSbsBackhaulBps).epsilon(1e-9));
  CHECK(0.5 * (cal.c_min + cal.c_max) == Approx(900.0).epsilon(1e-6));
}
