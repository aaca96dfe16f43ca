#include <doctest.h>

#include <random>

#include "hetcache/numeric.hpp"
#include "hetcache/optimizer.hpp"

using namespace hetcache;
using doctest::Approx;

namespace {

NetworkParams table3(double u_sbh = kCalibratedSbsBackhaulBps) {
  auto p = NetworkParams::reference();
  p.sbs_backhaul_bps = u_sbh;
  return p;
}

const PopularityModel& zipf() {
  static const PopularityModel m = build_zipf(1000, 0.56);
  return m;
}

// Capacity spread between a grid point and its lattice neighbours.
double local_increment(const std::vector<GridPoint>& g, int n_cs, int n_phi, int i, int j) {
  double inc = 0.0;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int a = i + di, b = j + dj;
      if (a < 0 || b < 0 || a >= n_cs || b >= n_phi) continue;
      inc = std::max(inc, std::abs(g[a * n_phi + b].mu - g[i * n_phi + j].mu));
    }
  }
  return inc;
}

// max over φ of μ for a fixed cache split: the crossing of the parts that grow
// with φ (MR, MBH) and those that shrink (SR, SBH).
double best_over_phi(const LoadCaps& caps, const HitRates& hits) {
  auto up = [&](double phi) {
    const auto b = capacity(caps, hits, phi);
    return std::min(b.mr, b.mbh);
  };
  auto down = [&](double phi) {
    const auto b = capacity(caps, hits, phi);
    return std::min(b.sr, b.sbh);
  };
  if (up(1.0) <= down(1.0)) return capacity(caps, hits, 1.0).mu;
  if (up(0.0) >= down(0.0)) return capacity(caps, hits, 0.0).mu;
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (up(mid) < down(mid) ? lo : hi) = mid;
  }
  return std::max(capacity(caps, hits, lo).mu, capacity(caps, hits, hi).mu);
}

}  // namespace

TEST_CASE("classification") {
  CHECK(classify_regime({100, kUnbounded, 200, 150}) == BackhaulClass::kIdealMbhConstrainedSbh);
  CHECK(classify_regime({100, kUnbounded, 200, 250}) == BackhaulClass::kIdealMbhUnconstrainedSbh);
  CHECK(classify_regime({100, 120, 200, 200}) == BackhaulClass::kIdealMbhUnconstrainedSbh);
  CHECK(classify_regime({130, 120, 200, 100}) == BackhaulClass::kNonIdealMbh);
  CHECK(classify_regime(cap_loads(table3())) == BackhaulClass::kIdealMbhConstrainedSbh);
}

TEST_CASE("reference backhaul of 1.2 Gbps leaves the SBS backhaul unconstrained") {
  CHECK(classify_regime(cap_loads(table3(1.2e9))) == BackhaulClass::kIdealMbhUnconstrainedSbh);
}

TEST_CASE("grid without cache and with free backhauls balances the radio tiers") {
  const LoadCaps caps{287.33, kUnbounded, 1699.77, kUnbounded};
  const Densities rho{4.6188, 50.0};
  const GridSize grid{2, 401};
  const auto plan = grid_search(caps, rho, zipf(), 0.0, grid);
  CHECK(std::abs(plan.steering - caps.sr / (caps.mr + caps.sr)) <= 1.0 / 400);
  CHECK(plan.mu == Approx(caps.mr + caps.sr).epsilon(5e-3));
  CHECK(plan.regime == Regime::kGridOnly);
  CHECK_FALSE(plan.thresholds.has_value());
}

TEST_CASE("full-catalog grid point has unbounded backhaul capacities") {
  const auto p = table3();
  const auto caps = cap_loads(p);
  const Densities rho = Densities::of(p);
  const double budget = 1000.0 * (rho.mbs + rho.sbs);
  const auto g = grid_surface(caps, rho, zipf(), budget, {20, 20});
  bool found = false;
  for (const auto& pt : g) {
    if (pt.total_hit == 1.0) {
      found = true;
      const auto b = capacity(caps, hit_rates(zipf(), pt.sbs_cache, pt.mbs_cache), pt.steering);
      CHECK(is_unbounded(b.mbh));
      CHECK(is_unbounded(b.sbh));
    }
  }
  CHECK(found);
}

TEST_CASE("small budget puts everything at the SBSs") {
  for (double u : {1e9, kCalibratedSbsBackhaulBps}) {
    const auto p = table3(u);
    const auto caps = cap_loads(p);
    const Densities rho = Densities::of(p);
    const auto grid = grid_search(p, zipf(), 50.0);
    const auto exact = solve_analytic(p, zipf(), 50.0);
    CHECK(exact.regime == Regime::kBudgetBelowCmin);
    CHECK(exact.xi_c(p.sbs_density) == Approx(1.0).epsilon(1e-12));
    CHECK(grid.mu <= exact.mu * (1 + 1e-12));
    // profile over C_s with φ optimised exactly: maximal on the ξ_c = 1 row
    const int rows = 200;
    int argmax = -1;
    double top = -1.0;
    for (int i = 0; i < rows; ++i) {
      const double cs = 50.0 / rho.sbs * i / (rows - 1);
      const auto a = CacheAllocation::from_budget(50.0, cs, 0.0, rho.mbs, rho.sbs, 1000);
      const double mu = best_over_phi(caps, hit_rates(zipf(), a));
      if (mu > top) {
        top = mu;
        argmax = i;
      }
    }
    CHECK(argmax == rows - 1);
    CHECK(top == Approx(exact.mu).epsilon(1e-9));
  }
}

TEST_CASE("calibrated thresholds bracket 870 / 930") {
  const auto t = thresholds(table3(), zipf());
  CHECK(t.c_min >= 820.0);
  CHECK(t.c_min <= 920.0);
  CHECK(t.c_max >= 880.0);
  CHECK(t.c_max <= 980.0);
  CHECK(t.c_min < t.c_max);
}

TEST_CASE("threshold special cases") {
  const Densities rho{4.6188, 50.0};
  SUBCASE("no backhaul deficiency") {
    const LoadCaps caps{287.0, kUnbounded, 1700.0, 1700.0};
    CHECK(thresholds(caps, rho, zipf()).c_min == 0.0);
  }
  SUBCASE("uniform popularity inverts linearly") {
    const auto flat = build_zipf(1000, 0.0);
    const LoadCaps caps{287.0, kUnbounded, 1700.0, 1383.0};
    const double expected = rho.sbs * 1000.0 * (caps.sr - caps.sbh) / (caps.mr + caps.sr);
    CHECK(thresholds(caps, rho, flat).c_min == Approx(expected).epsilon(1e-12));
  }
  SUBCASE("regime and catalog errors") {
    CHECK_THROWS_AS(thresholds(LoadCaps{300, 200, 1700, 1383}, rho, zipf()), RegimeError);
    CHECK_THROWS_AS(thresholds(LoadCaps{287, kUnbounded, 1700, 1800}, rho, zipf()), RegimeError);
    // the tail beyond C_min/ρ_s holds (λ̂_MR+λ̂_SBH)/(λ̂_MR+λ̂_SR), never less than
    // the MBS share, so even a nearly absent SBS backhaul leaves C_max finite
    for (double sbh : {1e-6, 1.0, 100.0}) {
      const auto t = thresholds(LoadCaps{287, kUnbounded, 1700, sbh}, rho, zipf());
      CHECK(std::isfinite(t.c_max));
      CHECK(t.c_max > t.c_min);
    }
  }
}

TEST_CASE("analytic plan examples") {
  const Densities rho{4.6188, 50.0};
  SUBCASE("symmetric caps steer half") {
    const LoadCaps caps{500.0, kUnbounded, 1700.0, 500.0};
    const auto plan = solve_analytic(caps, rho, zipf(), 10.0);
    REQUIRE(plan.regime == Regime::kBudgetBelowCmin);
    CHECK(plan.steering == Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("continuity at C_min") {
    const auto p = table3();
    const auto caps = cap_loads(p);
    const auto t = thresholds(caps, Densities::of(p), zipf());
    const auto at = solve_analytic(caps, Densities::of(p), zipf(), t.c_min);
    const auto below = solve_analytic(caps, Densities::of(p), zipf(), t.c_min * (1 - 1e-12));
    CHECK(at.regime == Regime::kBudgetMid);
    CHECK(at.mbs_cache == Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(below.regime == Regime::kBudgetBelowCmin);
    CHECK(at.sbs_cache == Approx(below.sbs_cache).epsilon(1e-9));
    CHECK(at.steering == Approx(below.steering).epsilon(1e-9));
    CHECK(at.mu == Approx(below.mu).epsilon(1e-9));
  }
  SUBCASE("continuity at C_max") {
    const auto p = table3();
    const auto caps = cap_loads(p);
    const auto t = thresholds(caps, Densities::of(p), zipf());
    const auto at = solve_analytic(caps, Densities::of(p), zipf(), t.c_max);
    const auto below = solve_analytic(caps, Densities::of(p), zipf(), t.c_max * (1 - 1e-12));
    CHECK(at.regime == Regime::kBudgetAboveCmax);
    CHECK(below.regime == Regime::kBudgetMid);
    CHECK(below.steering == Approx(1.0).epsilon(1e-8));
    CHECK(at.sbs_cache == Approx(below.sbs_cache).epsilon(1e-8));
  }
  SUBCASE("non-ideal MBS backhaul") {
    const LoadCaps caps{300.0, 200.0, 1700.0, 1000.0};
    CHECK_THROWS_AS(solve_analytic(caps, rho, zipf(), 100.0), RegimeError);
    CHECK(solve(caps, rho, zipf(), 100.0, {50, 50}).regime == Regime::kGridOnly);
  }
}

TEST_CASE("analytic plans at the reference budgets agree with the grid") {
  const auto p = table3();
  const auto caps = cap_loads(p);
  const Densities rho = Densities::of(p);
  const Regime expected[] = {Regime::kBudgetBelowCmin, Regime::kBudgetMid, Regime::kBudgetAboveCmax};
  const double budgets[] = {50.0, 900.0, 1000.0};
  for (int k = 0; k < 3; ++k) {
    const GridSize grid{400, 400};
    const auto plan = solve_analytic(caps, rho, zipf(), budgets[k]);
    CHECK(plan.regime == expected[k]);
    const auto g = grid_surface(caps, rho, zipf(), budgets[k], grid);
    const auto best = grid_search(caps, rho, zipf(), budgets[k], grid);
    const double cs_max = std::min(budgets[k] / rho.sbs, 1000.0);
    const int i = static_cast<int>(std::lround(plan.sbs_cache / cs_max * (grid.cs_points - 1)));
    const int j = static_cast<int>(std::lround(plan.steering * (grid.phi_points - 1)));
    CHECK(best.mu <= plan.mu * (1 + 1e-9));
    const double inc = local_increment(g, grid.cs_points, grid.phi_points, i, j);
    CHECK(plan.mu - best.mu <= inc + 1e-9 * plan.mu);
    // rows whose φ-optimised capacity reaches μ* must not beat the plan's hit
    // rate by more than one C_s step
    int near = 0;
    for (int a = 0; a < grid.cs_points; ++a) {
      const auto& pt = g[a * grid.phi_points];
      const double mu = best_over_phi(caps, hit_rates(zipf(), pt.sbs_cache, pt.mbs_cache));
      if (mu < plan.mu * (1 - 1e-9)) continue;
      ++near;
      const double step = std::abs(g[std::min(a + 1, grid.cs_points - 1) * grid.phi_points].total_hit -
                                   g[std::max(a - 1, 0) * grid.phi_points].total_hit);
      CHECK(pt.total_hit <= plan.hits.total + step + 1e-12);
    }
    CHECK(near > 0);
  }
}

TEST_CASE("plan invariants across budgets") {
  const auto p = table3();
  const auto caps = cap_loads(p);
  const Densities rho = Densities::of(p);
  const auto t = thresholds(caps, rho, zipf());
  const double ceiling = caps.mr + caps.sr;
  double prev_mu = 0.0;
  for (double c = 0.0; c <= 3000.0; c += 7.5) {
    const auto plan = solve_analytic(caps, rho, zipf(), c);
    CHECK(plan.steering >= 0.0);
    CHECK(plan.steering <= 1.0);
    CHECK(plan.mu == Approx(plan.breakdown.mu).epsilon(1e-9));
    CHECK(plan.mu <= ceiling * (1 + 1e-12));
    CHECK(plan.mu >= prev_mu * (1 - 1e-12));
    prev_mu = plan.mu;
    if (plan.sbs_cache + plan.mbs_cache < 1000.0 - 1e-9) {
      CHECK(rho.mbs * plan.mbs_cache + rho.sbs * plan.sbs_cache == Approx(c).epsilon(1e-9).scale(1.0));
    }
    const auto& b = plan.breakdown;
    if (c < t.c_min) {
      CHECK(plan.regime == Regime::kBudgetBelowCmin);
      CHECK(plan.mu < ceiling);
      CHECK(b.mr == Approx(b.sbh).epsilon(1e-9));
      CHECK(b.sr > b.mr);
    } else {
      CHECK(plan.mu == Approx(ceiling).epsilon(1e-12));
    }
    if (c >= t.c_min && c < t.c_max) {
      CHECK(plan.regime == Regime::kBudgetMid);
      CHECK(b.mr == Approx(ceiling).epsilon(1e-9));
      CHECK(b.sr == Approx(ceiling).epsilon(1e-9));
      CHECK(b.sbh == Approx(ceiling).epsilon(1e-9));
    }
    if (c >= t.c_max) {
      CHECK(plan.regime == Regime::kBudgetAboveCmax);
      CHECK(plan.steering == 1.0);
    }
  }
}

TEST_CASE("unconstrained backhaul plan") {
  const LoadCaps caps{287.33, kUnbounded, 1699.77, 2500.0};
  const Densities rho{4.6188, 50.0};
  const double ceiling = caps.mr + caps.sr;
  for (double c : {0.0, 10.0, 200.0, 1000.0, 5000.0}) {
    const auto plan = solve_analytic(caps, rho, zipf(), c);
    CHECK(plan.regime == Regime::kUnconstrainedBackhaul);
    CHECK(plan.mu == Approx(ceiling).epsilon(1e-12));
    CHECK(plan.breakdown.mu == Approx(ceiling).epsilon(1e-9));
    const auto grid = grid_search(caps, rho, zipf(), c, {100, 100});
    CHECK(grid.mu <= ceiling * (1 + 1e-12));
  }
  CHECK(solve_analytic(caps, rho, zipf(), 0.0).steering == Approx(caps.sr / ceiling).epsilon(1e-12));
}

TEST_CASE("randomized analytic optimum matches the grid") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 12) {
    auto p = table3(0.1e9 + 1.5e9 * u(rng));
    p.sbs_density = 20.0 + 180.0 * u(rng);
    p.rate_req_ran_bps = 2e6 + 6e6 * u(rng);
    const auto model = build_zipf(200 + static_cast<std::size_t>(1800 * u(rng)), 0.3 + 0.9 * u(rng));
    const auto caps = cap_loads(p, CapMode::kLenient);
    if (classify_regime(caps) != BackhaulClass::kIdealMbhConstrainedSbh || caps.sbh <= 0.0) continue;
    const Densities rho = Densities::of(p);
    const auto probe = solve_analytic(caps, rho, model, 0.0);
    const double c_top = std::isfinite(probe.thresholds->c_max) ? probe.thresholds->c_max : probe.thresholds->c_min;
    const double budget = 1.5 * c_top * u(rng);
    const GridSize grid{160, 160};
    const auto plan = solve_analytic(caps, rho, model, budget);
    const auto g = grid_surface(caps, rho, model, budget, grid);
    const auto best = grid_search(caps, rho, model, budget, grid);
    const double cs_max = std::min(budget / rho.sbs, static_cast<double>(model.file_count()));
    const int i = cs_max > 0 ? static_cast<int>(std::lround(plan.sbs_cache / cs_max * (grid.cs_points - 1))) : 0;
    const int j = static_cast<int>(std::lround(plan.steering * (grid.phi_points - 1)));
    CHECK(best.mu <= plan.mu * (1 + 1e-9));
    CHECK(plan.mu - best.mu <= local_increment(g, grid.cs_points, grid.phi_points, i, j) + 1e-9 * plan.mu);
    ++tested;
  }
}

TEST_CASE("grid search is deterministic and validates inputs") {
  const auto p = table3();
  const auto a = grid_search(p, zipf(), 900.0, {64, 64});
  const auto b = grid_search(p, zipf(), 900.0, {64, 64});
  CHECK(a.mu == b.mu);
  CHECK(a.sbs_cache == b.sbs_cache);
  CHECK(a.steering == b.steering);
  CHECK_THROWS_AS(grid_search(p, zipf(), 900.0, {1, 10}), InvalidParameter);
  CHECK_THROWS_AS(grid_search(p, zipf(), -1.0), DomainError);
}

TEST_CASE("xi_c") {
  OptimalPlan plan;
  plan.budget = 0.0;
  CHECK(std::isnan(plan.xi_c(50.0)));
  plan.budget = 100.0;
  plan.sbs_cache = 1.0;
  CHECK(plan.xi_c(50.0) == Approx(0.5));
}
