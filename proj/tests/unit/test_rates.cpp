#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hetcache/rates.hpp"
#include "oracles.hpp"

using namespace hetcache;
using doctest::Approx;

namespace {

NetworkParams table3(double u_sbh = 1e9) {
  auto p = NetworkParams::reference();
  p.sbs_backhaul_bps = u_sbh;
  return p;
}

// Rate formulas written out independently of the library.
double poisson_rate(double cap, double load, double rho) {
  return load == 0.0 ? cap : cap * rho / load * (1.0 - std::exp(-load / rho));
}

double gamma_poisson_rate(double cap, double load, double rho, double kappa) {
  if (load == 0.0) return cap;
  return cap * kappa * rho / load / (kappa - 1.0) * (1.0 - std::pow(1.0 + load / (kappa * rho), 1.0 - kappa));
}

}  // namespace

TEST_CASE("mbs density of the hex lattice") {
  NetworkParams p;
  p.mbs_side_km = 0.5;
  CHECK(p.mbs_density() == Approx(1.0 / (3.0 * std::sqrt(3.0) / 2.0 * 0.25)).epsilon(1e-12));
}

TEST_CASE("gamma ratio identity") {
  for (double kappa : {1.01, 1.5, 2.0, 3.575, 7.25, 40.0}) {
    const double lhs = std::exp(std::lgamma(kappa - 1.0) - std::lgamma(kappa));
    CHECK(std::abs(gamma_ratio(kappa) - lhs) <= 1e-12 * lhs);
  }
  CHECK(std::abs(gamma_ratio(3.575) - 1.0 / 2.575) <= 1e-12);
  CHECK_THROWS_AS(gamma_ratio(1.0), InvalidParameter);
}

TEST_CASE("zero-load limits") {
  const auto p = table3();
  CHECK(mean_rate_mbs_backhaul(p, 0.0) == p.mbs_backhaul_bps);
  CHECK(mean_rate_sbs_backhaul(p, 0.0) == p.sbs_backhaul_bps);
  CHECK(mean_rate_mbs_radio(p, 0.0) == Approx(spectrum_efficiency_mbs(p) * p.mbs_bandwidth_hz).epsilon(1e-15));
  CHECK(mean_rate_sbs_radio(p, 0.0) == Approx(spectrum_efficiency_sbs(p) * p.sbs_bandwidth_hz).epsilon(1e-15));
  // tiny loads approach the limit continuously
  CHECK(mean_rate_mbs_backhaul(p, 1e-12) == Approx(p.mbs_backhaul_bps).epsilon(1e-11));
  CHECK(mean_rate_sbs_backhaul(p, 1e-12) == Approx(p.sbs_backhaul_bps).epsilon(1e-11));
}

TEST_CASE("substitution at load = density") {
  const auto p = table3();
  const double rho = p.mbs_density();
  CHECK(mean_rate_mbs_backhaul(p, rho) == Approx(p.mbs_backhaul_bps * (1 - std::exp(-1.0))).epsilon(1e-14));
  CHECK(mean_rate_mbs_radio(p, rho) ==
        Approx(spectrum_efficiency_mbs(p) * p.mbs_bandwidth_hz * (1 - std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("negative loads are rejected") {
  const auto p = table3();
  CHECK_THROWS_AS(mean_rate_mbs_backhaul(p, -1.0), DomainError);
  CHECK_THROWS_AS(mean_rate_sbs_backhaul(p, -1.0), DomainError);
  CHECK_THROWS_AS(mean_rate_mbs_radio(p, -1.0), DomainError);
  CHECK_THROWS_AS(mean_rate_sbs_radio(p, -1.0), DomainError);
}

TEST_CASE("rates are strictly decreasing and vanish") {
  const auto p = table3();
  double prev[4] = {INFINITY, INFINITY, INFINITY, INFINITY};
  for (double load = 0.0; load < 1e5; load = load * 1.3 + 0.5) {
    const double r[4] = {mean_rate_mbs_radio(p, load), mean_rate_mbs_backhaul(p, load),
                         mean_rate_sbs_radio(p, load), mean_rate_sbs_backhaul(p, load)};
    for (int i = 0; i < 4; ++i) {
      CHECK(r[i] < prev[i]);
      prev[i] = r[i];
    }
  }
  CHECK(mean_rate_mbs_backhaul(p, 1e12) < 1e-3 * p.mbs_backhaul_bps);
  CHECK(mean_rate_sbs_backhaul(p, 1e12) < 1e-3 * p.sbs_backhaul_bps);
}

TEST_CASE("closed forms agree with the written-out formulas") {
  const auto p = table3();
  for (double load : {0.3, 7.0, 150.0, 2000.0}) {
    CHECK(mean_rate_mbs_backhaul(p, load) ==
          Approx(poisson_rate(p.mbs_backhaul_bps, load, p.mbs_density())).epsilon(1e-12));
    CHECK(mean_rate_sbs_backhaul(p, load) ==
          Approx(gamma_poisson_rate(p.sbs_backhaul_bps, load, p.sbs_density, 3.575)).epsilon(1e-12));
  }
}

TEST_CASE("mbs backhaul rate matches Poisson sampling") {
  auto p = table3();
  p.mbs_side_km = std::sqrt(1.0 / (1.5 * std::sqrt(3.0) * 1.54));
  REQUIRE(p.mbs_density() == Approx(1.54).epsilon(1e-12));
  p.mbs_backhaul_bps = 100e9;
  const double ref = oracle::sampled_poisson_rate(100e9, 10.0, 1.54, 10'000'000, 42);
  CHECK(std::abs(mean_rate_mbs_backhaul(p, 10.0) / ref - 1.0) < 2e-3);
}

TEST_CASE("sbs backhaul rate matches Gamma-Poisson sampling") {
  const auto p = table3(1e9);
  const double ref = oracle::sampled_gamma_poisson_rate(1e9, 100.0, 50.0, 3.575, 10'000'000, 43);
  CHECK(std::abs(mean_rate_sbs_backhaul(p, 100.0) / ref - 1.0) < 5e-3);
}

TEST_CASE("sbs radio rate matches Gamma-Poisson sampling") {
  const auto p = table3();
  const double peak = spectrum_efficiency_sbs(p) * p.sbs_bandwidth_hz;
  const double ref = oracle::sampled_gamma_poisson_rate(peak, 500.0, 50.0, 3.575, 10'000'000, 44);
  CHECK(std::abs(mean_rate_sbs_radio(p, 500.0) / ref - 1.0) < 5e-3);
}

TEST_CASE("bandwidth and capacity linearity") {
  auto p = table3();
  auto q = p;
  q.sbs_bandwidth_hz *= 2.0;
  q.mbs_backhaul_bps *= 3.0;
  for (double load : {0.0, 10.0, 500.0, 5000.0}) {
    CHECK(mean_rate_sbs_radio(q, load) == Approx(2.0 * mean_rate_sbs_radio(p, load)).epsilon(1e-14));
    CHECK(mean_rate_mbs_backhaul(q, load) == Approx(3.0 * mean_rate_mbs_backhaul(p, load)).epsilon(1e-14));
  }
}

TEST_CASE("mbs spectrum efficiency") {
  SUBCASE("zero at the validity boundary") {
    auto p = table3();
    const double side_m = p.mbs_side_km * 1000.0;
    p.interference_ratio_mbs = p.mbs_power_w * std::pow(side_m, -p.pathloss_mbs) / p.noise_w - 1.0;
    p.sinr_cap = 1.0;
    CHECK_THROWS_AS(spectrum_efficiency_mbs(p), LowSnrError);
  }
  SUBCASE("cap removed") {
    auto p = table3();
    p.sinr_cap = INFINITY;
    const double side_m = p.mbs_side_km * 1000.0;
    const double edge = p.mbs_power_w * std::pow(side_m, -p.pathloss_mbs) /
                        ((1.0 + p.interference_ratio_mbs) * p.noise_w);
    CHECK(spectrum_efficiency_mbs(p) ==
          Approx(std::log2(edge) + p.pathloss_mbs / (2.0 * std::numbers::ln2)).epsilon(1e-13));
  }
  SUBCASE("lower-bounds the disc average at a 30 dB cap") {
    auto p = table3();
    p.sinr_cap = 1e3;
    const double tau = spectrum_efficiency_mbs(p);
    const auto mc = oracle::disc_spectral_efficiency(p.mbs_power_w, p.pathloss_mbs,
                                                     (1.0 + p.interference_ratio_mbs) * p.noise_w, 1e3,
                                                     p.mbs_side_km * 1000.0, 2'000'000, 5);
    CHECK(tau <= mc.mean + 3.0 * mc.se);
    CHECK(std::abs(mc.mean - tau) / mc.mean < 0.02);
  }
}

TEST_CASE("sbs spectrum efficiency") {
  SUBCASE("quadrupled density adds alpha") {
    auto p = table3();
    auto q = p;
    q.sbs_density *= 4.0;
    CHECK(spectrum_efficiency_sbs(q) - spectrum_efficiency_sbs(p) == Approx(p.pathloss_sbs).epsilon(1e-12));
  }
  SUBCASE("interference-dominated limit") {
    auto p = table3();
    p.interference_ratio_sbs = 1e30;
    CHECK_THROWS_AS(spectrum_efficiency_sbs(p), LowSnrError);
  }
  SUBCASE("lower-bounds the nearest-SBS average") {
    const auto p = table3();
    const double tau = spectrum_efficiency_sbs(p);
    const auto mc = oracle::nearest_point_spectral_efficiency(
        p.sbs_power_w, p.pathloss_sbs, (1.0 + p.interference_ratio_sbs) * p.noise_w, INFINITY,
        p.sbs_density * 1e-6, 2'000'000, 6);
    // the closed form carries no SINR cap, so neither does its oracle
    CHECK(tau <= mc.mean + 3.0 * mc.se);
    CHECK(std::abs(mc.mean - tau) / mc.mean < 0.02);
  }
}

TEST_CASE("reference spectrum efficiencies") {
  const auto p = table3();
  CHECK(spectrum_efficiency_mbs(p) == Approx(9.3312).epsilon(1e-4));
  CHECK(spectrum_efficiency_sbs(p) == Approx(12.2719).epsilon(1e-4));
}

TEST_CASE("load caps match a fine grid scan") {
  const auto p = table3(1e9);
  const auto caps = cap_loads(p);
  const double rho_m = p.mbs_density();
  const double mr_peak = spectrum_efficiency_mbs(p) * p.mbs_bandwidth_hz;
  const double sr_peak = spectrum_efficiency_sbs(p) * p.sbs_bandwidth_hz;
  struct Case {
    double cap;
    std::function<double(double)> f;
    double hi;
  };
  const Case cases[] = {
      {caps.mr, [&](double l) { return poisson_rate(mr_peak, l, rho_m) - p.rate_req_ran_bps; }, 1000.0},
      {caps.mbh, [&](double l) { return poisson_rate(p.mbs_backhaul_bps, l, rho_m) - p.rate_req_bh_bps; }, 10000.0},
      {caps.sr, [&](double l) { return gamma_poisson_rate(sr_peak, l, 50.0, 3.575) - p.rate_req_ran_bps; }, 5000.0},
      {caps.sbh, [&](double l) { return gamma_poisson_rate(1e9, l, 50.0, 3.575) - p.rate_req_bh_bps; }, 5000.0},
  };
  for (const auto& c : cases) {
    const auto [a, b] = oracle::scan_root(c.f, c.hi, 1'000'000);
    REQUIRE(b < c.hi);
    CHECK(c.cap >= a);
    CHECK(c.cap <= b);
  }
  CHECK(caps.mr == Approx(287.33).epsilon(1e-4));
  CHECK(caps.mbh == Approx(3079.20).epsilon(1e-4));
  CHECK(caps.sr == Approx(1699.77).epsilon(1e-4));
  CHECK(caps.sbh == Approx(1383.12).epsilon(1e-4));
}

TEST_CASE("bisection residuals") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    auto p = table3(0.2e9 + 2e9 * u(rng));
    p.sbs_density = 20.0 + 180.0 * u(rng);
    p.rate_req_ran_bps = 1e6 + 9e6 * u(rng);
    p.rate_req_bh_bps = 10e6 + 90e6 * u(rng);
    const auto c = cap_loads(p);
    const double res[4] = {mean_rate_mbs_radio(p, c.mr) / p.rate_req_ran_bps,
                           mean_rate_mbs_backhaul(p, c.mbh) / p.rate_req_bh_bps,
                           mean_rate_sbs_radio(p, c.sr) / p.rate_req_ran_bps,
                           mean_rate_sbs_backhaul(p, c.sbh) / p.rate_req_bh_bps};
    for (double r : res) {
      CHECK(std::abs(r - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("analytic root of the mbs backhaul cap") {
  auto p = table3();
  p.rate_req_bh_bps = p.mbs_backhaul_bps * (1.0 - std::exp(-1.0));
  // SBS backhaul cannot carry this requirement; only the MBS cap matters here
  CHECK(cap_loads(p, CapMode::kLenient).mbh == Approx(p.mbs_density()).epsilon(1e-10));
}

TEST_CASE("cap invariant under joint scaling of capacity and requirement") {
  auto p = table3();
  const double base = cap_loads(p).mbh;
  for (double c : {0.1, 0.5, 3.0}) {
    auto q = p;
    q.mbs_backhaul_bps *= c;
    q.rate_req_bh_bps *= c;
    q.sbs_backhaul_bps *= c;
    CHECK(cap_loads(q).mbh == Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("infeasible parts are named") {
  auto p = table3();
  p.rate_req_ran_bps = spectrum_efficiency_mbs(p) * p.mbs_bandwidth_hz * 1.01;
  try {
    cap_loads(p);
    FAIL("expected InfeasiblePart");
  } catch (const InfeasiblePart& e) {
    CHECK(e.part() == Part::MR);
  }
  auto q = table3(40e6);
  try {
    cap_loads(q);
    FAIL("expected InfeasiblePart");
  } catch (const InfeasiblePart& e) {
    CHECK(e.part() == Part::SBH);
  }
  const auto lenient = cap_loads(q, CapMode::kLenient);
  CHECK(lenient.sbh == 0.0);
  CHECK_FALSE(lenient.feasible[3]);
}

TEST_CASE("parameter validation") {
  auto p = table3();
  p.pathloss_mbs = 2.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = table3();
  p.gamma_shape = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = table3();
  p.sinr_cap = 1e-6;  // pushes D_min beyond D_m
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = table3();
  p.sbs_density = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
}
