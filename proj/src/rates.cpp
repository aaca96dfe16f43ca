#include "hetcache/rates.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hetcache/numeric.hpp"

namespace hetcache {

namespace {

constexpr double kKm2PerM2 = 1e-6;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kTauFloor = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw InvalidParameter(what);
  }
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

void check_load(double load) {
  if (!(load >= 0.0)) {
    throw DomainError("load must be nonnegative, got " + std::to_string(load));
  }
}

// Bracket [0, hi] by doubling from `start`, then bisect rate(λ) = requirement.
template <class Rate>
double solve_cap(Rate&& rate, double requirement, double start) {
  double hi = start;
  while (rate(hi) >= requirement) {
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      return kUnbounded;
    }
  }
  return bisect_decreasing([&](double load) { return rate(load) - requirement; }, 0.0, hi, 1e-13);
}

}  // namespace

double NetworkParams::mbs_density() const {
  return 1.0 / (1.5 * std::numbers::sqrt3 * mbs_side_km * mbs_side_km);
}

double NetworkParams::min_distance_m() const {
  if (std::isinf(sinr_cap)) {
    return 0.0;
  }
  const double denom = (1.0 + interference_ratio_mbs) * noise_w * sinr_cap;
  return std::pow(mbs_power_w / denom, 1.0 / pathloss_mbs);
}

void NetworkParams::validate() const {
  require(positive(mbs_side_km), "MBS cell side must be positive");
  require(positive(sbs_density), "SBS density must be positive");
  require(positive(mbs_bandwidth_hz) && positive(sbs_bandwidth_hz), "bandwidths must be positive");
  require(positive(mbs_power_w) && positive(sbs_power_w), "transmit powers must be positive");
  require(pathloss_mbs > 2.0 && pathloss_sbs > 2.0 && std::isfinite(pathloss_mbs) &&
              std::isfinite(pathloss_sbs),
          "pathloss exponents must exceed 2");
  require(positive(noise_w), "noise power must be positive");
  require(interference_ratio_mbs >= 0.0 && interference_ratio_sbs >= 0.0 &&
              std::isfinite(interference_ratio_mbs) && std::isfinite(interference_ratio_sbs),
          "interference ratios must be finite and nonnegative");
  require(sinr_cap > 0.0, "SINR cap must be positive");
  require(mbs_backhaul_bps > 0.0 && sbs_backhaul_bps >= 0.0, "backhaul capacities must be positive");
  require(rate_req_ran_bps >= 0.0 && rate_req_bh_bps >= 0.0 && std::isfinite(rate_req_ran_bps) &&
              std::isfinite(rate_req_bh_bps),
          "rate requirements must be finite and nonnegative");
  require(gamma_shape > 1.0 && std::isfinite(gamma_shape), "Gamma shape must exceed 1");
  require(min_distance_m() <= mbs_side_km * 1000.0 * (1.0 + 1e-9),
          "SINR cap is below the cell-edge SINR (D_min > D_m)");
}

NetworkParams NetworkParams::reference() {
  NetworkParams p;
  p.noise_w = noise_power_w(-105.0, 1e6);
  p.sbs_backhaul_bps = kCalibratedSbsBackhaulBps;
  return p;
}

double noise_power_w(double dbm_per_mhz, double bandwidth_hz) {
  return std::pow(10.0, dbm_per_mhz / 10.0) * 1e-3 * (bandwidth_hz / 1e6);
}

double gamma_ratio(double kappa) {
  if (!(kappa > 1.0)) {
    throw InvalidParameter("Gamma shape must exceed 1");
  }
  return 1.0 / (kappa - 1.0);
}

double poisson_share(double load, double density) {
  check_load(load);
  const double x = load / density;
  if (x == 0.0) {
    return 1.0;
  }
  return -std::expm1(-x) / x;
}

double gamma_poisson_share(double load, double density, double kappa) {
  check_load(load);
  const double y = load / (kappa * density);
  if (y == 0.0) {
    return 1.0;
  }
  // 1 − (1+y)^{−(κ−1)} without cancellation at small y
  const double tail = -std::expm1(-(kappa - 1.0) * std::log1p(y));
  return gamma_ratio(kappa) * tail / y;
}

double spectrum_efficiency_mbs(const NetworkParams& p) {
  const double side_m = p.mbs_side_km * 1000.0;
  const double edge_snr =
      p.mbs_power_w * std::pow(side_m, -p.pathloss_mbs) / ((1.0 + p.interference_ratio_mbs) * p.noise_w);
  const double dmin = std::min(p.min_distance_m(), side_m);
  const double ratio = (dmin * dmin) / (side_m * side_m);
  const double tau = std::log2(edge_snr) + p.pathloss_mbs / (2.0 * kLn2) * (1.0 - ratio);
  // rounding at the boundary (edge SINR = cap = 1) leaves |τ| ~ 1e-16
  if (!(tau > kTauFloor * (std::abs(std::log2(edge_snr)) + p.pathloss_mbs))) {
    throw LowSnrError("MBS spectrum efficiency bound is not positive (tau_m = " +
                      std::to_string(tau) + ")");
  }
  return tau;
}

double spectrum_efficiency_sbs(const NetworkParams& p) {
  const double density_m2 = p.sbs_density * kKm2PerM2;
  const double near_snr = p.sbs_power_w * std::pow(std::numbers::pi * density_m2, p.pathloss_sbs / 2.0) /
                          ((1.0 + p.interference_ratio_sbs) * p.noise_w);
  const double tau =
      std::log2(near_snr) + p.pathloss_sbs / (2.0 * kLn2) * std::numbers::egamma;
  if (!(tau > kTauFloor * (std::abs(std::log2(near_snr)) + p.pathloss_sbs))) {
    throw LowSnrError("SBS spectrum efficiency bound is not positive (tau_s = " +
                      std::to_string(tau) + ")");
  }
  return tau;
}

double mean_rate_mbs_backhaul(const NetworkParams& p, double load) {
  return p.mbs_backhaul_bps * poisson_share(load, p.mbs_density());
}

double mean_rate_sbs_backhaul(const NetworkParams& p, double load) {
  return p.sbs_backhaul_bps * gamma_poisson_share(load, p.sbs_density, p.gamma_shape);
}

double mean_rate_mbs_radio(const NetworkParams& p, double load) {
  return spectrum_efficiency_mbs(p) * p.mbs_bandwidth_hz * poisson_share(load, p.mbs_density());
}

double mean_rate_sbs_radio(const NetworkParams& p, double load) {
  return spectrum_efficiency_sbs(p) * p.sbs_bandwidth_hz *
         gamma_poisson_share(load, p.sbs_density, p.gamma_shape);
}

double LoadCaps::get(Part part) const {
  switch (part) {
    case Part::MR:
      return mr;
    case Part::MBH:
      return mbh;
    case Part::SR:
      return sr;
    case Part::SBH:
      return sbh;
  }
  return 0.0;
}

LoadCaps cap_loads(const NetworkParams& p, CapMode mode) {
  p.validate();
  const double rho_m = p.mbs_density();
  const double rho_s = p.sbs_density;
  const double kappa = p.gamma_shape;

  LoadCaps caps;
  auto settle = [&](Part part, double zero_load_rate, double requirement, double start, auto&& rate,
                    const char* why) -> double {
    if (std::isinf(zero_load_rate)) {
      return kUnbounded;
    }
    if (zero_load_rate < requirement) {
      if (mode == CapMode::kLenient) {
        caps.feasible[static_cast<int>(part)] = false;
        return 0.0;
      }
      throw InfeasiblePart(part, why);
    }
    return solve_cap(rate, requirement, start);
  };

  const double mr_peak = spectrum_efficiency_mbs(p) * p.mbs_bandwidth_hz;
  const double sr_peak = spectrum_efficiency_sbs(p) * p.sbs_bandwidth_hz;

  caps.mr = settle(
      Part::MR, mr_peak, p.rate_req_ran_bps, rho_m,
      [&](double l) { return mr_peak * poisson_share(l, rho_m); },
      "RAN requirement exceeds the single-user MBS radio rate");
  caps.mbh = settle(
      Part::MBH, p.mbs_backhaul_bps, p.rate_req_bh_bps, rho_m,
      [&](double l) { return p.mbs_backhaul_bps * poisson_share(l, rho_m); },
      "backhaul requirement exceeds the MBS backhaul capacity");
  caps.sr = settle(
      Part::SR, sr_peak, p.rate_req_ran_bps, rho_s,
      [&](double l) { return sr_peak * gamma_poisson_share(l, rho_s, kappa); },
      "RAN requirement exceeds the single-user SBS radio rate");
  caps.sbh = settle(
      Part::SBH, p.sbs_backhaul_bps, p.rate_req_bh_bps, rho_s,
      [&](double l) { return p.sbs_backhaul_bps * gamma_poisson_share(l, rho_s, kappa); },
      "backhaul requirement exceeds the SBS backhaul capacity");
  return caps;
}

}  // namespace hetcache
