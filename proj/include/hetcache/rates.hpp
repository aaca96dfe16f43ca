#pragma once

#include <array>

#include "hetcache/error.hpp"

namespace hetcache {

/// Physical and QoS constants of the two-tier network, in base units.
///
/// Densities are per km²; link distances inside the pathloss are in metres.
/// `noise_w` is the scalar σ² in the SINR denominator.
struct NetworkParams {
  double mbs_side_km = 0.5;
  double sbs_density = 50.0;
  double mbs_bandwidth_hz = 100e6;
  double sbs_bandwidth_hz = 10e6;
  double mbs_power_w = 10.0;
  double sbs_power_w = 2.0;
  double pathloss_mbs = 3.5;
  double pathloss_sbs = 4.0;
  double noise_w = 0.0;
  double interference_ratio_mbs = 1000.0;
  double interference_ratio_sbs = 1000.0;
  double sinr_cap = 1e6;
  double mbs_backhaul_bps = 100e9;
  double sbs_backhaul_bps = 1e9;
  double rate_req_ran_bps = 5e6;
  double rate_req_bh_bps = 50e6;
  double gamma_shape = 3.575;

  /// ρ_m = 1 / ((3√3/2) D_m²).
  double mbs_density() const;

  /// Distance (m) at which the mean-interference MBS SINR reaches the cap.
  double min_distance_m() const;

  /// Throws InvalidParameter naming the first violated constraint.
  void validate() const;

  /// Simulation constants of the reference scenario: D_m = 500 m, ρ_s = 50/km²,
  /// σ² = −105 dBm/MHz over 1 MHz, θ = 1000, Ř_RAN = 5 Mbps, Ř_BH = 50 Mbps.
  /// `sbs_backhaul_bps` is the calibrated value kCalibratedSbsBackhaulBps.
  static NetworkParams reference();
};

/// SBS backhaul capacity that places the cache thresholds of the reference
/// scenario around 900 files/km² (see README).
inline constexpr double kCalibratedSbsBackhaulBps = 1.030286151944e9;

/// dBm per MHz over `bandwidth_hz` → watts.
double noise_power_w(double dbm_per_mhz, double bandwidth_hz);

/// Γ(κ−1)/Γ(κ), i.e. 1/(κ−1).
double gamma_ratio(double kappa);

/// E[1/(N+1)] for N ~ Poisson(load/density); 1 at zero load.
double poisson_share(double load, double density);

/// E[1/(N+1)] for N ~ Poisson(load·A), A ~ Gamma(κ, 1/(κ·density)).
double gamma_poisson_share(double load, double density, double kappa);

/// Mean-interference lower bound on the MBS spectrum efficiency τ_m (bit/s/Hz).
/// Throws LowSnrError when τ_m ≤ 0.
double spectrum_efficiency_mbs(const NetworkParams& p);

/// Mean-interference lower bound on the SBS spectrum efficiency τ_s (bit/s/Hz).
double spectrum_efficiency_sbs(const NetworkParams& p);

double mean_rate_mbs_backhaul(const NetworkParams& p, double load);
double mean_rate_sbs_backhaul(const NetworkParams& p, double load);
double mean_rate_mbs_radio(const NetworkParams& p, double load);
double mean_rate_sbs_radio(const NetworkParams& p, double load);

/// Largest per-part user densities (per km²) meeting the rate requirements.
/// kUnbounded marks a part no requirement constrains.
struct LoadCaps {
  double mr = 0.0;
  double mbh = 0.0;
  double sr = 0.0;
  double sbh = 0.0;
  // false where the requirement exceeds the zero-load rate (lenient mode only)
  std::array<bool, 4> feasible{true, true, true, true};

  double get(Part part) const;
};

enum class CapMode {
  kStrict,   // an unattainable requirement throws InfeasiblePart
  kLenient,  // an unattainable requirement yields a cap of 0
};

LoadCaps cap_loads(const NetworkParams& p, CapMode mode = CapMode::kStrict);

}  // namespace hetcache
