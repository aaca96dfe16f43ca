#pragma once

#include <optional>
#include <vector>

#include "hetcache/capacity.hpp"
#include "hetcache/optimizer.hpp"
#include "hetcache/popularity.hpp"
#include "hetcache/rates.hpp"

namespace hetcache {

/// Per-km² deployment cost in units of one SBS's equipment cost. Backhaul
/// capacity enters the cost in kbit/s.
struct CostModel {
  double k_bh = 0.001;
  double zeta_bh = 0.5;
  double k_c = 0.1;
  double zeta_c = 0.5;
  double budget = 100.0;

  void validate() const;

  /// ρ_s·(1 + K_BH·U^ζ_BH), U in kbit/s.
  double backhaul_cost(double sbs_density, double sbs_backhaul_bps) const;
  /// ρ_s·(1 + K_C·C_s^ζ_C).
  double caching_cost(double sbs_density, double sbs_cache) const;

  /// SBS backhaul capacity (bit/s) that spends the budget exactly; nullopt if
  /// the SBSs alone exceed it, +inf if K_BH = 0.
  std::optional<double> affordable_backhaul(double sbs_density) const;
  /// SBS cache size that spends the budget exactly; same conventions.
  std::optional<double> affordable_cache(double sbs_density) const;
};

/// C_min for the given SBS backhaul capacity; 0 when the SBS backhaul is not
/// constrained. Backhaul below the requirement counts as no backhaul.
double required_cache_budget(const NetworkParams& p, const PopularityModel& model,
                             double sbs_backhaul_bps);

struct DensityPoint {
  double sbs_density = 0.0;
  double control = 0.0;  // affordable U_SBH (bit/s) or C_s (files)
  bool feasible = false;
  double mu = 0.0;
};

struct DensityCurve {
  std::vector<DensityPoint> points;
  std::size_t best = 0;
  /// Feasible μ values rise (weakly) then fall (weakly) along the grid.
  bool unimodal = false;
  /// The maximiser is neither the first nor the last feasible point.
  bool interior = false;
};

/// 40 log-spaced densities from 20 to 200 per km².
std::vector<double> default_density_grid();

DensityCurve optimize_sbs_density_backhaul(const NetworkParams& p_base, const PopularityModel& model,
                                           const CostModel& cost, double cache_budget,
                                           const std::vector<double>& density_grid);

/// SBSs without backhaul: misses go to MBSs (φ = 0), μ = min(μ_MR, μ_MBH, μ_SR).
CapacityBreakdown caching_station_capacity(const NetworkParams& p, const PopularityModel& model,
                                           double sbs_cache);

DensityCurve optimize_sbs_density_caching_station(const NetworkParams& p_base,
                                                  const PopularityModel& model,
                                                  const CostModel& cost,
                                                  const std::vector<double>& density_grid);

struct Calibration {
  double sbs_backhaul_bps = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
};

/// SBS backhaul capacity at which (C_min + C_max)/2 equals `target_mid`.
Calibration calibrate_sbs_backhaul(const NetworkParams& p_base, const PopularityModel& model,
                                   double target_mid = 900.0);

}  // namespace hetcache
