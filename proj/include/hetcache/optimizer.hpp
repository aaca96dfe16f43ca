#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "hetcache/capacity.hpp"
#include "hetcache/popularity.hpp"
#include "hetcache/rates.hpp"

namespace hetcache {

enum class Regime {
  kUnconstrainedBackhaul,
  kBudgetBelowCmin,
  kBudgetMid,
  kBudgetAboveCmax,
  kGridOnly,
};

enum class BackhaulClass {
  kIdealMbhUnconstrainedSbh,
  kIdealMbhConstrainedSbh,
  kNonIdealMbh,
};

std::string_view to_string(Regime regime);
std::string_view to_string(BackhaulClass cls);

/// Base station densities per km².
struct Densities {
  double mbs = 0.0;
  double sbs = 0.0;

  static Densities of(const NetworkParams& p) { return {p.mbs_density(), p.sbs_density}; }
};

/// Cache budget thresholds in files/km². c_max is +inf when the catalog tail
/// cannot absorb the MBS share (see solve_analytic).
struct Thresholds {
  double c_min = 0.0;
  double c_max = 0.0;
};

struct OptimalPlan {
  Regime regime = Regime::kGridOnly;
  double budget = 0.0;
  double sbs_cache = 0.0;
  double mbs_cache = 0.0;
  double steering = 0.0;
  double mu = 0.0;
  HitRates hits;
  CapacityBreakdown breakdown;
  std::optional<Thresholds> thresholds;

  /// Share of the budget spent at SBSs, ρ_s·C_s/C; NaN when C = 0.
  double xi_c(double sbs_density) const;
};

struct GridSize {
  int cs_points = 200;
  int phi_points = 200;
};

struct GridPoint {
  double sbs_cache = 0.0;
  double mbs_cache = 0.0;
  double steering = 0.0;
  double mu = 0.0;
  double total_hit = 0.0;
};

BackhaulClass classify_regime(const LoadCaps& caps);

/// Capacity on the lattice C_s ∈ [0, min(C/ρ_s, F)] × φ ∈ [0, 1], row-major
/// in C_s.
std::vector<GridPoint> grid_surface(const LoadCaps& caps, const Densities& rho,
                                    const PopularityModel& model, double budget, GridSize grid);

/// Exhaustive search. Ties (relative 1e-12 in μ) go to larger total hit,
/// then smaller C_s, then smaller φ.
OptimalPlan grid_search(const LoadCaps& caps, const Densities& rho, const PopularityModel& model,
                        double budget, GridSize grid = {});
OptimalPlan grid_search(const NetworkParams& p, const PopularityModel& model, double budget,
                        GridSize grid = {});

/// C_min = ρ_s·H⁻¹((λ̂_SR − λ̂_SBH)/(λ̂_MR + λ̂_SR)); 0 when λ̂_SBH ≥ λ̂_SR.
/// Throws RegimeError when λ̂_MR > λ̂_MBH.
double min_cache_budget(const LoadCaps& caps, const Densities& rho, const PopularityModel& model);

/// Throws RegimeError unless λ̂_MR ≤ λ̂_MBH and λ̂_SR ≥ λ̂_SBH, and
/// CatalogTooSmall when the tail popularity after C_min/ρ_s is below
/// λ̂_MR/(λ̂_MR+λ̂_SR).
Thresholds thresholds(const LoadCaps& caps, const Densities& rho, const PopularityModel& model);
Thresholds thresholds(const NetworkParams& p, const PopularityModel& model);

/// Threshold-based optimum for ideal MBS backhaul. Throws RegimeError when
/// λ̂_MR > λ̂_MBH.
OptimalPlan solve_analytic(const LoadCaps& caps, const Densities& rho, const PopularityModel& model,
                           double budget);
OptimalPlan solve_analytic(const NetworkParams& p, const PopularityModel& model, double budget);

/// solve_analytic, or grid_search when the analytic regime does not apply.
OptimalPlan solve(const LoadCaps& caps, const Densities& rho, const PopularityModel& model,
                  double budget, GridSize grid = {});

}  // namespace hetcache
