#include "hetcache/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetcache/numeric.hpp"

namespace hetcache {

namespace {

constexpr double kBpsPerKbps = 1e3;

void check_density(double sbs_density) {
  if (!(sbs_density > 0.0) || !std::isfinite(sbs_density)) {
    throw InvalidParameter("SBS density must be positive");
  }
}

// Solves ρ(1 + K·x^ζ) = budget for x.
std::optional<double> invert(double budget, double density, double k, double zeta) {
  check_density(density);
  if (budget < density) {
    return std::nullopt;
  }
  if (k == 0.0) {
    return kUnbounded;
  }
  return std::pow((budget / density - 1.0) / k, 1.0 / zeta);
}

void mark_shape(DensityCurve& curve) {
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].feasible) {
      feasible.push_back(i);
    }
  }
  if (feasible.empty()) {
    throw InfeasiblePart(Part::SBH, "cost budget is below the SBS equipment cost at every density");
  }
  curve.best = feasible.front();
  for (std::size_t i : feasible) {
    if (curve.points[i].mu > curve.points[curve.best].mu) {
      curve.best = i;
    }
  }
  curve.interior = curve.best != feasible.front() && curve.best != feasible.back();

  bool falling = false;
  curve.unimodal = true;
  for (std::size_t k = 1; k < feasible.size(); ++k) {
    const double prev = curve.points[feasible[k - 1]].mu;
    const double cur = curve.points[feasible[k]].mu;
    const double tol = 1e-9 * std::max(std::abs(prev), std::abs(cur));
    if (cur < prev - tol) {
      falling = true;
    } else if (cur > prev + tol && falling) {
      curve.unimodal = false;
    }
  }
}

}  // namespace

void CostModel::validate() const {
  if (!(k_bh >= 0.0 && k_c >= 0.0 && std::isfinite(k_bh) && std::isfinite(k_c))) {
    throw InvalidParameter("cost coefficients must be finite and nonnegative");
  }
  if (!(zeta_bh > 0.0 && zeta_bh <= 2.0 && zeta_c > 0.0 && zeta_c <= 2.0)) {
    throw InvalidParameter("cost exponents must lie in (0, 2]");
  }
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw InvalidParameter("cost budget must be positive");
  }
}

double CostModel::backhaul_cost(double sbs_density, double sbs_backhaul_bps) const {
  return sbs_density * (1.0 + k_bh * std::pow(sbs_backhaul_bps / kBpsPerKbps, zeta_bh));
}

double CostModel::caching_cost(double sbs_density, double sbs_cache) const {
  return sbs_density * (1.0 + k_c * std::pow(sbs_cache, zeta_c));
}

std::optional<double> CostModel::affordable_backhaul(double sbs_density) const {
  const auto kbps = invert(budget, sbs_density, k_bh, zeta_bh);
  if (!kbps) {
    return std::nullopt;
  }
  return *kbps * kBpsPerKbps;
}

std::optional<double> CostModel::affordable_cache(double sbs_density) const {
  return invert(budget, sbs_density, k_c, zeta_c);
}

double required_cache_budget(const NetworkParams& p, const PopularityModel& model,
                             double sbs_backhaul_bps) {
  if (!(sbs_backhaul_bps >= 0.0)) {
    throw InvalidParameter("SBS backhaul capacity must be nonnegative");
  }
  NetworkParams q = p;
  q.sbs_backhaul_bps = sbs_backhaul_bps;
  return min_cache_budget(cap_loads(q, CapMode::kLenient), Densities::of(q), model);
}

std::vector<double> default_density_grid() {
  constexpr int kPoints = 40;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = 20.0 * std::pow(10.0, static_cast<double>(i) / (kPoints - 1));
  }
  return grid;
}

DensityCurve optimize_sbs_density_backhaul(const NetworkParams& p_base, const PopularityModel& model,
                                           const CostModel& cost, double cache_budget,
                                           const std::vector<double>& density_grid) {
  cost.validate();
  if (density_grid.empty()) {
    throw InvalidParameter("density grid is empty");
  }
  DensityCurve curve;
  for (double rho_s : density_grid) {
    DensityPoint pt;
    pt.sbs_density = rho_s;
    const auto u = cost.affordable_backhaul(rho_s);
    if (u) {
      NetworkParams p = p_base;
      p.sbs_density = rho_s;
      p.sbs_backhaul_bps = *u;
      const LoadCaps caps = cap_loads(p, CapMode::kLenient);
      pt.control = *u;
      pt.feasible = true;
      pt.mu = solve(caps, Densities::of(p), model, cache_budget).mu;
    }
    curve.points.push_back(pt);
  }
  mark_shape(curve);
  return curve;
}

CapacityBreakdown caching_station_capacity(const NetworkParams& p, const PopularityModel& model,
                                           double sbs_cache) {
  NetworkParams q = p;
  q.sbs_backhaul_bps = kUnbounded;  // no SBS backhaul part to constrain
  const LoadCaps caps = cap_loads(q);
  const double cs = std::min(sbs_cache, static_cast<double>(model.file_count()));
  return capacity(caps, hit_rates(model, cs, 0.0), 0.0);
}

DensityCurve optimize_sbs_density_caching_station(const NetworkParams& p_base,
                                                  const PopularityModel& model,
                                                  const CostModel& cost,
                                                  const std::vector<double>& density_grid) {
  cost.validate();
  if (density_grid.empty()) {
    throw InvalidParameter("density grid is empty");
  }
  DensityCurve curve;
  for (double rho_s : density_grid) {
    DensityPoint pt;
    pt.sbs_density = rho_s;
    const auto cs = cost.affordable_cache(rho_s);
    if (cs) {
      NetworkParams p = p_base;
      p.sbs_density = rho_s;
      pt.control = std::min(*cs, static_cast<double>(model.file_count()));
      pt.feasible = true;
      pt.mu = caching_station_capacity(p, model, pt.control).mu;
    }
    curve.points.push_back(pt);
  }
  mark_shape(curve);
  return curve;
}

Calibration calibrate_sbs_backhaul(const NetworkParams& p_base, const PopularityModel& model,
                                   double target_mid) {
  const Densities rho = Densities::of(p_base);
  auto caps_at = [&](double u) {
    NetworkParams p = p_base;
    p.sbs_backhaul_bps = u;
    return cap_loads(p, CapMode::kLenient);
  };
  // Positive while the threshold midpoint is above the target.
  auto excess = [&](double u) {
    try {
      const Thresholds t = thresholds(caps_at(u), rho, model);
      return 0.5 * (t.c_min + t.c_max) - target_mid;
    } catch (const CatalogTooSmall&) {
      return 1.0;
    } catch (const RegimeError&) {
      if (classify_regime(caps_at(u)) == BackhaulClass::kNonIdealMbh) {
        throw;
      }
      return -1.0;
    }
  };
  double lo = p_base.rate_req_bh_bps;
  double hi = 2.0 * lo;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  if (excess(lo) < 0.0) {
    throw DomainError("threshold midpoint is below " + std::to_string(target_mid) +
                      " for every SBS backhaul capacity");
  }
  Calibration out;
  out.sbs_backhaul_bps = bisect_decreasing(excess, lo, hi, 1e-13);
  const Thresholds t = thresholds(caps_at(out.sbs_backhaul_bps), rho, model);
  out.c_min = t.c_min;
  out.c_max = t.c_max;
  return out;
}

}  // namespace hetcache
