#include "hetcache/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hetcache/numeric.hpp"
#include "hetcache/parallel.hpp"

namespace hetcache {

namespace {

constexpr double kMuTieTolerance = 1e-12;

void check_budget(double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw DomainError("cache budget must be finite and nonnegative");
  }
}

void check_densities(const Densities& rho) {
  if (!(rho.mbs > 0.0) || !(rho.sbs > 0.0)) {
    throw InvalidParameter("base station densities must be positive");
  }
}

std::string fmt(double v) { return std::to_string(v); }

// Is `a` preferred over `b`?
bool better(const GridPoint& a, const GridPoint& b) {
  const double scale = std::max(std::abs(a.mu), std::abs(b.mu));
  if (a.mu > b.mu + kMuTieTolerance * scale) {
    return true;
  }
  if (a.mu < b.mu - kMuTieTolerance * scale) {
    return false;
  }
  if (a.total_hit != b.total_hit) {
    return a.total_hit > b.total_hit;
  }
  if (a.sbs_cache != b.sbs_cache) {
    return a.sbs_cache < b.sbs_cache;
  }
  return a.steering < b.steering;
}

double cs_upper(const Densities& rho, const PopularityModel& model, double budget) {
  return std::min(budget / rho.sbs, static_cast<double>(model.file_count()));
}

OptimalPlan make_plan(Regime regime, const LoadCaps& caps, const Densities& rho,
                      const PopularityModel& model, double budget, double sbs_cache,
                      double steering, double mu) {
  const CacheAllocation alloc = CacheAllocation::from_budget(
      budget, sbs_cache, std::clamp(steering, 0.0, 1.0), rho.mbs, rho.sbs, model.file_count());
  OptimalPlan plan;
  plan.regime = regime;
  plan.budget = budget;
  plan.sbs_cache = alloc.sbs_cache;
  plan.mbs_cache = alloc.mbs_cache;
  plan.steering = alloc.steering;
  plan.hits = hit_rates(model, alloc);
  plan.breakdown = capacity(caps, plan.hits, plan.steering);
  plan.mu = mu;
  return plan;
}

// φ = 1 plan on the budget line with P_Hit^(m) = share, C_s ≥ cs_floor.
double solve_mbs_share(const Densities& rho, const PopularityModel& model, double budget,
                       double share, double cs_floor) {
  const double files = static_cast<double>(model.file_count());
  const double hi = cs_upper(rho, model, budget);
  auto excess = [&](double cs) {
    const double cm = std::min(std::max(0.0, (budget - rho.sbs * cs) / rho.mbs), files - cs);
    return model.cumulative(std::min(cs + cm, files)) - model.cumulative(cs) - share;
  };
  if (excess(cs_floor) <= 0.0) {
    return cs_floor;
  }
  return bisect_decreasing(excess, cs_floor, hi, 1e-14);
}

struct RawThresholds {
  double c_min;
  double c_max;  // +inf when the catalog tail is too small
  double x_s;
};

RawThresholds raw_thresholds(const LoadCaps& caps, const Densities& rho,
                             const PopularityModel& model) {
  if (caps.mr > caps.mbh) {
    throw RegimeError("MBS backhaul is not ideal: lambda_MR = " + fmt(caps.mr) +
                      " > lambda_MBH = " + fmt(caps.mbh));
  }
  if (caps.sr < caps.sbh) {
    throw RegimeError("SBS backhaul is not constrained: lambda_SR = " + fmt(caps.sr) +
                      " < lambda_SBH = " + fmt(caps.sbh));
  }
  const double sum = caps.mr + caps.sr;
  const double x_s = model.inverse_cumulative((caps.sr - caps.sbh) / sum);
  const double share = caps.mr / sum;
  const double top = model.cumulative(x_s) + share;
  RawThresholds out{rho.sbs * x_s, std::numeric_limits<double>::infinity(), x_s};
  if (top <= 1.0 + 1e-12) {
    const double x_m = model.inverse_cumulative(std::min(top, 1.0)) - x_s;
    out.c_max = out.c_min + rho.mbs * x_m;
  }
  return out;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kUnconstrainedBackhaul:
      return "UNCONSTRAINED_BACKHAUL";
    case Regime::kBudgetBelowCmin:
      return "BUDGET_BELOW_CMIN";
    case Regime::kBudgetMid:
      return "BUDGET_MID";
    case Regime::kBudgetAboveCmax:
      return "BUDGET_ABOVE_CMAX";
    case Regime::kGridOnly:
      return "GRID_ONLY";
  }
  return "?";
}

std::string_view to_string(BackhaulClass cls) {
  switch (cls) {
    case BackhaulClass::kIdealMbhUnconstrainedSbh:
      return "IDEAL_MBH_UNCONSTRAINED_SBH";
    case BackhaulClass::kIdealMbhConstrainedSbh:
      return "IDEAL_MBH_CONSTRAINED_SBH";
    case BackhaulClass::kNonIdealMbh:
      return "NON_IDEAL_MBH";
  }
  return "?";
}

double OptimalPlan::xi_c(double sbs_density) const {
  if (budget <= 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::min(1.0, sbs_density * sbs_cache / budget);
}

BackhaulClass classify_regime(const LoadCaps& caps) {
  if (caps.mr > caps.mbh) {
    return BackhaulClass::kNonIdealMbh;
  }
  if (caps.sr <= caps.sbh) {
    return BackhaulClass::kIdealMbhUnconstrainedSbh;
  }
  return BackhaulClass::kIdealMbhConstrainedSbh;
}

std::vector<GridPoint> grid_surface(const LoadCaps& caps, const Densities& rho,
                                    const PopularityModel& model, double budget, GridSize grid) {
  check_budget(budget);
  check_densities(rho);
  if (grid.cs_points < 2 || grid.phi_points < 2) {
    throw InvalidParameter("grid sizes must be at least 2");
  }
  const auto n_cs = static_cast<std::size_t>(grid.cs_points);
  const auto n_phi = static_cast<std::size_t>(grid.phi_points);
  const double cs_max = cs_upper(rho, model, budget);
  std::vector<GridPoint> out(n_cs * n_phi);

  parallel_for(n_cs, [&](std::size_t i) {
    const double cs = i + 1 == n_cs ? cs_max : cs_max * static_cast<double>(i) / (n_cs - 1);
    const CacheAllocation alloc =
        CacheAllocation::from_budget(budget, cs, 0.0, rho.mbs, rho.sbs, model.file_count());
    const HitRates hits = hit_rates(model, alloc);
    for (std::size_t j = 0; j < n_phi; ++j) {
      const double phi = j + 1 == n_phi ? 1.0 : static_cast<double>(j) / (n_phi - 1);
      const CapacityBreakdown b = capacity(caps, hits, phi);
      out[i * n_phi + j] = GridPoint{alloc.sbs_cache, alloc.mbs_cache, phi, b.mu, hits.total};
    }
  });
  return out;
}

OptimalPlan grid_search(const LoadCaps& caps, const Densities& rho, const PopularityModel& model,
                        double budget, GridSize grid) {
  const std::vector<GridPoint> surface = grid_surface(caps, rho, model, budget, grid);
  const GridPoint* best = &surface.front();
  for (const GridPoint& pt : surface) {
    if (better(pt, *best)) {
      best = &pt;
    }
  }
  OptimalPlan plan = make_plan(Regime::kGridOnly, caps, rho, model, budget, best->sbs_cache,
                               best->steering, best->mu);
  plan.mbs_cache = best->mbs_cache;
  return plan;
}

OptimalPlan grid_search(const NetworkParams& p, const PopularityModel& model, double budget,
                        GridSize grid) {
  return grid_search(cap_loads(p), Densities::of(p), model, budget, grid);
}

Thresholds thresholds(const LoadCaps& caps, const Densities& rho, const PopularityModel& model) {
  check_densities(rho);
  const RawThresholds raw = raw_thresholds(caps, rho, model);
  if (std::isinf(raw.c_max)) {
    throw CatalogTooSmall("catalog tail beyond C_min/rho_s holds " +
                          fmt(1.0 - model.cumulative(raw.x_s)) + " popularity, need " +
                          fmt(caps.mr / (caps.mr + caps.sr)));
  }
  return {raw.c_min, raw.c_max};
}

Thresholds thresholds(const NetworkParams& p, const PopularityModel& model) {
  return thresholds(cap_loads(p), Densities::of(p), model);
}

double min_cache_budget(const LoadCaps& caps, const Densities& rho, const PopularityModel& model) {
  check_densities(rho);
  if (caps.mr > caps.mbh) {
    throw RegimeError("MBS backhaul is not ideal: lambda_MR = " + fmt(caps.mr) +
                      " > lambda_MBH = " + fmt(caps.mbh));
  }
  if (caps.sbh >= caps.sr) {
    return 0.0;
  }
  return raw_thresholds(caps, rho, model).c_min;
}

OptimalPlan solve_analytic(const LoadCaps& caps, const Densities& rho, const PopularityModel& model,
                           double budget) {
  check_budget(budget);
  check_densities(rho);
  const double sum = caps.mr + caps.sr;
  const double share = caps.mr / sum;
  const double files = static_cast<double>(model.file_count());

  switch (classify_regime(caps)) {
    case BackhaulClass::kNonIdealMbh:
      throw RegimeError("no analytic optimum: MBS backhaul is not ideal (lambda_MR = " +
                        fmt(caps.mr) + " > lambda_MBH = " + fmt(caps.mbh) + ")");

    case BackhaulClass::kIdealMbhUnconstrainedSbh: {
      const double cm_all = std::min(budget / rho.mbs, files);
      const double p_m = model.cumulative(cm_all);
      if (p_m <= share) {
        const double miss = 1.0 - p_m;
        const double phi = miss > 0.0 ? 1.0 - (share - p_m) / miss : 1.0;
        return make_plan(Regime::kUnconstrainedBackhaul, caps, rho, model, budget, 0.0, phi, sum);
      }
      const double cs = solve_mbs_share(rho, model, budget, share, 0.0);
      return make_plan(Regime::kUnconstrainedBackhaul, caps, rho, model, budget, cs, 1.0, sum);
    }

    case BackhaulClass::kIdealMbhConstrainedSbh:
      break;
  }

  const RawThresholds raw = raw_thresholds(caps, rho, model);
  OptimalPlan plan;
  if (budget < raw.c_min) {
    const double cs = budget / rho.sbs;
    const double miss = 1.0 - model.cumulative(cs);
    const double phi = caps.sbh / (caps.mr + caps.sbh);
    plan = make_plan(Regime::kBudgetBelowCmin, caps, rho, model, budget, cs, phi,
                     (caps.mr + caps.sbh) / miss);
  } else if (budget < raw.c_max) {
    const double cs = raw.x_s;
    const double cm = std::min((budget - raw.c_min) / rho.mbs, files - cs);
    const double miss = 1.0 - model.cumulative(std::min(cs + cm, files));
    const double phi = miss > 0.0 ? caps.sbh / (miss * sum) : 1.0;
    plan = make_plan(Regime::kBudgetMid, caps, rho, model, budget, cs, std::min(phi, 1.0), sum);
  } else {
    const double cs = solve_mbs_share(rho, model, budget, share, raw.x_s);
    plan = make_plan(Regime::kBudgetAboveCmax, caps, rho, model, budget, cs, 1.0, sum);
  }
  plan.thresholds = Thresholds{raw.c_min, raw.c_max};
  return plan;
}

OptimalPlan solve_analytic(const NetworkParams& p, const PopularityModel& model, double budget) {
  return solve_analytic(cap_loads(p), Densities::of(p), model, budget);
}

OptimalPlan solve(const LoadCaps& caps, const Densities& rho, const PopularityModel& model,
                  double budget, GridSize grid) {
  if (classify_regime(caps) == BackhaulClass::kNonIdealMbh) {
    return grid_search(caps, rho, model, budget, grid);
  }
  return solve_analytic(caps, rho, model, budget);
}

}  // namespace hetcache
