#include "hetcache/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetcache/error.hpp"

namespace hetcache {

namespace {

// Slack for sizes computed from budgets, e.g. C_s + (C − ρ_s C_s)/ρ_m = F.
constexpr double kCatalogSlack = 1e-9;

}  // namespace

PopularityModel::PopularityModel(std::vector<double> probabilities, std::vector<double> prefix,
                                 double skewness)
    : probabilities_(std::move(probabilities)), prefix_(std::move(prefix)), skewness_(skewness) {}

PopularityModel PopularityModel::zipf(std::size_t files, double skewness) {
  if (files == 0) {
    throw InvalidParameter("catalog must hold at least one file");
  }
  if (!(skewness >= 0.0) || !std::isfinite(skewness)) {
    throw InvalidParameter("Zipf skewness must be a finite nonnegative number");
  }
  std::vector<double> weights(files);
  for (std::size_t f = 0; f < files; ++f) {
    weights[f] = std::pow(static_cast<double>(f + 1), -skewness);
  }
  // Running sums of the unnormalized weights; dividing by the last one makes
  // prefix[F] exactly 1.
  std::vector<double> prefix(files + 1, 0.0);
  for (std::size_t f = 0; f < files; ++f) {
    prefix[f + 1] = prefix[f] + weights[f];
  }
  const double total = prefix[files];
  std::vector<double> probabilities(files);
  for (std::size_t f = 0; f < files; ++f) {
    probabilities[f] = weights[f] / total;
    prefix[f + 1] /= total;
  }
  return PopularityModel(std::move(probabilities), std::move(prefix), skewness);
}

double PopularityModel::cumulative(double x) const {
  const double files = static_cast<double>(file_count());
  if (!(x >= 0.0) || x > files * (1.0 + kCatalogSlack)) {
    throw DomainError("cache size " + std::to_string(x) + " outside [0, " +
                      std::to_string(file_count()) + "]");
  }
  if (x >= files) {
    return 1.0;
  }
  const auto whole = static_cast<std::size_t>(std::floor(x));
  const double frac = x - static_cast<double>(whole);
  return prefix_[whole] + frac * probabilities_[whole];
}

double PopularityModel::inverse_cumulative(double mass) const {
  if (!(mass >= 0.0) || mass > 1.0 + 1e-12) {
    throw DomainError("popularity mass " + std::to_string(mass) + " outside [0, 1]");
  }
  if (mass <= 0.0) {
    return 0.0;
  }
  if (mass >= 1.0) {
    return static_cast<double>(file_count());
  }
  // First k with prefix[k] >= mass; the answer lies inside file k.
  const auto it = std::lower_bound(prefix_.begin(), prefix_.end(), mass);
  const auto k = static_cast<std::size_t>(it - prefix_.begin());
  const double below = prefix_[k - 1];
  const double frac = (mass - below) / probabilities_[k - 1];
  return static_cast<double>(k - 1) + std::clamp(frac, 0.0, 1.0);
}

PopularityModel build_zipf(std::size_t files, double skewness) {
  return PopularityModel::zipf(files, skewness);
}

double cumulative_popularity(const PopularityModel& model, double x) { return model.cumulative(x); }

CacheAllocation CacheAllocation::from_budget(double budget, double sbs_cache, double steering,
                                             double mbs_density, double sbs_density,
                                             std::size_t files) {
  if (!(budget >= 0.0) || !(sbs_cache >= 0.0)) {
    throw DomainError("cache budget and SBS cache size must be nonnegative");
  }
  if (!(mbs_density > 0.0) || !(sbs_density > 0.0)) {
    throw InvalidParameter("base station densities must be positive");
  }
  if (!(steering >= 0.0 && steering <= 1.0)) {
    throw DomainError("steering ratio must lie in [0, 1]");
  }
  const double catalog = static_cast<double>(files);
  if (sbs_cache > catalog * (1.0 + kCatalogSlack) ||
      sbs_density * sbs_cache > budget * (1.0 + kCatalogSlack)) {
    throw DomainError("SBS cache size exceeds the catalog or the budget");
  }
  sbs_cache = std::min(sbs_cache, std::min(catalog, budget / sbs_density));
  const double mbs_cache =
      std::min(std::max(0.0, (budget - sbs_density * sbs_cache) / mbs_density), catalog - sbs_cache);
  return CacheAllocation{budget, sbs_cache, mbs_cache, steering};
}

HitRates hit_rates(const PopularityModel& model, double sbs_cache, double mbs_cache) {
  if (!(sbs_cache >= 0.0) || !(mbs_cache >= 0.0)) {
    throw DomainError("cache sizes must be nonnegative");
  }
  const double catalog = static_cast<double>(model.file_count());
  const double combined = sbs_cache + mbs_cache;
  if (combined > catalog * (1.0 + kCatalogSlack)) {
    throw DomainError("C_s + C_m = " + std::to_string(combined) + " exceeds the catalog of " +
                      std::to_string(model.file_count()) + " files");
  }
  const double sbs = model.cumulative(std::min(sbs_cache, catalog));
  const double total = model.cumulative(std::min(combined, catalog));
  return HitRates{sbs, total - sbs, total};
}

HitRates hit_rates(const PopularityModel& model, const CacheAllocation& alloc) {
  return hit_rates(model, alloc.sbs_cache, alloc.mbs_cache);
}

}  // namespace hetcache
