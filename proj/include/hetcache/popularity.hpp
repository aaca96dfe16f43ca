#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hetcache {

/// Zipf file popularity over a catalog sorted by descending popularity.
///
/// Cache sizes are continuous: `cumulative(x)` interpolates linearly inside
/// file ⌊x⌋+1, which reads as caching that file with probability x − ⌊x⌋.
class PopularityModel {
 public:
  /// q_f ∝ f^{-skewness}, f = 1..files. Throws InvalidParameter on files = 0
  /// or negative skewness.
  static PopularityModel zipf(std::size_t files, double skewness);

  std::size_t file_count() const { return probabilities_.size(); }
  double skewness() const { return skewness_; }
  std::span<const double> probabilities() const { return probabilities_; }

  /// H(x): popularity mass of the first x files, x ∈ [0, F].
  double cumulative(double x) const;

  /// Smallest x with H(x) = mass, mass ∈ [0, 1].
  double inverse_cumulative(double mass) const;

 private:
  PopularityModel(std::vector<double> probabilities, std::vector<double> prefix,
                  double skewness);

  std::vector<double> probabilities_;
  // prefix_[k] = q_1 + ... + q_k, prefix_[0] = 0, prefix_[F] = 1 exactly.
  std::vector<double> prefix_;
  double skewness_ = 0.0;
};

PopularityModel build_zipf(std::size_t files, double skewness);

double cumulative_popularity(const PopularityModel& model, double x);

/// Hierarchical cache split. Budget in files/km², cache sizes in files per
/// base station, steering is the share of content-miss users sent to SBSs.
struct CacheAllocation {
  double budget = 0.0;
  double sbs_cache = 0.0;
  double mbs_cache = 0.0;
  double steering = 0.0;

  /// Spends `budget` with `sbs_cache` files per SBS and the rest at MBSs.
  /// The MBS share is truncated at the catalog end (F − sbs_cache), in which
  /// case the spent budget falls short of `budget`.
  static CacheAllocation from_budget(double budget, double sbs_cache, double steering,
                                     double mbs_density, double sbs_density,
                                     std::size_t files);

  /// Budget actually spent: ρ_m·C_m + ρ_s·C_s.
  double spent(double mbs_density, double sbs_density) const {
    return mbs_density * mbs_cache + sbs_density * sbs_cache;
  }
};

struct HitRates {
  double sbs = 0.0;
  double mbs = 0.0;
  double total = 0.0;
};

/// SBSs hold the C_s most popular files, MBSs the next C_m. Throws
/// DomainError if C_s + C_m exceeds the catalog or either size is negative.
HitRates hit_rates(const PopularityModel& model, double sbs_cache, double mbs_cache);

HitRates hit_rates(const PopularityModel& model, const CacheAllocation& alloc);

}  // namespace hetcache
