#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hetcache/capacity.hpp"
#include "hetcache/numeric.hpp"
#include "hetcache/popularity.hpp"
#include "hetcache/rates.hpp"

namespace hetcache {

enum class InterferenceMode {
  kMeanField,  // interference := θσ², desired-link fading := its mean
  kSampled,    // Rayleigh fading on the desired and every co-tier interfering link
};

enum class SbsLoadCell {
  kTypical,  // load counted in the Voronoi cell of a uniformly chosen SBS
  kProbe,    // load counted in the cell of the probe's serving SBS
};

struct SimConfig {
  double window_km = 3.0;
  int trials = 10000;
  std::uint64_t seed = 1;
  double mbs_fraction = 0.15;
  InterferenceMode interference = InterferenceMode::kMeanField;
  SbsLoadCell sbs_load_cell = SbsLoadCell::kTypical;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Periodic window matching the hexagonal MBS lattice: nx columns of pitch
/// √3·D_m by ny double rows of height 3·D_m, so the lattice tiles the torus.
class TorusWindow {
 public:
  TorusWindow(double window_km, double mbs_side_km);

  double width() const { return width_; }
  double height() const { return height_; }
  double area() const { return width_ * height_; }
  double mbs_side() const { return side_; }

  /// Hex lattice sites, 2·nx·ny of them.
  std::vector<Point> mbs_sites() const;

  /// Shortest displacement from `from` to `to` on the torus.
  Point displacement(Point from, Point to) const;

  Point wrap(Point p) const;

 private:
  double side_;
  int nx_;
  int ny_;
  double width_;
  double height_;
};

/// Voronoi cell of sites[index] on the torus, counter-clockwise vertices in
/// displacement coordinates relative to the site.
std::vector<Point> voronoi_cell(const TorusWindow& window, std::span<const Point> sites,
                                std::size_t index);

double polygon_area(std::span<const Point> polygon);

/// Convex polygon with counter-clockwise vertices.
bool polygon_contains(std::span<const Point> polygon, Point p);

/// Hexagonal MBS cell of side `side` centred at the origin (pointy top).
bool hex_contains(double side, Point p);

enum class Tier { kMbs, kSbs };

struct UserRecord {
  Point position;
  Tier tier = Tier::kMbs;
  int serving = -1;
  double fading = 1.0;  // serving-link power gain
};

struct Realization {
  std::vector<Point> mbs_sites;
  std::vector<Point> sbs_sites;
  std::vector<UserRecord> users;
};

/// Full realization of one trial: hex MBSs, PPP SBSs, PPP users of density
/// `load`; each user joins the MBS tier with probability mbs_fraction and
/// attaches to the nearest site of its tier.
Realization sample_realization(const NetworkParams& p, double load, const SimConfig& cfg,
                               std::uint64_t trial);

/// CSV columns entity_type,x_km,y_km,serving_index.
void write_realization_csv(std::ostream& out, const Realization& r);

struct EmpiricalRates {
  MeanEstimate mr;
  MeanEstimate mbh;
  MeanEstimate sr;
  MeanEstimate sbh;

  const MeanEstimate& get(Part part) const;
};

/// Mean rates (bit/s) seen by a probe user at a uniform location, one probe
/// per trial, for per-part user densities `loads`.
EmpiricalRates empirical_rates(const NetworkParams& p, const TierLoadProfile& loads,
                               const SimConfig& cfg);

struct EmpiricalCapacity {
  double mu = 0.0;
  bool unbounded = false;  // every tested density met the requirements
};

/// Largest total density (1% relative) at which the empirical mean rate of
/// every loaded part meets its requirement. The same seeds are reused at each
/// density. Throws InfeasiblePart when a part fails even at zero load.
EmpiricalCapacity empirical_capacity(const NetworkParams& p, const PopularityModel& model,
                                     const CacheAllocation& alloc, const SimConfig& cfg);

}  // namespace hetcache
