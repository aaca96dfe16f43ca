#pragma once

#include "hetcache/error.hpp"
#include "hetcache/popularity.hpp"
#include "hetcache/rates.hpp"

namespace hetcache {

/// Equivalent user densities (per km²) carried by each part.
struct TierLoadProfile {
  double mr = 0.0;
  double mbh = 0.0;
  double sr = 0.0;
  double sbh = 0.0;
};

/// Splits a total density λ over the four parts for the given hit rates and
/// steering ratio φ.
TierLoadProfile load_profile(const HitRates& hits, double steering, double load);

struct CapacityBreakdown {
  double mr = 0.0;
  double mbh = 0.0;
  double sr = 0.0;
  double sbh = 0.0;
  double mu = 0.0;
  Part bottleneck = Part::MR;

  double get(Part part) const;
};

/// Per-part capacities λ̂/coefficient (kUnbounded where the coefficient is
/// zero) and their minimum. Ties go to the first part in MR, MBH, SR, SBH.
CapacityBreakdown capacity(const LoadCaps& caps, const HitRates& hits, double steering);

}  // namespace hetcache
