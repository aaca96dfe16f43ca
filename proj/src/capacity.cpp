#include "hetcache/capacity.hpp"

#include <array>
#include <cmath>

#include "hetcache/numeric.hpp"

namespace hetcache {

namespace {

void check_hits(const HitRates& hits) {
  const bool ok = hits.sbs >= 0.0 && hits.mbs >= 0.0 && hits.total <= 1.0 + 1e-12 &&
                  std::abs(hits.sbs + hits.mbs - hits.total) <= 1e-12;
  if (!ok) {
    throw DomainError("hit rates must be nonnegative with sbs + mbs = total <= 1");
  }
}

void check_steering(double steering) {
  if (!(steering >= 0.0 && steering <= 1.0)) {
    throw DomainError("steering ratio must lie in [0, 1]");
  }
}

struct Coefficients {
  double mr, mbh, sr, sbh;
};

Coefficients coefficients(const HitRates& hits, double steering) {
  const double miss = std::max(0.0, 1.0 - hits.total);
  return {hits.mbs + miss * (1.0 - steering), miss * (1.0 - steering), hits.sbs + miss * steering,
          miss * steering};
}

double part_capacity(double cap, double coefficient) {
  if (coefficient <= 0.0) {
    return kUnbounded;
  }
  return cap / coefficient;
}

}  // namespace

TierLoadProfile load_profile(const HitRates& hits, double steering, double load) {
  check_hits(hits);
  check_steering(steering);
  if (!(load >= 0.0)) {
    throw DomainError("user density must be nonnegative");
  }
  const Coefficients c = coefficients(hits, steering);
  return {c.mr * load, c.mbh * load, c.sr * load, c.sbh * load};
}

double CapacityBreakdown::get(Part part) const {
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

CapacityBreakdown capacity(const LoadCaps& caps, const HitRates& hits, double steering) {
  check_hits(hits);
  check_steering(steering);
  const Coefficients c = coefficients(hits, steering);
  CapacityBreakdown out;
  out.mr = part_capacity(caps.mr, c.mr);
  out.mbh = part_capacity(caps.mbh, c.mbh);
  out.sr = part_capacity(caps.sr, c.sr);
  out.sbh = part_capacity(caps.sbh, c.sbh);

  const std::array<Part, 4> order{Part::MR, Part::MBH, Part::SR, Part::SBH};
  out.mu = kUnbounded;
  for (Part part : order) {
    const double v = out.get(part);
    if (v < out.mu) {
      out.mu = v;
      out.bottleneck = part;
    }
  }
  if (is_unbounded(out.mu)) {
    throw DomainError("every part is unconstrained; capacity is undefined");
  }
  return out;
}

}  // namespace hetcache
