#include "hetcache/numeric.hpp"

#include <vector>

#include "hetcache/error.hpp"

namespace hetcache {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanEstimate mean_and_stderr(std::span<const double> samples) {
  if (samples.empty()) {
    throw DomainError("mean of an empty sample");
  }
  const double n = static_cast<double>(samples.size());
  const double mean = pairwise_sum(samples) / n;
  if (samples.size() == 1) {
    return {mean, 0.0};
  }
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = samples[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

std::string_view to_string(Part part) {
  switch (part) {
    case Part::MR:
      return "MR";
    case Part::MBH:
      return "MBH";
    case Part::SR:
      return "SR";
    case Part::SBH:
      return "SBH";
  }
  return "?";
}

}  // namespace hetcache
