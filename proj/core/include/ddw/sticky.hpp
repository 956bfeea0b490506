#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ddw/stats.hpp"

namespace ddw {

inline constexpr std::int64_t infinite_holding = std::numeric_limits<std::int64_t>::max();

/// A pair of sticky walks at unit scale. holding_times[i] is the number of
/// joint steps after the i-th meeting; P(T >= k) = exp(-theta k) on {0, 1, ...}.
struct StickyPairSample {
  double theta = 0.0;
  std::int64_t horizon = 0;
  std::vector<std::int8_t> walk1;
  std::vector<std::int8_t> walk2;
  std::vector<std::int64_t> holding_times;  ///< infinite_holding when theta == 0

  std::pair<std::int64_t, std::int64_t> endpoint() const;
};

/// Interleaves stuck stretches driven by a shared walk S3 with free stretches
/// in which independent walks S1, S2 run until they re-meet.
StickyPairSample sticky_pair(double theta, std::int64_t horizon, std::uint64_t seed);

struct PairLaw {
  std::int64_t t = 0;
  std::map<std::pair<std::int64_t, std::int64_t>, double> table;

  double total() const;
};

inline constexpr std::int64_t exact_pair_law_max_t = 12;

/// Exact law of the pair at time t, both walks started at 0.
PairLaw exact_pair_law(double theta, std::int64_t t);

using PairSamples = std::vector<std::pair<std::int64_t, std::int64_t>>;

struct PairDistance {
  double tv = 0.0;
  /// 95% bootstrap quantile of the resampled-vs-empirical distance.
  double radius = 0.0;
  std::size_t samples = 0;
};

PairDistance pair_distance(const PairSamples& samples, const PairLaw& law, std::uint64_t seed = 1,
                           int bootstrap = 200);

}  // namespace ddw
