#include "ddw/web.hpp"

#include <algorithm>

namespace ddw {

bool boundary_survival(const LatticePath& path, double k, double K) {
  detail::require(path.direction == PathDirection::forward, "boundary_survival: needs a forward path");
  std::int64_t x = path.start_i;
  if (static_cast<double>(x) < -k) return false;
  for (std::size_t n = 0; n < path.steps.size(); ++n) {
    x += path.steps[n];
    if (static_cast<double>(x) < -k - K * std::sqrt(static_cast<double>(n + 1))) return false;
  }
  return true;
}

std::int64_t count_crossings(const LatticePath& forward, const LatticePath& dual) {
  detail::require(forward.direction == PathDirection::forward && dual.direction == PathDirection::backward,
                  "count_crossings: needs one forward and one dual path");
  const auto fpos = forward.positions();
  const auto dpos = dual.positions();
  // Levels covered by both paths.
  const std::int64_t lo = std::max(forward.start_j, dual.level(dual.length()));
  const std::int64_t hi = std::min(forward.level(forward.length()), dual.start_j);
  if (hi - lo < 1) return 0;
  auto f_at = [&](std::int64_t level) { return fpos[static_cast<std::size_t>(level - forward.start_j)]; };
  auto d_at = [&](std::int64_t level) { return dpos[static_cast<std::size_t>(dual.start_j - level)]; };
  std::int64_t crossings = 0;
  for (std::int64_t level = lo; level < hi; ++level) {
    const bool left_before = f_at(level) < d_at(level);
    const bool left_after = f_at(level + 1) < d_at(level + 1);
    if (left_before != left_after) ++crossings;
  }
  return crossings;
}

}  // namespace ddw
