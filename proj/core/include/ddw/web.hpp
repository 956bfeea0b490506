#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ddw/arrow_field.hpp"
#include "ddw/error.hpp"
#include "ddw/lattice.hpp"

namespace ddw {

enum class PathDirection { forward, backward };

/// A path of the web at a fixed dynamical time, stored as its increments.
/// Forward paths go up in time level, dual paths go down.
struct LatticePath {
  std::int64_t start_i = 0;
  std::int64_t start_j = 0;
  double s = 0.0;
  PathDirection direction = PathDirection::forward;
  std::vector<std::int8_t> steps;

  std::size_t length() const noexcept { return steps.size(); }

  std::int64_t level(std::size_t n) const noexcept {
    const auto dn = static_cast<std::int64_t>(n);
    return direction == PathDirection::forward ? start_j + dn : start_j - dn;
  }

  std::vector<std::int64_t> positions() const {
    std::vector<std::int64_t> out(steps.size() + 1);
    out[0] = start_i;
    for (std::size_t n = 0; n < steps.size(); ++n) out[n + 1] = out[n] + steps[n];
    return out;
  }

  std::int64_t end_position() const noexcept {
    std::int64_t x = start_i;
    for (auto d : steps) x += d;
    return x;
  }
};

/// Follow the arrows from `start` for `t_horizon` levels.
template <ArrowSource F>
LatticePath forward_path(const F& field, SiteCoord start, double s, std::int64_t t_horizon) {
  require_even(start);
  detail::require(t_horizon >= 0, "forward_path: horizon must be nonnegative");
  LatticePath path{start.i, start.j, s, PathDirection::forward, {}};
  path.steps.resize(static_cast<std::size_t>(t_horizon));
  std::int64_t x = start.i;
  for (std::int64_t n = 0; n < t_horizon; ++n) {
    const int d = field.arrow_at(SiteCoord{x, start.j + n}, s);
    path.steps[static_cast<std::size_t>(n)] = static_cast<std::int8_t>(d);
    x += d;
  }
  return path;
}

/// Dual path from an odd-sublattice point: (i, j+1) steps to (i - xi_{i,j}, j).
/// The simulated range is levels >= 0, so start.j - t_back must be >= 0.
template <ArrowSource F>
LatticePath backward_path(const F& field, DualCoord start, double s, std::int64_t t_back) {
  require_odd(start);
  detail::require(t_back >= 0, "backward_path: t_back must be nonnegative");
  detail::require(start.j - t_back >= 0, "backward_path: path would leave the simulated range (levels >= 0)");
  LatticePath path{start.i, start.j, s, PathDirection::backward, {}};
  path.steps.resize(static_cast<std::size_t>(t_back));
  std::int64_t x = start.i;
  for (std::int64_t n = 0; n < t_back; ++n) {
    const std::int64_t below = start.j - n - 1;
    const int d = -field.arrow_at(SiteCoord{x, below}, s);
    path.steps[static_cast<std::size_t>(n)] = static_cast<std::int8_t>(d);
    x += d;
  }
  return path;
}

/// First time t <= horizon at which the forward paths from a and b share a
/// site, or nullopt.
template <ArrowSource F>
std::optional<std::int64_t> coalescence_time(const F& field, SiteCoord a, SiteCoord b, double s,
                                             std::int64_t horizon) {
  require_even(a);
  require_even(b);
  detail::require(a.j == b.j, "coalescence_time: start points must share a time level");
  detail::require(horizon >= 0, "coalescence_time: horizon must be nonnegative");
  std::int64_t xa = a.i, xb = b.i;
  for (std::int64_t t = 0;; ++t) {
    if (xa == xb) return t;
    if (t == horizon) return std::nullopt;
    xa += field.arrow_at(SiteCoord{xa, a.j + t}, s);
    xb += field.arrow_at(SiteCoord{xb, a.j + t}, s);
  }
}

struct RecurrenceHits {
  std::optional<std::int64_t> hit_left;
  std::optional<std::int64_t> hit_right;
  /// Set when tracking stopped because the path climbed `escape_margin`
  /// columns to the right without having visited the left neighbour.
  bool escaped = false;
};

/// First times the forward path from `start` visits columns start.i - 1 and
/// start.i + 1. With `escape_margin`, tracking stops once the path reaches
/// start.i + escape_margin before any left visit.
template <ArrowSource F>
RecurrenceHits recurrence_check(const F& field, SiteCoord start, double s, std::int64_t horizon,
                                std::optional<std::int64_t> escape_margin = std::nullopt) {
  require_even(start);
  detail::require(horizon >= 1, "recurrence_check: horizon must be >= 1");
  RecurrenceHits hits;
  std::int64_t x = start.i;
  for (std::int64_t t = 0; t < horizon; ++t) {
    x += field.arrow_at(SiteCoord{x, start.j + t}, s);
    if (x == start.i - 1 && !hits.hit_left) hits.hit_left = t + 1;
    if (x == start.i + 1 && !hits.hit_right) hits.hit_right = t + 1;
    if (hits.hit_left && hits.hit_right) break;
    if (escape_margin && !hits.hit_left && x >= start.i + *escape_margin) {
      hits.escaped = true;
      break;
    }
  }
  return hits;
}

/// True iff position(n) >= -k - K sqrt(n) for every n along the path, with
/// positions measured relative to the origin of space.
bool boundary_survival(const LatticePath& path, double k, double K);

/// Number of level transitions at which a forward and a dual path swap sides.
std::int64_t count_crossings(const LatticePath& forward, const LatticePath& dual);

}  // namespace ddw
