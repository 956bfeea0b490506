#pragma once

#include <cstdint>
#include <string>

#include "ddw/error.hpp"

namespace ddw {

/// A site of the even space-time sublattice: i + j is even.
struct SiteCoord {
  std::int64_t i = 0;  ///< space
  std::int64_t j = 0;  ///< time level

  friend constexpr bool operator==(const SiteCoord&, const SiteCoord&) = default;
};

/// A point of the odd (dual) sublattice, i + j odd. Dual paths live here.
struct DualCoord {
  std::int64_t i = 0;
  std::int64_t j = 0;

  friend constexpr bool operator==(const DualCoord&, const DualCoord&) = default;
};

constexpr bool is_even_site(std::int64_t i, std::int64_t j) noexcept { return ((i + j) & 1) == 0; }

inline void require_even(const SiteCoord& c) {
  if (!is_even_site(c.i, c.j))
    throw ParityError("site (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                      ") is not on the even sublattice");
}

inline void require_odd(const DualCoord& c) {
  if (is_even_site(c.i, c.j))
    throw ParityError("dual point (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                      ") is not on the odd sublattice");
}

}  // namespace ddw
