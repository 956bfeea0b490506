#pragma once

#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ddw/lattice.hpp"
#include "ddw/random.hpp"

namespace ddw {

/// Anything that assigns a direction (+1 or -1) to a site at a dynamical time.
/// Static fixtures ignore the time argument.
template <class F>
concept ArrowSource = requires(const F& f, SiteCoord c, double s) {
  { f.arrow_at(c, s) } -> std::convertible_to<int>;
};

struct SwitchEvent {
  SiteCoord site;
  double s_time = 0.0;
  int new_value = 0;
};

enum class Extremum { max, min };

/// Value of a site's process at some s together with its next value change.
struct SiteState {
  int value = 0;
  double next_switch = std::numeric_limits<double>::infinity();  ///< +inf if none before the limit
};

/// Lazily evaluated arrow field on the even sublattice, parameterised by the
/// dynamical time s in [0, s_max].
///
/// Each site carries a Poisson clock of rate lambda; at every ring a fair coin
/// resamples the arrow. This is the same law as flipping at rate lambda/2 from
/// each state: a ring changes the value with probability 1/2, so value changes
/// form a thinned Poisson process of rate lambda/2 and the chain is the
/// symmetric two-state Markov process started from a fair coin.
///
/// All randomness of site (i, j) comes from a SplitMix64 stream keyed by
/// hash(seed, i, j), so every query is a pure function of (seed, site, s).
/// Distinct sites get distinct streams as long as |i|, |j| < 2^31.
/// Nothing is cached: the clock is replayed from s = 0 on each query, which
/// costs O(1 + lambda * s) and makes the object freely shareable across threads.
class ArrowField {
 public:
  ArrowField(std::uint64_t seed, double lambda, double s_max);

  std::uint64_t seed() const noexcept { return seed_; }
  double lambda() const noexcept { return lambda_; }
  double s_max() const noexcept { return s_max_; }

  /// Right-continuous value of the arrow at `site` and dynamical time `s`.
  int arrow_at(SiteCoord site, double s) const;

  /// Value with the closure convention used for exceptional-time sets: at the
  /// exact instant of a value change the arrow reads +1.
  int arrow_closed(SiteCoord site, double s) const;

  int initial_arrow(SiteCoord site) const;

  /// Value-changing events in (s_lo, s_hi], ascending.
  std::vector<SwitchEvent> switch_times(SiteCoord site, double s_lo, double s_hi) const;

  /// All clock rings in (s_lo, s_hi], including those whose coin leaves the
  /// value unchanged.
  std::vector<double> ring_times(SiteCoord site, double s_lo, double s_hi) const;

  /// True iff the clock rings at least once in [s_lo, s_hi).
  bool rings_in(SiteCoord site, double s_lo, double s_hi) const;

  std::int64_t ring_count(SiteCoord site, double s_lo, double s_hi) const;

  /// max: +1 iff the process is +1 somewhere on [s_lo, s_hi]; min: -1 iff it
  /// is -1 somewhere on the interval.
  int extremal_arrow(SiteCoord site, double s_lo, double s_hi, Extremum mode) const;

  /// Value at s and the first value change in (s, limit].
  SiteState state_at(SiteCoord site, double s, double limit) const;

  // Unchecked variants for inner loops: the caller guarantees parity and range.
  int arrow_unchecked(std::int64_t i, std::int64_t j, double s) const noexcept;
  int arrow_unchecked(std::int64_t i, std::int64_t j, double s, double quiet) const noexcept;
  SiteState state_unchecked(std::int64_t i, std::int64_t j, double s, double limit) const noexcept;
  /// Same as state_unchecked with `quiet` = no_ring_threshold(limit): skips
  /// the replay for sites whose first ring falls after the limit.
  SiteState state_unchecked(std::int64_t i, std::int64_t j, double s, double limit, double quiet) const noexcept;
  double no_ring_threshold(double limit) const noexcept;
  bool rings_in_unchecked(std::int64_t i, std::int64_t j, double s_lo, double s_hi) const noexcept;
  int extremal_unchecked(std::int64_t i, std::int64_t j, double s_lo, double s_hi, Extremum mode) const noexcept;

 private:
  void check_time(double s) const;
  void check_interval(double s_lo, double s_hi) const;

  std::uint64_t seed_;
  std::uint64_t key_;
  double lambda_;
  double s_max_;
};

/// Replays the rings of a single site in increasing time.
class SiteClock {
 public:
  /// `key` is the field key, mix64 of the seed.
  SiteClock(std::uint64_t key, std::int64_t i, std::int64_t j, double lambda) noexcept
      : rng_(site_state(key, i, j)), lambda_(lambda) {
    value_ = (rng_.state() >> 63) ? 1 : -1;
  }

  static constexpr std::uint64_t site_state(std::uint64_t key, std::int64_t i, std::int64_t j) noexcept {
    const std::uint64_t packed = (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint32_t>(j);
    return mix64(key ^ packed);
  }

  /// Uniform that the next ring() will turn into a waiting time.
  double peek_uniform() const noexcept {
    SplitMix64 copy = rng_;
    return to_unit_open0(copy());
  }

  /// Arrow value after the most recent ring (initially the s = 0 value).
  int value() const noexcept { return value_; }
  double time() const noexcept { return time_; }
  /// Value before the most recent ring.
  int previous() const noexcept { return previous_; }

  /// Advance to the next ring.
  void ring() noexcept {
    const std::uint64_t w = rng_();
    time_ += -std::log(to_unit_open0(w)) / lambda_;
    previous_ = value_;
    value_ = (w & 1U) ? 1 : -1;
  }

 private:
  SplitMix64 rng_;
  double lambda_;
  double time_ = 0.0;
  int value_ = 1;
  int previous_ = 1;
};

/// Static fixture: every arrow equals `value`.
struct ConstantArrows {
  int value = 1;
  int arrow_at(SiteCoord, double) const noexcept { return value; }
};

/// Static fixture: independent arrows, +1 with probability p.
class BiasedStaticArrows {
 public:
  BiasedStaticArrows(std::uint64_t seed, double p);
  int arrow_at(SiteCoord c, double) const noexcept {
    SplitMix64 rng = make_stream(seed_, static_cast<std::uint64_t>(c.i), static_cast<std::uint64_t>(c.j), 0xb1a5);
    return to_unit(rng()) < p_ ? 1 : -1;
  }
  double p() const noexcept { return p_; }

 private:
  std::uint64_t seed_;
  double p_;
};

/// Static configuration built from an interval of dynamical time: each arrow
/// is the extremum of its process over [s_lo, s_hi].
class IntervalExtremumArrows {
 public:
  IntervalExtremumArrows(const ArrowField& field, double s_lo, double s_hi, Extremum mode);
  int arrow_at(SiteCoord c, double) const;

 private:
  const ArrowField* field_;
  double lo_;
  double hi_;
  Extremum mode_;
};

/// The field read with the +1-at-switch closure convention.
class ClosedArrows {
 public:
  explicit ClosedArrows(const ArrowField& field) noexcept : field_(&field) {}
  int arrow_at(SiteCoord c, double s) const { return field_->arrow_closed(c, s); }

 private:
  const ArrowField* field_;
};

/// Switch history of one site, as stored in an event dump.
struct SiteEvents {
  SiteCoord site;
  std::vector<double> s_times;
};

/// Binary event dump: for every site, little-endian int64 i, int64 j,
/// uint64 count, then `count` ascending float64 switch times in (s_lo, s_hi].
void write_event_dump(std::ostream& out, const ArrowField& field, std::span<const SiteCoord> sites,
                      double s_lo, double s_hi);
std::vector<SiteEvents> read_event_dump(std::istream& in);

}  // namespace ddw
