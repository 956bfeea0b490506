#include "ddw/arrow_field.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace ddw {

ArrowField::ArrowField(std::uint64_t seed, double lambda, double s_max)
    : seed_(seed), key_(mix64(seed ^ 0x5d1e5eedULL)), lambda_(lambda), s_max_(s_max) {
  detail::require(std::isfinite(lambda) && lambda > 0.0, "ArrowField: lambda must be positive");
  detail::require(std::isfinite(s_max) && s_max > 0.0, "ArrowField: s_max must be positive");
}

void ArrowField::check_time(double s) const {
  if (!(s >= 0.0 && s <= s_max_))
    throw DomainError("dynamical time " + std::to_string(s) + " outside [0, " + std::to_string(s_max_) + "]");
}

void ArrowField::check_interval(double s_lo, double s_hi) const {
  if (!(s_lo >= 0.0 && s_lo <= s_hi && s_hi <= s_max_))
    throw DomainError("interval [" + std::to_string(s_lo) + ", " + std::to_string(s_hi) + "] outside [0, " +
                      std::to_string(s_max_) + "] or reversed");
}

int ArrowField::arrow_unchecked(std::int64_t i, std::int64_t j, double s) const noexcept {
  return arrow_unchecked(i, j, s, 0.0);
}

int ArrowField::arrow_unchecked(std::int64_t i, std::int64_t j, double s, double quiet) const noexcept {
  SiteClock clock(key_, i, j, lambda_);
  int value = clock.value();
  if (clock.peek_uniform() < quiet) return value;
  for (;;) {
    clock.ring();
    if (clock.time() > s) return value;
    value = clock.value();
  }
}

SiteState ArrowField::state_unchecked(std::int64_t i, std::int64_t j, double s, double limit) const noexcept {
  return state_unchecked(i, j, s, limit, 0.0);
}

double ArrowField::no_ring_threshold(double limit) const noexcept {
  // P(first ring > limit) = exp(-lambda limit); the margin keeps the shortcut
  // exactly consistent with the log-based replay.
  return std::exp(-lambda_ * limit) * (1.0 - 1e-9);
}

SiteState ArrowField::state_unchecked(std::int64_t i, std::int64_t j, double s, double limit,
                                      double quiet) const noexcept {
  SiteClock clock(key_, i, j, lambda_);
  SiteState state;
  state.value = clock.value();
  if (clock.peek_uniform() < quiet) return state;
  for (;;) {
    clock.ring();
    if (clock.time() > limit) return state;
    if (clock.time() > s) {
      if (clock.value() != state.value) {
        state.next_switch = clock.time();
        return state;
      }
    } else {
      state.value = clock.value();
    }
  }
}

bool ArrowField::rings_in_unchecked(std::int64_t i, std::int64_t j, double s_lo, double s_hi) const noexcept {
  SiteClock clock(key_, i, j, lambda_);
  for (;;) {
    clock.ring();
    if (clock.time() >= s_hi) return false;
    if (clock.time() >= s_lo) return true;
  }
}

int ArrowField::arrow_at(SiteCoord site, double s) const {
  require_even(site);
  check_time(s);
  return arrow_unchecked(site.i, site.j, s);
}

int ArrowField::arrow_closed(SiteCoord site, double s) const {
  require_even(site);
  check_time(s);
  SiteClock clock(key_, site.i, site.j, lambda_);
  int value = clock.value();
  for (;;) {
    clock.ring();
    if (clock.time() > s) return value;
    if (clock.time() == s && clock.value() != value) return 1;
    value = clock.value();
  }
}

int ArrowField::initial_arrow(SiteCoord site) const {
  require_even(site);
  return SiteClock(key_, site.i, site.j, lambda_).value();
}

std::vector<SwitchEvent> ArrowField::switch_times(SiteCoord site, double s_lo, double s_hi) const {
  require_even(site);
  check_interval(s_lo, s_hi);
  std::vector<SwitchEvent> events;
  SiteClock clock(key_, site.i, site.j, lambda_);
  for (;;) {
    clock.ring();
    if (clock.time() > s_hi) break;
    if (clock.time() > s_lo && clock.value() != clock.previous())
      events.push_back({site, clock.time(), clock.value()});
  }
  return events;
}

std::vector<double> ArrowField::ring_times(SiteCoord site, double s_lo, double s_hi) const {
  require_even(site);
  check_interval(s_lo, s_hi);
  std::vector<double> rings;
  SiteClock clock(key_, site.i, site.j, lambda_);
  for (;;) {
    clock.ring();
    if (clock.time() > s_hi) break;
    if (clock.time() > s_lo) rings.push_back(clock.time());
  }
  return rings;
}

bool ArrowField::rings_in(SiteCoord site, double s_lo, double s_hi) const {
  require_even(site);
  check_interval(s_lo, s_hi);
  return rings_in_unchecked(site.i, site.j, s_lo, s_hi);
}

std::int64_t ArrowField::ring_count(SiteCoord site, double s_lo, double s_hi) const {
  require_even(site);
  check_interval(s_lo, s_hi);
  std::int64_t count = 0;
  SiteClock clock(key_, site.i, site.j, lambda_);
  for (;;) {
    clock.ring();
    if (clock.time() > s_hi) return count;
    if (clock.time() > s_lo) ++count;
  }
}

int ArrowField::extremal_unchecked(std::int64_t i, std::int64_t j, double s_lo, double s_hi,
                                   Extremum mode) const noexcept {
  const int target = mode == Extremum::max ? 1 : -1;
  SiteClock clock(key_, i, j, lambda_);
  int value = clock.value();
  for (;;) {
    clock.ring();
    if (clock.time() > s_hi) break;
    if (clock.time() > s_lo && value == target) return target;
    value = clock.value();
  }
  return value == target ? target : -target;
}

int ArrowField::extremal_arrow(SiteCoord site, double s_lo, double s_hi, Extremum mode) const {
  require_even(site);
  check_interval(s_lo, s_hi);
  return extremal_unchecked(site.i, site.j, s_lo, s_hi, mode);
}

SiteState ArrowField::state_at(SiteCoord site, double s, double limit) const {
  require_even(site);
  check_interval(s, limit);
  return state_unchecked(site.i, site.j, s, limit);
}

BiasedStaticArrows::BiasedStaticArrows(std::uint64_t seed, double p) : seed_(seed), p_(p) {
  detail::require(p >= 0.0 && p <= 1.0, "BiasedStaticArrows: p must lie in [0, 1]");
}

IntervalExtremumArrows::IntervalExtremumArrows(const ArrowField& field, double s_lo, double s_hi,
                                               Extremum mode)
    : field_(&field), lo_(s_lo), hi_(s_hi), mode_(mode) {
  detail::require(s_lo >= 0.0 && s_lo <= s_hi && s_hi <= field.s_max(),
                  "IntervalExtremumArrows: interval outside the field's horizon");
}

int IntervalExtremumArrows::arrow_at(SiteCoord c, double) const {
  return field_->extremal_arrow(c, lo_, hi_, mode_);
}

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  const auto bits = std::bit_cast<std::uint64_t>(value);
  std::array<char, 8> bytes{};
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffU);
  out.write(bytes.data(), 8);
}

template <class T>
bool get_le(std::istream& in, T& value) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) return false;
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  value = std::bit_cast<T>(bits);
  return true;
}

}  // namespace

void write_event_dump(std::ostream& out, const ArrowField& field, std::span<const SiteCoord> sites,
                      double s_lo, double s_hi) {
  for (const SiteCoord& site : sites) {
    const auto events = field.switch_times(site, s_lo, s_hi);
    put_le<std::int64_t>(out, site.i);
    put_le<std::int64_t>(out, site.j);
    put_le<std::uint64_t>(out, events.size());
    for (const auto& e : events) put_le<double>(out, e.s_time);
  }
  if (!out) throw Error("write_event_dump: stream write failed");
}

std::vector<SiteEvents> read_event_dump(std::istream& in) {
  std::vector<SiteEvents> sites;
  for (;;) {
    SiteEvents record;
    if (!get_le(in, record.site.i)) break;
    std::uint64_t count = 0;
    if (!get_le(in, record.site.j) || !get_le(in, count))
      throw Error("read_event_dump: truncated record header");
    record.s_times.resize(count);
    for (auto& s : record.s_times)
      if (!get_le(in, s)) throw Error("read_event_dump: truncated switch times");
    sites.push_back(std::move(record));
  }
  return sites;
}

}  // namespace ddw
