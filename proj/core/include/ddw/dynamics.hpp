#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "ddw/arrow_field.hpp"
#include "ddw/web.hpp"

namespace ddw {

/// Event-driven evolution in s of the forward path from a fixed start.
///
/// Only a switch at a site currently on the path can move the path, so the
/// pending set holds exactly the next value changes of on-path sites. At a
/// breakpoint the path is rebuilt from the switched level upward until it
/// rejoins the previous path; past that level nothing changed because no
/// on-path site switched in between.
class PathSweeper {
 public:
  struct Breakpoint {
    double s = 0.0;
    std::int64_t offset = 0;  ///< path index n of the switched site
    std::int64_t position = 0;
    int new_value = 0;
    std::int64_t changed_begin = 0;  ///< first path index that moved
    std::int64_t changed_end = 0;    ///< one past the last path index that moved
  };

  PathSweeper(const ArrowField& field, SiteCoord start, std::int64_t horizon, double s_begin, double s_end);

  double s() const noexcept { return s_; }
  double s_end() const noexcept { return s_end_; }
  SiteCoord start() const noexcept { return start_; }
  std::int64_t horizon() const noexcept { return horizon_; }
  /// positions()[n] is the path at level start.j + n, n = 0..horizon.
  std::span<const std::int64_t> positions() const noexcept { return positions_; }
  std::int64_t breakpoints_seen() const noexcept { return breakpoints_; }

  /// Move to the next breakpoint in (s, s_end]. `on_change(n, old, new)` is
  /// called for every path index that moves. Returns nullopt when no switch
  /// remains before s_end.
  template <class OnChange>
  std::optional<Breakpoint> advance(OnChange&& on_change);

  std::optional<Breakpoint> advance() {
    return advance([](std::int64_t, std::int64_t, std::int64_t) {});
  }

 private:
  struct Pending {
    double s;
    std::int64_t n;
    std::int64_t i;
    bool operator>(const Pending& o) const noexcept { return s > o.s; }
  };

  void schedule(std::int64_t n, double next) {
    if (next <= s_end_) pending_.push(Pending{next, n, positions_[static_cast<std::size_t>(n)]});
  }

  const ArrowField* field_;
  SiteCoord start_;
  std::int64_t horizon_;
  double s_;
  double s_end_;
  double quiet_;
  std::vector<std::int64_t> positions_;
  std::vector<std::int8_t> arrows_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending_;
  std::int64_t breakpoints_ = 0;
};

template <class OnChange>
std::optional<PathSweeper::Breakpoint> PathSweeper::advance(OnChange&& on_change) {
  while (!pending_.empty()) {
    const Pending ev = pending_.top();
    pending_.pop();
    const auto idx = static_cast<std::size_t>(ev.n);
    // Stale entries: the site left the path, or this switch was already applied.
    if (positions_[idx] != ev.i || ev.s <= s_) continue;

    s_ = ev.s;
    ++breakpoints_;
    const std::int64_t j0 = start_.j;
    const int flipped = -arrows_[idx];
    arrows_[idx] = static_cast<std::int8_t>(flipped);
    {
      const SiteState next = field_->state_unchecked(ev.i, j0 + ev.n, s_, s_end_, quiet_);
      schedule(ev.n, next.next_switch);
    }
    Breakpoint bp{s_, ev.n, ev.i, flipped, ev.n + 1, ev.n + 1};
    std::int64_t x = ev.i + flipped;
    for (std::int64_t m = ev.n + 1; m <= horizon_; ++m) {
      const auto midx = static_cast<std::size_t>(m);
      if (positions_[midx] == x) break;
      on_change(m, positions_[midx], x);
      positions_[midx] = x;
      bp.changed_end = m + 1;
      if (m == horizon_) break;
      const SiteState st = field_->state_unchecked(x, j0 + m, s_, s_end_, quiet_);
      arrows_[midx] = static_cast<std::int8_t>(st.value);
      schedule(m, st.next_switch);
      x += st.value;
    }
    return bp;
  }
  return std::nullopt;
}

/// Piecewise-constant family of paths over s in [0, S].
struct SweepResult {
  SiteCoord start;
  std::int64_t horizon = 0;
  double s_end = 0.0;
  /// Switch times in (0, S] at which the path changes, ascending.
  std::vector<double> breakpoints;
  /// paths[0] holds on [0, b_1), paths[i] on [b_i, b_{i+1}), the last one up to S.
  std::vector<LatticePath> paths;

  /// Index of the path in force at dynamical time s.
  std::size_t interval_index(double s) const;
};

SweepResult s_sweep(const ArrowField& field, SiteCoord start, std::int64_t t_horizon, double S);

/// Right-continuous step function s -> S^s(t).
struct StepFunction {
  double s_begin = 0.0;
  double s_end = 0.0;
  std::vector<double> jumps;         ///< jump locations, ascending
  std::vector<std::int64_t> values;  ///< values.size() == jumps.size() + 1
  std::int64_t value_at(double s) const;
};

StepFunction path_value_vs_s(const SweepResult& sweep, std::int64_t t);

/// Two forward paths from the same start read at dynamical times s < s'.
/// tau[i] are meeting times, sigma[i] the first time >= tau[i] whose site
/// clock rings in [s, s'); sigma has one entry fewer than tau when the last
/// stuck period outlasts the horizon.
struct CoupledPair {
  double s = 0.0;
  double s_prime = 0.0;
  LatticePath path_s;
  LatticePath path_s_prime;
  std::vector<std::int64_t> tau;
  std::vector<std::int64_t> sigma;
  std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(path_s.length()); }
};

CoupledPair coupled_pair(const ArrowField& field, double s, double s_prime, std::int64_t horizon,
                         SiteCoord start = {0, 0});

/// Free/stuck decomposition of a coupled pair. index t of `C` runs over
/// 0..horizon; `L_hat` and `l_hat` are indexed by free time u = 0..C(horizon).
struct PairDecomposition {
  std::vector<std::int8_t> S1;
  std::vector<std::int8_t> S2;
  std::vector<std::int8_t> S3;
  std::vector<std::int64_t> C;
  std::vector<std::int64_t> L_hat;
  std::vector<std::int64_t> l_hat;
};

PairDecomposition decompose_pair(const CoupledPair& pair);

/// Rebuilds both paths from S1(C(t)) + S3(t - C(t)) and S2(C(t)) + S3(t - C(t)).
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> reconstruct(const PairDecomposition& d,
                                                                            std::int64_t start_i = 0);

struct ContactCount {
  std::int64_t contacts = 0;
  std::int64_t marked = 0;
};

/// Contacts between the forward path from `start` and the dual path from
/// `dual_start`, both in the s = 0 web. A contact at level k is a forward
/// position x at (x, k) with a left arrow there while the dual path occupies
/// (x, k+1). A contact is marked iff its site's clock rings in (0, s].
ContactCount marked_contact_count(const ArrowField& field, SiteCoord start, DualCoord dual_start, double s,
                                  std::int64_t t_horizon);

}  // namespace ddw
