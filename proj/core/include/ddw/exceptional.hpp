#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ddw/arrow_field.hpp"
#include "ddw/error.hpp"
#include "ddw/lattice.hpp"
#include "ddw/stats.hpp"

namespace ddw {

struct Box {
  SiteCoord z;          ///< middle of the lower edge
  std::int64_t d = 0;   ///< width; height is d*d
  std::int64_t left() const noexcept { return z.i - d / 2; }
  std::int64_t right() const noexcept { return z.i + d / 2; }
  std::int64_t top() const noexcept { return z.j + d * d; }
};

/// Chain of diffusive boxes: B_{k+1} has its lower midpoint at the upper
/// right vertex of B_k.
struct BoxHierarchy {
  double gamma = 0.0;
  double lambda = 0.0;
  std::vector<Box> levels;

  std::int64_t depth() const noexcept { return static_cast<std::int64_t>(levels.size()) - 1; }
  /// First level above the last box.
  std::int64_t top() const noexcept { return levels.empty() ? 0 : levels.back().top(); }
};

/// d(k) = 4 (floor(gamma^k / (4 lambda)) + 1).
std::int64_t box_width(double gamma, double lambda, std::int64_t k);

/// Levels 0..n.
BoxHierarchy build_boxes(double gamma, double lambda, std::int64_t n);

/// ((gamma - 2)/2) sqrt((gamma + 1)/(gamma - 1)).
double K_of_gamma(double gamma);

/// A_k at dynamical time s: the path from z_k stays at or right of the left
/// edge of B_k and ends at or right of the upper right vertex.
template <ArrowSource F>
bool event_A(const F& field, const BoxHierarchy& h, std::int64_t k, double s) {
  detail::require(k >= 0 && k <= h.depth(), "event_A: level outside the hierarchy");
  const Box& b = h.levels[static_cast<std::size_t>(k)];
  std::int64_t x = b.z.i;
  const std::int64_t left = b.left();
  for (std::int64_t n = 0; n < b.d * b.d; ++n) {
    x += field.arrow_at(SiteCoord{x, b.z.j + n}, s);
    if (x < left) return false;
  }
  return x >= b.right();
}

/// Exact P(A_k) for a box of width d at a fixed s. A simple walk that starts
/// at the lower midpoint only has to avoid one barrier, so by reflection
/// P(A_k) = P(d/2 <= S_{d^2} <= 3d/2 + 1).
double box_event_probability(std::int64_t d);

std::vector<double> box_event_probabilities(const BoxHierarchy& h);

/// P(A_k) by direct simulation of event_A on fresh fields at s = 0.
ProportionEstimate box_event_probability_mc(const BoxHierarchy& h, std::int64_t k, std::int64_t replicas,
                                            std::uint64_t seed, int threads = 1);

struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
  friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

struct ScanResult {
  std::int64_t n = 0;
  std::vector<ClosedInterval> intervals;
  std::int64_t breakpoint_count = 0;  ///< path breakpoints processed for box n
  double measure() const;
  bool empty() const noexcept { return intervals.empty(); }
  /// True iff every interval of this (finer) scan lies inside one of `outer`.
  bool nested_in(const ScanResult& outer) const;
};

/// Scans for levels 0..n over [s_lo, s_hi]; result[k] is the closed set where
/// A_0..A_k all hold. Box k is swept only over the surviving set of level
/// k - 1. At a switch instant the arrow reads +1, which for the increasing
/// event A_k means an endpoint belongs to the set whenever either side does.
std::vector<ScanResult> scan_levels(const ArrowField& field, const BoxHierarchy& h, double s_lo = 0.0,
                                    double s_hi = 1.0);

ScanResult scan_exceptional(const ArrowField& field, const BoxHierarchy& h, std::int64_t n, double s_lo = 0.0,
                            double s_hi = 1.0);

/// Some s in the closed set where A holds for box b within `where`, or
/// nullopt. Stops at the first hit instead of sweeping every interval.
std::optional<double> first_point(const ArrowField& field, const Box& b, const std::vector<ClosedInterval>& where);

enum class ScanMode {
  full,         ///< every level swept completely
  decide_last,  ///< levels < n swept completely, level n only tested for a point
};

struct ScanReplica {
  std::uint64_t seed = 0;
  std::vector<double> measure;          ///< per level; NaN where not computed
  std::vector<std::int64_t> intervals;  ///< per level; -1 where not computed
  std::vector<char> nonempty;           ///< per level
  std::optional<double> witness;        ///< a point of E_n, if any
  std::vector<ScanResult> scans;        ///< kept only when requested
  bool nested = true;
};

std::vector<ScanReplica> scan_replicas(double gamma, double lambda, std::int64_t n, std::int64_t replicas,
                                       std::uint64_t seed, int threads = 1, bool keep_scans = false,
                                       ScanMode mode = ScanMode::full);

struct NonemptyEstimate {
  std::int64_t n = 0;
  std::vector<ProportionEstimate> per_level;  ///< P(E_k nonempty), k = 0..n
  ProportionEstimate final_level;
  std::vector<double> mean_measure;    ///< NaN for a level that was only decided
  std::vector<double> measure_stderr;
  std::vector<double> expected_measure;  ///< prod_{j<=k} P(A_j)
  bool nesting_ok = true;
  /// sup_k 1/P(A_k) for the hierarchy, reported as a diagnostic only.
  double sup_inverse_prob = 0.0;
};

NonemptyEstimate summarize_scans(const std::vector<ScanReplica>& reps, const BoxHierarchy& h);

NonemptyEstimate estimate_nonempty_prob(double gamma, double lambda, std::int64_t n, std::int64_t replicas,
                                        std::uint64_t seed, int threads = 1, ScanMode mode = ScanMode::decide_last);

struct WeightedInterval {
  double lo = 0.0;
  double hi = 0.0;
  double weight = 1.0;  ///< density with respect to ds
};

/// sigma_n: density prod_k 1/P(A_k) on the scan.
std::vector<WeightedInterval> scan_measure(const ScanResult& scan, const std::vector<double>& box_probs);

/// Double integral of |s - s'|^{-alpha} against the piecewise-constant measure,
/// exact per interval pair. Infinite for alpha >= 1 on any interval of
/// positive length.
double alpha_energy(const std::vector<WeightedInterval>& measure, double alpha);

}  // namespace ddw
