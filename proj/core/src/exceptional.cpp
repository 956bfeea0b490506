#include "ddw/exceptional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddw/dynamics.hpp"
#include "ddw/random.hpp"

namespace ddw {

std::int64_t box_width(double gamma, double lambda, std::int64_t k) {
  detail::require(gamma > 2.0, "box_width: gamma must exceed 2");
  detail::require(lambda > 0.0, "box_width: lambda must be positive");
  detail::require(k >= 0, "box_width: level must be nonnegative");
  const double q = std::floor(std::pow(gamma, static_cast<double>(k)) / (4.0 * lambda));
  if (!(q < 1e9)) throw DomainError("box_width: d(" + std::to_string(k) + ") is too large to simulate");
  return 4 * (static_cast<std::int64_t>(q) + 1);
}

BoxHierarchy build_boxes(double gamma, double lambda, std::int64_t n) {
  if (!(gamma > 2.0)) throw DomainError("build_boxes: gamma must exceed 2");
  detail::require(n >= 0, "build_boxes: n must be nonnegative");
  BoxHierarchy h{gamma, lambda, {}};
  SiteCoord z{0, 0};
  for (std::int64_t k = 0; k <= n; ++k) {
    const std::int64_t d = box_width(gamma, lambda, k);
    h.levels.push_back(Box{z, d});
    z = SiteCoord{z.i + d / 2, z.j + d * d};
  }
  return h;
}

double K_of_gamma(double gamma) {
  if (!(gamma >= 2.0)) throw DomainError("K_of_gamma: gamma must be >= 2");
  return 0.5 * (gamma - 2.0) * std::sqrt((gamma + 1.0) / (gamma - 1.0));
}

double box_event_probability(std::int64_t d) {
  detail::require(d > 0 && d % 4 == 0, "box_event_probability: d must be a positive multiple of 4");
  // S_N with N = d^2 even: P(S_N = 2m - N) = C(N, m) / 2^N.
  const std::int64_t N = d * d;
  const double lnN = std::lgamma(static_cast<double>(N) + 1.0) - static_cast<double>(N) * std::log(2.0);
  double p = 0.0;
  for (std::int64_t y = d / 2; y <= 3 * d / 2 + 1; ++y) {
    if (((y + N) & 1) != 0) continue;
    const std::int64_t m = (N + y) / 2;
    if (m > N) break;
    p += std::exp(lnN - std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(N - m) + 1.0));
  }
  return p;
}

std::vector<double> box_event_probabilities(const BoxHierarchy& h) {
  std::vector<double> p;
  for (const Box& b : h.levels) p.push_back(box_event_probability(b.d));
  return p;
}

ProportionEstimate box_event_probability_mc(const BoxHierarchy& h, std::int64_t k, std::int64_t replicas,
                                            std::uint64_t seed, int threads) {
  detail::require(replicas >= 1, "box_event_probability_mc: replicas must be >= 1");
  const auto hits = parallel_replicas<char>(replicas, threads, [&](std::int64_t r) -> char {
    const ArrowField field(hash_combine(seed, static_cast<std::uint64_t>(r)), h.lambda, 1.0);
    return event_A(field, h, k, 0.0) ? 1 : 0;
  });
  std::int64_t s = 0;
  for (char c : hits) s += c;
  return wilson(s, replicas);
}

double ScanResult::measure() const {
  double m = 0;
  for (const auto& iv : intervals) m += iv.length();
  return m;
}

bool ScanResult::nested_in(const ScanResult& outer) const {
  for (const auto& iv : intervals) {
    const bool inside = std::any_of(outer.intervals.begin(), outer.intervals.end(),
                                    [&](const ClosedInterval& o) { return o.lo <= iv.lo && iv.hi <= o.hi; });
    if (!inside) return false;
  }
  return true;
}

namespace {

constexpr std::int64_t max_scan_box_height = 50'000'000;

// Sweeps box b over [a, c] and appends the closed set where A holds.
std::int64_t sweep_box(const ArrowField& field, const Box& b, double a, double c,
                       std::vector<ClosedInterval>& out) {
  const std::int64_t H = b.d * b.d;
  PathSweeper sweeper(field, b.z, H, a, c);
  const std::int64_t left = b.left(), right = b.right();
  const auto pos = sweeper.positions();
  std::int64_t violations = 0;
  for (std::int64_t n = 1; n <= H; ++n)
    if (pos[static_cast<std::size_t>(n)] < left) ++violations;
  bool at_right = pos[static_cast<std::size_t>(H)] >= right;
  bool holds = violations == 0 && at_right;
  double open_at = a;
  auto on_change = [&](std::int64_t m, std::int64_t old_x, std::int64_t new_x) {
    violations += (new_x < left) - (old_x < left);
    if (m == H) at_right = new_x >= right;
  };
  std::int64_t seen = 0;
  while (auto bp = sweeper.advance(on_change)) {
    ++seen;
    const bool now = violations == 0 && at_right;
    if (now == holds) continue;
    if (holds) out.push_back({open_at, bp->s});
    else open_at = bp->s;
    holds = now;
  }
  if (holds) out.push_back({open_at, c});
  return seen;
}

void check_scan_heights(const BoxHierarchy& h) {
  for (const Box& b : h.levels)
    if (b.d * b.d > max_scan_box_height)
      throw DomainError("scan: box height " + std::to_string(b.d * b.d) + " exceeds the scan limit");
}

}  // namespace

namespace {

bool holds_at(const ArrowField& field, const Box& b, double s) {
  const double quiet = field.no_ring_threshold(s);
  const std::int64_t left = b.left();
  std::int64_t x = b.z.i;
  for (std::int64_t n = 0; n < b.d * b.d; ++n) {
    x += field.arrow_unchecked(x, b.z.j + n, s, quiet);
    if (x < left) return false;
  }
  return x >= b.right();
}

}  // namespace

std::optional<double> first_point(const ArrowField& field, const Box& b, const std::vector<ClosedInterval>& where) {
  const std::int64_t H = b.d * b.d;
  const std::int64_t left = b.left(), right = b.right();
  std::vector<ClosedInterval> order = where;
  std::stable_sort(order.begin(), order.end(),
                   [](const ClosedInterval& x, const ClosedInterval& y) { return x.length() > y.length(); });
  // A single path with early exit costs about as much as sweeping an interval
  // of length 1/d, so try a few interior points of each interval first.
  for (const auto& iv : order) {
    constexpr std::int64_t probes = 4;
    for (std::int64_t m = 0; m < probes; ++m) {
      const double s = iv.lo + (static_cast<double>(m) + 0.5) * iv.length() / static_cast<double>(probes);
      if (s > iv.lo && s < iv.hi && holds_at(field, b, s)) return s;
    }
  }
  for (const auto& iv : order) {
    PathSweeper sweeper(field, b.z, H, iv.lo, iv.hi);
    const auto pos = sweeper.positions();
    std::int64_t violations = 0;
    for (std::int64_t n = 1; n <= H; ++n)
      if (pos[static_cast<std::size_t>(n)] < left) ++violations;
    bool at_right = pos[static_cast<std::size_t>(H)] >= right;
    if (violations == 0 && at_right) return iv.lo;
    auto on_change = [&](std::int64_t m, std::int64_t old_x, std::int64_t new_x) {
      violations += (new_x < left) - (old_x < left);
      if (m == H) at_right = new_x >= right;
    };
    while (auto bp = sweeper.advance(on_change))
      if (violations == 0 && at_right) return bp->s;
  }
  return std::nullopt;
}

std::vector<ScanResult> scan_levels(const ArrowField& field, const BoxHierarchy& h, double s_lo, double s_hi) {
  detail::require(s_lo >= 0.0 && s_lo <= s_hi && s_hi <= field.s_max(),
                  "scan_levels: s-range must lie inside the field's horizon");
  check_scan_heights(h);
  std::vector<ScanResult> out;
  std::vector<ClosedInterval> current{{s_lo, s_hi}};
  for (std::int64_t k = 0; k <= h.depth(); ++k) {
    ScanResult r;
    r.n = k;
    for (const auto& iv : current)
      r.breakpoint_count += sweep_box(field, h.levels[static_cast<std::size_t>(k)], iv.lo, iv.hi, r.intervals);
    current = r.intervals;
    out.push_back(std::move(r));
  }
  return out;
}

ScanResult scan_exceptional(const ArrowField& field, const BoxHierarchy& h, std::int64_t n, double s_lo,
                            double s_hi) {
  detail::require(n >= 0 && n <= h.depth(), "scan_exceptional: n outside the hierarchy");
  BoxHierarchy cut = h;
  cut.levels.resize(static_cast<std::size_t>(n) + 1);
  return scan_levels(field, cut, s_lo, s_hi).back();
}

std::vector<ScanReplica> scan_replicas(double gamma, double lambda, std::int64_t n, std::int64_t replicas,
                                       std::uint64_t seed, int threads, bool keep_scans, ScanMode mode) {
  detail::require(replicas >= 1, "scan_replicas: replicas must be >= 1");
  const BoxHierarchy h = build_boxes(gamma, lambda, n);
  check_scan_heights(h);
  BoxHierarchy head = h;
  if (mode == ScanMode::decide_last) head.levels.pop_back();
  return parallel_replicas<ScanReplica>(replicas, threads, [&](std::int64_t r) {
    ScanReplica rep;
    rep.seed = hash_combine(seed, static_cast<std::uint64_t>(r));
    const ArrowField field(rep.seed, lambda, 1.0);
    std::vector<ScanResult> scans;
    if (!head.levels.empty()) scans = scan_levels(field, head);
    for (std::size_t k = 0; k < scans.size(); ++k) {
      rep.measure.push_back(scans[k].measure());
      rep.intervals.push_back(static_cast<std::int64_t>(scans[k].intervals.size()));
      rep.nonempty.push_back(!scans[k].empty());
      if (k > 0 && !scans[k].nested_in(scans[k - 1])) rep.nested = false;
    }
    if (mode == ScanMode::decide_last) {
      const std::vector<ClosedInterval> all{{0.0, 1.0}};
      rep.witness = first_point(field, h.levels.back(), scans.empty() ? all : scans.back().intervals);
      rep.measure.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.intervals.push_back(-1);
      rep.nonempty.push_back(rep.witness.has_value());
    } else if (!scans.back().empty()) {
      rep.witness = scans.back().intervals.front().lo;
    }
    if (keep_scans) rep.scans = std::move(scans);
    return rep;
  });
}

NonemptyEstimate summarize_scans(const std::vector<ScanReplica>& reps, const BoxHierarchy& h) {
  detail::require(!reps.empty(), "summarize_scans: no replicas");
  NonemptyEstimate e;
  e.n = h.depth();
  const auto probs = box_event_probabilities(h);
  const auto R = static_cast<std::int64_t>(reps.size());
  double prod = 1.0;
  for (std::size_t k = 0; k < h.levels.size(); ++k) {
    std::int64_t nonempty = 0;
    double sum = 0, sum2 = 0;
    for (const auto& rep : reps) {
      if (rep.nonempty[k]) ++nonempty;
      sum += rep.measure[k];
      sum2 += rep.measure[k] * rep.measure[k];
    }
    const double mean = sum / static_cast<double>(R);
    const double var = R > 1 ? std::max(0.0, (sum2 - sum * mean) / static_cast<double>(R - 1)) : 0.0;
    e.per_level.push_back(wilson(nonempty, R));
    e.mean_measure.push_back(mean);
    e.measure_stderr.push_back(std::sqrt(var / static_cast<double>(R)));
    prod *= probs[k];
    e.expected_measure.push_back(prod);
    e.sup_inverse_prob = std::max(e.sup_inverse_prob, 1.0 / probs[k]);
  }
  e.final_level = e.per_level.back();
  e.nesting_ok = std::all_of(reps.begin(), reps.end(), [](const ScanReplica& r) { return r.nested; });
  return e;
}

NonemptyEstimate estimate_nonempty_prob(double gamma, double lambda, std::int64_t n, std::int64_t replicas,
                                        std::uint64_t seed, int threads, ScanMode mode) {
  const auto reps = scan_replicas(gamma, lambda, n, replicas, seed, threads, false, mode);
  return summarize_scans(reps, build_boxes(gamma, lambda, n));
}

std::vector<WeightedInterval> scan_measure(const ScanResult& scan, const std::vector<double>& box_probs) {
  detail::require(static_cast<std::int64_t>(box_probs.size()) >= scan.n + 1,
                  "scan_measure: need P(A_k) for every level of the scan");
  double w = 1.0;
  for (std::int64_t k = 0; k <= scan.n; ++k) w /= box_probs[static_cast<std::size_t>(k)];
  std::vector<WeightedInterval> out;
  for (const auto& iv : scan.intervals) out.push_back({iv.lo, iv.hi, w});
  return out;
}

double alpha_energy(const std::vector<WeightedInterval>& measure, double alpha) {
  detail::require(alpha > 0.0, "alpha_energy: alpha must be positive");
  if (alpha >= 1.0) {
    for (const auto& w : measure)
      if (w.hi > w.lo && w.weight > 0) return std::numeric_limits<double>::infinity();
    return 0.0;
  }
  const double c = 1.0 / ((1.0 - alpha) * (2.0 - alpha));
  auto G = [&](double u) { return c * std::pow(std::abs(u), 2.0 - alpha); };
  double e = 0;
  for (const auto& p : measure) {
    for (const auto& q : measure) {
      const double pair = G(p.hi - q.lo) - G(p.lo - q.lo) - G(p.hi - q.hi) + G(p.lo - q.hi);
      e += p.weight * q.weight * pair;
    }
  }
  return e;
}

}  // namespace ddw
