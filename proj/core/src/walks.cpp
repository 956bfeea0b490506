#include <algorithm>
#include <cmath>
#include <string>

#include "ddw/analysis.hpp"
#include "ddw/arrow_field.hpp"
#include "ddw/error.hpp"
#include "ddw/random.hpp"
#include "ddw/web.hpp"

namespace ddw {

double drift_step_probability(double epsilon) { return 0.5 - 0.5 * std::expm1(-epsilon); }

DriftWalk drifting_static_walk(DriftMode mode, double epsilon, double K, std::int64_t horizon, std::uint64_t seed,
                               double s0) {
  detail::require(epsilon >= 0.0 && epsilon <= 1.0, "drifting_static_walk: epsilon must lie in [0, 1]");
  detail::require(horizon >= 0, "drifting_static_walk: horizon must be nonnegative");
  detail::require(s0 >= 0.0, "drifting_static_walk: s0 must be nonnegative");
  DriftWalk w;
  if (mode == DriftMode::direct) {
    const double p = drift_step_probability(epsilon);
    SplitMix64 rng = make_stream(seed, 0xd1);
    w.steps.resize(static_cast<std::size_t>(horizon));
    for (auto& s : w.steps) s = uniform01(rng) < p ? 1 : -1;
  } else {
    const ArrowField field(seed, drift_field_lambda, std::max(1.0, s0 + epsilon));
    const IntervalExtremumArrows arrows(field, s0, s0 + epsilon, Extremum::max);
    w.steps = forward_path(arrows, SiteCoord{0, 0}, s0, horizon).steps;
  }
  const LatticePath path{0, 0, s0, PathDirection::forward, w.steps};
  w.survived = boundary_survival(path, 1.0, K);
  return w;
}

namespace {

// Survival of the walk following the max-arrow configuration of [lo, hi]
// against -1 - K sqrt(n) up to the horizon. barrier[n] = -1 - K sqrt(n).
bool interval_survives(const ArrowField& field, double lo, double hi, const std::vector<double>& barrier) {
  const auto H = static_cast<std::int64_t>(barrier.size()) - 1;
  std::int64_t x = 0;
  for (std::int64_t m = 1; m <= H; ++m) {
    x += field.extremal_unchecked(x, m - 1, lo, hi, Extremum::max);
    const auto dx = static_cast<double>(x);
    if (dx < barrier[static_cast<std::size_t>(m)]) return false;
    // Even stepping left every time from here on cannot reach the barrier.
    if (m < H && dx - static_cast<double>(H - m) >= barrier[static_cast<std::size_t>(m + 1)]) return true;
  }
  return true;
}

}  // namespace

BoxCountResult box_count_dimension(double K, const std::vector<double>& epsilons, std::int64_t horizon,
                                   std::int64_t replicas, std::uint64_t seed, int threads) {
  if (epsilons.size() < 4) throw DomainError("box_count_dimension: need at least 4 epsilon values");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    detail::require(epsilons[i] > 0.0 && epsilons[i] <= 1.0, "box_count_dimension: epsilons must lie in (0, 1]");
    if (i > 0) detail::require(epsilons[i] < epsilons[i - 1], "box_count_dimension: epsilons must be decreasing");
  }
  detail::require(K > 0.0, "box_count_dimension: K must be positive");
  detail::require(horizon >= 1 && replicas >= 2, "box_count_dimension: need horizon >= 1 and replicas >= 2");
  std::vector<double> barrier(static_cast<std::size_t>(horizon) + 1);
  for (std::size_t n = 0; n < barrier.size(); ++n) barrier[n] = -1.0 - K * std::sqrt(static_cast<double>(n));
  const std::size_t E = epsilons.size();
  const auto counts = parallel_replicas<std::vector<std::int64_t>>(replicas, threads, [&](std::int64_t r) {
    const ArrowField field(hash_combine(seed, static_cast<std::uint64_t>(r)), drift_field_lambda, 1.0);
    std::vector<std::int64_t> n_eps(E, 0);
    std::vector<char> prev_ok;
    double prev_eps = 0;
    for (std::size_t e = 0; e < E; ++e) {
      const double eps = epsilons[e];
      const auto cells = static_cast<std::int64_t>(std::ceil(1.0 / eps - 1e-9));
      std::vector<char> ok(static_cast<std::size_t>(cells), 0);
      for (std::int64_t m = 0; m < cells; ++m) {
        const double lo = static_cast<double>(m) * eps;
        const double hi = std::min(1.0, lo + eps);
        // A cell inside a failed coarser cell reads pointwise smaller arrows,
        // so its walk stays left of the failed one and fails too.
        if (e > 0) {
          const auto j = static_cast<std::size_t>(std::floor(lo / prev_eps + 1e-12));
          const double jhi = std::min(1.0, static_cast<double>(j + 1) * prev_eps);
          if (j < prev_ok.size() && hi <= jhi + 1e-12 && !prev_ok[j]) continue;
        }
        if (interval_survives(field, lo, hi, barrier)) {
          ok[static_cast<std::size_t>(m)] = 1;
          ++n_eps[e];
        }
      }
      prev_ok = std::move(ok);
      prev_eps = eps;
    }
    return n_eps;
  });
  BoxCountResult out;
  out.K = K;
  out.horizon = horizon;
  out.replicas = replicas;
  out.epsilons = epsilons;
  std::vector<double> lx, ly;
  for (std::size_t e = 0; e < E; ++e) {
    double s = 0, s2 = 0;
    for (const auto& c : counts) {
      s += static_cast<double>(c[e]);
      s2 += static_cast<double>(c[e]) * static_cast<double>(c[e]);
    }
    const double R = static_cast<double>(replicas);
    const double mean = s / R;
    out.mean_counts.push_back(mean);
    out.count_stderr.push_back(std::sqrt(std::max(0.0, (s2 - s * mean) / (R - 1)) / R));
    if (mean <= 0.0)
      throw NumericalError("box_count_dimension: no surviving cell at eps = " + std::to_string(epsilons[e]));
    lx.push_back(std::log(1.0 / epsilons[e]));
    ly.push_back(std::log(mean));
  }
  out.fit = least_squares(lx, ly);
  out.slope = out.fit.slope;
  return out;
}

double theta_tilde(double p) {
  if (!(p > 0.5 && p <= 1.0)) throw DomainError("theta_tilde: p must lie in (1/2, 1]");
  return (2 * p - 1) / p;
}

NoLeftVisit no_left_visit_probability(double p, std::int64_t replicas, std::int64_t horizon,
                                      std::int64_t escape_margin, std::uint64_t seed, int threads) {
  detail::require(p > 0.5 && p <= 1.0, "no_left_visit_probability: p must lie in (1/2, 1]");
  detail::require(replicas >= 1 && horizon >= 1 && escape_margin >= 1,
                  "no_left_visit_probability: replicas, horizon and margin must be >= 1");
  // 0 = visited left, 1 = escaped, 2 = undecided at the horizon.
  const auto outcome = parallel_replicas<char>(replicas, threads, [&](std::int64_t r) -> char {
    const BiasedStaticArrows arrows(hash_combine(seed, static_cast<std::uint64_t>(r)), p);
    const auto hits = recurrence_check(arrows, SiteCoord{0, 0}, 0.0, horizon, escape_margin);
    if (hits.hit_left) return 0;
    return hits.escaped ? 1 : 2;
  });
  NoLeftVisit out;
  out.p = p;
  out.escape_margin = escape_margin;
  out.horizon = horizon;
  std::int64_t esc = 0;
  for (char c : outcome) {
    esc += c == 1;
    out.undecided += c == 2;
  }
  out.raw = wilson(esc, replicas);
  out.tail_correction = 1.0 - std::pow((1 - p) / p, static_cast<double>(escape_margin + 1));
  out.estimate = out.raw.p_hat * out.tail_correction;
  return out;
}

}  // namespace ddw
