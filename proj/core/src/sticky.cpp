#include "ddw/sticky.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ddw/error.hpp"
#include "ddw/random.hpp"

namespace ddw {

std::pair<std::int64_t, std::int64_t> StickyPairSample::endpoint() const {
  std::int64_t a = 0, b = 0;
  for (auto d : walk1) a += d;
  for (auto d : walk2) b += d;
  return {a, b};
}

StickyPairSample sticky_pair(double theta, std::int64_t horizon, std::uint64_t seed) {
  detail::require(theta >= 0.0 && !std::isnan(theta), "sticky_pair: theta must be nonnegative");
  detail::require(horizon >= 0, "sticky_pair: horizon must be nonnegative");
  StickyPairSample out;
  out.theta = theta;
  out.horizon = horizon;
  out.walk1.reserve(static_cast<std::size_t>(horizon));
  out.walk2.reserve(static_cast<std::size_t>(horizon));
  SplitMix64 s1 = make_stream(seed, 1), s2 = make_stream(seed, 2), s3 = make_stream(seed, 3);
  SplitMix64 hold = make_stream(seed, 4);
  auto draw_holding = [&]() -> std::int64_t {
    if (theta == 0.0) return infinite_holding;
    const double e = exponential(hold, theta);
    return e >= 9e18 ? infinite_holding : static_cast<std::int64_t>(std::floor(e));
  };
  std::int64_t t = 0;
  while (t < horizon) {
    const std::int64_t T = draw_holding();
    out.holding_times.push_back(T);
    for (std::int64_t k = 0; k < T && t < horizon; ++k, ++t) {
      const auto d = static_cast<std::int8_t>(fair_sign(s3));
      out.walk1.push_back(d);
      out.walk2.push_back(d);
    }
    std::int64_t gap = 0;
    do {
      if (t >= horizon) break;
      const auto a = static_cast<std::int8_t>(fair_sign(s1));
      const auto b = static_cast<std::int8_t>(fair_sign(s2));
      out.walk1.push_back(a);
      out.walk2.push_back(b);
      gap += a - b;
      ++t;
    } while (gap != 0);
  }
  return out;
}

double PairLaw::total() const {
  double s = 0;
  for (const auto& [k, v] : table) s += v;
  return s;
}

PairLaw exact_pair_law(double theta, std::int64_t t) {
  detail::require(theta >= 0.0 && !std::isnan(theta), "exact_pair_law: theta must be nonnegative");
  if (t < 0 || t > exact_pair_law_max_t)
    throw DomainError("exact_pair_law: t must lie in [0, " + std::to_string(exact_pair_law_max_t) + "]");
  const double stay = std::exp(-theta);
  const std::int64_t w = 2 * t + 1;
  auto idx = [&](std::int64_t a, std::int64_t b) { return static_cast<std::size_t>((a + t) * w + (b + t)); };
  std::vector<double> cur(static_cast<std::size_t>(w * w), 0.0), nxt(cur.size());
  cur[idx(0, 0)] = 1.0;
  for (std::int64_t step = 0; step < t; ++step) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::int64_t a = -step; a <= step; ++a) {
      for (std::int64_t b = -step; b <= step; ++b) {
        const double m = cur[idx(a, b)];
        if (m == 0.0) continue;
        if (a == b) {
          // No ring: one shared fair step. Ring: a coin makes them coincide
          // (shared fair step) or separate into one of the two unequal moves.
          const double joint = stay / 2 + (1 - stay) / 4;
          const double split = (1 - stay) / 4;
          nxt[idx(a + 1, b + 1)] += m * joint;
          nxt[idx(a - 1, b - 1)] += m * joint;
          nxt[idx(a + 1, b - 1)] += m * split;
          nxt[idx(a - 1, b + 1)] += m * split;
        } else {
          for (int da : {-1, 1})
            for (int db : {-1, 1}) nxt[idx(a + da, b + db)] += m / 4;
        }
      }
    }
    std::swap(cur, nxt);
  }
  PairLaw law;
  law.t = t;
  for (std::int64_t a = -t; a <= t; ++a)
    for (std::int64_t b = -t; b <= t; ++b)
      if (cur[idx(a, b)] > 0.0) law.table[{a, b}] = cur[idx(a, b)];
  return law;
}

PairDistance pair_distance(const PairSamples& samples, const PairLaw& law, std::uint64_t seed, int bootstrap) {
  if (samples.empty()) throw DomainError("pair_distance: no samples");
  for (const auto& [a, b] : samples) {
    if (((a + law.t) & 1) != 0 || ((b + law.t) & 1) != 0)
      throw DomainError("pair_distance: sample parity does not match t = " + std::to_string(law.t));
  }
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> counts;
  for (const auto& s : samples) ++counts[s];
  const double n = static_cast<double>(samples.size());
  auto tv_against = [&](const std::map<std::pair<std::int64_t, std::int64_t>, double>& p,
                        const std::map<std::pair<std::int64_t, std::int64_t>, double>& q) {
    double d = 0;
    for (const auto& [k, v] : p) {
      auto it = q.find(k);
      d += std::abs(v - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : q)
      if (!p.count(k)) d += v;
    return d / 2;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, double> empirical;
  for (const auto& [k, c] : counts) empirical[k] = static_cast<double>(c) / n;
  PairDistance out;
  out.samples = samples.size();
  out.tv = tv_against(empirical, law.table);
  if (bootstrap > 0) {
    SplitMix64 rng = make_stream(seed, 0xb007);
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(bootstrap));
    for (int b = 0; b < bootstrap; ++b) {
      // Multinomial resample through a chain of conditional binomials.
      std::map<std::pair<std::int64_t, std::int64_t>, double> resampled;
      std::int64_t left = static_cast<std::int64_t>(samples.size());
      double mass_left = 1.0;
      for (const auto& [k, p] : empirical) {
        if (left == 0) break;
        const double q = std::clamp(p / mass_left, 0.0, 1.0);
        std::binomial_distribution<std::int64_t> bin(left, q);
        const std::int64_t c = bin(rng);
        if (c > 0) resampled[k] = static_cast<double>(c) / n;
        left -= c;
        mass_left -= p;
      }
      dist.push_back(tv_against(resampled, empirical));
    }
    std::sort(dist.begin(), dist.end());
    out.radius = dist[static_cast<std::size_t>(0.95 * (dist.size() - 1))];
  }
  return out;
}

}  // namespace ddw
