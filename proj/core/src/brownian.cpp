#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "ddw/analysis.hpp"
#include "ddw/error.hpp"
#include "ddw/random.hpp"

namespace ddw {

McEstimate prob_A_monte_carlo(std::int64_t paths, std::uint64_t seed, double dt, int threads) {
  detail::require(paths >= 1, "prob_A_monte_carlo: need at least one path");
  detail::require(dt > 0.0 && dt <= 0.5, "prob_A_monte_carlo: dt must lie in (0, 0.5]");
  const auto steps = static_cast<std::int64_t>(std::llround(1.0 / dt));
  const double h = 1.0 / static_cast<double>(steps);
  const double sh = std::sqrt(h);
  const auto hit = parallel_replicas<char>(paths, threads, [&](std::int64_t r) -> char {
    SplitMix64 rng = make_stream(seed, static_cast<std::uint64_t>(r), 0xa);
    NormalSampler normal;
    double x = 0.5;
    for (std::int64_t n = 0; n < steps; ++n) {
      const double y = x + sh * normal(rng);
      if (y <= 0.0) return 0;
      if (uniform01(rng) < std::exp(-2.0 * x * y / h)) return 0;
      x = y;
    }
    return x > 1.0 ? 1 : 0;
  });
  std::int64_t s = 0;
  for (char c : hit) s += c;
  return {wilson(s, paths), h};
}

SurvivalCurve bm_first_passage_survival(double k, double K, double drift, std::vector<double> checkpoints,
                                        std::int64_t replicas, std::uint64_t seed, double dt, double rel_step,
                                        int threads) {
  detail::require(k >= 0.0, "bm_first_passage_survival: k must be nonnegative");
  detail::require(replicas >= 1, "bm_first_passage_survival: replicas must be >= 1");
  detail::require(!checkpoints.empty(), "bm_first_passage_survival: no checkpoints");
  std::sort(checkpoints.begin(), checkpoints.end());
  detail::require(checkpoints.front() > 0.0, "bm_first_passage_survival: checkpoints must be positive");
  const double t_max = checkpoints.back();
  if (!(dt > 0.0 && dt <= 1e-3 * t_max))
    throw DomainError("bm_first_passage_survival: dt too coarse (need 0 < dt <= 1e-3 * t)");
  detail::require(rel_step > 0.0 && rel_step <= 0.01, "bm_first_passage_survival: rel_step must lie in (0, 0.01]");
  const std::size_t nc = checkpoints.size();
  auto boundary = [&](double t) { return -k - K * std::sqrt(t); };
  // Per replica: number of checkpoints reached alive.
  const auto reached = parallel_replicas<std::int32_t>(replicas, threads, [&](std::int64_t r) -> std::int32_t {
    SplitMix64 rng = make_stream(seed, static_cast<std::uint64_t>(r), 0xf9);
    NormalSampler normal;
    double t = 0.0, x = 0.0, b = boundary(0.0);
    std::size_t idx = 0;
    if (x <= b) return 0;
    while (idx < nc) {
      double h = std::max(dt, rel_step * t);
      bool lands = false;
      if (t + h >= checkpoints[idx]) {
        h = checkpoints[idx] - t;
        lands = true;
      }
      if (h > 0.0) {
        const double t1 = lands ? checkpoints[idx] : t + h;
        const double y = x + drift * h + std::sqrt(h) * normal(rng);
        const double b1 = boundary(t1);
        if (y <= b1) break;
        if (uniform01(rng) < std::exp(-2.0 * (x - b) * (y - b1) / h)) break;
        t = t1;
        x = y;
        b = b1;
      }
      while (idx < nc && t >= checkpoints[idx]) ++idx;
    }
    return static_cast<std::int32_t>(idx);
  });
  std::vector<std::int64_t> alive(nc + 1, 0);
  for (auto v : reached) ++alive[static_cast<std::size_t>(v)];
  SurvivalCurve c;
  c.k = k;
  c.K = K;
  c.drift = drift;
  c.dt = dt;
  c.replicas = replicas;
  c.times = checkpoints;
  std::int64_t cum = 0;
  std::vector<std::int64_t> survived(nc);
  for (std::size_t i = nc; i-- > 0;) {
    cum += alive[i + 1];
    survived[i] = cum;
  }
  for (std::size_t i = 0; i < nc; ++i) c.survival.push_back(wilson(survived[i], replicas));
  return c;
}

ExponentFit first_passage_exponent(double K, double k, double t_lo, double t_hi, std::int64_t replicas,
                                   std::uint64_t seed, int points, double dt, int threads) {
  detail::require(t_lo > 0.0 && t_hi > t_lo, "first_passage_exponent: need 0 < t_lo < t_hi");
  detail::require(points >= 2, "first_passage_exponent: need at least two fit points");
  std::vector<double> ck;
  for (int i = 0; i < points; ++i)
    ck.push_back(t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (points - 1)));
  ExponentFit out;
  out.curve = bm_first_passage_survival(k, K, 0.0, ck, replicas, seed, dt, 1e-3, threads);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ck.size(); ++i) {
    const auto& s = out.curve.survival[i];
    if (s.successes == 0) throw NumericalError("first_passage_exponent: no survivors at t = " + std::to_string(ck[i]));
    lx.push_back(std::log(ck[i]));
    ly.push_back(std::log(s.p_hat));
  }
  out.fit = least_squares(lx, ly);
  out.exponent = -out.fit.slope;
  return out;
}

double exit_right_probability(double epsilon) {
  if (epsilon == 0.0) return 0.5;
  return std::expm1(4 * epsilon) / (std::exp(4 * epsilon) - std::exp(-4 * epsilon));
}

ExitWalk embedded_exit_walk(double epsilon, std::int64_t n_exits, std::uint64_t seed, double dt,
                            std::int64_t store_walk) {
  detail::require(epsilon >= 0.0, "embedded_exit_walk: epsilon must be nonnegative");
  detail::require(n_exits >= 1, "embedded_exit_walk: need at least one exit");
  if (!(dt > 0.0 && dt <= 1e-4)) throw DomainError("embedded_exit_walk: dt too coarse (need dt <= 1e-4)");
  SplitMix64 rng = make_stream(seed, 0xe71);
  NormalSampler normal;
  const double mu = 2 * epsilon;
  ExitWalk w;
  w.epsilon = epsilon;
  w.dt = dt;
  w.exits = n_exits;
  std::int64_t right = 0, centre = 0;
  double sum_t = 0, sum_t2 = 0;
  if (store_walk > 0) w.walk.push_back(0);
  for (std::int64_t e = 0; e < n_exits; ++e) {
    // Offset from the current embedded position; exit at -1 or +1.
    double x = 0.0, t = 0.0;
    int side = 0;
    while (side == 0) {
      const double dist = std::min(1.0 - x, x + 1.0);
      const double h = std::clamp(dist * dist / 36.0, dt, 1.0 / 36.0);
      const double y = x + mu * h + std::sqrt(h) * normal(rng);
      if (y >= 1.0) {
        side = 1;
        t += h;
        break;
      }
      if (y <= -1.0) {
        side = -1;
        t += h;
        break;
      }
      const double p_up = std::exp(-2.0 * (1.0 - x) * (1.0 - y) / h);
      const double p_dn = std::exp(-2.0 * (x + 1.0) * (y + 1.0) / h);
      const double v = uniform01(rng);
      if (v < p_up) side = 1;
      else if (v < p_up + p_dn) side = -1;
      if (side != 0) {
        t += 0.5 * h;
        break;
      }
      x = y;
      t += h;
    }
    if (side > 0) ++right;
    centre += side;
    sum_t += t;
    sum_t2 += t * t;
    if (e < store_walk) w.walk.push_back(centre);
  }
  const double n = static_cast<double>(n_exits);
  w.right = wilson(right, n_exits);
  w.mean_exit_time = sum_t / n;
  w.exit_time_stderr = n > 1 ? std::sqrt(std::max(0.0, (sum_t2 - sum_t * sum_t / n) / (n - 1)) / n) : 0.0;
  return w;
}

double exit_time_survival(double t) {
  if (t <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (t >= 0.3) {
    double s = 0;
    for (int k = 0; k < 40; ++k) {
      const double m = 2 * k + 1;
      const double term = 4.0 / pi / m * std::exp(-m * m * pi * pi * t / 8.0);
      s += (k % 2 ? -term : term);
      if (term < 1e-18) break;
    }
    return std::clamp(s, 0.0, 1.0);
  }
  // P(sup |B| >= 1 by t) = 4 sum_k (-1)^k P(N > (2k+1)/sqrt t).
  double hit = 0;
  for (int k = 0; k < 40; ++k) {
    const double term = 2.0 * std::erfc((2 * k + 1) / std::sqrt(2.0 * t));
    hit += (k % 2 ? -term : term);
    if (term < 1e-300) break;
  }
  return std::clamp(1.0 - hit, 0.0, 1.0);
}

double exit_time_quantile(double survival) {
  detail::require(survival > 0.0 && survival < 1.0, "exit_time_quantile: probability must lie in (0, 1)");
  double lo = std::log(1e-3), hi = std::log(60.0);
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    (exit_time_survival(std::exp(mid)) > survival ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

CoupledDriftWalks coupled_drift_walks(double epsilon, double a, std::int64_t horizon, std::uint64_t seed) {
  detail::require(epsilon >= 0.0 && epsilon <= 1.0, "coupled_drift_walks: epsilon must lie in [0, 1]");
  if (!(a > 0.0 && a < 2.0 / 3.0)) throw DomainError("coupled_drift_walks: a must lie in (0, 2/3)");
  detail::require(horizon >= 0, "coupled_drift_walks: horizon must be nonnegative");
  CoupledDriftWalks c;
  c.epsilon = epsilon;
  c.a = a;
  c.p_X = (2 * exit_right_probability(epsilon) - 1) / 2;
  SplitMix64 tau = make_stream(seed, 0x7a), steps = make_stream(seed, 0x57), boost = make_stream(seed, 0xb0);
  if (epsilon > 0.0) {
    const double target = std::pow(epsilon, -a);
    double T = 0;
    std::int64_t n = 0;
    while (T < target) {
      T += sample_exit_time(tau);
      ++n;
    }
    c.n_epsilon = n;
  }
  c.S_prime.assign(static_cast<std::size_t>(horizon) + 1, 0);
  c.S_bar.assign(static_cast<std::size_t>(horizon) + 1, 0);
  for (std::int64_t n = 1; n <= horizon; ++n) {
    const int step = fair_sign(steps);
    const int X = uniform01(boost) < c.p_X ? 1 : 0;
    const bool boosted = c.n_epsilon && n > *c.n_epsilon;
    const auto i = static_cast<std::size_t>(n);
    c.S_prime[i] = c.S_prime[i - 1] + step + 2 * X;
    c.S_bar[i] = c.S_bar[i - 1] + step + (boosted ? 2 * X : 0);
  }
  return c;
}

CouplingGof coupling_difference_gof(double epsilon, double a, std::int64_t replicas, std::uint64_t seed,
                                    int threads) {
  detail::require(epsilon > 0.0, "coupling_difference_gof: epsilon must be positive");
  detail::require(replicas >= 1, "coupling_difference_gof: replicas must be >= 1");
  struct Draw {
    std::int64_t n_eps = 0;
    std::int64_t boosters = 0;
  };
  const auto draws = parallel_replicas<Draw>(replicas, threads, [&](std::int64_t r) {
    // n(eps) first, then the walks out to 2 n(eps).
    const auto probe = coupled_drift_walks(epsilon, a, 0, hash_combine(seed, static_cast<std::uint64_t>(r)));
    const std::int64_t n_eps = *probe.n_epsilon;
    const auto c = coupled_drift_walks(epsilon, a, 2 * n_eps, hash_combine(seed, static_cast<std::uint64_t>(r)));
    const auto i = static_cast<std::size_t>(2 * n_eps);
    return Draw{n_eps, (c.S_prime[i] - c.S_bar[i]) / 2};
  });
  const double pX = (2 * exit_right_probability(epsilon) - 1) / 2;
  std::int64_t max_n = 0;
  double sum_n = 0;
  for (const auto& d : draws) {
    max_n = std::max(max_n, d.n_eps);
    sum_n += static_cast<double>(d.n_eps);
  }
  std::vector<std::int64_t> observed(static_cast<std::size_t>(max_n) + 1, 0);
  std::vector<double> expected(observed.size(), 0.0);
  std::map<std::int64_t, std::int64_t> n_counts;
  for (const auto& d : draws) {
    ++observed[static_cast<std::size_t>(d.boosters)];
    ++n_counts[d.n_eps];
  }
  for (const auto& [n, cnt] : n_counts) {
    for (std::int64_t j = 0; j <= n; ++j) {
      const double lp = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                        static_cast<double>(j) * std::log(pX) + static_cast<double>(n - j) * std::log1p(-pX);
      expected[static_cast<std::size_t>(j)] += static_cast<double>(cnt) * std::exp(lp);
    }
  }
  CouplingGof g;
  g.replicas = replicas;
  g.mean_n_epsilon = sum_n / static_cast<double>(replicas);
  g.chi2 = chi_square_gof(observed, expected);
  return g;
}

SurvivalComparison survival_compare(double epsilon, double l, double K, std::int64_t horizon,
                                    std::int64_t replicas, std::uint64_t seed, double dt, int threads) {
  detail::require(epsilon >= 0.0 && epsilon <= 1.0, "survival_compare: epsilon must lie in [0, 1]");
  detail::require(l > 0.0 && l < 1.0, "survival_compare: l must lie in (0, 1)");
  detail::require(K > 0.0, "survival_compare: K must be positive");
  detail::require(horizon >= 1 && replicas >= 1, "survival_compare: horizon and replicas must be >= 1");
  const auto lhs = parallel_replicas<char>(replicas, threads, [&](std::int64_t r) -> char {
    return drifting_static_walk(DriftMode::direct, epsilon, l * K, horizon,
                                hash_combine(seed, static_cast<std::uint64_t>(r)))
                   .survived
               ? 1
               : 0;
  });
  std::int64_t s = 0;
  for (char c : lhs) s += c;
  SurvivalComparison out;
  out.lhs = wilson(s, replicas);
  const auto curve = bm_first_passage_survival(3.0, K, 2 * epsilon, {static_cast<double>(horizon)}, replicas,
                                               hash_combine(seed, 0x5c), dt, 1e-3, threads);
  out.rhs = curve.survival.back();
  out.ratio = out.rhs.p_hat > 0 ? out.lhs.p_hat / out.rhs.p_hat : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace ddw
