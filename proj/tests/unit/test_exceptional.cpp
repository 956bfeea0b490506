#include <doctest.h>

#include <cmath>
#include <random>

#include "ddw/error.hpp"
#include "ddw/analysis.hpp"
#include "ddw/exceptional.hpp"
#include "ddw/random.hpp"

using namespace ddw;

namespace {

// P(A) for a box of width d by dynamic programming over the d^2 steps with
// the left edge absorbing.
double box_probability_dp(std::int64_t d) {
  const std::int64_t H = d * d, half = d / 2;
  // index = position + half, position >= -half survives
  std::vector<double> p(static_cast<std::size_t>(half + H + 2), 0.0), q(p.size());
  p[static_cast<std::size_t>(half)] = 1.0;
  for (std::int64_t n = 0; n < H; ++n) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t x = 0; x + 1 < p.size(); ++x) {
      if (p[x] == 0.0) continue;
      q[x + 1] += 0.5 * p[x];
      if (x > 0) q[x - 1] += 0.5 * p[x];
    }
    p.swap(q);
  }
  double sum = 0;
  for (std::size_t x = static_cast<std::size_t>(2 * half); x < p.size(); ++x) sum += p[x];
  return sum;
}

}  // namespace

TEST_CASE("box hierarchy") {
  SUBCASE("lambda = 1, gamma = 3") {
    const auto h = build_boxes(3.0, 1.0, 2);
    REQUIRE(h.levels.size() == 3);
    CHECK(h.levels[0].d == 4);
    CHECK(h.levels[1].d == 4);
    CHECK(h.levels[2].d == 12);
    CHECK(h.levels[0].z == SiteCoord{0, 0});
    CHECK(h.levels[1].z == SiteCoord{2, 16});
    CHECK(h.levels[2].z == SiteCoord{4, 32});
  }

  SUBCASE("widths are multiples of 4 within 4 of gamma^k / lambda") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> g(2.0 + 1e-6, 2.8), l(0.5, 10.0);
    for (int r = 0; r < 1000; ++r) {
      const double gamma = g(rng), lambda = l(rng);
      for (std::int64_t k = 0; k <= 20; ++k) {
        const auto d = box_width(gamma, lambda, k);
        const double ref = std::pow(gamma, double(k)) / lambda;
        CHECK(d % 4 == 0);
        CHECK(double(d) > ref);
        CHECK(double(d) <= ref + 4.0);
      }
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(build_boxes(2.0, 1.0, 3), DomainError);
    CHECK_THROWS_AS(box_width(100.0, 1.0, 10), DomainError);
  }
}

TEST_CASE("K of gamma") {
  CHECK(K_of_gamma(2.0) == 0.0);
  CHECK(K_of_gamma(3.0) == doctest::Approx(std::sqrt(2.0) / 2.0));
  double prev = K_of_gamma(2.0);
  for (double g = 2.01; g <= 50.0; g += 0.01) {
    const double v = K_of_gamma(g);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("event A") {
  const auto h = build_boxes(6.0, 1.0, 2);
  CHECK(event_A(ConstantArrows{1}, h, 2, 0.0));
  CHECK(!event_A(ConstantArrows{-1}, h, 1, 0.0));

  SUBCASE("box probability against a dynamic program") {
    for (std::int64_t d : {4, 8, 12, 40, 104}) CHECK(box_event_probability(d) == doctest::Approx(box_probability_dp(d)).epsilon(1e-9));
  }

  SUBCASE("wide boxes approach P(A)") {
    const auto wide = build_boxes(10.0, 1.0, 2);
    REQUIRE(wide.levels[2].d >= 100);
    const auto est = box_event_probability_mc(wide, 2, 10000, 3);
    CHECK(std::abs(est.p_hat - prob_A_reflection()) <= 0.02);
  }
}

TEST_CASE("exceptional scans") {
  SUBCASE("an impossible first box gives an empty set") {
    int found = 0;
    for (std::uint64_t seed = 0; seed < 200 && found < 5; ++seed) {
      ArrowField f(seed, 1.0, 1.0);
      const auto h = build_boxes(6.0, 1.0, 0);
      const auto r = scan_exceptional(f, h, 0);
      if (!r.empty()) continue;
      ++found;
      CHECK(r.measure() == 0.0);
      for (int m = 0; m <= 100; ++m) CHECK(!event_A(ClosedArrows(f), h, 0, m / 100.0));
    }
    CHECK(found == 5);
  }

  SUBCASE("nesting and pointwise self-consistency") {
    const auto h = build_boxes(5.0, 1.0, 3);
    int bad = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      ArrowField f(seed, 1.0, 1.0);
      const auto scans = scan_levels(f, h);
      for (std::size_t k = 1; k < scans.size(); ++k) bad += !scans[k].nested_in(scans[k - 1]);
      const ClosedArrows closed(f);
      for (std::size_t k = 0; k < scans.size(); ++k)
        for (const auto& iv : scans[k].intervals)
          for (double s : {iv.lo, 0.5 * (iv.lo + iv.hi), iv.hi})
            for (std::size_t j = 0; j <= k; ++j) bad += !event_A(closed, h, static_cast<std::int64_t>(j), s);
    }
    CHECK(bad == 0);
  }

  SUBCASE("points outside the set fail some event") {
    const auto h = build_boxes(5.0, 1.0, 2);
    int bad = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      ArrowField f(seed, 1.0, 1.0);
      const auto scan = scan_exceptional(f, h, 2);
      for (int m = 0; m < 200; ++m) {
        const double s = (m + 0.37) / 200.0;
        bool inside = false;
        for (const auto& iv : scan.intervals) inside |= iv.lo <= s && s <= iv.hi;
        bool all = true;
        for (std::int64_t k = 0; k <= 2; ++k) all &= event_A(f, h, k, s);
        bad += inside != all;
      }
    }
    CHECK(bad == 0);
  }

  SUBCASE("Fubini: mean measure matches the product of box probabilities") {
    const auto h = build_boxes(5.0, 1.0, 3);
    const auto reps = scan_replicas(5.0, 1.0, 3, 40000, 99, 1, false, ScanMode::full);
    const auto est = summarize_scans(reps, h);
    CHECK(est.nesting_ok);
    for (std::size_t k = 0; k < est.mean_measure.size(); ++k) {
      INFO("level " << k);
      CHECK(std::abs(est.mean_measure[k] - est.expected_measure[k]) <= 2.0 * est.measure_stderr[k]);
    }
  }

  SUBCASE("the law of the scan is stationary in s") {
    const auto h = build_boxes(5.0, 1.0, 2);
    double a = 0, a2 = 0, b = 0, b2 = 0;
    const int reps = 3000;
    for (int r = 0; r < reps; ++r) {
      ArrowField f(static_cast<std::uint64_t>(r) + 40000, 1.0, 1.5);
      const double m0 = scan_exceptional(f, h, 2, 0.0, 0.5).measure();
      const double m1 = scan_exceptional(f, h, 2, 1.0, 1.5).measure();
      a += m0;
      a2 += m0 * m0;
      b += m1;
      b2 += m1 * m1;
    }
    const double ma = a / reps, mb = b / reps;
    const double va = a2 / reps - ma * ma, vb = b2 / reps - mb * mb;
    CHECK(std::abs(ma - mb) <= 4.0 * std::sqrt((va + vb) / reps));
  }

  SUBCASE("decide_last finds a point exactly when the full scan is nonempty") {
    int disagreements = 0;
    const auto full = scan_replicas(5.0, 1.0, 3, 300, 5, 1, false, ScanMode::full);
    const auto fast = scan_replicas(5.0, 1.0, 3, 300, 5, 1, false, ScanMode::decide_last);
    const auto h = build_boxes(5.0, 1.0, 3);
    for (std::size_t r = 0; r < full.size(); ++r) {
      disagreements += full[r].nonempty.back() != fast[r].nonempty.back();
      if (fast[r].witness) {
        ArrowField f(fast[r].seed, 1.0, 1.0);
        for (std::int64_t k = 0; k <= 3; ++k) disagreements += !event_A(ClosedArrows(f), h, k, *fast[r].witness);
      }
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("nonempty probability") {
  SUBCASE("level 0 is at least the fixed-s probability") {
    const auto est = estimate_nonempty_prob(50.0, 1.0, 0, 2000, 3);
    CHECK(est.final_level.p_hat >= prob_A_reflection());
    CHECK(est.final_level.ci.lo >= box_event_probability(4));
  }

  SUBCASE("non-increasing in n") {
    const auto est = estimate_nonempty_prob(5.0, 1.0, 4, 300, 9);
    for (std::size_t k = 1; k < est.per_level.size(); ++k)
      CHECK(est.per_level[k].successes <= est.per_level[k - 1].successes);
    CHECK(est.nesting_ok);
    CHECK(est.sup_inverse_prob == doctest::Approx(1.0 / box_event_probability(628)).epsilon(1e-9));
  }
}

TEST_CASE("alpha energy") {
  SUBCASE("unit interval, alpha = 1/2") {
    CHECK(alpha_energy({{0.0, 1.0, 1.0}}, 0.5) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    // Quadrature of the one-dimensional reduction 2 int_0^1 (1 - u) u^-a du,
    // with u = v^2 to remove the singularity.
    const int n = 200000;
    double q = 0;
    for (int m = 0; m < n; ++m) {
      const double v = (m + 0.5) / n, u = v * v;
      q += 2.0 * (1.0 - u) * std::pow(u, -0.5) * 2.0 * v / n;
    }
    CHECK(q == doctest::Approx(8.0 / 3.0).epsilon(1e-6));
  }

  SUBCASE("disjoint weighted intervals against a midpoint rule") {
    const std::vector<WeightedInterval> m{{0.0, 0.2, 2.0}, {0.5, 0.6, 0.5}};
    const double alpha = 0.3;
    const int n = 2000;
    // Cross term only: each interval with the other.
    double cross = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double s = 0.2 * (a + 0.5) / n, t = 0.5 + 0.1 * (b + 0.5) / n;
        cross += std::pow(t - s, -alpha) * (0.2 / n) * (0.1 / n) * 2.0 * 0.5;
      }
    const double self0 = alpha_energy({m[0]}, alpha), self1 = alpha_energy({m[1]}, alpha);
    CHECK(alpha_energy(m, alpha) == doctest::Approx(self0 + self1 + 2.0 * cross).epsilon(1e-6));
  }

  SUBCASE("degenerate cases") {
    CHECK(alpha_energy({}, 0.5) == 0.0);
    CHECK(std::isinf(alpha_energy({{0.0, 0.1, 1.0}}, 1.0)));
    CHECK_THROWS_AS(alpha_energy({{0.0, 0.1, 1.0}}, 0.0), DomainError);
  }

  SUBCASE("energy of the scan measure at gamma = 8") {
    // b = log(sup 1/P(A_k)) / log gamma ~ 0.68. Below alpha = 1 - b the
    // energy stays bounded, but the level-n increments only shrink like
    // gamma^(alpha + b - 1) per level, so levels 0..3 still grow.
    const std::int64_t n = 3, reps = 1000;
    const auto h = build_boxes(8.0, 1.0, n);
    const auto probs = box_event_probabilities(h);
    const std::vector<double> alphas{0.05, 0.2, 0.5};
    std::vector<std::vector<double>> energy(alphas.size(), std::vector<double>(n + 1, 0.0));
    std::vector<double> mass(n + 1, 0.0), mass2(n + 1, 0.0);
    for (std::int64_t r = 0; r < reps; ++r) {
      ArrowField f(hash_combine(77, static_cast<std::uint64_t>(r)), 1.0, 1.0);
      const auto scans = scan_levels(f, h);
      for (std::int64_t k = 0; k <= n; ++k) {
        const auto sigma = scan_measure(scans[static_cast<std::size_t>(k)], probs);
        double m = 0;
        for (const auto& w : sigma) m += w.weight * (w.hi - w.lo);
        mass[static_cast<std::size_t>(k)] += m / reps;
        mass2[static_cast<std::size_t>(k)] += m * m / reps;
        for (std::size_t a = 0; a < alphas.size(); ++a)
          energy[a][static_cast<std::size_t>(k)] += alpha_energy(sigma, alphas[a]) / reps;
      }
    }
    for (std::int64_t k = 0; k <= n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const double se = std::sqrt((mass2[kk] - mass[kk] * mass[kk]) / reps);
      INFO("level " << k << " mass " << mass[kk] << " +- " << se);
      CHECK(std::abs(mass[kk] - 1.0) <= 3.0 * se);
      for (std::size_t a = 0; a < alphas.size(); ++a) CHECK(std::isfinite(energy[a][kk]));
    }
    // Larger alpha grows faster across the levels.
    const auto growth = [&](std::size_t a) { return energy[a][n] / energy[a][1]; };
    CHECK(growth(0) < growth(1));
    CHECK(growth(1) < growth(2));
  }

  SUBCASE("scan measure carries the product density") {
    const auto h = build_boxes(5.0, 1.0, 1);
    const auto probs = box_event_probabilities(h);
    ScanResult r;
    r.n = 1;
    r.intervals = {{0.1, 0.2}, {0.5, 0.55}};
    const auto w = scan_measure(r, probs);
    REQUIRE(w.size() == 2);
    CHECK(w[0].weight == doctest::Approx(1.0 / (probs[0] * probs[1])));
  }
}
