#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "ddw/error.hpp"
#include "ddw/arrow_field.hpp"
#include "ddw/random.hpp"
#include "ddw/web.hpp"

using namespace ddw;

TEST_CASE("forward paths") {
  ArrowField field(1, 1.0, 1.0);

  SUBCASE("zero horizon") {
    const auto p = forward_path(field, {4, 2}, 0.3, 0);
    CHECK(p.length() == 0);
    CHECK(p.end_position() == 4);
    CHECK(p.positions() == std::vector<std::int64_t>{4});
  }

  SUBCASE("all arrows +1") {
    const auto p = forward_path(ConstantArrows{1}, {-2, 6}, 0.0, 50);
    const auto pos = p.positions();
    for (std::size_t n = 0; n < pos.size(); ++n) CHECK(pos[n] == -2 + static_cast<std::int64_t>(n));
  }

  SUBCASE("increments behave like a simple random walk") {
    const std::int64_t n = 1000000;
    const auto p = forward_path(field, {0, 0}, 0.5, n);
    double sum = 0, sq = 0;
    for (auto d : p.steps) {
      sum += d;
      sq += d * d;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(double(n)));
    CHECK((sq / n - mean * mean) == doctest::Approx(1.0).epsilon(0.01));
  }

  SUBCASE("parity") { CHECK_THROWS_AS(forward_path(field, {1, 0}, 0.0, 3), ParityError); }
}

TEST_CASE("dual paths") {
  ArrowField field(2, 1.0, 1.0);

  SUBCASE("zero length") {
    const auto d = backward_path(field, {1, 4}, 0.0, 0);
    CHECK(d.length() == 0);
    CHECK(d.end_position() == 1);
  }

  SUBCASE("a right arrow below sends the dual path left") {
    const auto d = backward_path(ConstantArrows{1}, {0, 1}, 0.0, 1);
    CHECK(d.end_position() == -1);
    CHECK(d.level(1) == 0);
  }

  SUBCASE("cannot leave the simulated range") {
    CHECK_THROWS_AS(backward_path(field, {0, 3}, 0.0, 4), DomainError);
    CHECK_THROWS_AS(backward_path(field, {0, 2}, 0.0, 1), ParityError);
  }

  SUBCASE("dual paths never cross forward paths") {
    std::int64_t crossings = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      ArrowField f(seed, 1.0, 1.0);
      const std::int64_t top = 200;
      const auto dual = backward_path(f, {1, top}, 0.0, top);
      for (std::int64_t m = 0; m < 100; ++m) {
        const std::int64_t i = -100 + 2 * m;
        crossings += count_crossings(forward_path(f, {i, 0}, 0.0, top), dual);
      }
    }
    CHECK(crossings == 0);
  }

  SUBCASE("crossing counter sees a genuine crossing") {
    // Fabricated paths that swap sides once.
    LatticePath fwd{0, 0, 0.0, PathDirection::forward, {1, 1, 1, 1}};
    LatticePath dual{3, 4, 0.0, PathDirection::backward, {1, 1, 1, 1}};
    CHECK(count_crossings(fwd, dual) == 1);
  }
}

TEST_CASE("coalescence") {
  SUBCASE("identical starts") {
    ArrowField f(3, 1.0, 1.0);
    CHECK(coalescence_time(f, {2, 0}, {2, 0}, 0.0, 10) == 0);
  }

  SUBCASE("distance 2 coalesces with high probability by 1e4") {
    const int reps = 4000;
    const std::int64_t H = 10000;
    int met = 0;
    for (int r = 0; r < reps; ++r) {
      ArrowField f(1000 + r, 1.0, 1.0);
      met += coalescence_time(f, {0, 0}, {2, 0}, 0.0, H).has_value();
    }
    // Oracle: the gap is a lazy walk on 2Z, +-2 with probability 1/4 each.
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> step(0, 3);
    int chain_met = 0;
    for (int r = 0; r < reps; ++r) {
      std::int64_t gap = 2;
      for (std::int64_t t = 0; t < H && gap != 0; ++t) {
        const int u = step(rng);
        gap += u == 0 ? 2 : (u == 1 ? -2 : 0);
      }
      chain_met += gap == 0;
    }
    const double p = double(met) / reps, q = double(chain_met) / reps;
    CHECK(p >= 0.97);
    CHECK(std::abs(p - q) <= 4.0 * std::sqrt((p * (1 - p) + q * (1 - q)) / reps));
  }

  SUBCASE("coalesced paths stay together") {
    int divergences = 0, pairs = 0;
    for (int r = 0; r < 1000; ++r) {
      ArrowField f(5000 + r, 1.0, 1.0);
      const SiteCoord a{0, 0}, b{4, 0};
      const auto t = coalescence_time(f, a, b, 0.3, 2000);
      if (!t) continue;
      ++pairs;
      const auto pa = forward_path(f, a, 0.3, *t + 300).positions();
      const auto pb = forward_path(f, b, 0.3, *t + 300).positions();
      for (auto n = static_cast<std::size_t>(*t); n < pa.size(); ++n) divergences += pa[n] != pb[n];
    }
    CHECK(pairs > 800);
    CHECK(divergences == 0);
  }

  SUBCASE("level mismatch") {
    ArrowField f(3, 1.0, 1.0);
    CHECK_THROWS_AS(coalescence_time(f, {0, 0}, {1, 1}, 0.0, 5), DomainError);
  }
}

TEST_CASE("recurrence checks") {
  SUBCASE("deterministic right drift") {
    const auto h = recurrence_check(ConstantArrows{1}, {0, 0}, 0.0, 10);
    CHECK(h.hit_right == 1);
    CHECK(!h.hit_left);
  }

  SUBCASE("p = 3/4 avoids the left neighbour with probability 2/3") {
    const int reps = 100000;
    const std::int64_t margin = 40;
    int escaped = 0;
    for (int r = 0; r < reps; ++r) {
      BiasedStaticArrows f(static_cast<std::uint64_t>(r), 0.75);
      const auto h = recurrence_check(f, {0, 0}, 0.0, 100000, margin);
      escaped += h.escaped;
    }
    // Escaping to +margin first is gambler's ruin; reaching it does not yet
    // rule out a later left visit, which has probability (1/3)^(margin+1).
    const double p = double(escaped) / reps * (1.0 - std::pow(1.0 / 3.0, margin + 1));
    CHECK(std::abs(p - 2.0 / 3.0) <= 4.0 * std::sqrt(2.0 / 9.0 / reps));
  }

  SUBCASE("p = 1/2 eventually visits the left neighbour") {
    // Oracle: P(no visit of -1 by n) by exact dynamic programming on the half
    // line for n <= 1e4, extrapolated as c / sqrt(n).
    const std::int64_t n_dp = 10000;
    std::vector<double> prob(static_cast<std::size_t>(n_dp) + 2, 0.0), next(prob.size());
    prob[0] = 1.0;  // index = position, position -1 absorbs
    for (std::int64_t t = 0; t < n_dp; ++t) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t x = 0; x + 1 < prob.size(); ++x) {
        if (prob[x] == 0.0) continue;
        next[x + 1] += 0.5 * prob[x];
        if (x > 0) next[x - 1] += 0.5 * prob[x];
      }
      prob.swap(next);
    }
    double alive = 0;
    for (double v : prob) alive += v;
    const double extrapolated = alive * std::sqrt(double(n_dp) / 1e6);
    CHECK(extrapolated <= 0.01);

    const int reps = 2000;
    int never = 0;
    for (int r = 0; r < reps; ++r) {
      ArrowField f(900000 + r, 1.0, 1.0);
      never += !recurrence_check(f, {0, 0}, 0.0, 1000000).hit_left;
    }
    CHECK(double(never) / reps <= 0.01);
  }
}

TEST_CASE("boundary survival") {
  SUBCASE("fixtures") {
    LatticePath flat{0, 0, 0.0, PathDirection::forward, {1, -1, 1, -1}};
    CHECK(boundary_survival(flat, 0.5, 0.5));
    LatticePath down{0, 0, 0.0, PathDirection::forward, {-1}};
    CHECK(!boundary_survival(down, 0.0, 0.5));
  }

  SUBCASE("k = 1, K = 2 agrees with a half-space dynamic program") {
    const std::int64_t H = 10000;
    const double k = 1.0, K = 2.0;
    // Oracle: positions offset by H so the array index is nonnegative.
    std::vector<double> prob(static_cast<std::size_t>(2 * H + 1), 0.0), next(prob.size());
    prob[static_cast<std::size_t>(H)] = 1.0;
    for (std::int64_t n = 1; n <= H; ++n) {
      std::fill(next.begin(), next.end(), 0.0);
      const double barrier = -k - K * std::sqrt(double(n));
      for (std::int64_t x = H - n + 1; x <= H + n - 1; ++x) {
        const double p = prob[static_cast<std::size_t>(x)];
        if (p == 0.0) continue;
        for (int d : {-1, 1})
          if (double(x + d - H) >= barrier) next[static_cast<std::size_t>(x + d)] += 0.5 * p;
      }
      std::swap(prob, next);
    }
    double exact = 0;
    for (double v : prob) exact += v;

    const int reps = 3000;
    int survived = 0;
    for (int r = 0; r < reps; ++r) {
      ArrowField f(r * 7 + 1, 1.0, 1.0);
      survived += boundary_survival(forward_path(f, {0, 0}, 0.2, H), k, K);
    }
    const double p = double(survived) / reps;
    CHECK(std::abs(p - exact) <= 2.0 * std::sqrt(exact * (1 - exact) / reps));
  }
}
