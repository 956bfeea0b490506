#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ddw/error.hpp"
#include "ddw/sticky.hpp"
#include "ddw/stats.hpp"

using namespace ddw;

namespace {

using Law = std::map<std::pair<std::int64_t, std::int64_t>, double>;

// Enumerates rings and coins step by step. Together, the arrow read at s is a
// coin A; the one read at s' is A again when the clock stays silent and an
// independent coin B when it rings. Apart, the two walks read different sites.
void enumerate(double theta, int steps_left, std::int64_t x, std::int64_t y, double w, Law& out) {
  if (steps_left == 0) {
    out[{x, y}] += w;
    return;
  }
  const double silent = std::exp(-theta);
  for (int a : {-1, 1}) {
    if (x == y) {
      enumerate(theta, steps_left - 1, x + a, y + a, w * silent * 0.5, out);
      for (int b : {-1, 1}) enumerate(theta, steps_left - 1, x + a, y + b, w * (1 - silent) * 0.25, out);
    } else {
      for (int b : {-1, 1}) enumerate(theta, steps_left - 1, x + a, y + b, w * 0.25, out);
    }
  }
}

}  // namespace

TEST_CASE("exact pair law") {
  SUBCASE("one fully stuck step") {
    const auto law = exact_pair_law(0.0, 1);
    CHECK(law.table.at({1, 1}) == doctest::Approx(0.5));
    CHECK(law.table.at({-1, -1}) == doctest::Approx(0.5));
    CHECK(law.total() == doctest::Approx(1.0));
  }

  SUBCASE("independent steps in the large-theta limit") {
    const auto law = exact_pair_law(60.0, 1);
    for (auto key : {std::pair<std::int64_t, std::int64_t>{1, 1}, {1, -1}, {-1, 1}, {-1, -1}})
      CHECK(law.table.at(key) == doctest::Approx(0.25));
  }

  SUBCASE("two steps against exhaustive ring and coin enumeration") {
    const auto law = exact_pair_law(0.5, 2);
    Law oracle;
    enumerate(0.5, 2, 0, 0, 1.0, oracle);
    for (const auto& [key, p] : oracle) CHECK(law.table.at(key) == doctest::Approx(p).epsilon(1e-12));
    double dp_total = 0;
    for (const auto& [key, p] : law.table)
      if (p > 0) {
        CHECK(oracle.count(key) == 1);
        dp_total += p;
      }
    CHECK(dp_total == doctest::Approx(1.0));
  }

  SUBCASE("eight steps against enumeration") {
    const auto law = exact_pair_law(0.5, 8);
    Law oracle;
    enumerate(0.5, 8, 0, 0, 1.0, oracle);
    for (const auto& [key, p] : oracle) CHECK(law.table.at(key) == doctest::Approx(p).epsilon(1e-10));
  }

  SUBCASE("horizon limit") { CHECK_THROWS_AS(exact_pair_law(0.5, exact_pair_law_max_t + 1), DomainError); }
}

TEST_CASE("sticky pair sampler") {
  SUBCASE("theta = 0 never separates") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto p = sticky_pair(0.0, 200, seed);
      CHECK(p.walk1 == p.walk2);
      REQUIRE(!p.holding_times.empty());
      CHECK(p.holding_times.front() == infinite_holding);
    }
  }

  SUBCASE("large theta releases every meeting at once") {
    int meetings = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto p = sticky_pair(50.0, 300, seed);
      for (auto T : p.holding_times) CHECK(T == 0);
      meetings += static_cast<int>(p.holding_times.size());
    }
    CHECK(meetings > 1000);
  }

  SUBCASE("holding times are geometric on {0, 1, ...}") {
    std::vector<double> holds;
    for (std::uint64_t seed = 0; holds.size() < 100000; ++seed)
      for (auto T : sticky_pair(0.5, 200, seed).holding_times)
        if (T != infinite_holding) holds.push_back(static_cast<double>(T));
    const auto ks = ks_test(holds, [](double x) { return x < 0 ? 0.0 : 1.0 - std::exp(-0.5 * (std::floor(x) + 1)); });
    CHECK(ks.p_value > 0.01);
  }

  SUBCASE("law at t = 8") {
    PairSamples samples;
    samples.reserve(1000000);
    for (std::uint64_t seed = 0; seed < 1000000; ++seed) samples.push_back(sticky_pair(0.5, 8, seed).endpoint());
    const auto d = pair_distance(samples, exact_pair_law(0.5, 8));
    CHECK(d.tv < 0.01);
  }
}

TEST_CASE("pair distance") {
  SUBCASE("samples from the law itself") {
    const auto law = exact_pair_law(0.5, 8);
    std::vector<std::pair<std::int64_t, std::int64_t>> keys;
    std::vector<double> w;
    for (const auto& [k, p] : law.table) {
      keys.push_back(k);
      w.push_back(p);
    }
    std::mt19937_64 rng(5);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    PairSamples samples(1000000);
    for (auto& s : samples) s = keys[pick(rng)];
    const auto d = pair_distance(samples, law);
    CHECK(d.tv < 0.005);
    CHECK(d.radius > 0.0);
  }

  SUBCASE("point mass against a two-point law") {
    PairLaw law;
    law.t = 1;
    law.table[{1, 1}] = 0.5;
    law.table[{-1, -1}] = 0.5;
    PairSamples samples(1000, {1, 1});
    CHECK(pair_distance(samples, law).tv == doctest::Approx(0.5));
  }

  SUBCASE("parity mismatch") {
    PairSamples samples{{0, 0}};
    CHECK_THROWS_AS(pair_distance(samples, exact_pair_law(0.5, 1)), DomainError);
  }
}
