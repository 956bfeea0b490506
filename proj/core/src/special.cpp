#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ddw/analysis.hpp"
#include "ddw/error.hpp"
#include "ddw/exceptional.hpp"

namespace ddw {

namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr std::array<double, 9> lanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  x -= 1.0;
  double a = lanczos[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += lanczos[static_cast<std::size_t>(i)] / (x + i);
  return std::sqrt(2 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  if (x > 171.6) return std::numeric_limits<double>::infinity();
  // Exact on small integers.
  if (x == std::floor(x) && x <= 21) {
    double f = 1;
    for (int i = 2; i < static_cast<int>(x); ++i) f *= i;
    return f;
  }
  if (x > 20) {
    // Shift down into the range where the Lanczos sum is most accurate.
    double prod = 1;
    while (x > 20) {
      x -= 1;
      prod *= x;
    }
    return prod * lanczos_gamma(x);
  }
  return lanczos_gamma(x);
}

SatoSeries sato_log_f(double log_u, double K) {
  if (!(K > 0.0)) throw DomainError("sato_f: K must be positive");
  if (!(log_u < 0.0)) throw DomainError("sato_f: u must lie in (0, 1)");
  const double u = std::exp(log_u);
  const double log_c = std::log(std::sqrt(2.0) * K);
  // The terms peak near n ~ K^2, so the cap has to grow with it.
  const auto cap = static_cast<std::int64_t>(std::max(1e4, 8.0 * K * K + 50.0 * K + 1000.0));
  const double stop = std::log(1e-16);
  // log T_n, carried along even and odd n separately through
  // Gamma(z + 1) = z Gamma(z) with z = (n - u)/2.
  double log_t[2] = {0.0, 0.0};
  log_t[1] = log_c - std::lgamma(2.0) + std::lgamma((1.0 - u) / 2.0);
  log_t[0] = 2 * log_c - std::lgamma(3.0) + std::lgamma((2.0 - u) / 2.0);
  double log_sum = -std::numeric_limits<double>::infinity();
  SatoSeries out;
  const double peak = K * K;
  for (std::int64_t n = 1;; ++n) {
    double& lt = log_t[n & 1];
    if (n > 2) {
      const double m = static_cast<double>(n);
      lt += 2 * log_c - std::log(m * (m - 1)) + std::log((m - 2 - u) / 2.0);
    }
    log_sum = log_add(log_sum, lt);
    out.terms = n;
    if (static_cast<double>(n) > peak + 2 && lt - log_sum < stop) break;
    if (n >= cap) {
      out.converged = false;
      break;
    }
  }
  const double log_sin = u < 1e-8 ? std::log(std::numbers::pi / 2) + log_u : std::log(std::sin(std::numbers::pi * u / 2));
  out.log_value = log_sin + std::lgamma(1.0 + u / 2.0) - std::log(std::numbers::pi) + log_sum;
  return out;
}

double sato_f(double u, double K) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("sato_f: u must lie in (0, 1)");
  return std::exp(sato_log_f(std::log(u), K).log_value);
}

SatoSolution sato_solve(double K) {
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("sato_solve: K must be positive");
  SatoSolution sol;
  sol.K = K;
  auto g = [&](double log_u) {
    const SatoSeries s = sato_log_f(log_u, K);
    if (!s.converged) throw NumericalError("sato_solve: series did not converge for K = " + std::to_string(K));
    sol.series_terms_used = std::max(sol.series_terms_used, s.terms);
    return s.log_value;
  };
  double lo = std::log(1e-9), hi = std::log1p(-1e-9);
  double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_hi < 0.0) throw NumericalError("sato_solve: f(1 - 1e-9, K) < 1, no sign change");
  if (g_lo > 0.0) {
    // Root below 1e-9: f ~ (u/2) * sum, so log u ~ log 2 - log sum.
    hi = lo;
    const double guess = lo - g_lo;
    lo = guess - 10.0 - 0.1 * std::abs(guess);
    for (int i = 0; (g_lo = g(lo)) > 0.0; ++i) {
      if (i > 60) throw NumericalError("sato_solve: could not bracket the root below 1e-9");
      lo *= 2;
    }
  }
  // Bisection.
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    sol.iterations = it + 1;
    if (mid == lo || mid == hi) break;
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  const double gl = g(lo), gh = g(hi);
  const bool take_lo = std::abs(gl) < std::abs(gh);
  sol.log_u = take_lo ? lo : hi;
  sol.u = std::exp(sol.log_u);
  sol.p = sol.u / 2;
  sol.residual = std::abs(std::expm1(take_lo ? gl : gh));
  return sol;
}

double prob_A_reflection() { return normal_cdf(1.5) - normal_cdf(0.5); }

double gamma_bar(double K) {
  if (!(K > 0.0)) throw DomainError("gamma_bar: K must be positive");
  double lo = 2.0 + 1e-9, hi = 1e6;
  if (K_of_gamma(lo) > K) throw NumericalError("gamma_bar: K below the bracket's lower end");
  if (K_of_gamma(hi) < K) throw NumericalError("gamma_bar: K above the bracket's upper end");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (K_of_gamma(mid) < K ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DimensionBounds dim_bounds(double K, double l) {
  if (!(K > 0.0)) throw DomainError("dim_bounds: K must be positive");
  if (!(l > 0.0 && l < 1.0)) throw DomainError("dim_bounds: l must lie in (0, 1)");
  DimensionBounds b;
  b.K = K;
  b.l = l;
  b.gamma_bar0 = 1.0 / prob_A_reflection();
  b.K0 = K_of_gamma(b.gamma_bar0);
  b.gamma_bar_K = gamma_bar(K);
  b.lower = K > b.K0 ? std::max(0.0, 1.0 - std::log(b.gamma_bar0) / std::log(b.gamma_bar_K)) : 0.0;
  const SatoSolution s = sato_solve(K / l);
  b.p_upper = s.p;
  b.upper = s.upper_exponent();
  return b;
}

}  // namespace ddw
