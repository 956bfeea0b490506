#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ddw {

struct Interval95 {
  double lo = 0.0;
  double hi = 1.0;
};

struct ProportionEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;
  Interval95 ci;
};

/// Wilson score interval; z defaults to the 95% normal quantile.
ProportionEstimate wilson(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

double normal_cdf(double x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double statistic, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Pearson goodness of fit. Adjacent cells are pooled from the right until
/// each has expected count >= min_expected.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_prob,
                               double min_expected = 5.0, int fitted_parameters = 0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov distance between the empirical CDF of
/// `samples` and `cdf`, evaluated on both sides of every jump. The p-value is
/// the asymptotic Kolmogorov tail, which is conservative for discrete laws.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

double kolmogorov_sf(double lambda);

/// Runs body(r) for r in [0, replicas) on `threads` workers and returns the
/// results in replica order, so reductions do not depend on scheduling.
template <class T>
std::vector<T> parallel_replicas(std::int64_t replicas, int threads, const std::function<T(std::int64_t)>& body);

namespace detail {
void run_parallel(std::int64_t count, int threads, const std::function<void(std::int64_t)>& body);
}

template <class T>
std::vector<T> parallel_replicas(std::int64_t replicas, int threads, const std::function<T(std::int64_t)>& body) {
  std::vector<T> out(static_cast<std::size_t>(replicas));
  detail::run_parallel(replicas, threads, [&](std::int64_t r) { out[static_cast<std::size_t>(r)] = body(r); });
  return out;
}

int default_threads();

}  // namespace ddw
