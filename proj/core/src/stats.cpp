#include "ddw/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "ddw/error.hpp"

namespace ddw {

ProportionEstimate wilson(std::int64_t successes, std::int64_t trials, double z) {
  detail::require(trials >= 0 && successes >= 0 && successes <= trials, "wilson: invalid counts");
  ProportionEstimate e;
  e.successes = successes;
  e.trials = trials;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  e.p_hat = p;
  e.ci = {std::max(0.0, centre - half), std::min(1.0, centre + half)};
  return e;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "least_squares: need at least two matching points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  detail::require(sxx > 0, "least_squares: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) fit.slope_stderr = std::sqrt(sse / (n - 2) / sxx);
  return fit;
}

double chi_square_sf(double statistic, double dof) {
  detail::require(dof > 0, "chi_square_sf: dof must be positive");
  if (statistic <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_prob,
                               double min_expected, int fitted_parameters) {
  detail::require(observed.size() == expected_prob.size() && !observed.empty(), "chi_square_gof: size mismatch");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  detail::require(total > 0, "chi_square_gof: no observations");
  const double psum = std::accumulate(expected_prob.begin(), expected_prob.end(), 0.0);
  std::vector<double> obs, expv;
  double o = 0, e = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += static_cast<double>(observed[i]);
    e += expected_prob[i] / psum * total;
    if (e >= min_expected) {
      obs.push_back(o);
      expv.push_back(e);
      o = e = 0;
    }
  }
  if (e > 0 || o > 0) {
    if (expv.empty()) {
      obs.push_back(o);
      expv.push_back(e);
    } else {
      obs.back() += o;
      expv.back() += e;
    }
  }
  ChiSquareResult r;
  r.bins = obs.size();
  for (std::size_t i = 0; i < obs.size(); ++i) r.statistic += (obs[i] - expv[i]) * (obs[i] - expv[i]) / expv[i];
  r.dof = static_cast<double>(obs.size()) - 1.0 - fitted_parameters;
  r.p_value = r.dof > 0 ? chi_square_sf(r.statistic, r.dof) : 1.0;
  return r;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  detail::require(!samples.empty(), "ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double F = cdf(samples[i]);
    // Left limit of the model CDF at a jump of the empirical one.
    const double F_left = cdf(std::nextafter(samples[i], -INFINITY));
    d = std::max({d, std::abs(static_cast<double>(j) / n - F), std::abs(static_cast<double>(i) / n - F_left)});
    i = j;
  }
  KsResult r;
  r.statistic = d;
  r.n = samples.size();
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

void run_parallel(std::int64_t count, int threads, const std::function<void(std::int64_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::int64_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::int64_t r = next.fetch_add(1);
      if (r >= count || failed.load()) return;
      try {
        body(r);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = static_cast<int>(std::min<std::int64_t>(threads, count));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace ddw
