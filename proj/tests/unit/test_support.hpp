#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace test {

// Poisson(mean) cell probabilities for 0..bins-2, the last cell takes the tail.
inline std::vector<double> poisson_probs(double mean, int bins) {
  std::vector<double> p(static_cast<std::size_t>(bins));
  double term = std::exp(-mean), used = 0;
  for (int k = 0; k + 1 < bins; ++k) {
    p[static_cast<std::size_t>(k)] = term;
    used += term;
    term *= mean / (k + 1);
  }
  p.back() = 1.0 - used;
  return p;
}

// Binomial(n, q) by Pascal recursion, independent of any closed form in the library.
inline std::vector<double> binomial_probs(int n, double q) {
  std::vector<double> p{1.0};
  for (int m = 0; m < n; ++m) {
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      next[k] += p[k] * (1 - q);
      next[k + 1] += p[k] * q;
    }
    p = std::move(next);
  }
  return p;
}

}  // namespace test
