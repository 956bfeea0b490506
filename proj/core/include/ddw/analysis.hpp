#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddw/random.hpp"
#include "ddw/stats.hpp"

namespace ddw {

// ---- special functions and bounds ---------------------------------------

double gamma_fn(double x);

struct SatoSeries {
  double log_value = 0.0;  ///< log f(u, K)
  std::int64_t terms = 0;
  bool converged = true;
};

/// log f(u, K) with u given through its logarithm, so roots far below the
/// smallest double remain representable.
SatoSeries sato_log_f(double log_u, double K);

double sato_f(double u, double K);

struct SatoSolution {
  double K = 0.0;
  double u = 0.0;       ///< root of f(u, K) = 1; may underflow, see log_u
  double log_u = 0.0;
  double p = 0.0;       ///< u / 2
  std::int64_t series_terms_used = 0;
  double residual = 0.0;  ///< |f(u, K) - 1|
  int iterations = 0;

  /// 2 (1/2 - p) = 1 - u
  double upper_exponent() const noexcept { return 1.0 - u; }
};

SatoSolution sato_solve(double K);

/// P(A): Brownian motion from 1/2 stays positive on [0, 1] and ends above 1.
double prob_A_reflection();

struct McEstimate {
  ProportionEstimate estimate;
  double dt = 0.0;
};

/// The killing barrier is constant, so the Brownian-bridge crossing
/// probability makes the per-step check exact and dt only trades time for
/// nothing.
McEstimate prob_A_monte_carlo(std::int64_t paths, std::uint64_t seed, double dt = 1e-2, int threads = 1);

/// Solves K(gamma) = K on (2 + 1e-9, 1e6).
double gamma_bar(double K);

struct DimensionBounds {
  double K = 0.0;
  double l = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double gamma_bar0 = 0.0;
  double K0 = 0.0;
  double gamma_bar_K = 0.0;
  double p_upper = 0.0;  ///< p(K / l)
};

DimensionBounds dim_bounds(double K, double l = 0.99);

// ---- Brownian estimators ------------------------------------------------

struct SurvivalCurve {
  double k = 0.0;
  double K = 0.0;
  double drift = 0.0;
  double dt = 0.0;
  std::int64_t replicas = 0;
  std::vector<double> times;
  std::vector<ProportionEstimate> survival;
};

/// P(tau > t) for B(t) + drift t started at 0 and killed at -k - K sqrt(t),
/// at each checkpoint. Steps are max(dt, rel_step * t) with a Brownian-bridge
/// crossing correction against the chord of the boundary.
SurvivalCurve bm_first_passage_survival(double k, double K, double drift, std::vector<double> checkpoints,
                                        std::int64_t replicas, std::uint64_t seed, double dt = 1e-4,
                                        double rel_step = 1e-3, int threads = 1);

struct ExponentFit {
  SurvivalCurve curve;
  LinearFit fit;   ///< log S against log t
  double exponent = 0.0;  ///< -slope
};

ExponentFit first_passage_exponent(double K, double k, double t_lo, double t_hi, std::int64_t replicas,
                                   std::uint64_t seed, int points = 16, double dt = 1e-4, int threads = 1);

/// (e^{4 eps} - 1) / (e^{4 eps} - e^{-4 eps}): B + 2 eps t leaves [-1, 1] on the right.
double exit_right_probability(double epsilon);

struct ExitWalk {
  double epsilon = 0.0;
  double dt = 0.0;
  std::int64_t exits = 0;
  ProportionEstimate right;
  double mean_exit_time = 0.0;
  double exit_time_stderr = 0.0;
  std::vector<std::int64_t> walk;  ///< S'(n) for the first stored exits
};

/// Embedded walk of B + 2 eps t at successive exits from unit neighbourhoods.
/// dt is the finest step; far from both edges the step grows to (dist/6)^2,
/// and every step applies the two-sided bridge crossing correction.
ExitWalk embedded_exit_walk(double epsilon, std::int64_t n_exits, std::uint64_t seed, double dt = 1e-4,
                            std::int64_t store_walk = 1000);

/// P(tau > t) for the exit time of standard Brownian motion from [-1, 1].
double exit_time_survival(double t);

template <class Rng>
double sample_exit_time(Rng& rng);

struct CoupledDriftWalks {
  double epsilon = 0.0;
  double a = 0.0;
  double p_X = 0.0;
  std::optional<std::int64_t> n_epsilon;  ///< empty when epsilon == 0
  std::vector<std::int64_t> S_prime;      ///< S'_eps(n), n = 0..horizon
  std::vector<std::int64_t> S_bar;        ///< bar S_eps(n)
};

CoupledDriftWalks coupled_drift_walks(double epsilon, double a, std::int64_t horizon, std::uint64_t seed);

struct CouplingGof {
  ChiSquareResult chi2;
  std::int64_t replicas = 0;
  double mean_n_epsilon = 0.0;
};

/// Compares S' - bar S at n = 2 n(eps) with the Binomial(n(eps), p_X) mixture.
CouplingGof coupling_difference_gof(double epsilon, double a, std::int64_t replicas, std::uint64_t seed,
                                    int threads = 1);

struct SurvivalComparison {
  ProportionEstimate lhs;
  ProportionEstimate rhs;
  double ratio = 0.0;
};

SurvivalComparison survival_compare(double epsilon, double l, double K, std::int64_t horizon,
                                    std::int64_t replicas, std::uint64_t seed, double dt = 1e-4,
                                    int threads = 1);

// ---- drifting walks and box counting ------------------------------------

/// Right-step probability of the static walk built from [s, s + eps] when
/// arrows flip at unit rate: 1/2 + (1 - e^{-eps})/2.
double drift_step_probability(double epsilon);

enum class DriftMode { direct, from_interval };

/// Ring rate of the field used by the from_interval construction. A ring
/// resamples the arrow, so value changes happen at half this rate, and the
/// step law matches drift_step_probability only for rate 2.
inline constexpr double drift_field_lambda = 2.0;

struct DriftWalk {
  std::vector<std::int8_t> steps;
  bool survived = false;
};

DriftWalk drifting_static_walk(DriftMode mode, double epsilon, double K, std::int64_t horizon, std::uint64_t seed,
                               double s0 = 0.0);

struct BoxCountResult {
  double K = 0.0;
  std::int64_t horizon = 0;
  std::int64_t replicas = 0;
  std::vector<double> epsilons;
  std::vector<double> mean_counts;
  std::vector<double> count_stderr;
  LinearFit fit;   ///< log E n(eps) against log(1/eps)
  double slope = 0.0;
};

BoxCountResult box_count_dimension(double K, const std::vector<double>& epsilons, std::int64_t horizon,
                                   std::int64_t replicas, std::uint64_t seed, int threads = 1);

struct NoLeftVisit {
  double p = 0.0;
  std::int64_t escape_margin = 0;
  std::int64_t horizon = 0;
  ProportionEstimate raw;       ///< escaped before any left visit
  double tail_correction = 1.0; ///< 1 - ((1-p)/p)^{M+1}
  double estimate = 0.0;
  std::int64_t undecided = 0;   ///< reached the horizon without escaping or visiting
};

/// (2p - 1)/p for p > 1/2.
double theta_tilde(double p);

NoLeftVisit no_left_visit_probability(double p, std::int64_t replicas, std::int64_t horizon,
                                      std::int64_t escape_margin, std::uint64_t seed, int threads = 1);

// ---- template definitions -----------------------------------------------

double exit_time_quantile(double survival);

template <class Rng>
double sample_exit_time(Rng& rng) {
  double u = 0.0;
  while (u <= 0.0) u = to_unit(rng());
  return exit_time_quantile(u);
}

}  // namespace ddw
