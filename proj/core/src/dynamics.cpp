#include "ddw/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddw {

PathSweeper::PathSweeper(const ArrowField& field, SiteCoord start, std::int64_t horizon, double s_begin,
                         double s_end)
    : field_(&field), start_(start), horizon_(horizon), s_(s_begin), s_end_(s_end), quiet_(field.no_ring_threshold(s_end)) {
  require_even(start);
  detail::require(horizon >= 0, "PathSweeper: horizon must be nonnegative");
  detail::require(s_begin >= 0.0 && s_begin <= s_end && s_end <= field.s_max(),
                  "PathSweeper: sweep range must lie inside [0, s_max]");
  positions_.resize(static_cast<std::size_t>(horizon) + 1);
  arrows_.resize(static_cast<std::size_t>(horizon));
  std::vector<Pending> initial;
  std::int64_t x = start.i;
  for (std::int64_t n = 0; n < horizon; ++n) {
    positions_[static_cast<std::size_t>(n)] = x;
    const SiteState st = field.state_unchecked(x, start.j + n, s_begin, s_end, quiet_);
    arrows_[static_cast<std::size_t>(n)] = static_cast<std::int8_t>(st.value);
    if (st.next_switch <= s_end) initial.push_back(Pending{st.next_switch, n, x});
    x += st.value;
  }
  positions_[static_cast<std::size_t>(horizon)] = x;
  pending_ = decltype(pending_)(std::greater<>{}, std::move(initial));
}

std::size_t SweepResult::interval_index(double s) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), s) -
                                  breakpoints.begin());
}

namespace {

LatticePath path_from_positions(SiteCoord start, double s, std::span<const std::int64_t> pos) {
  LatticePath p{start.i, start.j, s, PathDirection::forward, {}};
  p.steps.resize(pos.size() - 1);
  for (std::size_t n = 0; n + 1 < pos.size(); ++n) p.steps[n] = static_cast<std::int8_t>(pos[n + 1] - pos[n]);
  return p;
}

}  // namespace

SweepResult s_sweep(const ArrowField& field, SiteCoord start, std::int64_t t_horizon, double S) {
  detail::require(t_horizon >= 0, "s_sweep: horizon must be nonnegative");
  detail::require(S >= 0.0 && S <= field.s_max(), "s_sweep: S must lie in [0, s_max]");
  PathSweeper sweeper(field, start, t_horizon, 0.0, S);
  SweepResult result{start, t_horizon, S, {}, {}};
  result.paths.push_back(path_from_positions(start, 0.0, sweeper.positions()));
  while (auto bp = sweeper.advance()) {
    result.breakpoints.push_back(bp->s);
    result.paths.push_back(path_from_positions(start, bp->s, sweeper.positions()));
  }
  return result;
}

std::int64_t StepFunction::value_at(double s) const {
  const auto k = std::upper_bound(jumps.begin(), jumps.end(), s) - jumps.begin();
  return values[static_cast<std::size_t>(k)];
}

StepFunction path_value_vs_s(const SweepResult& sweep, std::int64_t t) {
  detail::require(t >= 0 && t <= sweep.horizon, "path_value_vs_s: t outside [0, horizon]");
  StepFunction f{0.0, sweep.s_end, {}, {}};
  const auto tt = static_cast<std::size_t>(t);
  auto value_of = [&](const LatticePath& p) {
    std::int64_t x = p.start_i;
    for (std::size_t n = 0; n < tt; ++n) x += p.steps[n];
    return x;
  };
  f.values.push_back(value_of(sweep.paths.front()));
  for (std::size_t b = 0; b < sweep.breakpoints.size(); ++b) {
    const std::int64_t v = value_of(sweep.paths[b + 1]);
    if (v != f.values.back()) {
      f.jumps.push_back(sweep.breakpoints[b]);
      f.values.push_back(v);
    }
  }
  return f;
}

CoupledPair coupled_pair(const ArrowField& field, double s, double s_prime, std::int64_t horizon,
                         SiteCoord start) {
  require_even(start);
  detail::require(horizon >= 0, "coupled_pair: horizon must be nonnegative");
  detail::require(s < s_prime, "coupled_pair: requires s < s'");
  detail::require(s >= 0.0 && s_prime <= field.s_max(), "coupled_pair: times outside [0, s_max]");
  CoupledPair pair;
  pair.s = s;
  pair.s_prime = s_prime;
  pair.path_s = {start.i, start.j, s, PathDirection::forward, {}};
  pair.path_s_prime = {start.i, start.j, s_prime, PathDirection::forward, {}};
  pair.path_s.steps.resize(static_cast<std::size_t>(horizon));
  pair.path_s_prime.steps.resize(static_cast<std::size_t>(horizon));
  pair.tau.push_back(0);
  bool stuck = true;  // inside [tau_i, sigma_i), waiting for a ring
  std::int64_t x = start.i, y = start.i;
  for (std::int64_t t = 0; t < horizon; ++t) {
    const std::int64_t level = start.j + t;
    if (stuck && field.rings_in_unchecked(x, level, s, s_prime)) {
      pair.sigma.push_back(t);
      stuck = false;
    }
    const int dx = field.arrow_unchecked(x, level, s);
    const int dy = field.arrow_unchecked(y, level, s_prime);
    pair.path_s.steps[static_cast<std::size_t>(t)] = static_cast<std::int8_t>(dx);
    pair.path_s_prime.steps[static_cast<std::size_t>(t)] = static_cast<std::int8_t>(dy);
    x += dx;
    y += dy;
    if (!stuck && x == y) {
      pair.tau.push_back(t + 1);
      stuck = true;
    }
  }
  return pair;
}

PairDecomposition decompose_pair(const CoupledPair& pair) {
  const std::int64_t H = pair.horizon();
  detail::require(static_cast<std::int64_t>(pair.path_s_prime.length()) == H,
                  "decompose_pair: paths have different lengths");
  const auto& tau = pair.tau;
  const auto& sigma = pair.sigma;
  detail::require(!tau.empty() && tau.front() == 0, "decompose_pair: tau must start at 0");
  detail::require(sigma.size() == tau.size() || sigma.size() + 1 == tau.size(),
                  "decompose_pair: inconsistent tau/sigma counts");
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    detail::require(sigma[i] >= tau[i], "decompose_pair: sigma_i < tau_i");
    if (i + 1 < tau.size()) detail::require(tau[i + 1] > sigma[i], "decompose_pair: tau_{i+1} <= sigma_i");
  }
  // stuck[t]: step t (from t to t+1) is taken jointly.
  std::vector<char> stuck(static_cast<std::size_t>(H), 0);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const std::int64_t end = i < sigma.size() ? sigma[i] : H;
    for (std::int64_t t = tau[i]; t < std::min(end, H); ++t) stuck[static_cast<std::size_t>(t)] = 1;
  }
  PairDecomposition d;
  d.C.resize(static_cast<std::size_t>(H) + 1);
  d.C[0] = 0;
  for (std::int64_t t = 0; t < H; ++t) {
    const auto a = pair.path_s.steps[static_cast<std::size_t>(t)];
    const auto b = pair.path_s_prime.steps[static_cast<std::size_t>(t)];
    if (stuck[static_cast<std::size_t>(t)]) {
      if (a != b) throw DomainError("decompose_pair: paths disagree during a stuck period at t=" + std::to_string(t));
      d.S3.push_back(a);
      d.C[static_cast<std::size_t>(t) + 1] = d.C[static_cast<std::size_t>(t)];
    } else {
      d.S1.push_back(a);
      d.S2.push_back(b);
      d.C[static_cast<std::size_t>(t) + 1] = d.C[static_cast<std::size_t>(t)] + 1;
    }
  }
  // Free-time meeting count and accumulated stuck durations.
  const std::size_t U = d.S1.size();
  d.l_hat.resize(U + 1);
  d.L_hat.resize(U + 1);
  std::vector<std::int64_t> holding(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    holding[i] = (i < sigma.size() ? sigma[i] : H) - tau[i];
  std::int64_t gap = 0, meetings = 0, accumulated = 0;
  for (std::size_t u = 0; u <= U; ++u) {
    if (u > 0) gap += d.S1[u - 1] - d.S2[u - 1];
    if (gap == 0) {
      if (static_cast<std::size_t>(meetings) < holding.size()) accumulated += holding[static_cast<std::size_t>(meetings)];
      ++meetings;
    }
    d.l_hat[u] = meetings;
    d.L_hat[u] = accumulated;
  }
  return d;
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> reconstruct(const PairDecomposition& d,
                                                                            std::int64_t start_i) {
  auto prefix = [](const std::vector<std::int8_t>& steps) {
    std::vector<std::int64_t> out(steps.size() + 1, 0);
    for (std::size_t n = 0; n < steps.size(); ++n) out[n + 1] = out[n] + steps[n];
    return out;
  };
  const auto s1 = prefix(d.S1), s2 = prefix(d.S2), s3 = prefix(d.S3);
  std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> out;
  out.first.resize(d.C.size());
  out.second.resize(d.C.size());
  for (std::size_t t = 0; t < d.C.size(); ++t) {
    const auto c = static_cast<std::size_t>(d.C[t]);
    const auto rest = t - c;
    out.first[t] = start_i + s1[c] + s3[rest];
    out.second[t] = start_i + s2[c] + s3[rest];
  }
  return out;
}

ContactCount marked_contact_count(const ArrowField& field, SiteCoord start, DualCoord dual_start, double s,
                                  std::int64_t t_horizon) {
  require_even(start);
  require_odd(dual_start);
  detail::require(t_horizon >= 0, "marked_contact_count: horizon must be nonnegative");
  detail::require(s >= 0.0 && s <= field.s_max(), "marked_contact_count: s outside [0, s_max]");
  detail::require(dual_start.j == start.j + t_horizon,
                  "marked_contact_count: dual start must sit at level start.j + t_horizon");
  const LatticePath fwd = forward_path(field, start, 0.0, t_horizon);
  if (dual_start.i <= fwd.end_position())
    throw DomainError("marked_contact_count: dual start must lie to the right of the forward endpoint");
  const LatticePath dual = backward_path(field, dual_start, 0.0, t_horizon);
  const auto fpos = fwd.positions();
  const auto dpos = dual.positions();
  ContactCount out;
  for (std::int64_t k = 0; k < t_horizon; ++k) {
    const std::int64_t x = fpos[static_cast<std::size_t>(k)];
    // Dual index for level start.j + k + 1.
    const std::int64_t dual_x = dpos[static_cast<std::size_t>(t_horizon - k - 1)];
    if (dual_x != x || fwd.steps[static_cast<std::size_t>(k)] != -1) continue;
    ++out.contacts;
    if (field.ring_count(SiteCoord{x, start.j + k}, 0.0, s) > 0)
      ++out.marked;
  }
  return out;
}

}  // namespace ddw
