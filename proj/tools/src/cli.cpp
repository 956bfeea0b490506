#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ddw/analysis.hpp"
#include "ddw/dynamics.hpp"
#include "ddw/exceptional.hpp"
#include "ddw/sticky.hpp"
#include "ddw_cli/cli.hpp"

namespace ddw::cli {

using nlohmann::json;

namespace {

json proportion(const ProportionEstimate& e) {
  return {{"p_hat", e.p_hat}, {"successes", e.successes}, {"trials", e.trials}, {"ci95", {e.ci.lo, e.ci.hi}}};
}

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr}, {"r2", f.r2}};
}

void write_manifest_beside(const ExperimentConfig& c) {
  if (c.output.empty() || c.output == "-") return;
  write_json(c.output + ".manifest.json", manifest(c));
}

void emit(const ExperimentConfig& c, json body) {
  body["manifest"] = manifest(c);
  write_json(c.output, body);
}

int cmd_simulate_web(const ExperimentConfig& c) {
  detail::require(c.s_step > 0.0, "simulate-web: --s-step must be positive");
  const ArrowField field(c.seed, c.lambda, c.s_hi);
  const SiteCoord start{c.start_x, 0};
  require_even(start);
  const SweepResult sweep = s_sweep(field, start, c.horizon, c.s_hi);
  CsvRows rows;
  const auto n_s = static_cast<std::int64_t>(std::floor((c.s_hi - c.s_lo) / c.s_step + 1e-9));
  for (std::int64_t m = 0; m <= n_s; ++m) {
    const double s = c.s_lo + static_cast<double>(m) * c.s_step;
    const auto& path = sweep.paths[sweep.interval_index(s)];
    const auto pos = path.positions();
    for (std::size_t t = 0; t < pos.size(); ++t)
      rows.push_back({format_number(s), std::to_string(t), std::to_string(pos[t])});
  }
  write_csv(c.output, {"s", "t", "position"}, rows);
  write_manifest_beside(c);
  if (!c.event_dump.empty()) {
    std::set<std::pair<std::int64_t, std::int64_t>> touched;
    for (const auto& p : sweep.paths) {
      const auto pos = p.positions();
      for (std::size_t n = 0; n + 1 < pos.size(); ++n) touched.insert({pos[n], p.start_j + static_cast<std::int64_t>(n)});
    }
    std::vector<SiteCoord> sites;
    for (const auto& [i, j] : touched) sites.push_back({i, j});
    std::ofstream out(c.event_dump, std::ios::binary);
    if (!out) throw Error("cannot open event dump '" + c.event_dump + "' for writing");
    write_event_dump(out, field, sites, 0.0, c.s_hi);
  }
  return 0;
}

int cmd_trace_s(const ExperimentConfig& c) {
  const ArrowField field(c.seed, c.lambda, c.s_hi);
  const SweepResult sweep = s_sweep(field, SiteCoord{c.start_x, 0}, c.horizon, c.s_hi);
  const StepFunction f = path_value_vs_s(sweep, c.horizon);
  CsvRows rows;
  rows.push_back({format_number(0.0), std::to_string(f.values.front())});
  for (std::size_t i = 0; i < f.jumps.size(); ++i)
    rows.push_back({format_number(f.jumps[i]), std::to_string(f.values[i + 1])});
  write_csv(c.output, {"s", "value"}, rows);
  write_manifest_beside(c);
  return 0;
}

int cmd_sticky_check(const ExperimentConfig& c) {
  detail::require(c.replicas >= 1, "sticky-check: --replicas must be >= 1");
  const PairLaw law = exact_pair_law(c.theta, c.horizon);
  const double s_prime = c.theta / c.lambda;
  const auto coupled = parallel_replicas<std::pair<std::int64_t, std::int64_t>>(
      c.replicas, c.threads, [&](std::int64_t r) {
        const ArrowField field(hash_combine(c.seed, static_cast<std::uint64_t>(r)), c.lambda, s_prime);
        const auto pair = coupled_pair(field, 0.0, s_prime, c.horizon);
        return std::pair{pair.path_s.end_position(), pair.path_s_prime.end_position()};
      });
  const auto direct = parallel_replicas<std::pair<std::int64_t, std::int64_t>>(
      c.replicas, c.threads, [&](std::int64_t r) {
        return sticky_pair(c.theta, c.horizon, hash_combine(c.seed ^ 0x5eed, static_cast<std::uint64_t>(r))).endpoint();
      });
  const auto d1 = pair_distance(coupled, law, c.seed);
  const auto d2 = pair_distance(direct, law, c.seed + 1);
  emit(c, {{"theta", c.theta},
           {"t", c.horizon},
           {"replicas", c.replicas},
           {"coupled_pair", {{"tv", d1.tv}, {"bootstrap_radius95", d1.radius}}},
           {"sticky_pair", {{"tv", d2.tv}, {"bootstrap_radius95", d2.radius}}},
           {"exact_law", pair_law_to_json(law)}});
  return 0;
}

json scan_json(const ScanResult& r) {
  json iv = json::array();
  for (const auto& i : r.intervals) iv.push_back({i.lo, i.hi});
  return {{"n", r.n}, {"intervals", iv}, {"measure", r.measure()}, {"breakpoints", r.breakpoint_count}};
}

int cmd_scan(const ExperimentConfig& c) {
  const BoxHierarchy h = build_boxes(c.gamma, c.lambda, c.levels);
  const ArrowField field(c.seed, c.lambda, c.s_hi);
  const auto scans = scan_levels(field, h, c.s_lo, c.s_hi);
  json levels = json::array();
  for (const auto& s : scans) levels.push_back(scan_json(s));
  json boxes = json::array();
  for (const auto& b : h.levels) boxes.push_back({{"x", b.z.i}, {"t", b.z.j}, {"d", b.d}});
  emit(c, {{"gamma", c.gamma}, {"lambda", c.lambda}, {"seed", c.seed}, {"boxes", boxes}, {"levels", levels},
           {"final", scan_json(scans.back())}});
  return 0;
}

int cmd_nonempty(const ExperimentConfig& c) {
  detail::require(c.replicas >= 1, "nonempty-prob: --replicas must be >= 1");
  const auto e = estimate_nonempty_prob(c.gamma, c.lambda, c.levels, c.replicas, c.seed, c.threads);
  json per = json::array();
  for (std::size_t k = 0; k < e.per_level.size(); ++k)
    per.push_back({{"n", k},
                   {"nonempty", proportion(e.per_level[k])},
                   {"mean_measure", e.mean_measure[k]},
                   {"measure_stderr", e.measure_stderr[k]},
                   {"expected_measure", e.expected_measure[k]}});
  emit(c, {{"levels", per},
           {"nonempty", proportion(e.final_level)},
           {"nesting_ok", e.nesting_ok},
           {"sup_inverse_box_probability", e.sup_inverse_prob},
           {"box_probabilities", box_event_probabilities(build_boxes(c.gamma, c.lambda, c.levels))}});
  return 0;
}

int cmd_sato(const ExperimentConfig& c) {
  const SatoSolution s = sato_solve(c.K);
  emit(c, {{"K", s.K},
           {"u", s.u},
           {"log_u", s.log_u},
           {"p", s.p},
           {"upper_exponent", s.upper_exponent()},
           {"residual", s.residual},
           {"series_terms_used", s.series_terms_used},
           {"iterations", s.iterations}});
  return 0;
}

int cmd_bounds(const ExperimentConfig& c) {
  const DimensionBounds b = dim_bounds(c.K, c.l);
  emit(c, {{"K", b.K},
           {"l", b.l},
           {"lower", b.lower},
           {"upper", b.upper},
           {"gamma_bar0", b.gamma_bar0},
           {"K0", b.K0},
           {"gamma_bar_K", b.gamma_bar_K},
           {"p_K_over_l", b.p_upper},
           {"prob_A", prob_A_reflection()}});
  return 0;
}

int cmd_fp_exponent(const ExperimentConfig& c) {
  const auto f = first_passage_exponent(c.K, c.k, c.t_lo, c.t_max, c.replicas, c.seed, 16, c.dt, c.threads);
  json curve = json::array();
  for (std::size_t i = 0; i < f.curve.times.size(); ++i)
    curve.push_back({{"t", f.curve.times[i]}, {"survival", proportion(f.curve.survival[i])}});
  emit(c, {{"exponent", f.exponent}, {"fit", fit_json(f.fit)}, {"sato_p", sato_solve(c.K).p}, {"curve", curve}});
  return 0;
}

int cmd_dim_fit(const ExperimentConfig& c) {
  std::vector<double> eps = c.eps_list;
  if (eps.empty())
    for (int i = 4; i <= 9; ++i) eps.push_back(std::ldexp(1.0, -i));
  const auto r = box_count_dimension(c.K, eps, c.horizon, c.replicas, c.seed, c.threads);
  json per = json::array();
  for (std::size_t i = 0; i < eps.size(); ++i)
    per.push_back({{"epsilon", eps[i]}, {"mean_count", r.mean_counts[i]}, {"stderr", r.count_stderr[i]}});
  emit(c, {{"slope", r.slope}, {"fit", fit_json(r.fit)}, {"counts", per}, {"horizon", r.horizon},
           {"replicas", r.replicas}});
  return 0;
}

int cmd_appendix(const ExperimentConfig& c) {
  const auto w = embedded_exit_walk(c.epsilon, c.replicas, c.seed, c.dt, 0);
  const auto gof = coupling_difference_gof(c.epsilon, c.a, c.replicas, c.seed + 1, c.threads);
  const auto sc = survival_compare(c.epsilon, c.l, c.K, c.horizon, c.replicas, c.seed + 2, c.dt, c.threads);
  emit(c, {{"exit",
            {{"right", proportion(w.right)},
             {"closed_form", exit_right_probability(c.epsilon)},
             {"mean_exit_time", w.mean_exit_time},
             {"direct_walk_step_probability", drift_step_probability(c.epsilon)}}},
           {"coupling_gof",
            {{"chi2", gof.chi2.statistic}, {"dof", gof.chi2.dof}, {"p_value", gof.chi2.p_value},
             {"mean_n_epsilon", gof.mean_n_epsilon}}},
           {"survival_compare", {{"lhs", proportion(sc.lhs)}, {"rhs", proportion(sc.rhs)}, {"ratio", sc.ratio}}}});
  return 0;
}

}  // namespace

json ExperimentConfig::to_json() const {
  return {{"command", command}, {"seed", seed},     {"seed_source", seed_source}, {"lambda", lambda},
          {"gamma", gamma},     {"K", K},           {"k", k},                     {"l", l},
          {"epsilon", epsilon}, {"theta", theta},   {"a", a},                     {"s_lo", s_lo},
          {"s_hi", s_hi},       {"s_step", s_step}, {"t_lo", t_lo},               {"t_max", t_max},
          {"dt", dt},           {"start_x", start_x}, {"horizon", horizon},       {"levels", levels},
          {"replicas", replicas}, {"threads", threads}, {"eps_list", eps_list},   {"output", output},
          {"event_dump", event_dump}};
}

json manifest(const ExperimentConfig& c) {
  json m = {{"version", version}, {"config", c.to_json()}};
  if (c.seed_source == "env") m["env"] = {{"DDW_SEED", std::to_string(c.seed)}};
  return m;
}

int run(const ExperimentConfig& c, std::ostream& log) {
  try {
    if (c.command == "simulate-web") return cmd_simulate_web(c);
    if (c.command == "trace-s") return cmd_trace_s(c);
    if (c.command == "sticky-check") return cmd_sticky_check(c);
    if (c.command == "scan") return cmd_scan(c);
    if (c.command == "nonempty-prob") return cmd_nonempty(c);
    if (c.command == "sato-solve") return cmd_sato(c);
    if (c.command == "bounds") return cmd_bounds(c);
    if (c.command == "fp-exponent") return cmd_fp_exponent(c);
    if (c.command == "dim-fit") return cmd_dim_fit(c);
    if (c.command == "appendix-check") return cmd_appendix(c);
    log << "ddw: unknown command '" << c.command << "'\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const NumericalError& e) {
    log << "ddw: numerical failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical_error);
  } catch (const DomainError& e) {
    log << "ddw: invalid parameters: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config_error);
  } catch (const Error& e) {
    log << "ddw: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config_error);
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Simulator and analysis toolkit for the dynamical discrete web"};
  app.set_version_flag("--version", version);
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.require_subcommand(1, 1);

  ExperimentConfig c;
  if (const char* env = std::getenv("DDW_SEED")) {
    try {
      c.seed = std::stoull(env);
      c.seed_source = "env";
    } catch (const std::exception&) {
      std::cerr << "ddw: DDW_SEED='" << env << "' is not an unsigned integer\n";
      return static_cast<int>(ExitCode::config_error);
    }
  }
  auto* seed_opt = app.add_option("--seed", c.seed, "Master seed (default 1, or $DDW_SEED)");
  app.add_option("--lambda", c.lambda, "Arrow clock rate")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--gamma", c.gamma, "Box growth factor (> 2)")->check(CLI::Range(2.0, 1e6))->capture_default_str();
  app.add_option("--K", c.K, "Boundary slope K")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--k", c.k, "Boundary offset k")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--l", c.l, "Slack factor l in (0,1)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app.add_option("--epsilon", c.epsilon, "Drift epsilon")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app.add_option("--theta", c.theta, "Stickiness lambda |s - s'|")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--a", c.a, "Coupling exponent a in (0, 2/3)")->check(CLI::Range(0.0, 2.0 / 3.0))->capture_default_str();
  app.add_option("--s-lo", c.s_lo, "Start of the dynamical-time range")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--s-hi", c.s_hi, "End of the dynamical-time range")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--s-step", c.s_step, "Spacing of exported s values")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--t-lo", c.t_lo, "Start of the exponent fit window")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--tmax", c.t_max, "End of the exponent fit window")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--dt", c.dt, "Finest Brownian time step")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--start-x", c.start_x, "Start column of the traced path")->capture_default_str();
  app.add_option("--horizon", c.horizon, "Time horizon in lattice steps")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--levels", c.levels, "Number of box levels n")->check(CLI::Range(0, 12))->capture_default_str();
  app.add_option("--replicas", c.replicas, "Monte Carlo replicas")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  app.add_option("--eps-list", c.eps_list, "Decreasing epsilons for dim-fit (default 2^-4..2^-9)")->delimiter(',');
  app.add_option("--output,-o", c.output, "Output path, - for stdout")->capture_default_str();
  app.add_option("--event-dump", c.event_dump, "simulate-web: binary dump of switch events on touched sites");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate-web", "CSV (s, t, position) of the path family over s"},
      {"trace-s", "CSV (s, value) of s -> S^s(horizon)"},
      {"sticky-check", "TV distance of coupled and sticky pairs to the exact law"},
      {"scan", "JSON closed sets E_0..E_n for one seed"},
      {"nonempty-prob", "Monte Carlo P(E_n nonempty) with Wilson intervals"},
      {"sato-solve", "Root u(K) of the Sato series equation"},
      {"bounds", "Hausdorff dimension bounds for K-exceptional times"},
      {"fp-exponent", "First-passage exponent fit to a -k - K sqrt(t) boundary"},
      {"dim-fit", "Box-counting dimension estimate"},
      {"appendix-check", "Exit probability, booster coupling GOF, survival comparison"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config_error);
  }
  if (seed_opt->count() > 0) c.seed_source = "flag";
  c.command = app.get_subcommands().front()->get_name();
  return run(c, std::cerr);
}

}  // namespace ddw::cli
