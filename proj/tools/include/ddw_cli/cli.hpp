#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddw/sticky.hpp"

namespace ddw::cli {

inline constexpr const char* version = "0.1.0";

enum class ExitCode : int { ok = 0, failure = 1, config_error = 2, numerical_error = 3 };

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 1;
  std::string seed_source = "default";  ///< default | env | flag
  double lambda = 1.0;
  double gamma = 6.0;
  double K = 1.0;
  double k = 1.0;
  double l = 0.99;
  double epsilon = 0.1;
  double theta = 0.5;
  double a = 0.5;
  double s_lo = 0.0;
  double s_hi = 1.0;
  double s_step = 1.0;
  double t_lo = 100.0;
  double t_max = 1e4;
  double dt = 1e-4;
  std::int64_t start_x = 0;
  std::int64_t horizon = 200;
  std::int64_t levels = 4;
  std::int64_t replicas = 1000;
  int threads = 1;
  std::vector<double> eps_list;
  std::string output = "-";
  std::string event_dump;

  nlohmann::json to_json() const;
};

/// Parses argv into a config; throws CLI::ParseError-derived exceptions.
int main(int argc, char** argv);

/// Runs one experiment and writes its outputs. Returns the process exit code.
int run(const ExperimentConfig& config, std::ostream& log);

// Export helpers.
using CsvRows = std::vector<std::vector<std::string>>;
void write_csv(const std::string& path, const std::vector<std::string>& header, const CsvRows& rows);
void write_json(const std::string& path, const nlohmann::json& payload);
std::string format_number(double x);

nlohmann::json manifest(const ExperimentConfig& config);

nlohmann::json pair_law_to_json(const PairLaw& law);
PairLaw pair_law_from_json(const nlohmann::json& j);

}  // namespace ddw::cli
