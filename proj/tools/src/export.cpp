#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include "ddw/error.hpp"
#include "ddw_cli/cli.hpp"

namespace ddw::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  // Shortest representation that round-trips; always uses a decimal point.
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header, const CsvRows& rows) {
  with_output(path, [&](std::ostream& out) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  });
}

void write_json(const std::string& path, const nlohmann::json& payload) {
  with_output(path, [&](std::ostream& out) { out << payload.dump(2) << '\n'; });
}

nlohmann::json pair_law_to_json(const PairLaw& law) {
  nlohmann::json table = nlohmann::json::object();
  for (const auto& [key, p] : law.table) table[std::to_string(key.first) + "," + std::to_string(key.second)] = p;
  return {{"t", law.t}, {"table", table}};
}

PairLaw pair_law_from_json(const nlohmann::json& j) {
  PairLaw law;
  law.t = j.at("t").get<std::int64_t>();
  for (const auto& [key, p] : j.at("table").items()) {
    const auto comma = key.find(',');
    if (comma == std::string::npos) throw Error("pair law key '" + key + "' is not of the form x1,x2");
    law.table[{std::stoll(key.substr(0, comma)), std::stoll(key.substr(comma + 1))}] = p.get<double>();
  }
  return law;
}

}  // namespace ddw::cli
