#pragma once
//
// Flat-file output: CSV with shortest round-trip doubles, JSON for ladder
// states, and a stable content hash.
//

#include <clcoherence/errors.hpp>
#include <clcoherence/estate.hpp>

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace clc::io {

using json = nlohmann::json;

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
    columns_ = header.size();
  }

  void row(std::initializer_list<double> values) {
    if (values.size() != columns_) throw std::invalid_argument("csv row width mismatch");
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format_double(v);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) row.push_back(parse_double(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline json ladder_to_json(const LadderState& s) {
  json re = json::array(), im = json::array();
  for (const auto& c : s.coefficients()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"index_min", -s.cutoff()},
          {"index_max", s.cutoff()},
          {"propagated_distance_nm", s.propagated_distance()},
          {"kinetic_energy_ev", s.beam().kinetic_energy()},
          {"photon_energy_ev", s.beam().photon_energy()},
          {"re", re},
          {"im", im}};
}

inline LadderState ladder_from_json(const json& j) {
  try {
    const int lo = j.at("index_min").get<int>();
    const int hi = j.at("index_max").get<int>();
    if (lo != -hi) throw ConfigError("ladder index range must be symmetric");
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    std::vector<complex> c;
    for (std::size_t i = 0; i < re.size(); ++i) c.emplace_back(re.at(i).get<double>(), im.at(i).get<double>());
    BeamParameters beam(j.at("kinetic_energy_ev").get<double>(), j.at("photon_energy_ev").get<double>());
    return {beam, hi, std::move(c), j.at("propagated_distance_nm").get<double>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ladder json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("ladder json: ") + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace clc::io
