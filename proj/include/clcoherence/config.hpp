#pragma once
//
// Scenario configuration: one JSON document, strictly validated. Unknown
// fields are errors; every error names the field path and, where it can be
// located in the source text, the line.
//

#include <clcoherence/coupling.hpp>
#include <clcoherence/errors.hpp>
#include <clcoherence/estate.hpp>
#include <clcoherence/io.hpp>
#include <clcoherence/kinematics.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace clc {

struct BeamConfig {
  double kinetic_energy_ev = 200e3;
  double wavelength_nm = 800.0;
  bool operator==(const BeamConfig&) const = default;
};

struct ModulationConfig {
  double beta_abs = 4.0;
  double beta_arg = 0.0;  ///< rad
  bool operator==(const ModulationConfig&) const = default;
};

struct PropagationConfig {
  std::string dispersion = "exact";  ///< exact | quadratic
  std::optional<double> distance_mm;  ///< absent: use the widest-spectrum distance
  double grid_start_mm = 0.0;
  double grid_stop_mm = 20.0;
  int grid_points = 2001;
  bool operator==(const PropagationConfig&) const = default;
};

struct WidthMetricConfig {
  double threshold = 0.01;
  double coarse_step_um = 10.0;
  double tolerance_um = 1.0;
  bool operator==(const WidthMetricConfig&) const = default;
};

struct HarmonicsConfig {
  int min = 0;
  int max = 30;
  bool operator==(const HarmonicsConfig&) const = default;
};

struct EnvelopeConfig {
  std::string kind = "gaussian";  ///< infinite | gaussian
  double fwhm_fs = 200.0;
  std::vector<double> fwhm_list_fs;  ///< doc-slice: one spectrum per entry
  bool operator==(const EnvelopeConfig&) const = default;
};

struct CouplingConfig {
  std::string kind = "flat";  ///< flat | gaussian | table | waveguide
  double g0_re = 0.1;
  double g0_im = 0.0;
  double center_harmonic = 1.0;     ///< gaussian band centre / waveguide matching, in units of omega0
  double width_rad_per_fs = 0.01;   ///< gaussian band
  std::string table_path;           ///< table: CSV omega_rad_per_fs,g_real,g_imag
  std::string interpolation = "cubic";
  double group_index = 1.9;         ///< waveguide: c / v_group
  double gvd_fs2_per_nm = 1e-3;     ///< waveguide: d^2 beta / d omega^2
  double length_um = 1000.0;        ///< waveguide interaction length
  std::vector<double> lengths_um;   ///< waveguide scenario: one run per entry
  bool operator==(const CouplingConfig&) const = default;
};

struct ReferenceConfig {
  double center_harmonic = 1.0;
  double fwhm_rad_per_fs = 0.02;
  double total_counts = 1e6;
  double phase_rad = 0.0;
  bool align_phase = true;  ///< rotate the reference to maximize |S|
  bool operator==(const ReferenceConfig&) const = default;
};

struct DetectionConfig {
  double r_re = 0.7071067811865476, r_im = 0.0;
  double t_re = 0.0, t_im = 0.7071067811865476;
  ReferenceConfig reference;
  double qe1 = 1.0;
  double qe2 = 1.0;
  int shots = 100000;
  std::uint64_t seed = 1;
  bool operator==(const DetectionConfig&) const = default;
};

struct OracleConfig {
  std::vector<double> beta_abs{0.0, 0.5, 1.0};
  std::vector<double> distance_over_talbot{0.0, 0.1, 0.25};
  std::vector<double> couplings{0.05, 0.3, 0.8};
  std::vector<std::vector<int>> mode_sets{{1}, {1, 2}};
  double tolerance = 1e-6;
  bool operator==(const OracleConfig&) const = default;
};

struct SweepConfig {
  std::vector<double> beta_abs{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
  BeamConfig beam;
  ModulationConfig modulation;
  PropagationConfig propagation;
  WidthMetricConfig width_metric;
  HarmonicsConfig harmonics;
  EnvelopeConfig envelope;
  CouplingConfig coupling;
  DetectionConfig detection;
  OracleConfig oracle;
  SweepConfig sweep;
  OutputConfig output;
  bool operator==(const ScenarioConfig&) const = default;

  BeamParameters beam_parameters() const {
    return BeamParameters::from_wavelength(beam.kinetic_energy_ev, beam.wavelength_nm);
  }
  complex beta() const { return std::polar(modulation.beta_abs, modulation.beta_arg); }
  DispersionMode dispersion_mode() const {
    return propagation.dispersion == "quadratic" ? DispersionMode::quadratic : DispersionMode::exact;
  }
  EnvelopeSpec envelope_spec() const {
    return envelope.kind == "infinite" ? EnvelopeSpec::infinite() : EnvelopeSpec::gaussian(envelope.fwhm_fs);
  }
  bool wants(const std::string& format) const {
    for (const auto& f : output.formats)
      if (f == format) return true;
    return false;
  }
};

namespace detail {

using json = nlohmann::json;

/// Line of the field at `path` in `text`, found by walking the quoted keys in order.
inline std::optional<int> locate_line(const std::string& text, const std::vector<std::string>& path) {
  if (text.empty() || path.empty()) return std::nullopt;
  std::size_t pos = 0;
  for (const auto& key : path) {
    if (key.empty() || key.front() == '[') continue;
    const auto hit = text.find('"' + key + '"', pos);
    if (hit == std::string::npos) return std::nullopt;
    pos = hit + 1;
  }
  int line = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

class ConfigReader {
 public:
  explicit ConfigReader(std::string source_name, std::string text = {})
      : source_(std::move(source_name)), text_(std::move(text)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    std::string dotted;
    for (const auto& p : path) {
      if (!dotted.empty() && p.front() != '[') dotted += '.';
      dotted += p;
    }
    std::string where = source_;
    if (const auto line = locate_line(text_, path)) where += ":" + std::to_string(*line);
    throw ConfigError(where + ": field '" + dotted + "': " + message);
  }

  /// Visits object `j` at `path`; `body(key, value, child_path)` handles each
  /// known key and returns false for unknown ones.
  template <typename Body>
  void object(const json& j, const std::vector<std::string>& path, Body&& body) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      auto child = path;
      child.push_back(it.key());
      if (!body(it.key(), it.value(), child)) fail(child, "unknown field");
    }
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  int integer(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned64(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::string choice(const json& v, const std::vector<std::string>& path, std::initializer_list<const char*> allowed) const {
    const auto s = string(v, path);
    std::string list;
    for (const char* a : allowed) {
      if (s == a) return s;
      list += (list.empty() ? "" : ", ") + std::string(a);
    }
    fail(path, "must be one of " + list);
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto child = path;
      child.push_back("[" + std::to_string(i) + "]");
      out.push_back(number(v[i], child));
    }
    return out;
  }

  std::vector<std::string> strings(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto child = path;
      child.push_back("[" + std::to_string(i) + "]");
      out.push_back(string(v[i], child));
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::string text_;
};

}  // namespace detail

/// Semantic checks; `reader` supplies error locations.
inline void validate(const ScenarioConfig& c, const detail::ConfigReader& r) {
  using P = std::vector<std::string>;
  auto positive = [&](double v, const P& p) {
    if (!(v > 0.0)) r.fail(p, "must be positive");
  };
  auto nonnegative = [&](double v, const P& p) {
    if (!(v >= 0.0)) r.fail(p, "must be nonnegative");
  };
  auto unit = [&](double v, const P& p) {
    if (!(v >= 0.0 && v <= 1.0)) r.fail(p, "must lie in [0, 1]");
  };
  positive(c.beam.kinetic_energy_ev, {"beam", "kinetic_energy_ev"});
  positive(c.beam.wavelength_nm, {"beam", "wavelength_nm"});
  try {
    (void)c.beam_parameters();
  } catch (const std::invalid_argument& e) {
    r.fail({"beam"}, e.what());
  }
  nonnegative(c.modulation.beta_abs, {"modulation", "beta_abs"});
  if (c.modulation.beta_abs > 50.0) r.fail({"modulation", "beta_abs"}, "must not exceed 50");
  if (c.propagation.distance_mm) nonnegative(*c.propagation.distance_mm, {"propagation", "distance_mm"});
  nonnegative(c.propagation.grid_start_mm, {"propagation", "grid_start_mm"});
  if (!(c.propagation.grid_stop_mm > c.propagation.grid_start_mm))
    r.fail({"propagation", "grid_stop_mm"}, "must exceed grid_start_mm");
  if (c.propagation.grid_points < 2) r.fail({"propagation", "grid_points"}, "must be at least 2");
  positive(c.width_metric.threshold, {"width_metric", "threshold"});
  positive(c.width_metric.coarse_step_um, {"width_metric", "coarse_step_um"});
  positive(c.width_metric.tolerance_um, {"width_metric", "tolerance_um"});
  if (c.harmonics.max < c.harmonics.min) r.fail({"harmonics", "max"}, "must be >= harmonics.min");
  positive(c.envelope.fwhm_fs, {"envelope", "fwhm_fs"});
  for (std::size_t i = 0; i < c.envelope.fwhm_list_fs.size(); ++i)
    positive(c.envelope.fwhm_list_fs[i], {"envelope", "fwhm_list_fs", "[" + std::to_string(i) + "]"});
  positive(c.coupling.center_harmonic, {"coupling", "center_harmonic"});
  positive(c.coupling.width_rad_per_fs, {"coupling", "width_rad_per_fs"});
  positive(c.coupling.group_index, {"coupling", "group_index"});
  nonnegative(c.coupling.gvd_fs2_per_nm, {"coupling", "gvd_fs2_per_nm"});
  positive(c.coupling.length_um, {"coupling", "length_um"});
  for (std::size_t i = 0; i < c.coupling.lengths_um.size(); ++i)
    positive(c.coupling.lengths_um[i], {"coupling", "lengths_um", "[" + std::to_string(i) + "]"});
  if (c.coupling.kind == "table" && c.coupling.table_path.empty())
    r.fail({"coupling", "table_path"}, "required for table coupling");
  {
    const double norm = c.detection.r_re * c.detection.r_re + c.detection.r_im * c.detection.r_im +
                        c.detection.t_re * c.detection.t_re + c.detection.t_im * c.detection.t_im;
    if (std::abs(norm - 1.0) > 1e-12) r.fail({"detection", "t_re"}, "|R|^2 + |T|^2 must equal 1");
  }
  positive(c.detection.reference.center_harmonic, {"detection", "reference", "center_harmonic"});
  positive(c.detection.reference.fwhm_rad_per_fs, {"detection", "reference", "fwhm_rad_per_fs"});
  nonnegative(c.detection.reference.total_counts, {"detection", "reference", "total_counts"});
  unit(c.detection.qe1, {"detection", "qe1"});
  unit(c.detection.qe2, {"detection", "qe2"});
  if (c.detection.shots < 2) r.fail({"detection", "shots"}, "must be at least 2");
  for (std::size_t i = 0; i < c.oracle.beta_abs.size(); ++i)
    nonnegative(c.oracle.beta_abs[i], {"oracle", "beta_abs", "[" + std::to_string(i) + "]"});
  for (std::size_t i = 0; i < c.oracle.distance_over_talbot.size(); ++i)
    nonnegative(c.oracle.distance_over_talbot[i], {"oracle", "distance_over_talbot", "[" + std::to_string(i) + "]"});
  for (std::size_t i = 0; i < c.oracle.mode_sets.size(); ++i) {
    if (c.oracle.mode_sets[i].empty()) r.fail({"oracle", "mode_sets", "[" + std::to_string(i) + "]"}, "must not be empty");
    for (int h : c.oracle.mode_sets[i])
      if (h < 1) r.fail({"oracle", "mode_sets", "[" + std::to_string(i) + "]"}, "harmonics must be >= 1");
  }
  positive(c.oracle.tolerance, {"oracle", "tolerance"});
  for (std::size_t i = 0; i < c.sweep.beta_abs.size(); ++i)
    nonnegative(c.sweep.beta_abs[i], {"sweep", "beta_abs", "[" + std::to_string(i) + "]"});
  if (c.output.directory.empty()) r.fail({"output", "directory"}, "must not be empty");
}

inline ScenarioConfig config_from_json(const nlohmann::json& root, const detail::ConfigReader& r) {
  using json = nlohmann::json;
  using P = std::vector<std::string>;
  // a run manifest embeds the config it was produced from
  const json& j = (root.is_object() && root.contains("manifest_version") && root.contains("config")) ? root["config"] : root;
  const P base = (&j == &root) ? P{} : P{"config"};

  ScenarioConfig c;
  r.object(j, base, [&](const std::string& key, const json& v, const P& p) {
    if (key == "beam") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "kinetic_energy_ev") c.beam.kinetic_energy_ev = r.number(x, q);
        else if (k == "wavelength_nm") c.beam.wavelength_nm = r.number(x, q);
        else return false;
        return true;
      });
    } else if (key == "modulation") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "beta_abs") c.modulation.beta_abs = r.number(x, q);
        else if (k == "beta_arg") c.modulation.beta_arg = r.number(x, q);
        else return false;
        return true;
      });
    } else if (key == "propagation") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "dispersion") c.propagation.dispersion = r.choice(x, q, {"exact", "quadratic"});
        else if (k == "distance_mm") c.propagation.distance_mm = x.is_null() ? std::nullopt : std::optional(r.number(x, q));
        else if (k == "grid_start_mm") c.propagation.grid_start_mm = r.number(x, q);
        else if (k == "grid_stop_mm") c.propagation.grid_stop_mm = r.number(x, q);
        else if (k == "grid_points") c.propagation.grid_points = r.integer(x, q);
        else return false;
        return true;
      });
    } else if (key == "width_metric") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "threshold") c.width_metric.threshold = r.number(x, q);
        else if (k == "coarse_step_um") c.width_metric.coarse_step_um = r.number(x, q);
        else if (k == "tolerance_um") c.width_metric.tolerance_um = r.number(x, q);
        else return false;
        return true;
      });
    } else if (key == "harmonics") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "min") c.harmonics.min = r.integer(x, q);
        else if (k == "max") c.harmonics.max = r.integer(x, q);
        else return false;
        return true;
      });
    } else if (key == "envelope") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "kind") c.envelope.kind = r.choice(x, q, {"infinite", "gaussian"});
        else if (k == "fwhm_fs") c.envelope.fwhm_fs = r.number(x, q);
        else if (k == "fwhm_list_fs") c.envelope.fwhm_list_fs = r.numbers(x, q);
        else return false;
        return true;
      });
    } else if (key == "coupling") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "kind") c.coupling.kind = r.choice(x, q, {"flat", "gaussian", "table", "waveguide"});
        else if (k == "g0_re") c.coupling.g0_re = r.number(x, q);
        else if (k == "g0_im") c.coupling.g0_im = r.number(x, q);
        else if (k == "center_harmonic") c.coupling.center_harmonic = r.number(x, q);
        else if (k == "width_rad_per_fs") c.coupling.width_rad_per_fs = r.number(x, q);
        else if (k == "table_path") c.coupling.table_path = r.string(x, q);
        else if (k == "interpolation") c.coupling.interpolation = r.choice(x, q, {"linear", "cubic"});
        else if (k == "group_index") c.coupling.group_index = r.number(x, q);
        else if (k == "gvd_fs2_per_nm") c.coupling.gvd_fs2_per_nm = r.number(x, q);
        else if (k == "length_um") c.coupling.length_um = r.number(x, q);
        else if (k == "lengths_um") c.coupling.lengths_um = r.numbers(x, q);
        else return false;
        return true;
      });
    } else if (key == "detection") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "r_re") c.detection.r_re = r.number(x, q);
        else if (k == "r_im") c.detection.r_im = r.number(x, q);
        else if (k == "t_re") c.detection.t_re = r.number(x, q);
        else if (k == "t_im") c.detection.t_im = r.number(x, q);
        else if (k == "qe1") c.detection.qe1 = r.number(x, q);
        else if (k == "qe2") c.detection.qe2 = r.number(x, q);
        else if (k == "shots") c.detection.shots = r.integer(x, q);
        else if (k == "seed") c.detection.seed = r.unsigned64(x, q);
        else if (k == "reference") {
          r.object(x, q, [&](const std::string& kk, const json& y, const P& qq) {
            auto& ref = c.detection.reference;
            if (kk == "center_harmonic") ref.center_harmonic = r.number(y, qq);
            else if (kk == "fwhm_rad_per_fs") ref.fwhm_rad_per_fs = r.number(y, qq);
            else if (kk == "total_counts") ref.total_counts = r.number(y, qq);
            else if (kk == "phase_rad") ref.phase_rad = r.number(y, qq);
            else if (kk == "align_phase") ref.align_phase = r.boolean(y, qq);
            else return false;
            return true;
          });
        } else return false;
        return true;
      });
    } else if (key == "oracle") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "beta_abs") c.oracle.beta_abs = r.numbers(x, q);
        else if (k == "distance_over_talbot") c.oracle.distance_over_talbot = r.numbers(x, q);
        else if (k == "couplings") c.oracle.couplings = r.numbers(x, q);
        else if (k == "tolerance") c.oracle.tolerance = r.number(x, q);
        else if (k == "mode_sets") {
          if (!x.is_array()) r.fail(q, "expected an array of integer arrays");
          c.oracle.mode_sets.clear();
          for (std::size_t i = 0; i < x.size(); ++i) {
            auto qi = q;
            qi.push_back("[" + std::to_string(i) + "]");
            if (!x[i].is_array()) r.fail(qi, "expected an array of integers");
            std::vector<int> set;
            for (std::size_t m = 0; m < x[i].size(); ++m) {
              auto qm = qi;
              qm.push_back("[" + std::to_string(m) + "]");
              set.push_back(r.integer(x[i][m], qm));
            }
            c.oracle.mode_sets.push_back(std::move(set));
          }
        } else return false;
        return true;
      });
    } else if (key == "sweep") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "beta_abs") c.sweep.beta_abs = r.numbers(x, q);
        else return false;
        return true;
      });
    } else if (key == "output") {
      r.object(v, p, [&](const std::string& k, const json& x, const P& q) {
        if (k == "directory") c.output.directory = r.string(x, q);
        else if (k == "formats") {
          c.output.formats = r.strings(x, q);
          for (std::size_t i = 0; i < c.output.formats.size(); ++i) {
            const auto& f = c.output.formats[i];
            if (f != "csv" && f != "json") {
              auto qi = q;
              qi.push_back("[" + std::to_string(i) + "]");
              r.fail(qi, "must be csv or json");
            }
          }
        } else return false;
        return true;
      });
    } else if (key == "description") {
      // free-form note, ignored
    } else {
      return false;
    }
    return true;
  });
  validate(c, r);
  return c;
}

inline ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
  return config_from_json(j, detail::ConfigReader(source, text));
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

inline nlohmann::json to_json(const ScenarioConfig& c) {
  using json = nlohmann::json;
  const auto& d = c.detection;
  return json{
      {"beam", {{"kinetic_energy_ev", c.beam.kinetic_energy_ev}, {"wavelength_nm", c.beam.wavelength_nm}}},
      {"modulation", {{"beta_abs", c.modulation.beta_abs}, {"beta_arg", c.modulation.beta_arg}}},
      {"propagation",
       {{"dispersion", c.propagation.dispersion},
        {"distance_mm", c.propagation.distance_mm ? json(*c.propagation.distance_mm) : json(nullptr)},
        {"grid_start_mm", c.propagation.grid_start_mm},
        {"grid_stop_mm", c.propagation.grid_stop_mm},
        {"grid_points", c.propagation.grid_points}}},
      {"width_metric",
       {{"threshold", c.width_metric.threshold},
        {"coarse_step_um", c.width_metric.coarse_step_um},
        {"tolerance_um", c.width_metric.tolerance_um}}},
      {"harmonics", {{"min", c.harmonics.min}, {"max", c.harmonics.max}}},
      {"envelope",
       {{"kind", c.envelope.kind}, {"fwhm_fs", c.envelope.fwhm_fs}, {"fwhm_list_fs", c.envelope.fwhm_list_fs}}},
      {"coupling",
       {{"kind", c.coupling.kind},
        {"g0_re", c.coupling.g0_re},
        {"g0_im", c.coupling.g0_im},
        {"center_harmonic", c.coupling.center_harmonic},
        {"width_rad_per_fs", c.coupling.width_rad_per_fs},
        {"table_path", c.coupling.table_path},
        {"interpolation", c.coupling.interpolation},
        {"group_index", c.coupling.group_index},
        {"gvd_fs2_per_nm", c.coupling.gvd_fs2_per_nm},
        {"length_um", c.coupling.length_um},
        {"lengths_um", c.coupling.lengths_um}}},
      {"detection",
       {{"r_re", d.r_re},
        {"r_im", d.r_im},
        {"t_re", d.t_re},
        {"t_im", d.t_im},
        {"reference",
         {{"center_harmonic", d.reference.center_harmonic},
          {"fwhm_rad_per_fs", d.reference.fwhm_rad_per_fs},
          {"total_counts", d.reference.total_counts},
          {"phase_rad", d.reference.phase_rad},
          {"align_phase", d.reference.align_phase}}},
        {"qe1", d.qe1},
        {"qe2", d.qe2},
        {"shots", d.shots},
        {"seed", d.seed}}},
      {"oracle",
       {{"beta_abs", c.oracle.beta_abs},
        {"distance_over_talbot", c.oracle.distance_over_talbot},
        {"couplings", c.oracle.couplings},
        {"mode_sets", c.oracle.mode_sets},
        {"tolerance", c.oracle.tolerance}}},
      {"sweep", {{"beta_abs", c.sweep.beta_abs}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
}

/// Coupling model for this config; waveguide lengths may be overridden.
inline CouplingModel build_coupling(const ScenarioConfig& c, std::optional<double> length_um = std::nullopt,
                                    const std::filesystem::path& base_dir = {}) {
  const auto beam = c.beam_parameters();
  const complex g0(c.coupling.g0_re, c.coupling.g0_im);
  const double w0 = beam.omega0();
  if (c.coupling.kind == "flat") return FlatCoupling{g0};
  if (c.coupling.kind == "gaussian")
    return GaussianBandCoupling{std::abs(g0), c.coupling.center_harmonic * w0, c.coupling.width_rad_per_fs};
  if (c.coupling.kind == "table") {
    std::filesystem::path p(c.coupling.table_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return load_coupling_csv(p.string(), c.coupling.interpolation == "linear"
                                             ? TabulatedCoupling::Interpolation::linear
                                             : TabulatedCoupling::Interpolation::cubic);
  }
  WaveguideCoupling wg;
  wg.g0 = std::abs(g0);
  wg.matching_omega = c.coupling.center_harmonic * w0;
  wg.electron_velocity = beam.velocity();
  wg.group_velocity = constants::speed_of_light / c.coupling.group_index;
  wg.gvd = c.coupling.gvd_fs2_per_nm;
  wg.length = length_um.value_or(c.coupling.length_um) * 1e3;
  return wg;
}

}  // namespace clc
