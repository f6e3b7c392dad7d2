#pragma once
//
// Named scenarios: each turns a ScenarioConfig into CSV/JSON plot data, a
// summary and a run manifest in one output directory.
//

#include <clcoherence/config.hpp>
#include <clcoherence/coupling.hpp>
#include <clcoherence/crosscheck.hpp>
#include <clcoherence/detection.hpp>
#include <clcoherence/estate.hpp>
#include <clcoherence/io.hpp>
#include <clcoherence/kinematics.hpp>
#include <clcoherence/parallel.hpp>
#include <clcoherence/spectra.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#ifndef CLCOHERENCE_VERSION
#define CLCOHERENCE_VERSION "0.0.0"
#endif

namespace clc {

inline constexpr std::string_view version = CLCOHERENCE_VERSION;

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"doc-map", "doc-slice", "waveguide", "pulse-shape",
                                              "detect",  "oracle-check", "sweep"};
  return names;
}

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned threads = 1;
  bool gnuplot_stub = false;
  std::filesystem::path config_dir;  ///< base for relative paths inside the config
  std::ostream* log = nullptr;
};

struct ScenarioResult {
  int exit_code = 0;
  std::vector<std::string> outputs;
  nlohmann::json summary;
};

inline std::string config_hash(const ScenarioConfig& c) { return io::hex64(io::fnv1a(to_json(c).dump())); }

/// Ladder at the configured distance, or at the widest-spectrum distance when
/// none is given.
inline double resolve_distance(const ScenarioConfig& c, const LadderState& initial, unsigned threads) {
  if (c.propagation.distance_mm) return *c.propagation.distance_mm * 1e6;
  WidthSearch ws;
  ws.d_min = c.propagation.grid_start_mm * 1e6;
  ws.d_max = c.propagation.grid_stop_mm * 1e6;
  ws.coarse_step = c.width_metric.coarse_step_um * 1e3;
  ws.tolerance = c.width_metric.tolerance_um * 1e3;
  ws.threshold = c.width_metric.threshold;
  ws.mode = c.dispersion_mode();
  return optimal_bunching_distance(initial, ws, threads).distance;
}

/// Frequencies around harmonic n where DOC stays above `fraction` of its
/// value at n omega0, walking outward on the spectrum grid.
inline FrequencyBand doc_peak_band(const DensitySpectrum& spectrum, int n, double fraction = 0.01) {
  const double w0 = spectrum.omega0;
  const double peak = doc(spectrum, n * w0);
  const double h = spectrum.step();
  double lo = n * w0, hi = n * w0;
  while (lo - h > (n - 0.5) * w0 && doc(spectrum, lo - h) >= fraction * peak) lo -= h;
  while (hi + h < (n + 0.5) * w0 && doc(spectrum, hi + h) >= fraction * peak) hi += h;
  return {lo, hi};
}

inline FrequencyBand harmonic_band(double center_harmonic, double w0) {
  return {(center_harmonic - 0.5) * w0, (center_harmonic + 0.5) * w0};
}

/// Spectrum, coherent field and time-domain pulse for one coupling.
struct PulseAnalysis {
  CoherentField field;
  TimeDomainField time;
  double spectral_fwhm = 0.0;
};

inline PulseAnalysis analyze_pulse(const DensitySpectrum& spectrum, const CouplingModel& coupling, FrequencyBand band) {
  PulseAnalysis out;
  out.field = mean_field(coupling, spectrum);
  out.time = time_domain_field(out.field, band);
  out.spectral_fwhm = spectral_fwhm(out.field, band);
  return out;
}

namespace detail {

class ScenarioContext {
 public:
  ScenarioContext(const ScenarioConfig& c, RunOptions opt) : cfg(c), opts(std::move(opt)) {
    std::filesystem::create_directories(opts.out_dir);
  }

  bool csv() const { return cfg.wants("csv"); }

  io::CsvWriter open_csv(const std::string& name, std::initializer_list<std::string_view> header) {
    record(name);
    if (opts.gnuplot_stub) write_gnuplot(name, header);
    return {opts.out_dir / name, header};
  }

  void write_json(const std::string& name, const nlohmann::json& j) {
    record(name);
    io::write_json(opts.out_dir / name, j);
  }

  void record(const std::string& name) { outputs.push_back(name); }

  std::ostream& log() { return opts.log ? *opts.log : null_stream(); }

  const ScenarioConfig& cfg;
  RunOptions opts;
  std::vector<std::string> outputs;

 private:
  static std::ostream& null_stream() {
    static std::ostringstream sink;
    sink.str({});
    return sink;
  }

  void write_gnuplot(const std::string& csv_name, std::initializer_list<std::string_view> header) {
    const auto stem = std::filesystem::path(csv_name).stem().string();
    const std::string gp = stem + ".gp";
    std::ofstream out(opts.out_dir / gp);
    std::vector<std::string> cols(header.begin(), header.end());
    out << "# gnuplot " << gp << "\n"
        << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set terminal pngcairo size 900,600\n"
        << "set output '" << stem << ".png'\n"
        << "set xlabel '" << cols.front() << "'\n";
    if (cols.size() >= 3 && (cols[1] == "d_mm" || cols[0] == "d_mm")) {
      out << "set ylabel '" << cols[1] << "'\n"
          << "set view map\n"
          << "splot '" << csv_name << "' using 2:1:3 with points pointtype 5 pointsize 0.3 palette\n";
    } else {
      out << "plot '" << csv_name << "' using 1:2 with lines\n";
    }
    record(gp);
  }
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Decimated |E(t)| trace limited to where the envelope is above 1e-4 of its peak.
inline void write_time_trace(ScenarioContext& ctx, const std::string& name, const TimeDomainField& tf, double period) {
  auto csv = ctx.open_csv(name, {"time_fs", "abs_E", "re_E", "im_E"});
  const double peak = *std::max_element(tf.envelope.begin(), tf.envelope.end());
  std::size_t first = tf.time.size(), last = 0;
  for (std::size_t i = 0; i < tf.time.size(); ++i) {
    if (tf.envelope[i] >= 1e-4 * peak) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first > last) return;
  const double dt = tf.time[1] - tf.time[0];
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::floor(period / 16.0 / dt)));
  for (std::size_t i = first; i <= last; i += stride)
    csv.row({tf.time[i], tf.envelope[i], tf.field[i].real(), tf.field[i].imag()});
}

inline void write_band_spectrum(ScenarioContext& ctx, const std::string& name, const DensitySpectrum& spectrum,
                                const CouplingModel& coupling, const CoherentField& field, FrequencyBand band) {
  auto csv = ctx.open_csv(name, {"omega_over_omega0", "abs_g", "abs_a_mean", "doc"});
  for (std::size_t i = 0; i < field.omega.size(); ++i) {
    const double w = field.omega[i];
    if (w < band.lo || w > band.hi) continue;
    csv.row({w / spectrum.omega0, std::abs(coupling_amplitude(coupling, w)), std::abs(field.a_mean[i]),
             std::norm(spectrum.values[i])});
  }
}

inline std::string number_tag(double v) {
  std::ostringstream s;
  s << v;
  auto t = s.str();
  std::replace(t.begin(), t.end(), '.', 'p');
  return t;
}

// ---- scenarios ----

inline nlohmann::json run_doc_map(ScenarioContext& ctx) {
  const auto& c = ctx.cfg;
  const auto beam = c.beam_parameters();
  const auto initial = pinem_ladder(beam, c.beta());
  const auto grid_mm = linspace(c.propagation.grid_start_mm, c.propagation.grid_stop_mm, c.propagation.grid_points);
  std::vector<double> grid_nm(grid_mm.size());
  std::transform(grid_mm.begin(), grid_mm.end(), grid_nm.begin(), [](double x) { return x * 1e6; });
  const auto map = doc_map(initial, grid_nm, c.harmonics.min, c.harmonics.max, c.dispersion_mode(), ctx.opts.threads);

  WidthSearch ws;
  ws.d_min = grid_nm.front();
  ws.d_max = grid_nm.back();
  ws.coarse_step = c.width_metric.coarse_step_um * 1e3;
  ws.tolerance = c.width_metric.tolerance_um * 1e3;
  ws.threshold = c.width_metric.threshold;
  ws.mode = c.dispersion_mode();
  const auto best = optimal_bunching_distance(initial, ws, ctx.opts.threads);
  const auto at_best = propagate(initial, best.distance, c.dispersion_mode());

  if (ctx.csv()) {
    auto csv = ctx.open_csv("doc_map.csv", {"omega_over_omega0", "d_mm", "doc", "sqrt_doc"});
    for (std::size_t i = 0; i < grid_mm.size(); ++i)
      for (int n = map.n_min; n <= map.n_max; ++n) {
        const double v = map.at(i, n);
        csv.row({static_cast<double>(n), grid_mm[i], v, std::sqrt(v)});
      }
    auto width = ctx.open_csv("width_metric.csv", {"d_mm", "width_harmonics", "harmonic_power"});
    std::vector<int> widths(grid_nm.size());
    std::vector<double> powers(grid_nm.size());
    parallel_for(grid_nm.size(), ctx.opts.threads, [&](std::size_t i) {
      const auto s = propagate(initial, grid_nm[i], c.dispersion_mode());
      widths[i] = spectral_width(s, c.width_metric.threshold);
      powers[i] = harmonic_power(s);
    });
    for (std::size_t i = 0; i < grid_mm.size(); ++i) width.row({grid_mm[i], static_cast<double>(widths[i]), powers[i]});
    auto comb = ctx.open_csv("doc_at_optimum.csv", {"omega_over_omega0", "d_mm", "doc", "sqrt_doc"});
    for (int n = map.n_min; n <= map.n_max; ++n) {
      const double v = std::abs(n) > 2 * at_best.cutoff() ? 0.0 : std::norm(ladder_overlap(at_best, n));
      comb.row({static_cast<double>(n), best.distance * 1e-6, v, std::sqrt(v)});
    }
  }
  if (c.wants("json")) ctx.write_json("ladder_at_optimum.json", io::ladder_to_json(at_best));

  nlohmann::json sqrt_doc = nlohmann::json::array();
  for (int n = 1; n <= 10; ++n) sqrt_doc.push_back(std::abs(ladder_overlap(at_best, n)));
  ctx.log() << "widest spectrum at d = " << best.distance * 1e-6 << " mm (width " << best.width
            << " harmonics, plateau " << best.plateau_lo * 1e-6 << " .. " << best.plateau_hi * 1e-6 << " mm)\n";
  return {{"optimal_distance_mm", best.distance * 1e-6},
          {"width_harmonics", best.width},
          {"harmonic_power", best.harmonic_power},
          {"plateau_mm", {best.plateau_lo * 1e-6, best.plateau_hi * 1e-6}},
          {"sqrt_doc_n1_to_n10", sqrt_doc},
          {"threshold", c.width_metric.threshold}};
}

inline nlohmann::json run_doc_slice(ScenarioContext& ctx) {
  const auto& c = ctx.cfg;
  const auto beam = c.beam_parameters();
  const auto initial = pinem_ladder(beam, c.beta());
  const double d = resolve_distance(c, initial, ctx.opts.threads);
  const auto state = propagate(initial, d, c.dispersion_mode());
  const double w0 = beam.omega0();
  const double lo = std::max(c.harmonics.min, 0) - 0.5, hi = c.harmonics.max + 0.5;

  auto fwhms = c.envelope.fwhm_list_fs;
  if (fwhms.empty()) fwhms.push_back(c.envelope.fwhm_fs);
  nlohmann::json runs = nlohmann::json::array();
  for (double fwhm : fwhms) {
    const auto rho = synthesize_density(state, EnvelopeSpec::gaussian(fwhm));
    const auto spectrum = density_spectrum(rho);
    if (ctx.csv()) {
      auto csv = ctx.open_csv("doc_slice_fwhm_" + number_tag(fwhm) + "fs.csv", {"omega_over_omega0", "doc"});
      for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
        const double x = spectrum.omega[i] / w0;
        if (x >= lo && x <= hi) csv.row({x, std::norm(spectrum.values[i])});
      }
    }
    nlohmann::json peaks = nlohmann::json::array();
    for (int n = std::max(c.harmonics.min, 1); n <= std::min(c.harmonics.max, 10); ++n) peaks.push_back(doc(spectrum, n * w0));
    runs.push_back({{"fwhm_fs", fwhm}, {"doc_at_harmonics", peaks}});
  }
  if (ctx.csv()) {
    auto comb = ctx.open_csv("doc_comb.csv", {"omega_over_omega0", "doc", "sqrt_doc"});
    for (int n = c.harmonics.min; n <= c.harmonics.max; ++n) {
      const double v = std::abs(n) > 2 * state.cutoff() ? 0.0 : std::norm(ladder_overlap(state, n));
      comb.row({static_cast<double>(n), v, std::sqrt(v)});
    }
  }
  return {{"distance_mm", d * 1e-6}, {"slices", runs}};
}

inline nlohmann::json run_waveguide(ScenarioContext& ctx) {
  const auto& c = ctx.cfg;
  if (c.coupling.kind != "waveguide") throw ConfigError("waveguide scenario: field 'coupling.kind' must be \"waveguide\"");
  const auto beam = c.beam_parameters();
  const auto initial = pinem_ladder(beam, c.beta());
  const double d = resolve_distance(c, initial, ctx.opts.threads);
  const auto state = propagate(initial, d, c.dispersion_mode());
  const auto rho = synthesize_density(state, c.envelope_spec());
  const auto spectrum = density_spectrum(rho);
  const double w0 = beam.omega0();
  const auto band = harmonic_band(c.coupling.center_harmonic, w0);
  const int harmonic = static_cast<int>(std::lround(c.coupling.center_harmonic));
  const auto peak = doc_peak_band(spectrum, harmonic);

  auto lengths = c.coupling.lengths_um;
  if (lengths.empty()) lengths.push_back(c.coupling.length_um);
  nlohmann::json runs = nlohmann::json::array();
  for (double L : lengths) {
    const auto model = build_coupling(c, L, ctx.opts.config_dir);
    const auto pulse = analyze_pulse(spectrum, model, band);
    const auto& wg = std::get<WaveguideCoupling>(model);
    const int changes = count_sign_changes(wg, peak.lo, peak.hi);
    if (ctx.csv()) {
      const auto tag = number_tag(L) + "um";
      write_band_spectrum(ctx, "waveguide_L" + tag + "_spectrum.csv", spectrum, model, pulse.field, band);
      write_time_trace(ctx, "waveguide_L" + tag + "_time.csv", pulse.time, beam.period());
    }
    ctx.log() << "L = " << L << " um: spectral FWHM " << pulse.spectral_fwhm << " rad/fs, |E| FWHM "
              << pulse.time.fwhm_amplitude << " fs, sign changes " << changes << "\n";
    runs.push_back({{"length_um", L},
                    {"spectral_fwhm_rad_per_fs", pulse.spectral_fwhm},
                    {"field_fwhm_fs", pulse.time.fwhm_amplitude},
                    {"intensity_fwhm_fs", pulse.time.fwhm_intensity},
                    {"coupling_sign_changes_in_doc_peak", changes}});
  }
  return {{"distance_mm", d * 1e-6},
          {"doc_peak_rad_per_fs", {peak.lo, peak.hi}},
          {"electron_fwhm_fs", c.envelope.fwhm_fs},
          {"lengths", runs}};
}

inline nlohmann::json run_pulse_shape(ScenarioContext& ctx) {
  const auto& c = ctx.cfg;
  if (c.envelope.kind != "gaussian") throw ConfigError("pulse-shape scenario: field 'envelope.kind' must be \"gaussian\"");
  const auto beam = c.beam_parameters();
  const auto initial = pinem_ladder(beam, c.beta());
  const double d = resolve_distance(c, initial, ctx.opts.threads);
  const auto state = propagate(initial, d, c.dispersion_mode());
  const auto spectrum = density_spectrum(synthesize_density(state, c.envelope_spec()));
  const auto model = build_coupling(c, std::nullopt, ctx.opts.config_dir);
  const auto band = harmonic_band(c.coupling.center_harmonic, beam.omega0());
  const auto pulse = analyze_pulse(spectrum, model, band);
  if (ctx.csv()) {
    write_band_spectrum(ctx, "pulse_spectrum.csv", spectrum, model, pulse.field, band);
    write_time_trace(ctx, "pulse_time.csv", pulse.time, beam.period());
  }
  ctx.log() << "electron FWHM " << c.envelope.fwhm_fs << " fs -> |E| FWHM " << pulse.time.fwhm_amplitude
            << " fs, |E|^2 FWHM " << pulse.time.fwhm_intensity << " fs\n";
  return {{"distance_mm", d * 1e-6},
          {"electron_fwhm_fs", c.envelope.fwhm_fs},
          {"field_fwhm_fs", pulse.time.fwhm_amplitude},
          {"intensity_fwhm_fs", pulse.time.fwhm_intensity},
          {"intensity_to_field_ratio", pulse.time.fwhm_intensity / pulse.time.fwhm_amplitude},
          {"spectral_fwhm_rad_per_fs", pulse.spectral_fwhm}};
}

inline nlohmann::json run_detect(ScenarioContext& ctx) {
  const auto& c = ctx.cfg;
  const auto& dc = c.detection;
  const auto beam = c.beam_parameters();
  const auto initial = pinem_ladder(beam, c.beta());
  const double d = resolve_distance(c, initial, ctx.opts.threads);
  const auto state = propagate(initial, d, c.dispersion_mode());
  const auto spectrum = density_spectrum(synthesize_density(state, EnvelopeSpec::gaussian(c.envelope.fwhm_fs)));
  const auto model = build_coupling(c, std::nullopt, ctx.opts.config_dir);
  const auto field = mean_field(model, spectrum);
  const BeamSplitter bs(complex(dc.r_re, dc.r_im), complex(dc.t_re, dc.t_im));
  auto ref = ReferencePulse::gaussian(field.omega, dc.reference.center_harmonic * beam.omega0(),
                                      dc.reference.fwhm_rad_per_fs, dc.reference.total_counts, dc.reference.phase_rad);
  double phase = dc.reference.phase_rad;
  if (dc.reference.align_phase) {
    const double shift = aligned_reference_phase(bs, ref, field);
    ref = ref.rotated(shift);
    phase += shift;
  }
  const auto means = detector_means(bs, ref, field, dc.qe1, dc.qe2);
  const double signal = balanced_signal(bs, ref, field);
  const auto ens = sample_shots(bs, ref, field, dc.qe1, dc.qe2, static_cast<std::size_t>(dc.shots), dc.seed,
                                ctx.opts.threads);
  const auto est = snr_estimate(ens);
  const auto imbalance = check_imbalance(bs, ens, est);
  const auto noise = noise_floor_terms(bs, ref, model, spectrum);
  const auto s1 = detector_stats(ens, 1), s2 = detector_stats(ens, 2);

  if (ctx.csv()) {
    auto csv = ctx.open_csv("shots.csv", {"shot_index", "I1_counts", "I2_counts"});
    for (std::size_t k = 0; k < ens.shots.size(); ++k)
      csv.row({static_cast<double>(k), static_cast<double>(ens.shots[k].i1), static_cast<double>(ens.shots[k].i2)});
  }
  if (imbalance.significant)
    ctx.log() << "warning: detector imbalance offset " << imbalance.expected_offset
              << " counts exceeds 3 standard errors; the mean difference is not CL signal\n";
  ctx.log() << "S = " << signal << ", mean(I1-I2) = " << est.mean << " +- " << est.standard_error
            << ", snr = " << est.snr << "\n";
  return {{"mu1", means.mu1},
          {"mu2", means.mu2},
          {"signal_unit_qe", signal},
          {"expected_difference", means.mu1 - means.mu2},
          {"mean_difference", est.mean},
          {"stddev", est.stddev},
          {"standard_error", est.standard_error},
          {"snr", est.snr},
          {"snr_per_shot", est.snr_per_shot},
          {"fano_detector1", s1.fano()},
          {"fano_detector2", s2.fano()},
          {"reference_counts", ref.total_counts()},
          {"reference_phase_rad", phase},
          {"shots", dc.shots},
          {"seed", dc.seed},
          {"config_hash", config_hash(c)},
          {"imbalance", {{"expected_offset", imbalance.expected_offset}, {"flagged", imbalance.significant}}},
          {"noise",
           {{"coeff_alpha4", noise.coeff_alpha4},
            {"coeff_alpha3", noise.coeff_alpha3},
            {"term_alpha4", noise.term_alpha4},
            {"term_alpha3", noise.term_alpha3},
            {"surviving", noise.surviving},
            {"shot_noise", noise.shot_noise}}}};
}

struct OracleCheckOutcome {
  nlohmann::json summary;
  bool passed = true;
};

inline OracleCheckOutcome run_oracle_check(ScenarioContext& ctx) {
  const auto& c = ctx.cfg;
  const auto beam = c.beam_parameters();
  const auto cases = crosscheck_matrix(c.oracle.beta_abs, c.oracle.distance_over_talbot, c.oracle.couplings,
                                       c.oracle.mode_sets);
  const auto results = run_crosscheck_matrix(beam, cases, ctx.opts.threads);
  OracleCheckOutcome out;
  std::ostream& os = ctx.log();
  os << std::setw(6) << "beta" << std::setw(8) << "d/zT" << std::setw(7) << "g" << std::setw(8) << "modes"
     << std::setw(8) << "dim" << std::setw(12) << "max_err" << "  result\n";
  std::optional<io::CsvWriter> csv;
  if (ctx.csv())
    csv.emplace(ctx.open_csv("oracle_check.csv", {"beta_abs", "distance_over_talbot", "coupling", "mode_count",
                                                  "top_harmonic", "dimension", "max_error", "doc_first_mode", "passed"}));
  double min_doc = 1.0, max_doc = 0.0, max_photon_dev = 0.0, worst = 0.0;
  for (const auto& r : results) {
    const bool ok = r.max_error() <= c.oracle.tolerance;
    out.passed = out.passed && ok;
    worst = std::max(worst, r.max_error());
    max_photon_dev = std::max(max_photon_dev, r.err_photons);
    for (double v : r.doc) {
      min_doc = std::min(min_doc, v);
      max_doc = std::max(max_doc, v);
    }
    std::string modes;
    for (int h : r.input.harmonics) modes += (modes.empty() ? "" : ",") + std::to_string(h);
    os << std::setw(6) << r.input.beta_abs << std::setw(8) << r.input.distance_over_talbot << std::setw(7)
       << r.input.coupling << std::setw(8) << modes << std::setw(8) << r.dimension << std::setw(12)
       << std::scientific << std::setprecision(2) << r.max_error() << std::defaultfloat << std::setprecision(6)
       << "  " << (ok ? "PASS" : "FAIL") << "\n";
    if (csv)
      csv->row({r.input.beta_abs, r.input.distance_over_talbot, r.input.coupling,
                static_cast<double>(r.input.harmonics.size()),
                static_cast<double>(*std::max_element(r.input.harmonics.begin(), r.input.harmonics.end())),
                static_cast<double>(r.dimension), r.max_error(), r.doc.front(), ok ? 1.0 : 0.0});
  }
  out.summary = {{"cases", results.size()},
                 {"passed", out.passed},
                 {"tolerance", c.oracle.tolerance},
                 {"worst_error", worst},
                 {"max_photon_number_deviation", max_photon_dev},
                 {"doc_range", max_doc - min_doc}};
  return out;
}

inline nlohmann::json run_sweep(ScenarioContext& ctx) {
  const auto& c = ctx.cfg;
  const auto beam = c.beam_parameters();
  WidthSearch ws;
  ws.d_min = c.propagation.grid_start_mm * 1e6;
  ws.d_max = c.propagation.grid_stop_mm * 1e6;
  ws.coarse_step = c.width_metric.coarse_step_um * 1e3;
  ws.tolerance = c.width_metric.tolerance_um * 1e3;
  ws.threshold = c.width_metric.threshold;
  ws.mode = c.dispersion_mode();
  std::optional<io::CsvWriter> csv;
  if (ctx.csv())
    csv.emplace(ctx.open_csv("sweep.csv", {"beta_abs", "d_opt_mm", "width_harmonics", "harmonic_power",
                                           "sqrt_doc_n1", "sqrt_doc_n2", "sqrt_doc_n3"}));
  nlohmann::json rows = nlohmann::json::array();
  for (double b : c.sweep.beta_abs) {
    const auto initial = pinem_ladder(beam, std::polar(b, c.modulation.beta_arg));
    const auto best = optimal_bunching_distance(initial, ws, ctx.opts.threads);
    const auto s = propagate(initial, best.distance, c.dispersion_mode());
    const double r1 = std::abs(ladder_overlap(s, 1)), r2 = std::abs(ladder_overlap(s, 2)),
                 r3 = std::abs(ladder_overlap(s, 3));
    if (csv) csv->row({b, best.distance * 1e-6, static_cast<double>(best.width), best.harmonic_power, r1, r2, r3});
    rows.push_back({{"beta_abs", b}, {"optimal_distance_mm", best.distance * 1e-6}, {"width_harmonics", best.width}});
  }
  return {{"sweep", rows}};
}

}  // namespace detail

inline nlohmann::json derived_constants(const BeamParameters& beam) {
  return {{"gamma", beam.gamma()},
          {"beta_v", beam.beta_v()},
          {"velocity_nm_per_fs", beam.velocity()},
          {"photon_energy_ev", beam.photon_energy()},
          {"omega0_rad_per_fs", beam.omega0()},
          {"period_fs", beam.period()},
          {"talbot_distance_mm", beam.talbot_distance() * 1e-6},
          {"recoil_ratio", beam.recoil_ratio()}};
}

/// Runs one scenario; writes outputs plus summary.json and manifest.json.
/// Exit code 4 when oracle-check finds a mismatch. Config and physics-guard
/// errors propagate as exceptions.
inline ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& scenario, RunOptions opts) {
  if (std::find(scenario_names().begin(), scenario_names().end(), scenario) == scenario_names().end())
    throw ConfigError("unknown scenario '" + scenario + "'");
  ScenarioConfig cfg = config;
  if (cfg.coupling.kind == "table") {
    std::filesystem::path p(cfg.coupling.table_path);
    if (p.is_relative() && !opts.config_dir.empty()) cfg.coupling.table_path = std::filesystem::absolute(opts.config_dir / p).string();
  }
  if (opts.out_dir.empty()) opts.out_dir = cfg.output.directory;
  const auto beam = cfg.beam_parameters();
  if (beam.nonrecoil_warning() && opts.log)
    *opts.log << "warning: photon/electron energy ratio " << beam.recoil_ratio() << " strains the nonrecoil model\n";

  detail::ScenarioContext ctx(cfg, opts);
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioResult result;
  if (scenario == "doc-map") result.summary = detail::run_doc_map(ctx);
  else if (scenario == "doc-slice") result.summary = detail::run_doc_slice(ctx);
  else if (scenario == "waveguide") result.summary = detail::run_waveguide(ctx);
  else if (scenario == "pulse-shape") result.summary = detail::run_pulse_shape(ctx);
  else if (scenario == "detect") result.summary = detail::run_detect(ctx);
  else if (scenario == "sweep") result.summary = detail::run_sweep(ctx);
  else {
    auto oc = detail::run_oracle_check(ctx);
    result.summary = oc.summary;
    if (!oc.passed) result.exit_code = 4;
  }
  result.summary["scenario"] = scenario;
  result.summary["runtime_s"] = detail::seconds_since(t0);
  if (cfg.wants("json")) ctx.write_json("summary.json", result.summary);

  nlohmann::json manifest{{"manifest_version", 1},
                          {"tool", "clcoherence"},
                          {"version", std::string(version)},
                          {"scenario", scenario},
                          {"config_hash", config_hash(cfg)},
                          {"seed", cfg.detection.seed},
                          {"derived", derived_constants(beam)},
                          {"outputs", ctx.outputs},
                          {"config", to_json(cfg)}};
  io::write_json(ctx.opts.out_dir / "manifest.json", manifest);
  result.outputs = ctx.outputs;
  result.outputs.push_back("manifest.json");
  return result;
}

}  // namespace clc
