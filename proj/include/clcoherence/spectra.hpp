#pragma once
//
// Spectral observables of cathodoluminescence from a structured electron.
//
// One Fourier convention is used throughout:
//     F(omega) = int rho(t) exp(+i omega t) dt,
// so that F(n omega0) = sum_j conj(c_j) c_{j+n} for a ladder state. With the
// scattering operator acting as S^dagger a_w S = a_w + g_w b_w, every moment of
// the CL field follows from F and the coupling g:
//     <a_w>              = g_w F(w)
//     <a_w^dagger a_w'>  = conj(g_w) g_w' F(w' - w)
//     <a_w a_w'>         = g_w g_w' F(w + w')
//     <(a - <a>)^N>      = g^N sum_k C(N,k) (-F(w))^(N-k) F(k w)
//

#include <clcoherence/coupling.hpp>
#include <clcoherence/errors.hpp>
#include <clcoherence/estate.hpp>
#include <clcoherence/fft.hpp>
#include <clcoherence/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace clc {

/// F(omega) on a frequency grid. Ladder spectra are pure harmonic combs
/// (infinite envelope): F vanishes off the harmonics n omega0.
struct DensitySpectrum {
  enum class Source { ladder, sampled };

  std::vector<double> omega;
  std::vector<complex> values;
  Source source = Source::sampled;
  double omega0 = 0.0;

  double step() const {
    return omega.size() > 1 ? (omega.back() - omega.front()) / static_cast<double>(omega.size() - 1) : 0.0;
  }

  /// F at `w`. Sampled spectra return the grid node when `w` hits one and
  /// interpolate linearly otherwise; out-of-grid requests throw.
  complex at(double w) const {
    if (source == Source::ladder) {
      const double x = w / omega0;
      const double n = std::round(x);
      if (std::abs(x - n) > 1e-9 * std::max(1.0, std::abs(x))) return {};
      const long half = static_cast<long>(values.size() / 2);
      const long k = static_cast<long>(n);
      if (k < -half || k > half) return {};
      return values[static_cast<std::size_t>(k + half)];
    }
    if (omega.empty()) throw GridCoverageError("empty spectrum");
    const double h = step();
    const double pos = (w - omega.front()) / h;
    const double last = static_cast<double>(omega.size() - 1);
    if (pos < -1e-9 || pos > last + 1e-9)
      throw GridCoverageError("frequency " + std::to_string(w) + " rad/fs outside spectrum grid");
    const double node = std::round(pos);
    if (std::abs(pos - node) < 1e-7) return values[static_cast<std::size_t>(std::clamp(node, 0.0, last))];
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
  }

  bool covers(double w) const {
    if (source == Source::ladder) return true;
    return !omega.empty() && w >= omega.front() - 1e-9 * step() && w <= omega.back() + 1e-9 * step();
  }
};

/// sum_j conj(c_j) c_{j+n}, defined for |n| <= 2J.
inline complex ladder_overlap(const LadderState& state, int n) {
  const int J = state.cutoff();
  if (std::abs(n) > 2 * J) throw std::out_of_range("ladder overlap harmonic exceeds 2J");
  complex s{};
  const int lo = std::max(-J, -J - n);
  const int hi = std::min(J, J - n);
  for (int j = lo; j <= hi; ++j) s += std::conj(state[j]) * state[j + n];
  return s;
}

/// Closed-form F(n omega0) for a PINEM ladder after quadratic-dispersion
/// propagation over distance_over_talbot = d / z_T:
///   exp(i n arg(-beta)) exp(2 pi i n^2 d/z_T) sum_l J_l(2|beta|) J_{l-n}(2|beta|) exp(-4 pi i l n d/z_T)
inline complex analytic_pinem_overlap(complex beta, int n, double distance_over_talbot) {
  const double x = 2.0 * std::abs(beta);
  const int L = auto_cutoff(std::abs(beta)) + std::abs(n);
  const double r = distance_over_talbot;
  auto turns_phase = [](double turns) { return std::polar(1.0, constants::two_pi * std::fmod(turns, 1.0)); };
  complex s{};
  for (int l = -L; l <= L; ++l) {
    const double amp = bessel_j(l, x) * bessel_j(l - n, x);
    if (amp == 0.0) continue;
    s += amp * turns_phase(-2.0 * static_cast<double>(l) * n * r);
  }
  return std::polar(1.0, n * std::arg(-beta)) * turns_phase(static_cast<double>(n) * n * r) * s;
}

/// Harmonic comb F(n omega0), n in [-2J, 2J].
inline DensitySpectrum ladder_spectrum(const LadderState& state) {
  DensitySpectrum out;
  out.source = DensitySpectrum::Source::ladder;
  out.omega0 = state.beam().omega0();
  const int N = 2 * state.cutoff();
  for (int n = -N; n <= N; ++n) {
    out.omega.push_back(n * out.omega0);
    out.values.push_back(ladder_overlap(state, n));
  }
  return out;
}

/// Discrete Fourier transform of a sampled density. Infinite envelopes use the
/// (integer-period) window as is; finite envelopes are zero-padded x8, or more
/// if needed for 32 grid points per harmonic spacing.
inline DensitySpectrum density_spectrum(const WavepacketDensity& rho) {
  std::size_t pad = 1;
  if (!rho.envelope.is_infinite()) {
    pad = 8;
    const double period = constants::two_pi / rho.omega0;
    while (static_cast<double>(pad) * rho.window() < 32.0 * period) pad *= 2;
  }
  const std::size_t n = rho.samples.size() * pad;
  std::vector<complex> buf(n);
  for (std::size_t i = 0; i < rho.samples.size(); ++i) buf[i] = rho.samples[i];
  const auto raw = fft::backward(buf);

  DensitySpectrum out;
  out.source = DensitySpectrum::Source::sampled;
  out.omega0 = rho.omega0;
  out.omega.resize(n);
  out.values.resize(n);
  const double dw = constants::two_pi / (static_cast<double>(n) * rho.dt);
  const long first = -static_cast<long>(n / 2);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const long k = first + static_cast<long>(idx);
    const std::size_t bin = static_cast<std::size_t>(k < 0 ? k + static_cast<long>(n) : k);
    const double w = static_cast<double>(k) * dw;
    out.omega[idx] = w;
    out.values[idx] = rho.dt * std::polar(1.0, w * rho.t0) * raw[bin];
  }
  return out;
}

/// DOC(omega) = |F(omega)|^2.
inline double doc(const DensitySpectrum& spectrum, double omega) { return std::norm(spectrum.at(omega)); }

/// DOC(n omega0; d) on a (distance x harmonic) grid, row-major by distance.
struct DocMap {
  std::vector<double> distances;  ///< nm
  int n_min = 0;
  int n_max = 0;
  std::vector<double> values;

  std::size_t harmonics() const { return static_cast<std::size_t>(n_max - n_min + 1); }
  double at(std::size_t d_index, int n) const {
    return values[d_index * harmonics() + static_cast<std::size_t>(n - n_min)];
  }
};

inline DocMap doc_map(const LadderState& initial, std::span<const double> distances, int n_min, int n_max,
                      DispersionMode mode = DispersionMode::exact, unsigned threads = 1) {
  if (n_max < n_min) throw std::invalid_argument("empty harmonic range");
  DocMap map;
  map.distances.assign(distances.begin(), distances.end());
  map.n_min = n_min;
  map.n_max = n_max;
  map.values.assign(distances.size() * map.harmonics(), 0.0);
  const int limit = 2 * initial.cutoff();
  parallel_for(distances.size(), threads, [&](std::size_t i) {
    const auto state = propagate(initial, distances[i], mode);
    for (int n = n_min; n <= n_max; ++n) {
      const double v = std::abs(n) > limit ? 0.0 : std::norm(ladder_overlap(state, n));
      map.values[i * map.harmonics() + static_cast<std::size_t>(n - n_min)] = v;
    }
  });
  return map;
}

/// Largest harmonic n >= 1 with DOC(n omega0) >= threshold (0 if none).
inline int spectral_width(const LadderState& state, double threshold) {
  int width = 0;
  for (int n = 1; n <= 2 * state.cutoff(); ++n)
    if (std::norm(ladder_overlap(state, n)) >= threshold) width = n;
  return width;
}

/// sum_{n>=1} DOC(n omega0): total coherent power in the harmonics.
inline double harmonic_power(const LadderState& state) {
  double s = 0.0;
  for (int n = 1; n <= 2 * state.cutoff(); ++n) s += std::norm(ladder_overlap(state, n));
  return s;
}

struct WidthSearch {
  double d_min = 0.0;          ///< nm
  double d_max = 20.0e6;       ///< nm
  double coarse_step = 1.0e4;  ///< nm (10 um)
  double tolerance = 1.0e3;    ///< nm (1 um)
  double threshold = 0.01;
  DispersionMode mode = DispersionMode::exact;
};

struct BunchingOptimum {
  double distance = 0.0;  ///< nm
  int width = 0;
  double harmonic_power = 0.0;
  double plateau_lo = 0.0;  ///< coarse-grid extent of the maximal-width region containing the optimum
  double plateau_hi = 0.0;
};

/// Distance of the widest coherent harmonic comb. The primary key is
/// spectral_width(); it is piecewise constant, so ties inside the widest
/// plateau are broken by harmonic_power(), refined by golden section.
inline BunchingOptimum optimal_bunching_distance(const LadderState& initial, const WidthSearch& opts = {},
                                                 unsigned threads = 1) {
  if (!(opts.d_max > opts.d_min) || !(opts.coarse_step > 0.0))
    throw std::invalid_argument("invalid width-search range");
  const auto count = static_cast<std::size_t>(std::floor((opts.d_max - opts.d_min) / opts.coarse_step)) + 1;
  std::vector<int> width(count);
  std::vector<double> power(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto s = propagate(initial, opts.d_min + static_cast<double>(i) * opts.coarse_step, opts.mode);
    width[i] = spectral_width(s, opts.threshold);
    power[i] = harmonic_power(s);
  });
  const int wmax = *std::max_element(width.begin(), width.end());
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (width[i] == wmax && power[i] > best_power) {
      best = i;
      best_power = power[i];
    }
  }
  auto coarse = [&](std::size_t i) { return opts.d_min + static_cast<double>(i) * opts.coarse_step; };
  std::size_t lo_i = best, hi_i = best;
  while (lo_i > 0 && width[lo_i - 1] == wmax) --lo_i;
  while (hi_i + 1 < count && width[hi_i + 1] == wmax) ++hi_i;

  auto key = [&](double d) {
    const auto s = propagate(initial, d, opts.mode);
    return spectral_width(s, opts.threshold) == wmax ? harmonic_power(s) : -std::numeric_limits<double>::infinity();
  };
  double a = std::max(opts.d_min, coarse(best) - opts.coarse_step);
  double b = std::min(opts.d_max, coarse(best) + opts.coarse_step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = key(x1), f2 = key(x2);
  while (b - a > opts.tolerance) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = key(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = key(x1);
    }
  }
  BunchingOptimum out;
  out.distance = 0.5 * (a + b);
  if (key(out.distance) < best_power) out.distance = coarse(best);
  const auto s = propagate(initial, out.distance, opts.mode);
  out.width = spectral_width(s, opts.threshold);
  out.harmonic_power = harmonic_power(s);
  out.plateau_lo = coarse(lo_i);
  out.plateau_hi = coarse(hi_i);
  return out;
}

/// <a_w^dagger a_w> = |g_w|^2. Takes no electron state: the photon number
/// does not depend on it.
inline double mean_photon_number(const CouplingModel& g, double omega) {
  return std::norm(coupling_amplitude(g, omega));
}

/// <a_w> on a frequency grid.
struct CoherentField {
  std::vector<double> omega;
  std::vector<complex> a_mean;
  double omega0 = 0.0;
  bool discrete = false;  ///< harmonic comb from a ladder spectrum
};

/// <a_w> = g_w F(w). Photon modes exist only at w > 0; the field is zero elsewhere.
inline CoherentField mean_field(const CouplingModel& g, const DensitySpectrum& spectrum) {
  CoherentField out;
  out.omega = spectrum.omega;
  out.omega0 = spectrum.omega0;
  out.discrete = spectrum.source == DensitySpectrum::Source::ladder;
  out.a_mean.resize(spectrum.omega.size());
  for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
    const double w = spectrum.omega[i];
    out.a_mean[i] = w > 0.0 ? coupling_amplitude(g, w) * spectrum.values[i] : complex{};
  }
  return out;
}

namespace detail {
inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
inline void check_moment_order(int N) {
  if (N < 1 || N > 8) throw std::invalid_argument("moment order must be in [1, 8]");
}
inline complex spectrum_at_checked(const DensitySpectrum& s, double w) {
  if (!s.covers(w)) throw GridCoverageError("moment needs F at " + std::to_string(w) + " rad/fs, outside grid");
  return s.at(w);
}
}  // namespace detail

/// <(a_w - <a_w>)^N> as sum_k C(N,k) (-1)^(N-k) <a>^(N-k) <a^k>, with
/// <a^k> = g^k F(k w). N = 1 returns exactly zero.
inline complex central_moment(complex g, const DensitySpectrum& spectrum, double omega, int N) {
  detail::check_moment_order(N);
  if (N == 1) return {};
  const complex mean = g * detail::spectrum_at_checked(spectrum, omega);
  complex s{};
  complex gk = 1.0;
  for (int k = 0; k <= N; ++k) {
    const complex ak = k == 0 ? complex{1.0} : gk * detail::spectrum_at_checked(spectrum, k * omega);
    const double sign = ((N - k) % 2) ? -1.0 : 1.0;
    s += detail::binomial(N, k) * sign * std::pow(mean, N - k) * ak;
    gk *= g;
  }
  return s;
}

/// Same moment in the factored form g^N sum_k C(N,k) F(k w) (-F(w))^(N-k).
inline complex central_moment_factored(complex g, const DensitySpectrum& spectrum, double omega, int N) {
  detail::check_moment_order(N);
  const complex f1 = detail::spectrum_at_checked(spectrum, omega);
  complex s{};
  for (int k = 0; k <= N; ++k) {
    const complex fk = k == 0 ? complex{1.0} : detail::spectrum_at_checked(spectrum, k * omega);
    s += detail::binomial(N, k) * fk * std::pow(-f1, N - k);
  }
  return std::pow(g, N) * s;
}

inline complex central_moment(const CouplingModel& g, const DensitySpectrum& spectrum, double omega, int N) {
  return central_moment(coupling_amplitude(g, omega), spectrum, omega, N);
}

struct PairCorrelation {
  complex normal;     ///< <a_w^dagger a_w'>
  complex anomalous;  ///< <a_w a_w'>
};

inline PairCorrelation pair_correlation(complex g, complex g_prime, const DensitySpectrum& spectrum, double omega,
                                        double omega_prime) {
  return {std::conj(g) * g_prime * detail::spectrum_at_checked(spectrum, omega_prime - omega),
          g * g_prime * detail::spectrum_at_checked(spectrum, omega + omega_prime)};
}

inline PairCorrelation pair_correlation(const CouplingModel& g, const DensitySpectrum& spectrum, double omega,
                                        double omega_prime) {
  return pair_correlation(coupling_amplitude(g, omega), coupling_amplitude(g, omega_prime), spectrum, omega,
                          omega_prime);
}

/// Full width at half maximum of y(x) around its global maximum, with linear
/// interpolation of the half-level crossings. Returns 0 for an all-zero trace.
inline double fwhm(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fwhm needs matching traces");
  const auto peak_it = std::max_element(y.begin(), y.end());
  const double peak = *peak_it;
  if (!(peak > 0.0)) return 0.0;
  const double half = 0.5 * peak;
  const auto p = static_cast<std::size_t>(peak_it - y.begin());
  std::size_t l = p, r = p;
  while (l > 0 && y[l] >= half) --l;
  while (r + 1 < y.size() && y[r] >= half) ++r;
  if (y[l] >= half || y[r] >= half) throw std::runtime_error("fwhm: half-maximum not reached inside the window");
  const double xl = x[l] + (half - y[l]) * (x[l + 1] - x[l]) / (y[l + 1] - y[l]);
  const double xr = x[r - 1] + (half - y[r - 1]) * (x[r] - x[r - 1]) / (y[r] - y[r - 1]);
  return xr - xl;
}

struct TimeDomainField {
  std::vector<double> time;    ///< fs
  std::vector<complex> field;  ///< E(t), in units of <a> (rad/fs)
  std::vector<double> envelope;
  double fwhm_amplitude = 0.0;  ///< FWHM of |E(t)|
  double fwhm_intensity = 0.0;  ///< FWHM of |E(t)|^2
};

/// E(t) = (1/2 pi) int <a_w> exp(-i w t) dw over `band` (all of the grid when
/// omitted), by FFT on the field's uniform grid.
inline TimeDomainField time_domain_field(const CoherentField& field, std::optional<FrequencyBand> band = std::nullopt) {
  if (field.discrete) throw std::invalid_argument("time-domain field needs a continuous (sampled) spectrum");
  const std::size_t n = field.omega.size();
  if (n < 4) throw std::invalid_argument("time-domain field needs a sampled spectrum");
  const double dw = (field.omega.back() - field.omega.front()) / static_cast<double>(n - 1);
  std::vector<complex> buf(field.a_mean);
  if (band) {
    for (std::size_t i = 0; i < n; ++i)
      if (field.omega[i] < band->lo || field.omega[i] > band->hi) buf[i] = {};
  }
  const auto raw = fft::forward(buf);
  TimeDomainField out;
  out.time.resize(n);
  out.field.resize(n);
  out.envelope.resize(n);
  const double dt = constants::two_pi / (static_cast<double>(n) * dw);
  const long first = -static_cast<long>(n / 2);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const long m = first + static_cast<long>(idx);
    const std::size_t bin = static_cast<std::size_t>(m < 0 ? m + static_cast<long>(n) : m);
    const double t = static_cast<double>(m) * dt;
    out.time[idx] = t;
    out.field[idx] = dw / constants::two_pi * std::polar(1.0, -field.omega.front() * t) * raw[bin];
    out.envelope[idx] = std::abs(out.field[idx]);
  }
  std::vector<double> intensity(n);
  for (std::size_t i = 0; i < n; ++i) intensity[i] = out.envelope[i] * out.envelope[i];
  out.fwhm_amplitude = fwhm(out.time, out.envelope);
  out.fwhm_intensity = fwhm(out.time, intensity);
  return out;
}

/// FWHM of |<a_w>| around its maximum within `band`.
inline double spectral_fwhm(const CoherentField& field, FrequencyBand band) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < field.omega.size(); ++i) {
    if (field.omega[i] < band.lo || field.omega[i] > band.hi) continue;
    x.push_back(field.omega[i]);
    y.push_back(std::abs(field.a_mean[i]));
  }
  return fwhm(x, y);
}

}  // namespace clc
