#pragma once
//
// PINEM-modulated electron states on the discrete energy ladder
// E_j = E_0 + j hbar omega0, their free-space propagation, and the temporal
// probability density they produce.
//

#include <clcoherence/errors.hpp>
#include <clcoherence/kinematics.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clc {

using complex = std::complex<double>;

/// J_n(x) for any integer order, using J_{-n} = (-1)^n J_n.
inline double bessel_j(int order, double x) {
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  const double v = std::cyl_bessel_j(static_cast<double>(std::abs(order)), std::abs(x));
  // J_n(-x) = (-1)^n J_n(x)
  const bool odd = (std::abs(order) % 2) == 1;
  const bool flip = odd && ((order < 0) != (x < 0.0));
  return flip ? -v : v;
}

/// Ladder half-width that keeps the Bessel normalization deficit below 1e-12.
inline int auto_cutoff(double beta_abs) {
  const double x = 2.0 * beta_abs;
  return static_cast<int>(std::ceil(x)) +
         std::max(20, static_cast<int>(std::ceil(4.0 * std::sqrt(x))));
}

/// Complex amplitudes c_j for j in [-J, J]; amplitudes outside are zero.
class LadderState {
 public:
  LadderState(BeamParameters beam, int cutoff, std::vector<complex> coefficients,
              double propagated_distance = 0.0)
      : beam_(beam), cutoff_(cutoff), coefficients_(std::move(coefficients)),
        propagated_distance_(propagated_distance) {
    if (cutoff < 0) throw std::invalid_argument("ladder cutoff must be nonnegative");
    if (coefficients_.size() != static_cast<std::size_t>(2 * cutoff + 1))
      throw std::invalid_argument("ladder needs 2J+1 coefficients");
  }

  const BeamParameters& beam() const { return beam_; }
  int cutoff() const { return cutoff_; }
  double propagated_distance() const { return propagated_distance_; }
  std::span<const complex> coefficients() const { return coefficients_; }

  complex operator[](int j) const {
    return (j < -cutoff_ || j > cutoff_) ? complex{} : coefficients_[static_cast<std::size_t>(j + cutoff_)];
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : coefficients_) s += std::norm(c);
    return s;
  }

  /// max(|c_{-J}|^2, |c_J|^2)
  double boundary_mass() const {
    return std::max(std::norm(coefficients_.front()), std::norm(coefficients_.back()));
  }

 private:
  BeamParameters beam_;
  int cutoff_;
  std::vector<complex> coefficients_;
  double propagated_distance_;
};

/// c_j = J_j(2|beta|) exp(i j arg(-beta)). Throws TruncationError when the
/// requested cutoff is below auto_cutoff(|beta|).
inline LadderState pinem_ladder(const BeamParameters& beam, complex beta,
                                std::optional<int> cutoff = std::nullopt) {
  const double beta_abs = std::abs(beta);
  const int needed = auto_cutoff(beta_abs);
  const int J = cutoff.value_or(needed);
  const double x = 2.0 * beta_abs;
  const double phase = std::arg(-beta);
  std::vector<complex> c(static_cast<std::size_t>(2 * J + 1));
  double mass = 0.0;
  for (int j = -J; j <= J; ++j) {
    const double amp = bessel_j(j, x);
    c[static_cast<std::size_t>(j + J)] = std::polar(amp, j * phase);
    mass += amp * amp;
  }
  if (J < needed) {
    throw TruncationError("PINEM ladder cutoff " + std::to_string(J) + " below required " +
                              std::to_string(needed) + " (normalization deficit " +
                              std::to_string(1.0 - mass) + ")",
                          1.0 - mass);
  }
  return {beam, J, std::move(c)};
}

enum class DispersionMode { exact, quadratic };

/// Free propagation over `distance` [nm]. Exact mode applies exp(i (k_j - k_0) d)
/// (the global k_0 d phase is dropped); quadratic mode applies
/// exp(-2 pi i j^2 d / z_T) with the linear-in-j term dropped as well.
inline LadderState propagate(const LadderState& state, double distance,
                             DispersionMode mode = DispersionMode::exact) {
  if (distance < 0.0) throw std::invalid_argument("propagation distance must be nonnegative");
  const int J = state.cutoff();
  const auto& beam = state.beam();
  std::vector<complex> c(state.coefficients().begin(), state.coefficients().end());
  if (distance > 0.0) {
    const double ratio = distance / beam.talbot_distance();
    for (int j = -J; j <= J; ++j) {
      double phase;
      if (mode == DispersionMode::exact) {
        phase = wavenumber_offset(beam, j) * distance;
      } else {
        // reduce j^2 d/z_T modulo 1 before scaling so integer revivals are exact
        const double turns = std::fmod(static_cast<double>(j) * j * ratio, 1.0);
        phase = -constants::two_pi * turns;
      }
      c[static_cast<std::size_t>(j + J)] *= std::polar(1.0, phase);
    }
  }
  return {beam, J, std::move(c), state.propagated_distance() + distance};
}

struct EnvelopeSpec {
  enum class Kind { infinite, gaussian };
  Kind kind = Kind::infinite;
  double fwhm = 0.0;  ///< FWHM of the density envelope |f(t)|^2 [fs]

  static EnvelopeSpec infinite() { return {}; }
  static EnvelopeSpec gaussian(double fwhm) {
    if (!(fwhm > 0.0)) throw std::invalid_argument("gaussian envelope needs fwhm > 0");
    return {Kind::gaussian, fwhm};
  }
  bool is_infinite() const { return kind == Kind::infinite; }
};

/// Sampled rho(t_i) on t_i = t0 + i dt, normalized so that sum rho dt = 1.
struct WavepacketDensity {
  std::vector<double> samples;
  double dt = 0.0;
  double t0 = 0.0;
  EnvelopeSpec envelope;
  double omega0 = 0.0;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double window() const { return static_cast<double>(samples.size()) * dt; }
  double integral() const {
    double s = 0.0;
    for (double r : samples) s += r;
    return s * dt;
  }
};

inline double default_time_step(const BeamParameters& beam) { return beam.period() / 256.0; }

inline double default_window(const BeamParameters& beam, const EnvelopeSpec& env) {
  return env.is_infinite() ? 64.0 * beam.period() : 16.0 * env.fwhm;
}

/// psi(t) = f_env(t) sum_j c_j exp(-i j omega0 t), rho = |psi|^2 normalized.
/// Infinite envelopes need a window that is an integer number (>= 64) of laser
/// periods and an integer number of samples per period.
inline WavepacketDensity synthesize_density(const LadderState& state, const EnvelopeSpec& env,
                                            double dt, double window) {
  const auto& beam = state.beam();
  const double period = beam.period();
  const double w0 = beam.omega0();
  const int J = state.cutoff();
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (dt > period / 64.0 * (1.0 + 1e-12))
    throw AliasingError("time step exceeds T0/64");
  // rho carries harmonics up to 2J; keep them below Nyquist
  if (2.0 * J * w0 * dt >= std::numbers::pi)
    throw AliasingError("time step undersamples the highest retained harmonic (2J omega0)");

  std::size_t n = 0;
  if (env.is_infinite()) {
    const double periods = window / period;
    const double spp = period / dt;
    if (std::abs(periods - std::round(periods)) > 1e-9 * periods || std::round(periods) < 64.0)
      throw std::invalid_argument("infinite-envelope window must be an integer number (>= 64) of periods");
    if (std::abs(spp - std::round(spp)) > 1e-6)
      throw std::invalid_argument("infinite-envelope time step must divide the laser period");
    n = static_cast<std::size_t>(std::llround(periods) * std::llround(spp));
  } else {
    if (window < 8.0 * env.fwhm * (1.0 - 1e-12))
      throw std::invalid_argument("gaussian window must cover at least 8 FWHM");
    n = static_cast<std::size_t>(std::llround(window / dt));
  }

  WavepacketDensity rho;
  rho.dt = dt;
  rho.t0 = -0.5 * static_cast<double>(n) * dt;
  rho.envelope = env;
  rho.omega0 = w0;
  rho.samples.resize(n);

  const auto coeffs = state.coefficients();
  const double env_rate = env.is_infinite() ? 0.0 : 4.0 * std::numbers::ln2 / (env.fwhm * env.fwhm);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rho.time(i);
    // sum_{m=0}^{2J} c_{m-J} z^m with z = exp(-i omega0 t), then times z^{-J}
    const complex z = std::polar(1.0, -w0 * t);
    complex acc{};
    for (std::size_t m = coeffs.size(); m-- > 0;) acc = acc * z + coeffs[m];
    acc *= std::polar(1.0, J * w0 * t);
    double r = std::norm(acc);
    if (!env.is_infinite()) r *= std::exp(-env_rate * t * t);
    rho.samples[i] = r;
    total += r;
  }
  total *= dt;
  if (!(total > 0.0)) throw std::invalid_argument("density vanishes on the sampling window");
  for (double& r : rho.samples) r /= total;
  return rho;
}

inline WavepacketDensity synthesize_density(const LadderState& state, const EnvelopeSpec& env) {
  return synthesize_density(state, env, default_time_step(state.beam()), default_window(state.beam(), env));
}

}  // namespace clc
