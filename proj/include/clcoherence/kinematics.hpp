#pragma once
//
// Relativistic beam kinematics in the library's unit system:
// energies in eV, times in fs, lengths in nm.
//

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clc {

namespace constants {
inline constexpr double hbar = 0.6582119569;          // eV fs
inline constexpr double speed_of_light = 299.792458;  // nm/fs
inline constexpr double hbar_c = 197.3269804;         // eV nm
inline constexpr double electron_rest_energy = 510998.95;  // eV
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Photon energy [eV] of light with vacuum wavelength `wavelength_nm`.
inline double photon_energy_from_wavelength(double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw std::invalid_argument("wavelength must be positive");
  return constants::two_pi * constants::hbar_c / wavelength_nm;
}

inline double lorentz_factor(double kinetic_energy, double rest_energy = constants::electron_rest_energy) {
  return 1.0 + kinetic_energy / rest_energy;
}

/// Electron beam plus the modulating laser. Validated on construction;
/// derived quantities are computed once and cached.
class BeamParameters {
 public:
  /// Photon energy / total energy above which the beam is flagged as leaving
  /// the nonrecoil regime, and above which construction fails outright.
  static constexpr double nonrecoil_warning_ratio = 1e-3;
  static constexpr double nonrecoil_error_ratio = 1e-2;

  BeamParameters(double kinetic_energy, double photon_energy,
                 double rest_energy = constants::electron_rest_energy)
      : kinetic_energy_(kinetic_energy), rest_energy_(rest_energy), photon_energy_(photon_energy) {
    if (!(kinetic_energy > 0.0)) throw std::invalid_argument("kinetic energy must be positive");
    if (!(photon_energy > 0.0)) throw std::invalid_argument("photon energy must be positive");
    if (!(rest_energy > 0.0)) throw std::invalid_argument("rest energy must be positive");
    if (recoil_ratio() >= nonrecoil_error_ratio)
      throw std::invalid_argument("photon energy violates the nonrecoil regime (ratio >= 0.01)");
    gamma_ = lorentz_factor(kinetic_energy_, rest_energy_);
    beta_v_ = std::sqrt(1.0 - 1.0 / (gamma_ * gamma_));
  }

  static BeamParameters from_wavelength(double kinetic_energy, double wavelength_nm,
                                        double rest_energy = constants::electron_rest_energy) {
    return {kinetic_energy, photon_energy_from_wavelength(wavelength_nm), rest_energy};
  }

  double kinetic_energy() const { return kinetic_energy_; }
  double rest_energy() const { return rest_energy_; }
  double photon_energy() const { return photon_energy_; }
  double total_energy() const { return rest_energy_ + kinetic_energy_; }

  double gamma() const { return gamma_; }
  double beta_v() const { return beta_v_; }
  /// Group velocity [nm/fs].
  double velocity() const { return beta_v_ * constants::speed_of_light; }
  /// Laser angular frequency [rad/fs].
  double omega0() const { return photon_energy_ / constants::hbar; }
  /// Laser period [fs].
  double period() const { return constants::two_pi / omega0(); }
  double wavelength() const { return constants::two_pi * constants::hbar_c / photon_energy_; }

  double recoil_ratio() const { return photon_energy_ / total_energy(); }
  bool nonrecoil_warning() const { return recoil_ratio() > nonrecoil_warning_ratio; }

  /// Revival length of the quadratic dispersion phases, 4 pi m v^3 gamma^3 / (hbar omega0^2) [nm].
  double talbot_distance() const {
    const double v = velocity();
    const double mass = rest_energy_ / (constants::speed_of_light * constants::speed_of_light);
    const double w0 = omega0();
    return 2.0 * constants::two_pi * mass * v * v * v * gamma_ * gamma_ * gamma_ /
           (constants::hbar * w0 * w0);
  }

 private:
  double kinetic_energy_;
  double rest_energy_;
  double photon_energy_;
  double gamma_ = 1.0;
  double beta_v_ = 0.0;
};

inline double lorentz_factor(const BeamParameters& p) { return p.gamma(); }
inline double talbot_distance(const BeamParameters& p) { return p.talbot_distance(); }

namespace detail {
inline double level_energy(const BeamParameters& p, int level) {
  const double e = p.total_energy() + level * p.photon_energy();
  if (!(e > p.rest_energy()))
    throw std::domain_error("ladder level has total energy at or below the rest energy");
  return e;
}
inline double level_momentum_energy(const BeamParameters& p, int level) {
  const double e = level_energy(p, level);
  const double r = p.rest_energy();
  return std::sqrt((e - r) * (e + r));
}
}  // namespace detail

/// Exact relativistic wavenumber k_j = sqrt(E_j^2 - E_rest^2) / (hbar c) [rad/nm]
/// of ladder level j (E_j = E_rest + T + j hbar omega0).
inline double wavenumber(const BeamParameters& p, int level) {
  return detail::level_momentum_energy(p, level) / constants::hbar_c;
}

/// k_j - k_0 [rad/nm], evaluated without cancellation:
/// (p_j^2 - p_0^2) = (E_j - E_0)(E_j + E_0).
inline double wavenumber_offset(const BeamParameters& p, int level) {
  if (level == 0) return 0.0;
  const double ej = detail::level_energy(p, level);
  const double e0 = p.total_energy();
  const double pj = detail::level_momentum_energy(p, level);
  const double p0 = detail::level_momentum_energy(p, 0);
  return level * p.photon_energy() * (ej + e0) / (constants::hbar_c * (pj + p0));
}

}  // namespace clc
