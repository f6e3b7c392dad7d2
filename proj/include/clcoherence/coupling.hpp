#pragma once
//
// Spectral electron-photon coupling amplitudes g(omega). |g|^2 is the photon
// emission (EELS) spectral density per rad/fs.
//

#include <clcoherence/errors.hpp>
#include <clcoherence/kinematics.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace clc {

struct FlatCoupling {
  std::complex<double> g0;
};

/// g0 exp(-(omega - center)^2 / (2 width^2))
struct GaussianBandCoupling {
  double g0 = 0.0;
  double center = 0.0;
  double width = 1.0;
};

/// Natural cubic spline (or piecewise linear) through complex samples; zero
/// outside the table.
class TabulatedCoupling {
 public:
  enum class Interpolation { linear, cubic };

  TabulatedCoupling(std::vector<double> omega, std::vector<std::complex<double>> g,
                    Interpolation rule = Interpolation::cubic)
      : omega_(std::move(omega)), g_(std::move(g)), rule_(rule) {
    if (omega_.size() != g_.size()) throw std::invalid_argument("coupling table size mismatch");
    if (omega_.size() < 2) throw std::invalid_argument("coupling table needs at least two rows");
    if (!std::is_sorted(omega_.begin(), omega_.end()) ||
        std::adjacent_find(omega_.begin(), omega_.end()) != omega_.end())
      throw std::invalid_argument("coupling table frequencies must be strictly increasing");
    if (rule_ == Interpolation::cubic) second_ = spline_second_derivatives();
  }

  const std::vector<double>& omega() const { return omega_; }
  const std::vector<std::complex<double>>& values() const { return g_; }
  Interpolation rule() const { return rule_; }

  std::complex<double> operator()(double w) const {
    if (w < omega_.front() || w > omega_.back()) return {};
    auto it = std::upper_bound(omega_.begin(), omega_.end(), w);
    std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - omega_.begin()), omega_.size() - 1);
    std::size_t lo = hi - 1;
    const double h = omega_[hi] - omega_[lo];
    const double a = (omega_[hi] - w) / h;
    const double b = 1.0 - a;
    std::complex<double> v = a * g_[lo] + b * g_[hi];
    if (rule_ == Interpolation::cubic)
      v += ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * (h * h / 6.0);
    return v;
  }

 private:
  std::vector<std::complex<double>> spline_second_derivatives() const {
    const std::size_t n = omega_.size();
    std::vector<std::complex<double>> m(n), u(n);
    std::vector<double> diag(n, 0.0);
    // tridiagonal solve with natural boundary conditions m[0] = m[n-1] = 0
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double sig = (omega_[i] - omega_[i - 1]) / (omega_[i + 1] - omega_[i - 1]);
      const double p = sig * diag[i - 1] + 2.0;
      diag[i] = (sig - 1.0) / p;
      const auto slope = (g_[i + 1] - g_[i]) / (omega_[i + 1] - omega_[i]) -
                         (g_[i] - g_[i - 1]) / (omega_[i] - omega_[i - 1]);
      u[i] = (6.0 * slope / (omega_[i + 1] - omega_[i - 1]) - sig * u[i - 1]) / p;
    }
    for (std::size_t k = n - 1; k-- > 1;) m[k] = diag[k] * m[k + 1] + u[k];
    return m;
  }

  std::vector<double> omega_;
  std::vector<std::complex<double>> g_;
  Interpolation rule_;
  std::vector<std::complex<double>> second_;
};

/// Phase-matched guided mode. The mode propagation constant is expanded about
/// the matching frequency, where its phase velocity equals the electron velocity:
///   beta_mode(w) = w_m/v_e + (w - w_m)/v_g + (gvd/2)(w - w_m)^2.
struct WaveguideCoupling {
  double g0 = 0.0;
  double matching_omega = 0.0;     ///< rad/fs
  double electron_velocity = 0.0;  ///< nm/fs
  double group_velocity = 0.0;     ///< nm/fs
  double gvd = 0.0;                ///< fs^2/nm
  double length = 0.0;             ///< interaction length [nm]

  /// Phase mismatch omega/v_e - beta_mode(omega) [rad/nm].
  double mismatch(double w) const {
    const double dw = w - matching_omega;
    return dw / electron_velocity - dw / group_velocity - 0.5 * gvd * dw * dw;
  }
};

using CouplingModel = std::variant<FlatCoupling, GaussianBandCoupling, TabulatedCoupling, WaveguideCoupling>;

namespace detail {
inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace detail

/// Real, sign-carrying part of the waveguide amplitude: g0 sinc(dk L / 2).
inline double waveguide_signed_amplitude(const WaveguideCoupling& m, double w) {
  return m.g0 * detail::sinc(0.5 * m.mismatch(w) * m.length);
}

/// g(omega) for omega > 0.
inline std::complex<double> coupling_amplitude(const CouplingModel& model, double omega) {
  if (!(omega > 0.0)) throw std::domain_error("coupling amplitude requires omega > 0");
  return std::visit(
      detail::overloaded{
          [](const FlatCoupling& m) { return m.g0; },
          [omega](const GaussianBandCoupling& m) {
            const double x = (omega - m.center) / m.width;
            return std::complex<double>(m.g0 * std::exp(-0.5 * x * x), 0.0);
          },
          [omega](const TabulatedCoupling& m) { return m(omega); },
          [omega](const WaveguideCoupling& m) {
            // (1/L) int_0^L exp(i dk z) dz = exp(i dk L/2) sinc(dk L/2)
            const double half = 0.5 * m.mismatch(omega) * m.length;
            return std::polar(1.0, half) * (m.g0 * detail::sinc(half));
          },
      },
      model);
}

struct FrequencyBand {
  double lo = 0.0;
  double hi = 0.0;
};

/// Frequency interval outside which the model's |g|^2 is negligible or undefined.
inline std::optional<FrequencyBand> natural_band(const CouplingModel& model) {
  return std::visit(
      detail::overloaded{
          [](const FlatCoupling&) -> std::optional<FrequencyBand> { return std::nullopt; },
          [](const GaussianBandCoupling& m) -> std::optional<FrequencyBand> {
            return FrequencyBand{std::max(m.center - 12.0 * m.width, 1e-12), m.center + 12.0 * m.width};
          },
          [](const TabulatedCoupling& m) -> std::optional<FrequencyBand> {
            return FrequencyBand{std::max(m.omega().front(), 1e-12), m.omega().back()};
          },
          [](const WaveguideCoupling& m) -> std::optional<FrequencyBand> {
            return FrequencyBand{1e-12, 2.0 * m.matching_omega};
          },
      },
      model);
}

/// int |g|^2 d omega over `band` (defaults to the model's natural band), by
/// composite Simpson with a step resolving the model's finest feature.
inline double eels_probability(const CouplingModel& model, std::optional<FrequencyBand> band = std::nullopt) {
  if (const auto* flat = std::get_if<FlatCoupling>(&model); flat && !band) {
    if (flat->g0 == std::complex<double>{}) return 0.0;
    throw std::invalid_argument("flat coupling has infinite total probability without a band");
  }
  const FrequencyBand b = band ? *band : *natural_band(model);
  if (!(b.hi > b.lo)) return 0.0;
  double feature = b.hi - b.lo;
  if (const auto* g = std::get_if<GaussianBandCoupling>(&model)) feature = std::min(feature, g->width);
  if (const auto* w = std::get_if<WaveguideCoupling>(&model)) {
    const double slope = std::abs(1.0 / w->electron_velocity - 1.0 / w->group_velocity);
    if (slope > 0.0) feature = std::min(feature, constants::two_pi / (slope * w->length));
  }
  if (const auto* t = std::get_if<TabulatedCoupling>(&model)) {
    for (std::size_t i = 1; i < t->omega().size(); ++i)
      feature = std::min(feature, t->omega()[i] - t->omega()[i - 1]);
  }
  std::size_t n = static_cast<std::size_t>(std::ceil(64.0 * (b.hi - b.lo) / feature));
  n = std::clamp<std::size_t>(n + (n % 2), 2, 50'000'000);
  const double h = (b.hi - b.lo) / static_cast<double>(n);
  double s = std::norm(coupling_amplitude(model, b.lo)) + std::norm(coupling_amplitude(model, b.hi));
  for (std::size_t i = 1; i < n; ++i)
    s += (i % 2 ? 4.0 : 2.0) * std::norm(coupling_amplitude(model, b.lo + static_cast<double>(i) * h));
  return s * h / 3.0;
}

/// Number of sign changes of the waveguide's real amplitude on [lo, hi].
inline int count_sign_changes(const WaveguideCoupling& m, double lo, double hi, std::size_t samples = 20001) {
  int changes = 0;
  double prev = waveguide_signed_amplitude(m, lo);
  for (std::size_t i = 1; i < samples; ++i) {
    const double w = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double v = waveguide_signed_amplitude(m, w);
    if (v == 0.0) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
    prev = v;
  }
  return changes;
}

/// Reads "omega_rad_per_fs,g_real,g_imag" rows (header line required).
inline TabulatedCoupling load_coupling_csv(const std::string& path,
                                           TabulatedCoupling::Interpolation rule = TabulatedCoupling::Interpolation::cubic) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coupling table '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.find("omega") == std::string::npos)
    throw ConfigError(path + ":1: expected header omega_rad_per_fs,g_real,g_imag");
  std::vector<double> omega;
  std::vector<std::complex<double>> g;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double w, re, im;
    if (!(row >> w >> re >> im)) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected three numbers");
    omega.push_back(w);
    g.emplace_back(re, im);
  }
  try {
    return {std::move(omega), std::move(g), rule};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace clc
