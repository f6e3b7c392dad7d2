#pragma once
//
// Balanced heterodyne detection of the coherent CL field against a strong
// reference pulse: mean detector counts, the difference signal, a Poisson
// shot-count simulator and the analytic noise breakdown.
//
// All amplitudes are photon-amplitude spectral densities on one uniform
// frequency grid: |alpha(w)|^2 and |<a_w>|^2 are counts per rad/fs.
//

#include <clcoherence/errors.hpp>
#include <clcoherence/parallel.hpp>
#include <clcoherence/spectra.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clc {

class BeamSplitter {
 public:
  BeamSplitter(complex reflection, complex transmission) : r_(reflection), t_(transmission) {
    if (std::abs(std::norm(r_) + std::norm(t_) - 1.0) > 1e-12)
      throw std::invalid_argument("beam splitter must satisfy |R|^2 + |T|^2 = 1");
  }

  /// R = 1/sqrt2, T = i/sqrt2: the quadrature-sensitive 50/50 splitter.
  static BeamSplitter heterodyne() { return {std::numbers::sqrt2 / 2.0, complex(0.0, std::numbers::sqrt2 / 2.0)}; }

  complex reflection() const { return r_; }
  complex transmission() const { return t_; }
  /// R* T - R T*
  complex quadrature_factor() const { return std::conj(r_) * t_ - r_ * std::conj(t_); }

 private:
  complex r_, t_;
};

struct ReferencePulse {
  std::vector<double> omega;
  std::vector<complex> alpha;

  /// alpha(w) = sqrt(counts) * normalized Gaussian amplitude with |alpha|^2
  /// of spectral FWHM `fwhm`, centred at `center`, carrying `phase`.
  static ReferencePulse gaussian(std::span<const double> grid, double center, double fwhm, double total_counts,
                                 double phase = 0.0) {
    if (!(fwhm > 0.0) || total_counts < 0.0) throw std::invalid_argument("invalid reference pulse");
    ReferencePulse ref;
    ref.omega.assign(grid.begin(), grid.end());
    ref.alpha.resize(grid.size());
    const double rate = 2.0 * std::numbers::ln2 / (fwhm * fwhm);  // |alpha|^2 ~ exp(-4 ln2 x^2/fwhm^2)
    const double peak = std::sqrt(total_counts * std::sqrt(4.0 * std::numbers::ln2 / std::numbers::pi) / fwhm);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i] - center;
      ref.alpha[i] = std::polar(peak * std::exp(-rate * x * x), phase);
    }
    return ref;
  }

  double step() const {
    return omega.size() > 1 ? (omega.back() - omega.front()) / static_cast<double>(omega.size() - 1) : 0.0;
  }

  double total_counts() const {
    double s = 0.0;
    for (const auto& a : alpha) s += std::norm(a);
    return s * step();
  }

  ReferencePulse rotated(double phase) const {
    ReferencePulse out = *this;
    for (auto& a : out.alpha) a *= std::polar(1.0, phase);
    return out;
  }

  ReferencePulse scaled_power(double factor) const {
    ReferencePulse out = *this;
    const double s = std::sqrt(factor);
    for (auto& a : out.alpha) a *= s;
    return out;
  }
};

struct DetectorMeans {
  double mu1 = 0.0;
  double mu2 = 0.0;
};

namespace detail {
inline void check_shared_grid(const ReferencePulse& ref, const CoherentField& cl) {
  if (ref.omega.size() != cl.omega.size() || ref.omega.size() < 2)
    throw std::invalid_argument("reference and CL field must share one frequency grid");
  const double h = ref.step();
  if (std::abs(ref.omega.front() - cl.omega.front()) > 1e-9 * std::abs(h) ||
      std::abs(ref.omega.back() - cl.omega.back()) > 1e-9 * std::abs(h))
    throw std::invalid_argument("reference and CL field grids differ");
}
}  // namespace detail

inline DetectorMeans detector_means(const BeamSplitter& bs, const ReferencePulse& ref, const CoherentField& cl,
                                    double qe1 = 1.0, double qe2 = 1.0) {
  if (qe1 < 0.0 || qe1 > 1.0 || qe2 < 0.0 || qe2 > 1.0) throw std::invalid_argument("quantum efficiency outside [0,1]");
  detail::check_shared_grid(ref, cl);
  const complex R = bs.reflection(), T = bs.transmission();
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < ref.omega.size(); ++i) {
    s1 += std::norm(T * cl.a_mean[i] + R * ref.alpha[i]);
    s2 += std::norm(R * cl.a_mean[i] + T * ref.alpha[i]);
  }
  const double h = ref.step();
  return {qe1 * s1 * h, qe2 * s2 * h};
}

/// mu1 - mu2 at unit quantum efficiency.
inline double balanced_signal(const BeamSplitter& bs, const ReferencePulse& ref, const CoherentField& cl) {
  const auto m = detector_means(bs, ref, cl);
  return m.mu1 - m.mu2;
}

/// Reference phase maximizing the balanced signal, from S(phi) = C + P cos phi + Q sin phi.
inline double aligned_reference_phase(const BeamSplitter& bs, const ReferencePulse& ref, const CoherentField& field) {
  const double s0 = balanced_signal(bs, ref, field);
  const double s90 = balanced_signal(bs, ref.rotated(std::numbers::pi / 2), field);
  const double s180 = balanced_signal(bs, ref.rotated(std::numbers::pi), field);
  const double base = 0.5 * (s0 + s180);
  return std::atan2(s90 - base, 0.5 * (s0 - s180));
}

/// int conj(alpha) <a> dw: the overlap the heterodyne signal projects onto.
inline complex reference_overlap(const ReferencePulse& ref, const CoherentField& cl) {
  detail::check_shared_grid(ref, cl);
  complex s{};
  for (std::size_t i = 0; i < ref.omega.size(); ++i) s += std::conj(ref.alpha[i]) * cl.a_mean[i];
  return s * ref.step();
}

struct Shot {
  std::uint64_t i1 = 0;
  std::uint64_t i2 = 0;
};

struct ShotEnsemble {
  std::vector<Shot> shots;
  std::uint64_t seed = 0;
  DetectorMeans means;
  double qe1 = 1.0;
  double qe2 = 1.0;
  double reference_counts = 0.0;
};

/// 64-bit SplitMix generator; a UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Independent stream per (seed, shot, detector).
inline SplitMix64 shot_stream(std::uint64_t seed, std::uint64_t shot, std::uint64_t detector) {
  SplitMix64 mix(seed);
  std::uint64_t key = mix() ^ (shot * 0xd1342543de82ef95ULL);
  SplitMix64 second(key);
  key = second() ^ (detector * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  return SplitMix64(key);
}

inline constexpr double max_poisson_mean = 1e12;

/// Poisson counts per shot and detector around detector_means(); quantum
/// efficiency thins the mean. Deterministic in `seed` regardless of `threads`.
inline ShotEnsemble sample_shots(const BeamSplitter& bs, const ReferencePulse& ref, const CoherentField& cl,
                                 double qe1, double qe2, std::size_t n_shots, std::uint64_t seed,
                                 unsigned threads = 1) {
  if (n_shots < 1) throw std::invalid_argument("need at least one shot");
  const auto means = detector_means(bs, ref, cl, qe1, qe2);
  if (means.mu1 > max_poisson_mean || means.mu2 > max_poisson_mean)
    throw PhysicsGuardError("detector mean exceeds 1e12 counts");
  ShotEnsemble ens;
  ens.seed = seed;
  ens.means = means;
  ens.qe1 = qe1;
  ens.qe2 = qe2;
  ens.reference_counts = ref.total_counts();
  ens.shots.resize(n_shots);
  parallel_for(n_shots, threads, [&](std::size_t k) {
    auto draw = [&](double mu, std::uint64_t det) -> std::uint64_t {
      if (mu <= 0.0) return 0;
      auto rng = shot_stream(seed, k, det);
      std::poisson_distribution<long long> dist(mu);
      return static_cast<std::uint64_t>(dist(rng));
    };
    ens.shots[k] = {draw(means.mu1, 1), draw(means.mu2, 2)};
  });
  return ens;
}

/// Statistics of the per-shot difference I1 - I2. snr = mean / standard
/// error grows as sqrt(K); snr_per_shot = mean / stddev does not.
struct SnrEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  double standard_error = 0.0;
  double snr = 0.0;
  double snr_per_shot = 0.0;
  std::size_t shots = 0;
};

inline SnrEstimate snr_estimate(const ShotEnsemble& ens) {
  const std::size_t n = ens.shots.size();
  if (n < 2) throw std::invalid_argument("snr estimate needs at least two shots");
  double mean = 0.0;
  for (const auto& s : ens.shots) mean += static_cast<double>(s.i1) - static_cast<double>(s.i2);
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& s : ens.shots) {
    const double d = static_cast<double>(s.i1) - static_cast<double>(s.i2) - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  if (!(var > 0.0)) throw std::domain_error("degenerate ensemble: zero variance of I1 - I2");
  SnrEstimate out;
  out.shots = n;
  out.mean = mean;
  out.stddev = std::sqrt(var);
  out.standard_error = out.stddev / std::sqrt(static_cast<double>(n));
  out.snr = mean / out.standard_error;
  out.snr_per_shot = mean / out.stddev;
  return out;
}

struct DetectorStats {
  double mean = 0.0;
  double variance = 0.0;
  double fano() const { return mean > 0.0 ? variance / mean : 0.0; }
};

/// Sample mean and variance of one detector (1 or 2).
inline DetectorStats detector_stats(const ShotEnsemble& ens, int detector) {
  if (detector != 1 && detector != 2) throw std::invalid_argument("detector must be 1 or 2");
  if (ens.shots.size() < 2) throw std::invalid_argument("detector statistics need at least two shots");
  const auto pick = [detector](const Shot& s) { return static_cast<double>(detector == 1 ? s.i1 : s.i2); };
  double mean = 0.0;
  for (const auto& s : ens.shots) mean += pick(s);
  mean /= static_cast<double>(ens.shots.size());
  double var = 0.0;
  for (const auto& s : ens.shots) var += (pick(s) - mean) * (pick(s) - mean);
  return {mean, var / static_cast<double>(ens.shots.size() - 1)};
}

/// Systematic I1 - I2 offset caused by the reference alone under unequal
/// detector efficiencies, and whether the ensemble resolves it.
struct ImbalanceCheck {
  double expected_offset = 0.0;
  bool significant = false;
};

inline ImbalanceCheck check_imbalance(const BeamSplitter& bs, const ShotEnsemble& ens, const SnrEstimate& est) {
  const double offset =
      (ens.qe1 * std::norm(bs.reflection()) - ens.qe2 * std::norm(bs.transmission())) * ens.reference_counts;
  return {offset, std::abs(offset) > 3.0 * est.standard_error};
}

/// Variance of F1 - F2 ordered by powers of the reference amplitude.
///   eps = |T|^2 - |R|^2, kappa = R* T - R T*.
/// coeff_alpha4 and coeff_alpha3 are the prefactors of the |alpha|^4 and
/// |alpha|^3 variance terms; both vanish for |R| = |T|. `surviving` is the
/// leading term that remains (reference and CL each appearing twice), and
/// `shot_noise` the semiclassical Poisson variance mu1 + mu2.
struct NoiseBreakdown {
  double coeff_alpha4 = 0.0;
  double coeff_alpha3 = 0.0;
  double term_alpha4 = 0.0;
  double term_alpha3 = 0.0;
  double surviving = 0.0;
  double shot_noise = 0.0;
};

/// `coupling` supplies g_w and `spectrum` supplies F; the reference grid is
/// restricted to points where |alpha| exceeds `support` times its peak.
inline NoiseBreakdown noise_floor_terms(const BeamSplitter& bs, const ReferencePulse& ref, const CouplingModel& coupling,
                                        const DensitySpectrum& spectrum, double support = 1e-8) {
  const complex R = bs.reflection(), T = bs.transmission();
  const double eps = std::norm(T) - std::norm(R);
  const complex kappa = bs.quadrature_factor();

  NoiseBreakdown out;
  out.coeff_alpha4 = eps * eps;
  out.coeff_alpha3 = std::abs(eps * kappa);

  const double h = ref.step();
  double peak = 0.0;
  for (const auto& a : ref.alpha) peak = std::max(peak, std::abs(a));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ref.alpha.size(); ++i)
    if (ref.omega[i] > 0.0 && std::abs(ref.alpha[i]) > support * peak) idx.push_back(i);

  std::vector<complex> g(idx.size()), mean(idx.size()), alpha(idx.size());
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const double w = ref.omega[idx[p]];
    g[p] = coupling_amplitude(coupling, w);
    mean[p] = g[p] * spectrum.at(w);
    alpha[p] = ref.alpha[idx[p]];
  }
  double total_alpha = 0.0;
  complex overlap{};
  double cl_power = 0.0;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    total_alpha += std::norm(alpha[p]) * h;
    overlap += std::conj(alpha[p]) * mean[p] * h;
    cl_power += std::norm(g[p]) * h;
  }
  // magnitudes of the two leading orders: prefactor times the matching reference/CL integrals
  out.term_alpha4 = out.coeff_alpha4 * total_alpha * total_alpha;
  out.term_alpha3 = 2.0 * eps * std::real(kappa * std::conj(overlap)) * total_alpha;

  // 2 kappa^2 int int Re{ a a' [conj<a a'> - conj<a> conj<a'>] + a conj(a') conj<a> <a'>
  //                      - 1/2 (delta + a conj(a')) <a^dag a'> - 1/2 conj(a) a' (<a'^dag a> + delta) }
  complex acc{};
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const double w = ref.omega[idx[p]];
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const double w2 = ref.omega[idx[q]];
      const complex aa = g[p] * g[q] * spectrum.at(w + w2);
      const complex normal = std::conj(g[p]) * g[q] * spectrum.at(w2 - w);
      const complex normal_rev = std::conj(g[q]) * g[p] * spectrum.at(w - w2);
      const complex term = alpha[p] * alpha[q] * (std::conj(aa) - std::conj(mean[p]) * std::conj(mean[q])) +
                           alpha[p] * std::conj(alpha[q]) * std::conj(mean[p]) * mean[q] -
                           0.5 * alpha[p] * std::conj(alpha[q]) * normal -
                           0.5 * std::conj(alpha[p]) * alpha[q] * normal_rev;
      acc += std::real(term) * h * h;
    }
    // delta(w - w') pieces collapse to single integrals
    acc += std::real(-0.5 * std::norm(g[p]) - 0.5 * std::norm(alpha[p])) * h;
  }
  out.surviving = std::real(2.0 * kappa * kappa * acc);
  out.shot_noise = total_alpha + cl_power;
  return out;
}

}  // namespace clc
