// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <clcoherence/clcoherence.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace {

using namespace clc;
using Clock = std::chrono::steady_clock;

// Tolerances, pinned.
constexpr double kTargetDistanceMm = 6.43;
constexpr double kDistanceToleranceMm = 0.15;
constexpr double kCriterion1BudgetS = 30.0;
constexpr double kSqrtDocFloor = 0.4;
constexpr int kConsecutiveHarmonics = 5;
constexpr double kDocZeroTolerance = 1e-8;
constexpr double kDocNullTolerance = 1e-10;
constexpr double kPhotonNumberTolerance = 1e-6;
constexpr double kDocSpread = 0.3;
constexpr double kCriterion4BudgetS = 120.0;
constexpr double kAnalyticFftTolerance = 1e-6;
constexpr int kAnalyticMaxHarmonic = 20;
constexpr double kStrongCoupling = 0.8;
constexpr double kOracleTolerance = 1e-6;
constexpr double kElectronFwhmFs = 200.0;
constexpr double kPulseRelTolerance = 0.01;
constexpr double kDistortionRatio = 1.5;
constexpr int kMinSignChanges = 2;
constexpr std::size_t kShots = 100000;
constexpr double kReferenceCounts = 1e6;
constexpr double kReferencePowerScale = 100.0;
constexpr double kSigmaBound = 3.0;
constexpr double kFanoLo = 0.97;
constexpr double kFanoHi = 1.03;
constexpr double kSnrScalingTolerance = 0.02;
constexpr double kNoiseCancelTolerance = 1e-12;
constexpr double kCriterion9BudgetS = 60.0;
constexpr int kNullSeeds = 100;
constexpr std::size_t kNullShots = 10000;
constexpr int kMaxFalsePositives = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const BeamParameters& beam() {
  static const BeamParameters b = BeamParameters::from_wavelength(200e3, 800.0);
  return b;
}

const LadderState& pinem4() {
  static const LadderState s = pinem_ladder(beam(), complex(4.0, 0.0));
  return s;
}

double optimum_nm() {
  static const double d = optimal_bunching_distance(pinem4(), WidthSearch{}, resolve_threads()).distance;
  return d;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto best = optimal_bunching_distance(pinem4(), WidthSearch{}, resolve_threads());
  const double secs = elapsed(t0);
  const double mm = best.distance * 1e-6;
  const bool ok = std::abs(mm - kTargetDistanceMm) <= kDistanceToleranceMm && secs < kCriterion1BudgetS;
  return {ok, fmt("widest spectrum at d = %.4f mm (target %.2f +- %.2f mm), width %d harmonics, %.2f s", mm,
                  kTargetDistanceMm, kDistanceToleranceMm, best.width, secs)};
}

Outcome criterion2() {
  const auto state = propagate(pinem4(), optimum_nm());
  int run = 0, best_run = 0;
  std::string values;
  for (int n = 1; n <= 2 * state.cutoff(); ++n) {
    const double r = std::abs(ladder_overlap(state, n));
    if (n <= 8) values += fmt("%s%.4f", n == 1 ? "" : " ", r);
    run = r >= kSqrtDocFloor ? run + 1 : 0;
    best_run = std::max(best_run, run);
  }
  return {best_run >= kConsecutiveHarmonics,
          fmt("%d consecutive harmonics with sqrt(DOC) >= %.1f (need %d); sqrt(DOC) n=1..8: %s", best_run,
              kSqrtDocFloor, kConsecutiveHarmonics, values.c_str())};
}

Outcome criterion3() {
  // DOC(0) from the sampled-density pipeline at the optimum
  const auto at_opt = propagate(pinem4(), optimum_nm());
  const auto spectrum = density_spectrum(synthesize_density(at_opt, EnvelopeSpec::infinite()));
  const double doc0_err = std::abs(doc(spectrum, 0.0) - 1.0);

  // d = 0: phase-only modulation
  const auto flat = pinem4();
  const auto flat_spectrum = density_spectrum(synthesize_density(flat, EnvelopeSpec::infinite()));
  double null_max = 0.0;
  for (int n = 1; n <= 2 * flat.cutoff(); ++n) {
    null_max = std::max(null_max, std::norm(ladder_overlap(flat, n)));
    null_max = std::max(null_max, doc(flat_spectrum, n * beam().omega0()));
  }

  // between harmonics, infinite envelope
  double off_max = 0.0;
  const double w0 = beam().omega0();
  for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
    const double x = spectrum.omega[i] / w0;
    if (std::abs(x - std::round(x)) > 1e-6 && std::abs(x) <= 2 * at_opt.cutoff())
      off_max = std::max(off_max, std::norm(spectrum.values[i]));
  }
  const bool ok = doc0_err <= kDocZeroTolerance && null_max < kDocNullTolerance && off_max < kDocNullTolerance;
  return {ok, fmt("|DOC(0)-1| = %.1e, max DOC(n!=0; d=0) = %.1e, max off-harmonic DOC = %.1e", doc0_err, null_max,
                  off_max)};
}

const std::vector<CrossCheckResult>& oracle_matrix(double* seconds = nullptr) {
  static double secs = 0.0;
  static const std::vector<CrossCheckResult> results = [] {
    const auto t0 = Clock::now();
    const auto cases = crosscheck_matrix({0.0, 0.5, 1.0}, {0.0, 0.1, 0.25}, {0.05, 0.3, 0.8}, {{1}, {1, 2}});
    auto r = run_crosscheck_matrix(beam(), cases, resolve_threads());
    secs = elapsed(t0);
    return r;
  }();
  if (seconds) *seconds = secs;
  return results;
}

Outcome criterion4() {
  double secs = 0.0;
  const auto& results = oracle_matrix(&secs);
  double max_dev = 0.0, lo = 1.0, hi = 0.0;
  for (const auto& r : results) {
    for (double n : r.photons) max_dev = std::max(max_dev, std::abs(n - r.input.coupling * r.input.coupling));
    for (double d : r.doc) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  const bool ok = max_dev < kPhotonNumberTolerance && hi - lo > kDocSpread && secs < kCriterion4BudgetS;
  return {ok, fmt("%zu oracle cases: max |<n> - |g|^2| = %.1e, DOC spread = %.3f, %.1f s", results.size(), max_dev,
                  hi - lo, secs)};
}

Outcome criterion5() {
  double worst = 0.0;
  for (double b : {1.0, 4.0}) {
    const auto initial = pinem_ladder(beam(), complex(b, 0.0));
    for (double r : {0.0, 0.01, 0.05, 0.25}) {
      const auto state = propagate(initial, r * beam().talbot_distance(), DispersionMode::quadratic);
      const auto spectrum = density_spectrum(synthesize_density(state, EnvelopeSpec::infinite()));
      for (int n = -kAnalyticMaxHarmonic; n <= kAnalyticMaxHarmonic; ++n) {
        const double analytic = std::norm(analytic_pinem_overlap(complex(b, 0.0), n, r));
        worst = std::max(worst, std::abs(analytic - doc(spectrum, n * beam().omega0())));
      }
    }
  }
  return {worst <= kAnalyticFftTolerance,
          fmt("max |DOC_bessel - DOC_fft| = %.1e over |n| <= %d, |beta| in {1,4}, 4 distances", worst,
              kAnalyticMaxHarmonic)};
}

Outcome criterion6() {
  double mean_err = 0.0, moment_err = 0.0;
  int cases = 0;
  for (const auto& r : oracle_matrix()) {
    if (r.input.coupling != kStrongCoupling) continue;
    ++cases;
    mean_err = std::max(mean_err, r.err_mean_a);
    moment_err = std::max(moment_err, r.err_moments);
  }
  return {cases > 0 && mean_err <= kOracleTolerance && moment_err <= kOracleTolerance,
          fmt("g = %.1f, %d cases: max |<a> - g F| = %.1e, max central-moment error (N=2,3) = %.1e", kStrongCoupling,
              cases, mean_err, moment_err)};
}

const DensitySpectrum& gaussian_spectrum() {
  static const DensitySpectrum s =
      density_spectrum(synthesize_density(propagate(pinem4(), optimum_nm()), EnvelopeSpec::gaussian(kElectronFwhmFs)));
  return s;
}

Outcome criterion7() {
  const auto band = harmonic_band(1.0, beam().omega0());
  const auto pulse = analyze_pulse(gaussian_spectrum(), FlatCoupling{0.1}, band);
  const double want_i = kElectronFwhmFs / std::sqrt(2.0);
  const bool ok = std::abs(pulse.time.fwhm_amplitude / kElectronFwhmFs - 1.0) <= kPulseRelTolerance &&
                  std::abs(pulse.time.fwhm_intensity / want_i - 1.0) <= kPulseRelTolerance;
  return {ok, fmt("|E| FWHM = %.3f fs (want %.1f), |E|^2 FWHM = %.3f fs (want %.1f), +-%.0f%%",
                  pulse.time.fwhm_amplitude, kElectronFwhmFs, pulse.time.fwhm_intensity, want_i,
                  100 * kPulseRelTolerance)};
}

Outcome criterion8() {
  ScenarioConfig cfg;
  cfg.coupling.kind = "waveguide";
  const auto band = harmonic_band(1.0, beam().omega0());
  const auto peak = doc_peak_band(gaussian_spectrum(), 1);
  std::vector<double> spectral, temporal;
  int changes_1mm = 0;
  for (double L : {10.0, 100.0, 1000.0}) {
    const auto model = build_coupling(cfg, L);
    const auto pulse = analyze_pulse(gaussian_spectrum(), model, band);
    spectral.push_back(pulse.spectral_fwhm);
    temporal.push_back(pulse.time.fwhm_amplitude);
    if (L == 1000.0) changes_1mm = count_sign_changes(std::get<WaveguideCoupling>(model), peak.lo, peak.hi);
  }
  const bool monotone = spectral[0] > spectral[1] && spectral[1] > spectral[2];
  const double ratio = temporal[2] / temporal[0];
  const bool ok = monotone && changes_1mm >= kMinSignChanges && ratio >= kDistortionRatio;
  return {ok, fmt("spectral FWHM %.4f > %.4f > %.4f rad/fs; %d sign changes at 1 mm; |E| FWHM 1 mm / 10 um = %.2f",
                  spectral[0], spectral[1], spectral[2], changes_1mm, ratio)};
}

Outcome criterion9() {
  const auto t0 = Clock::now();
  const auto field = mean_field(FlatCoupling{0.1}, gaussian_spectrum());
  const auto bs = BeamSplitter::heterodyne();
  auto ref = ReferencePulse::gaussian(field.omega, beam().omega0(), 0.02, kReferenceCounts);
  ref = ref.rotated(aligned_reference_phase(bs, ref, field));
  const unsigned threads = resolve_threads();

  const double S = balanced_signal(bs, ref, field);
  const auto ens = sample_shots(bs, ref, field, 1.0, 1.0, kShots, 12345, threads);
  const auto est = snr_estimate(ens);
  const bool mean_ok = std::abs(est.mean - S) <= kSigmaBound * est.standard_error;
  const double f1 = detector_stats(ens, 1).fano(), f2 = detector_stats(ens, 2).fano();
  const bool fano_ok = f1 >= kFanoLo && f1 <= kFanoHi && f2 >= kFanoLo && f2 <= kFanoHi;

  const auto strong = ref.scaled_power(kReferencePowerScale);
  const auto m1 = detector_means(bs, ref, field), m2 = detector_means(bs, strong, field);
  const double S2 = balanced_signal(bs, strong, field);
  const double snr1 = S / std::sqrt(m1.mu1 + m1.mu2);
  const double snr2 = S2 / std::sqrt(m2.mu1 + m2.mu2);
  const auto est2 = snr_estimate(sample_shots(bs, strong, field, 1.0, 1.0, kShots, 54321, threads));
  const double analytic_change = std::abs(snr2 / snr1 - 1.0);
  // same ratio with the sampled shot noise in place of sqrt(mu1 + mu2); the sampled
  // mean alone cannot resolve 2% at a per-shot SNR of ~0.02
  const double sampled_change = std::abs((S2 / est2.stddev) / (S / est.stddev) - 1.0);
  const bool scale_ok = analytic_change < kSnrScalingTolerance && sampled_change < kSnrScalingTolerance;

  const auto noise = noise_floor_terms(bs, ref, FlatCoupling{0.1}, gaussian_spectrum());
  const bool cancel_ok = noise.coeff_alpha4 <= kNoiseCancelTolerance && noise.coeff_alpha3 <= kNoiseCancelTolerance;
  const double secs = elapsed(t0);
  const bool ok = mean_ok && fano_ok && scale_ok && cancel_ok && secs < kCriterion9BudgetS;
  return {ok, fmt("mean(I1-I2) = %.2f vs S = %.2f (%.2f s.e.); Fano %.4f, %.4f; per-shot SNR change x100 ref: "
                  "analytic %.2e, sampled %.2e; alpha^4/alpha^3 coefficients %.1e/%.1e; %.1f s",
                  est.mean, S, std::abs(est.mean - S) / est.standard_error, f1, f2, analytic_change, sampled_change,
                  noise.coeff_alpha4, noise.coeff_alpha3, secs)};
}

Outcome criterion10() {
  const auto field = mean_field(FlatCoupling{0.0}, gaussian_spectrum());
  const auto bs = BeamSplitter::heterodyne();
  const auto ref = ReferencePulse::gaussian(field.omega, beam().omega0(), 0.02, kReferenceCounts);
  int false_positives = 0;
  for (int seed = 1; seed <= kNullSeeds; ++seed) {
    const auto est = snr_estimate(sample_shots(bs, ref, field, 1.0, 1.0, kNullShots,
                                               static_cast<std::uint64_t>(seed), resolve_threads()));
    if (std::abs(est.snr) > 3.0) ++false_positives;
  }
  return {false_positives <= kMaxFalsePositives,
          fmt("g = 0: |snr| > 3 in %d of %d seeds (allowed %d)", false_positives, kNullSeeds, kMaxFalsePositives)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"optimal bunching distance", criterion1},
      {"coherence magnitude", criterion2},
      {"normalization anchors", criterion3},
      {"intensity independent of electron state", criterion4},
      {"Bessel-sum vs FFT spectra", criterion5},
      {"strong-coupling exactness", criterion6},
      {"Gaussian pulse shapes", criterion7},
      {"waveguide progression", criterion8},
      {"detection statistics", criterion9},
      {"null calibration", criterion10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
