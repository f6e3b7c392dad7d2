#include <clcoherence/estate.hpp>
#include <clcoherence/spectra.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace {

using clc::complex;
using clc::DispersionMode;
using clc::EnvelopeSpec;

clc::BeamParameters beam_200kev() { return clc::BeamParameters::from_wavelength(200e3, 800.0); }

TEST(Bessel, ReferenceValues) {
  EXPECT_NEAR(clc::bessel_j(3, 8.0), -0.29113220706595225, 1e-14);
  EXPECT_NEAR(clc::bessel_j(-5, 2.5), -0.019501625134503220, 1e-15);
  EXPECT_NEAR(clc::bessel_j(0, 1.0), 0.76519768655796655, 1e-15);
  EXPECT_NEAR(clc::bessel_j(20, 8.0) / 2.0805829639717028e-7 - 1.0, 0.0, 1e-12);
  EXPECT_EQ(clc::bessel_j(0, 0.0), 1.0);
  EXPECT_EQ(clc::bessel_j(4, 0.0), 0.0);
}

TEST(Bessel, ReflectionIdentities) {
  for (int n = -7; n <= 7; ++n) {
    const double sign = (std::abs(n) % 2) ? -1.0 : 1.0;
    EXPECT_DOUBLE_EQ(clc::bessel_j(-n, 3.3), sign * clc::bessel_j(n, 3.3));
    EXPECT_DOUBLE_EQ(clc::bessel_j(n, -3.3), sign * clc::bessel_j(n, 3.3));
  }
}

TEST(PinemLadder, ZeroCouplingIsUnmodulated) {
  const auto s = clc::pinem_ladder(beam_200kev(), complex{});
  EXPECT_EQ(s[0], complex(1.0, 0.0));
  for (int j = 1; j <= s.cutoff(); ++j) {
    EXPECT_EQ(s[j], complex{});
    EXPECT_EQ(s[-j], complex{});
  }
}

TEST(PinemLadder, NormalizedWithNegligibleBoundary) {
  for (double b : {0.5, 1.0, 4.0, 10.0, 25.0}) {
    const auto s = clc::pinem_ladder(beam_200kev(), complex(b, 0.0));
    EXPECT_EQ(s.cutoff(), clc::auto_cutoff(b));
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12) << "|beta| = " << b;
    EXPECT_LT(s.boundary_mass(), 1e-14) << "|beta| = " << b;
  }
}

TEST(PinemLadder, BesselAmplitudesWithPhase) {
  const complex beta = std::polar(4.0, 0.7);
  const auto s = clc::pinem_ladder(beam_200kev(), beta);
  const double phase = std::arg(-beta);
  for (int j = -s.cutoff(); j <= s.cutoff(); ++j) {
    const complex expected = std::polar(clc::bessel_j(j, 8.0), j * phase);
    EXPECT_NEAR(std::abs(s[j] - expected), 0.0, 1e-15) << "j = " << j;
  }
}

TEST(PinemLadder, RealBetaMatchesFourierCoefficientsOfPhaseMask) {
  // psi(t) = exp(-2|beta| i cos(w0 t + pi/2)); origin at a quarter period
  const auto beam = beam_200kev();
  const double b = 4.0;
  const auto s = clc::pinem_ladder(beam, complex(b, 0.0));
  constexpr int samples = 4096;
  for (int j = -12; j <= 12; ++j) {
    complex c{};
    for (int i = 0; i < samples; ++i) {
      const double theta = clc::constants::two_pi * i / samples;
      const complex psi = std::polar(1.0, -2.0 * b * std::cos(theta + 0.5 * std::numbers::pi));
      c += psi * std::polar(1.0, j * theta);
    }
    c /= static_cast<double>(samples);
    EXPECT_NEAR(std::abs(c - s[j]), 0.0, 1e-12) << "j = " << j;
    EXPECT_NEAR(s[j].imag(), 0.0, 1e-15);
    EXPECT_NEAR(s[j].real(), ((std::abs(j) % 2) ? -1.0 : 1.0) * clc::bessel_j(j, 8.0), 1e-15);
  }
}

TEST(PinemLadder, TruncationReportsDeficit) {
  try {
    clc::pinem_ladder(beam_200kev(), complex(4.0, 0.0), 6);
    FAIL() << "expected TruncationError";
  } catch (const clc::TruncationError& e) {
    EXPECT_GT(e.deficit, 1e-4);
    EXPECT_NE(std::string(e.what()).find("deficit"), std::string::npos);
  }
}

TEST(Propagate, ZeroDistanceIsIdentity) {
  const auto s = clc::pinem_ladder(beam_200kev(), complex(4.0, 0.0));
  for (auto mode : {DispersionMode::exact, DispersionMode::quadratic}) {
    const auto p = clc::propagate(s, 0.0, mode);
    for (int j = -s.cutoff(); j <= s.cutoff(); ++j) EXPECT_EQ(p[j], s[j]);
    EXPECT_EQ(p.propagated_distance(), 0.0);
  }
}

TEST(Propagate, UnitaryAndAccumulatesDistance) {
  const auto s = clc::pinem_ladder(beam_200kev(), complex(4.0, 0.0));
  const auto p = clc::propagate(clc::propagate(s, 3e6), 3.43e6);
  EXPECT_NEAR(p.norm_squared(), s.norm_squared(), 1e-14);
  EXPECT_DOUBLE_EQ(p.propagated_distance(), 6.43e6);
  EXPECT_THROW(clc::propagate(s, -1.0), std::invalid_argument);
}

TEST(Propagate, QuadraticTalbotRevival) {
  const auto beam = beam_200kev();
  const auto s = clc::pinem_ladder(beam, complex(4.0, 0.0));
  const auto p = clc::propagate(s, beam.talbot_distance(), DispersionMode::quadratic);
  for (int j = -s.cutoff(); j <= s.cutoff(); ++j) EXPECT_NEAR(std::abs(p[j] - s[j]), 0.0, 1e-14);
}

TEST(Propagate, ExactAndQuadraticDocAgree) {
  const auto beam = beam_200kev();
  const auto s = clc::pinem_ladder(beam, complex(4.0, 0.0));
  const auto exact = clc::propagate(s, 6.43e6, DispersionMode::exact);
  const auto quad = clc::propagate(s, 6.43e6, DispersionMode::quadratic);
  for (int n = 0; n <= 30; ++n) {
    const double a = std::norm(clc::ladder_overlap(exact, n));
    const double b = std::norm(clc::ladder_overlap(quad, n));
    EXPECT_NEAR(a, b, 1e-3) << "n = " << n;
  }
}

TEST(Synthesize, UnmodulatedDensityIsFlat) {
  const auto s = clc::pinem_ladder(beam_200kev(), complex{});
  const auto rho = clc::synthesize_density(s, EnvelopeSpec::infinite());
  const double mean = 1.0 / rho.window();
  for (double r : rho.samples) EXPECT_NEAR(r / mean, 1.0, 1e-12);
}

TEST(Synthesize, PhaseOnlyStartIsFlat) {
  for (complex beta : {complex(4.0, 0.0), std::polar(2.5, -1.1), std::polar(7.0, 2.0)}) {
    const auto s = clc::pinem_ladder(beam_200kev(), beta);
    const auto rho = clc::synthesize_density(s, EnvelopeSpec::infinite());
    const double mean = 1.0 / rho.window();
    for (double r : rho.samples) ASSERT_NEAR(r / mean, 1.0, 1e-10);
  }
}

TEST(Synthesize, NormalizedAndNonnegative) {
  const auto s = clc::propagate(clc::pinem_ladder(beam_200kev(), complex(4.0, 0.0)), 6.43e6);
  for (const auto& env : {EnvelopeSpec::infinite(), EnvelopeSpec::gaussian(50.0)}) {
    const auto rho = clc::synthesize_density(s, env);
    EXPECT_NEAR(rho.integral(), 1.0, 1e-8);
    EXPECT_GE(*std::min_element(rho.samples.begin(), rho.samples.end()), 0.0);
  }
}

TEST(Synthesize, BunchesAtOptimalDistance) {
  const auto s = clc::propagate(clc::pinem_ladder(beam_200kev(), complex(4.0, 0.0)), 6.43e6);
  const auto rho = clc::synthesize_density(s, EnvelopeSpec::infinite());
  const double mean = 1.0 / rho.window();
  const double peak = *std::max_element(rho.samples.begin(), rho.samples.end());
  EXPECT_GT(peak / mean, 5.0);
}

TEST(Synthesize, PeriodicWithLaserPeriod) {
  const auto beam = beam_200kev();
  const auto s = clc::propagate(clc::pinem_ladder(beam, complex(4.0, 0.0)), 6.43e6);
  const auto rho = clc::synthesize_density(s, EnvelopeSpec::infinite());
  const auto shift = static_cast<std::size_t>(std::llround(beam.period() / rho.dt));
  const double peak = *std::max_element(rho.samples.begin(), rho.samples.end());
  for (std::size_t i = 0; i + shift < rho.samples.size(); ++i)
    ASSERT_NEAR(rho.samples[i + shift], rho.samples[i], 1e-10 * peak);
}

TEST(Synthesize, QuadraticTalbotDensitiesCoincide) {
  const auto beam = beam_200kev();
  const auto s = clc::pinem_ladder(beam, complex(4.0, 0.0));
  const double d = 2.1e6;
  const auto a = clc::synthesize_density(clc::propagate(s, d, DispersionMode::quadratic), EnvelopeSpec::infinite());
  const auto b = clc::synthesize_density(clc::propagate(s, d + beam.talbot_distance(), DispersionMode::quadratic),
                                         EnvelopeSpec::infinite());
  const double peak = *std::max_element(a.samples.begin(), a.samples.end());
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_NEAR(a.samples[i], b.samples[i], 1e-10 * peak);
}

TEST(Synthesize, ExactDensityMatchesQuadraticAfterCentering) {
  // exact dispersion adds a linear-in-j phase, i.e. a pure arrival-time shift
  const auto beam = beam_200kev();
  const auto s = clc::pinem_ladder(beam, complex(4.0, 0.0));
  const auto a = clc::synthesize_density(clc::propagate(s, 6.43e6, DispersionMode::exact), EnvelopeSpec::infinite());
  const auto b = clc::synthesize_density(clc::propagate(s, 6.43e6, DispersionMode::quadratic), EnvelopeSpec::infinite());
  const std::size_t n = a.samples.size();
  const auto per = static_cast<std::size_t>(std::llround(beam.period() / a.dt));
  std::size_t best_shift = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < per; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += a.samples[(i + k) % n] * b.samples[i];
    if (c > best) best = c, best_shift = k;
  }
  // residual cubic dispersion reshapes the sharpest peaks, so compare against
  // the total bunching contrast rather than demanding equality
  const double flat = 1.0 / b.window();
  double distance = 0.0, contrast = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    distance += std::abs(a.samples[(i + best_shift) % n] - b.samples[i]) * a.dt;
    contrast += std::abs(b.samples[i] - flat) * b.dt;
  }
  EXPECT_LT(distance, 0.1 * contrast);
  const double pa = *std::max_element(a.samples.begin(), a.samples.end());
  const double pb = *std::max_element(b.samples.begin(), b.samples.end());
  EXPECT_NEAR(pa / pb, 1.0, 0.1);
}

TEST(Synthesize, GuardsSamplingAndWindow) {
  const auto beam = beam_200kev();
  const auto s = clc::pinem_ladder(beam, complex(4.0, 0.0));
  const double T0 = beam.period();
  EXPECT_THROW(clc::synthesize_density(s, EnvelopeSpec::infinite(), T0 / 32.0, 64.0 * T0), clc::AliasingError);
  const auto wide = clc::pinem_ladder(beam, complex(40.0, 0.0));
  EXPECT_THROW(clc::synthesize_density(wide, EnvelopeSpec::infinite(), T0 / 64.0, 64.0 * T0), clc::AliasingError);
  EXPECT_THROW(clc::synthesize_density(s, EnvelopeSpec::infinite(), T0 / 256.0, 63.5 * T0), std::invalid_argument);
  EXPECT_THROW(clc::synthesize_density(s, EnvelopeSpec::infinite(), T0 / 256.0, 32.0 * T0), std::invalid_argument);
  EXPECT_THROW(clc::synthesize_density(s, EnvelopeSpec::gaussian(100.0), T0 / 256.0, 700.0), std::invalid_argument);
  EXPECT_THROW(EnvelopeSpec::gaussian(0.0), std::invalid_argument);
}

}  // namespace
