#include <clcoherence/kinematics.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace {

using clc::BeamParameters;

// Reference values from 50-digit evaluation of the closed forms.
constexpr double ref_photon_energy = 1.5498024799492428;
constexpr double ref_gamma = 1.3913902367118367;
constexpr double ref_beta_v = 0.6953144712627447;
constexpr double ref_velocity = 208.45003442282859;
constexpr double ref_omega0 = 2.3545644586105555;
constexpr double ref_period = 2.668512762180797;
constexpr double ref_talbot = 477698963.1124060;

BeamParameters beam_200kev() { return BeamParameters::from_wavelength(200e3, 800.0); }

TEST(Kinematics, LorentzFactorRestCase) { EXPECT_DOUBLE_EQ(clc::lorentz_factor(0.0), 1.0); }

TEST(Kinematics, ReferenceBeamValues) {
  const auto b = beam_200kev();
  EXPECT_NEAR(b.photon_energy(), ref_photon_energy, 1e-14);
  EXPECT_NEAR(b.gamma() / ref_gamma - 1.0, 0.0, 1e-15);
  EXPECT_NEAR(b.beta_v() / ref_beta_v - 1.0, 0.0, 1e-14);
  EXPECT_NEAR(b.velocity() / ref_velocity - 1.0, 0.0, 1e-14);
  EXPECT_NEAR(b.omega0() / ref_omega0 - 1.0, 0.0, 1e-14);
  EXPECT_NEAR(b.period() / ref_period - 1.0, 0.0, 1e-14);
  EXPECT_NEAR(b.talbot_distance() / ref_talbot - 1.0, 0.0, 1e-12);
  EXPECT_NEAR(b.wavelength(), 800.0, 1e-12);
}

TEST(Kinematics, SixtyNinePercentOfLightSpeed) {
  EXPECT_NEAR(beam_200kev().beta_v(), 0.6953, 5e-5);
}

TEST(Kinematics, GammaBetaIdentity) {
  for (double t : {1.0, 100.0, 30e3, 200e3, 1e6, 1e8}) {
    const BeamParameters b(t, 1.0);
    const double g = 1.0 / std::sqrt(1.0 - b.beta_v() * b.beta_v());
    EXPECT_NEAR(g / b.gamma() - 1.0, 0.0, 1e-12) << "T = " << t;
  }
}

TEST(Kinematics, RestFrameWavenumber) {
  const auto b = beam_200kev();
  const double expected = std::sqrt(710998.95 * 710998.95 - 510998.95 * 510998.95) / 197.3269804;
  EXPECT_NEAR(clc::wavenumber(b, 0) / expected - 1.0, 0.0, 1e-15);
}

TEST(Kinematics, WavenumberMonotoneAndConcave) {
  const auto b = beam_200kev();
  for (int j = -60; j < 60; ++j) {
    EXPECT_GT(clc::wavenumber_offset(b, j + 1), clc::wavenumber_offset(b, j));
    const double second = clc::wavenumber_offset(b, j + 1) - 2.0 * clc::wavenumber_offset(b, j) +
                          clc::wavenumber_offset(b, j - 1);
    EXPECT_LT(second, 0.0) << "j = " << j;
  }
}

TEST(Kinematics, OffsetMatchesDirectDifference) {
  const auto b = beam_200kev();
  const double k0 = clc::wavenumber(b, 0);
  for (int j : {-50, -7, -1, 1, 3, 50}) {
    const double naive = clc::wavenumber(b, j) - k0;
    EXPECT_NEAR(clc::wavenumber_offset(b, j) / naive - 1.0, 0.0, 1e-8) << "j = " << j;
  }
}

TEST(Kinematics, TalbotFromSecondDifference) {
  const auto b = beam_200kev();
  const double d = 6.43e6;
  const double second = clc::wavenumber_offset(b, 1) + clc::wavenumber_offset(b, -1);
  const double phase = -0.5 * second * d;
  const double expected = clc::constants::two_pi * d / b.talbot_distance();
  EXPECT_NEAR(phase / expected - 1.0, 0.0, 1e-6);
}

TEST(Kinematics, SecondOrderExpansion) {
  const auto b = beam_200kev();
  const double linear = b.omega0() / b.velocity();
  const double quadratic = -clc::constants::two_pi / b.talbot_distance();
  for (int j = -50; j <= 50; ++j) {
    if (j == 0) continue;
    const double expansion = linear * j + quadratic * j * j;
    EXPECT_NEAR(clc::wavenumber_offset(b, j) / expansion - 1.0, 0.0, 1e-4) << "j = " << j;
  }
}

TEST(Kinematics, TalbotScalesAsInverseSquareFrequency) {
  const BeamParameters a(200e3, 1.5);
  const BeamParameters b(200e3, 3.0);
  EXPECT_NEAR(a.talbot_distance() / b.talbot_distance(), 4.0, 1e-12);
}

TEST(Kinematics, RejectsInvalidBeams) {
  EXPECT_THROW(BeamParameters(0.0, 1.5), std::invalid_argument);
  EXPECT_THROW(BeamParameters(-1.0, 1.5), std::invalid_argument);
  EXPECT_THROW(BeamParameters(200e3, 0.0), std::invalid_argument);
  EXPECT_THROW(BeamParameters::from_wavelength(200e3, -800.0), std::invalid_argument);
  EXPECT_THROW(BeamParameters(10.0, 0.02 * 510999.0), std::invalid_argument);
}

TEST(Kinematics, NonrecoilWarningBand) {
  EXPECT_FALSE(beam_200kev().nonrecoil_warning());
  const BeamParameters marginal(100.0, 0.005 * 511099.0);
  EXPECT_TRUE(marginal.nonrecoil_warning());
}

TEST(Kinematics, RejectsLevelsBelowRestEnergy) {
  const BeamParameters b(10.0, 1.0);
  EXPECT_NO_THROW(clc::wavenumber(b, -9));
  EXPECT_THROW(clc::wavenumber(b, -10), std::domain_error);
  EXPECT_THROW(clc::wavenumber_offset(b, -11), std::domain_error);
}

}  // namespace
