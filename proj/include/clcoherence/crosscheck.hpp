#pragma once
//
// Oracle versus closed-form comparison over a matrix of electron states,
// couplings and mode sets.
//

#include <clcoherence/estate.hpp>
#include <clcoherence/oracle.hpp>
#include <clcoherence/parallel.hpp>
#include <clcoherence/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace clc {

struct CrossCheckCase {
  double beta_abs = 0.0;
  double distance_over_talbot = 0.0;
  double coupling = 0.0;
  std::vector<int> harmonics;
};

struct CrossCheckResult {
  CrossCheckCase input;
  std::size_t dimension = 0;
  double err_mean_a = 0.0;     ///< max |<a_k> - g F(n_k w0)|
  double err_photons = 0.0;    ///< max |<n_k> - |g|^2|
  double err_moments = 0.0;    ///< max over N = 2, 3 of central-moment mismatch
  double err_pairs = 0.0;      ///< max over <a_k^dag a_l>, <a_k a_l>
  double err_energy = 0.0;     ///< |level drop - sum_k n_k <n_k>|
  double err_norm = 0.0;       ///< |norm - 1|
  std::vector<double> doc;     ///< DOC(n_k w0) per mode
  std::vector<double> photons; ///< oracle <n_k>

  double max_error() const {
    return std::max({err_mean_a, err_photons, err_moments, err_pairs, err_energy, err_norm});
  }
};

inline std::vector<CrossCheckCase> crosscheck_matrix(const std::vector<double>& betas,
                                                     const std::vector<double>& distances_over_talbot,
                                                     const std::vector<double>& couplings,
                                                     const std::vector<std::vector<int>>& mode_sets) {
  std::vector<CrossCheckCase> out;
  for (double b : betas)
    for (double r : distances_over_talbot)
      for (double g : couplings)
        for (const auto& m : mode_sets) out.push_back({b, r, g, m});
  return out;
}

/// Quadratic-dispersion ladder at d = r z_T, evolved by the oracle with every
/// mode sharing coupling g, compared against the closed forms.
inline CrossCheckResult run_crosscheck(const BeamParameters& beam, const CrossCheckCase& cc) {
  const auto initial = pinem_ladder(beam, complex(cc.beta_abs, 0.0));
  const auto state = propagate(initial, cc.distance_over_talbot * beam.talbot_distance(), DispersionMode::quadratic);
  const complex g(cc.coupling, 0.0);
  std::vector<oracle::Mode> modes;
  for (int h : cc.harmonics) modes.push_back({h, g});
  const auto space = oracle::TruncatedSpace::for_ladder(state.cutoff(), modes);
  const auto evo = oracle::evolve(space, state);
  const auto obs = oracle::observables(evo, 3);
  const auto spectrum = ladder_spectrum(state);
  const double w0 = beam.omega0();

  CrossCheckResult res;
  res.input = cc;
  res.dimension = space.dimension();
  res.err_norm = std::abs(obs.norm - 1.0);
  double expected_drop = 0.0;
  for (std::size_t k = 0; k < cc.harmonics.size(); ++k) {
    const int n = cc.harmonics[k];
    const complex F = ladder_overlap(state, n);
    res.doc.push_back(std::norm(F));
    res.photons.push_back(obs.modes[k].mean_n);
    res.err_mean_a = std::max(res.err_mean_a, std::abs(obs.modes[k].mean_a - g * F));
    res.err_photons = std::max(res.err_photons, std::abs(obs.modes[k].mean_n - mean_photon_number(FlatCoupling{g}, n * w0)));
    for (int N = 2; N <= 3; ++N) {
      const complex expected = central_moment(g, spectrum, n * w0, N);
      res.err_moments = std::max(res.err_moments, std::abs(obs.modes[k].central_moments[static_cast<std::size_t>(N - 1)] - expected));
    }
    expected_drop += n * obs.modes[k].mean_n;
    for (std::size_t l = 0; l < cc.harmonics.size(); ++l) {
      const auto pc = pair_correlation(g, g, spectrum, n * w0, cc.harmonics[l] * w0);
      res.err_pairs = std::max({res.err_pairs, std::abs(obs.normal[k][l] - pc.normal),
                                std::abs(obs.anomalous[k][l] - pc.anomalous)});
    }
  }
  res.err_energy = std::abs(obs.level_drop - expected_drop);
  return res;
}

inline std::vector<CrossCheckResult> run_crosscheck_matrix(const BeamParameters& beam,
                                                           const std::vector<CrossCheckCase>& cases,
                                                           unsigned threads = 1) {
  std::vector<CrossCheckResult> out(cases.size());
  parallel_for(cases.size(), threads, [&](std::size_t i) { out[i] = run_crosscheck(beam, cases[i]); });
  return out;
}

}  // namespace clc
