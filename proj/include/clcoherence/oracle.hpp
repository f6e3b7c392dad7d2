#pragma once
//
// Brute-force reference model: electron ladder levels j in [-M, M] tensored
// with truncated Fock spaces for a few discrete photon modes at harmonics
// n_k omega0. The scattering operator exp(sum_k g_k b_k a_k^dag - h.c.) is
// applied numerically and observables are read off the final state vector,
// with no use of the closed-form results in spectra.hpp.
//
// g_k is the dimensionless coupling of a whole mode (the integrated band
// amplitude), so <a_k^dag a_k> = |g_k|^2 in the same units.
//

#include <clcoherence/errors.hpp>
#include <clcoherence/estate.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clc::oracle {

using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<complex>;

struct Mode {
  int harmonic = 1;  ///< photon energy n hbar omega0
  complex g;
};

inline constexpr std::size_t max_dimension = 20000;

/// Smallest Fock cutoff whose Poisson(|g|^2) tail beyond it is below `tail`.
inline int fock_cutoff(double mean_photons, double tail = 1e-11) {
  if (mean_photons <= 0.0) return 1;
  double p = std::exp(-mean_photons), cdf = p;
  int n = 0;
  while (1.0 - cdf > tail && n < 200) {
    ++n;
    p *= mean_photons / n;
    cdf += p;
  }
  return std::max(n + 1, 2);
}

class TruncatedSpace {
 public:
  TruncatedSpace(int electron_half_width, std::vector<Mode> modes, int photon_cutoff)
      : half_(electron_half_width), modes_(std::move(modes)), nmax_(photon_cutoff) {
    if (half_ < 0 || nmax_ < 1) throw std::invalid_argument("invalid truncated space");
    if (modes_.empty()) throw std::invalid_argument("oracle needs at least one mode");
    for (const auto& m : modes_)
      if (m.harmonic < 1) throw std::invalid_argument("mode harmonic must be >= 1");
    double dim = electron_levels();
    for (std::size_t k = 0; k < modes_.size(); ++k) dim *= nmax_ + 1;
    if (dim > static_cast<double>(max_dimension))
      throw PhysicsGuardError("oracle dimension " + std::to_string(static_cast<long long>(dim)) + " exceeds " +
                              std::to_string(max_dimension));
    dimension_ = static_cast<std::size_t>(dim);
  }

  /// Sizes the space for a ladder of half-width `cutoff`: adaptive Fock cutoff
  /// from the largest |g|^2 and electron buffer cutoff + n_max * max harmonic + 5.
  static TruncatedSpace for_ladder(int cutoff, std::vector<Mode> modes, std::optional<int> photon_cutoff = {}) {
    double strongest = 0.0;
    int top = 1;
    for (const auto& m : modes) {
      strongest = std::max(strongest, std::norm(m.g));
      top = std::max(top, m.harmonic);
    }
    const int nmax = photon_cutoff.value_or(fock_cutoff(strongest));
    return {cutoff + nmax * top + 5, std::move(modes), nmax};
  }

  int electron_half_width() const { return half_; }
  int electron_levels() const { return 2 * half_ + 1; }
  int photon_cutoff() const { return nmax_; }
  std::span<const Mode> modes() const { return modes_; }
  std::size_t dimension() const { return dimension_; }

  /// Flat index of |j; n_0, n_1, ...>: electron level fastest.
  std::size_t index(int level, std::span<const int> occupation) const {
    std::size_t idx = 0;
    for (std::size_t k = occupation.size(); k-- > 0;) idx = idx * (nmax_ + 1) + static_cast<std::size_t>(occupation[k]);
    return idx * static_cast<std::size_t>(electron_levels()) + static_cast<std::size_t>(level + half_);
  }

  int level_of(std::size_t idx) const { return static_cast<int>(idx % electron_levels()) - half_; }
  int occupation_of(std::size_t idx, std::size_t mode) const {
    std::size_t rest = idx / static_cast<std::size_t>(electron_levels());
    for (std::size_t k = 0; k < mode; ++k) rest /= static_cast<std::size_t>(nmax_ + 1);
    return static_cast<int>(rest % static_cast<std::size_t>(nmax_ + 1));
  }

  std::size_t mode_stride(std::size_t mode) const {
    std::size_t s = static_cast<std::size_t>(electron_levels());
    for (std::size_t k = 0; k < mode; ++k) s *= static_cast<std::size_t>(nmax_ + 1);
    return s;
  }

 private:
  int half_;
  std::vector<Mode> modes_;
  int nmax_;
  std::size_t dimension_ = 0;
};

/// G = sum_k (g_k b_k a_k^dag - conj(g_k) b_k^dag a_k), with b_k|j> = |j - n_k>
/// (zero past the ladder edge) and b_k^dag its adjoint, so G^dag = -G exactly.
inline SparseMatrix build_generator(const TruncatedSpace& space) {
  std::vector<Eigen::Triplet<complex>> triplets;
  const auto dim = space.dimension();
  const int M = space.electron_half_width();
  for (std::size_t k = 0; k < space.modes().size(); ++k) {
    const auto& mode = space.modes()[k];
    if (mode.g == complex{}) continue;
    const std::size_t stride = space.mode_stride(k);
    for (std::size_t col = 0; col < dim; ++col) {
      const int j = space.level_of(col);
      const int n = space.occupation_of(col, k);
      if (j - mode.harmonic < -M || n + 1 > space.photon_cutoff()) continue;
      // g b a^dag: |j, n> -> sqrt(n+1) |j - h, n + 1>
      const std::size_t row = col + stride - static_cast<std::size_t>(mode.harmonic);
      const double amp = std::sqrt(static_cast<double>(n + 1));
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), mode.g * amp);
      triplets.emplace_back(static_cast<int>(col), static_cast<int>(row), -std::conj(mode.g) * amp);
    }
  }
  SparseMatrix G(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  G.setFromTriplets(triplets.begin(), triplets.end());
  return G;
}

/// exp(G) v by scaled Taylor series: s = ceil(||G||_1) substeps, each summed
/// until the next term is below 1e-16 relative.
inline Vector expm_action(const SparseMatrix& G, const Vector& v) {
  double norm1 = 0.0;
  for (Eigen::Index c = 0; c < G.outerSize(); ++c) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(G, c); it; ++it) col += std::abs(it.value());
    norm1 = std::max(norm1, col);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
  const double scale = 1.0 / steps;
  Vector x = v;
  for (int s = 0; s < steps; ++s) {
    Vector term = x;
    Vector sum = x;
    for (int k = 1; k < 200; ++k) {
      term = (G * term) * (scale / k);
      sum += term;
      if (term.norm() <= 1e-16 * sum.norm()) break;
    }
    x = std::move(sum);
  }
  return x;
}

inline constexpr double leakage_tolerance = 1e-8;

struct Evolution {
  TruncatedSpace space;
  Vector state;
  double initial_mean_level = 0.0;
};

/// Population of the top Fock level of `mode` and of the two outermost
/// electron levels.
inline double fock_edge_population(const TruncatedSpace& space, const Vector& psi, std::size_t mode) {
  double p = 0.0;
  for (std::size_t i = 0; i < space.dimension(); ++i)
    if (space.occupation_of(i, mode) == space.photon_cutoff()) p += std::norm(psi[static_cast<Eigen::Index>(i)]);
  return p;
}

inline double electron_edge_population(const TruncatedSpace& space, const Vector& psi) {
  double p = 0.0;
  const int M = space.electron_half_width();
  for (std::size_t i = 0; i < space.dimension(); ++i)
    if (std::abs(space.level_of(i)) == M) p += std::norm(psi[static_cast<Eigen::Index>(i)]);
  return p;
}

/// S (electron x vacuum). Throws TruncationError when the initial ladder does
/// not fit or the final state populates a truncation edge above 1e-8.
inline Evolution evolve(const TruncatedSpace& space, const LadderState& electron) {
  const int J = electron.cutoff();
  int top = 1;
  for (const auto& m : space.modes()) top = std::max(top, m.harmonic);
  if (J + top > space.electron_half_width())
    throw TruncationError("electron ladder does not fit inside the oracle space", 1.0);
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  const std::vector<int> vacuum(space.modes().size(), 0);
  double mean_level = 0.0;
  for (int j = -J; j <= J; ++j) {
    psi[static_cast<Eigen::Index>(space.index(j, vacuum))] = electron[j];
    mean_level += j * std::norm(electron[j]);
  }
  mean_level /= electron.norm_squared();
  Vector out = expm_action(build_generator(space), psi);
  for (std::size_t k = 0; k < space.modes().size(); ++k) {
    const double leak = fock_edge_population(space, out, k);
    if (leak > leakage_tolerance)
      throw TruncationError("photon cutoff too small: top Fock population " + std::to_string(leak), leak);
  }
  if (const double edge = electron_edge_population(space, out); edge > leakage_tolerance)
    throw TruncationError("electron buffer too small: edge population " + std::to_string(edge), edge);
  return {space, std::move(out), mean_level};
}

/// a_k applied to a state vector.
inline Vector apply_annihilation(const TruncatedSpace& space, const Vector& psi, std::size_t mode) {
  Vector out = Vector::Zero(psi.size());
  const std::size_t stride = space.mode_stride(mode);
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const int n = space.occupation_of(i, mode);
    if (n == 0) continue;
    out[static_cast<Eigen::Index>(i - stride)] = std::sqrt(static_cast<double>(n)) * psi[static_cast<Eigen::Index>(i)];
  }
  return out;
}

struct ModeObservables {
  complex mean_a;
  double mean_n = 0.0;
  std::vector<complex> central_moments;  ///< <(a - <a>)^N> for N = 1 .. max_order
};

struct Observables {
  std::vector<ModeObservables> modes;
  std::vector<std::vector<complex>> normal;     ///< <a_k^dag a_l>
  std::vector<std::vector<complex>> anomalous;  ///< <a_k a_l>
  double norm = 0.0;
  double electron_mean_level = 0.0;
  double level_drop = 0.0;  ///< initial minus final mean electron level
};

inline Observables observables(const Evolution& evo, int max_order = 3) {
  const auto& space = evo.space;
  const auto& psi = evo.state;
  const std::size_t K = space.modes().size();
  Observables obs;
  obs.norm = psi.norm();
  std::vector<Vector> lowered(K);
  for (std::size_t k = 0; k < K; ++k) lowered[k] = apply_annihilation(space, psi, k);
  for (std::size_t k = 0; k < K; ++k) {
    ModeObservables m;
    m.mean_a = psi.dot(lowered[k]);  // Eigen's dot conjugates the left operand
    m.mean_n = lowered[k].squaredNorm();
    Vector w = psi;
    for (int N = 1; N <= max_order; ++N) {
      w = apply_annihilation(space, w, k) - m.mean_a * w;
      m.central_moments.push_back(psi.dot(w));
    }
    obs.modes.push_back(std::move(m));
  }
  obs.normal.assign(K, std::vector<complex>(K));
  obs.anomalous.assign(K, std::vector<complex>(K));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < K; ++l) {
      obs.normal[k][l] = lowered[k].dot(lowered[l]);
      obs.anomalous[k][l] = psi.dot(apply_annihilation(space, lowered[l], k));
    }
  }
  double level = 0.0;
  for (std::size_t i = 0; i < space.dimension(); ++i)
    level += space.level_of(i) * std::norm(psi[static_cast<Eigen::Index>(i)]);
  obs.electron_mean_level = level / psi.squaredNorm();
  obs.level_drop = evo.initial_mean_level - obs.electron_mean_level;
  return obs;
}

}  // namespace clc::oracle
