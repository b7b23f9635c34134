#pragma once

// Generative model of the three beams: three multimode twin-beam links (1-2,
// 2-3, 3-1) sharing one pair level, plus independent multimode thermal noise
// in each beam.

#include <cmath>
#include <limits>

#include "tribeam/errors.hpp"
#include "tribeam/invariants.hpp"
#include "tribeam/photonics/moments.hpp"
#include "tribeam/photonics/series.hpp"

namespace tribeam::photonics {

struct MultimodeModel {
  /// effective number of modes per beam and per twin-beam link
  double modes = 6.7;
  /// mean photon-pair number of one link (summed over its modes); each beam
  /// carries 2 * pair_mean correlated photons
  double pair_mean = 0.4;
  /// mean noise photon number per beam
  double noise_mean = 0.0;
  /// number of thermal modes carrying the noise of one beam; 0 means Poissonian noise
  double noise_modes = 180.0;
  bool symmetrize = true;

  void validate() const {
    if (!(modes > 0.0)) throw ConfigError("mode number must be positive");
    if (!(pair_mean >= 0.0)) throw ConfigError("pair mean must be non-negative");
    if (!(noise_mean >= 0.0)) throw ConfigError("noise mean must be non-negative");
    if (!(noise_modes >= 0.0)) throw ConfigError("noise mode number must be non-negative");
  }

  double pair_per_mode() const { return pair_mean / modes; }
  double noise_per_mode() const { return noise_mean / modes; }
  double beam_mean() const { return 2.0 * pair_mean + noise_mean; }
};

/// Detector pair used in the experiment; beams alternate between the two roles.
inline DetectorSpec signal_detector() { return {0.274, 2.8e-3}; }
inline DetectorSpec idler_detector() { return {0.324, 3.8e-3}; }

/// Symmetrized detectors average the two roles; otherwise beams 1 and 3 use the
/// signal detector and beam 2 the idler detector.
inline DetectorSet default_detectors(bool symmetrize) {
  const DetectorSpec s = signal_detector(), i = idler_detector();
  if (symmetrize) {
    const DetectorSpec avg{0.5 * (s.efficiency + i.efficiency), 0.5 * (s.dark_rate + i.dark_rate)};
    return {avg, avg, avg};
  }
  return {s, i, s};
}

inline DetectorSet ideal_detectors() { return {DetectorSpec{}, DetectorSpec{}, DetectorSpec{}}; }

/// Beam-level factorial-cumulant generating function ln <prod (1 + s_j)^{n_j}>.
inline Series3 model_cumulant_series(const MultimodeModel& m) {
  m.validate();
  const double b = m.pair_per_mode();
  Series3 k;
  const Series3 s[3] = {Series3::variable(0), Series3::variable(1), Series3::variable(2)};
  // one geometric pair count per mode and link: pgf 1 / (1 - b (z_j z_k - 1))
  for (auto [j, l] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 0}}) {
    const Series3 u = s[j] + s[l] + s[j] * s[l];
    k -= m.modes * log1p(u * (-b));
  }
  for (int j = 0; j < 3; ++j) {
    if (m.noise_modes > 0.0)
      k -= m.noise_modes * log1p(s[j] * (-m.noise_mean / m.noise_modes));
    else
      k += m.noise_mean * s[j];
  }
  return k;
}

/// Exact beam-level intensity moments of the photons (before detection).
inline MomentTable model_beam_moments(const MultimodeModel& m) {
  return table_from_generating(expm(model_cumulant_series(m)), Scope::PerBeam, kMaxOrder);
}

inline MomentTable model_mode_moments(const MultimodeModel& m) {
  return reduce_per_mode(model_beam_moments(m), m.modes);
}

/// Gaussian state reproducing the per-mode first moments and the pair
/// correlation of the model: a = 1 + 2<w>, c+- = +-2 sqrt(b (1 + b)).
inline StandardFormParams implied_gaussian(double pair_per_mode, double noise_per_mode) {
  const double b = pair_per_mode;
  const double d = std::sqrt(b * (1.0 + b));
  return {1.0 + 2.0 * (2.0 * b + noise_per_mode), 2.0 * d, -2.0 * d};
}

inline StandardFormParams implied_gaussian(const MultimodeModel& m) {
  m.validate();
  return implied_gaussian(m.pair_per_mode(), m.noise_per_mode());
}

}  // namespace tribeam::photonics
