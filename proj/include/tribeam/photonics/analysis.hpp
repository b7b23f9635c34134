#pragma once

// Photocounts -> detector-corrected intensity moments -> per-mode moments ->
// invariant estimates, with bootstrap errors and the order-usability rule.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tribeam/photonics/bootstrap.hpp"

#include "tribeam/photonics/em.hpp"
#include "tribeam/photonics/estimate.hpp"
#include "tribeam/photonics/histogram.hpp"
#include "tribeam/photonics/moments.hpp"
#include "tribeam/propagation.hpp"

namespace tribeam::photonics {

/// An analysis order is usable when the relative bootstrap error of its
/// characteristic detector-corrected cross intensity moment, symmetrized over
/// beams, is below the threshold.
struct UsabilityRule {
  double max_relative_error = 0.05;
  static Index3 characteristic(int order) {
    switch (order) {
      case 2: return {1, 1, 0};
      case 4: return {2, 2, 0};
      default: return {2, 2, 2};
    }
  }
};

enum class Reconstruction { Moments, Em };

struct AnalysisOptions {
  DetectorSet detectors = default_detectors(true);
  double modes = 6.7;
  Reconstruction reconstruction = Reconstruction::Moments;
  EmOptions em{};
  int resamples = 200;
  std::uint64_t seed = 1;
  std::vector<int> orders{2, 4, 6};
  EstimateOptions estimate{};
  UsabilityRule usability{};
};

struct OrderResult {
  int order = 2;
  double characteristic_moment = 0.0;
  double relative_error = 0.0;
  bool usable = false;
  std::optional<StateEstimate> estimate;
  std::string error;
};

struct AnalysisResult {
  std::uint64_t realizations = 0;
  MomentTable beam;      // photon intensity moments per beam, detector-corrected
  MomentTable per_mode;  // with bootstrap std_errors
  Measured mu1, r12, fano1;
  std::vector<OrderResult> orders;
  std::vector<std::string> warnings;
};

/// Detector-corrected photon intensity moments of a photocount histogram,
/// either by exact inversion in factorial-cumulant space or via EM.
inline MomentTable corrected_beam_moments(const PhotocountHistogram& counts, const DetectorSet& det,
                                          Reconstruction how = Reconstruction::Moments, const EmOptions& em = {}) {
  if (how == Reconstruction::Em) {
    const EmResult r = em_reconstruct(counts, det, em);
    MomentTable t = em_intensity_moments(r);
    if (!r.warning.empty()) t.warnings.push_back(r.warning);
    return t;
  }
  return correct_detection(intensity_moments(photon_moments(counts)), det);
}

namespace detail {

/// Statistics bootstrapped together: mu1, R12, F1, characteristic moments of
/// orders 2/4/6, then every per-mode moment in multi_indices() order.
inline std::vector<double> analysis_statistics(const PhotocountHistogram& h, const DetectorSet& det, double modes) {
  const MomentTable beam = correct_detection(intensity_moments(photon_moments(h)), det);
  const MomentTable sym = symmetrize(beam);
  const MomentTable mode = reduce_per_mode(beam, modes);
  std::vector<double> v{mu1_from_moments(symmetrize(mode)), noise_reduction(beam, 0, 1), fano(beam, 0)};
  for (int order : {2, 4, 6}) v.push_back(sym.at(UsabilityRule::characteristic(order)));
  for (const auto& k : multi_indices()) v.push_back(mode.at(k));
  return v;
}

}  // namespace detail

inline AnalysisResult analyze(const PhotocountHistogram& counts, const AnalysisOptions& opt = {}) {
  if (counts.empty()) throw DataError("analyze: empty histogram");
  AnalysisResult r;
  r.realizations = counts.total();
  const BootstrapResult boot = bootstrap(
      counts, [&](const PhotocountHistogram& h) { return detail::analysis_statistics(h, opt.detectors, opt.modes); },
      opt.resamples, opt.seed);
  if (boot.failures) r.warnings.push_back(std::to_string(boot.failures) + " bootstrap resamples failed");

  r.beam = corrected_beam_moments(counts, opt.detectors, opt.reconstruction, opt.em);
  r.per_mode = reduce_per_mode(r.beam, opt.modes);
  for (const auto& w : r.beam.warnings) r.warnings.push_back(w);
  std::map<Index3, double> se;
  const std::size_t base = 6;
  for (std::size_t i = 0; i < multi_indices().size(); ++i) se[multi_indices()[i]] = boot.std_error[base + i];
  r.per_mode.std_errors = se;

  const MomentTable sym = symmetrize(r.per_mode);
  r.mu1 = {mu1_from_moments(sym), boot.std_error[0]};
  r.r12 = {noise_reduction(r.beam, 0, 1), boot.std_error[1]};
  r.fano1 = {fano(r.beam, 0), boot.std_error[2]};

  const MomentTable beam_sym = symmetrize(r.beam);
  for (int order : opt.orders) {
    OrderResult o;
    o.order = order;
    const int slot = order == 2 ? 3 : order == 4 ? 4 : 5;
    o.characteristic_moment = beam_sym.at(UsabilityRule::characteristic(order));
    o.relative_error = boot.std_error[slot] / std::max(std::abs(o.characteristic_moment), 1e-300);
    o.usable = o.relative_error < opt.usability.max_relative_error;
    try {
      o.estimate = estimate_state_from_moments(r.per_mode, order, opt.estimate);
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    r.orders.push_back(std::move(o));
  }
  return r;
}

}  // namespace tribeam::photonics
