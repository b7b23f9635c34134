#pragma once

// Model curves of the structural twin-beam + noise field as functions of the
// noise level: invariants at a chosen analysis order and the derived
// entanglement, steering and GHZ/W labels.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tribeam/correlations.hpp"
#include "tribeam/ghzw.hpp"
#include "tribeam/photonics/estimate.hpp"
#include "tribeam/photonics/model.hpp"

namespace tribeam::photonics {

struct CurvePoint {
  double noise_mean = 0.0;
  int order = 2;
  std::optional<StateEstimate> estimate;
  std::optional<EntanglementReport> entanglement;
  std::optional<SteeringReport> steering;
  std::optional<GhzwClass> ghzw;
  std::optional<bool> coexist;
  std::string error;
  bool ok() const { return error.empty(); }
};

/// Per-mode state of the model at its noise level, estimated from exact model
/// moments at the given order. Failures are recorded, not thrown.
inline CurvePoint model_point(const MultimodeModel& m, int order, const EstimateOptions& opt = {}) {
  CurvePoint p;
  p.noise_mean = m.noise_mean;
  p.order = order;
  try {
    p.estimate = estimate_state_from_moments(model_mode_moments(m), order, opt);
    const StateInvariants& inv = p.estimate->invariants;
    p.entanglement = entanglement_report(inv, true, opt.tol);
    p.steering = steering_report(inv, true, opt.tol);
    p.ghzw = ghzw_classify(inv.mu1, inv.mu2, opt.tol);
    p.coexist = coexistence_check(inv.mu1, inv.mu2, opt.tol);
  } catch (const std::exception& e) {
    p.error = e.what();
  }
  return p;
}

inline std::vector<CurvePoint> noise_sweep(MultimodeModel m, const std::vector<double>& noise, int order,
                                           const EstimateOptions& opt = {}) {
  std::vector<CurvePoint> out;
  out.reserve(noise.size());
  for (double n : noise) {
    m.noise_mean = n;
    out.push_back(model_point(m, order, opt));
  }
  return out;
}

/// n evenly spaced values on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

/// Noise level in [lo, hi] where `holds` switches value, by bisection.
/// Empty when it has the same value at both ends.
inline std::optional<double> noise_threshold(MultimodeModel m, int order, const std::function<bool(const CurvePoint&)>& holds,
                                             double lo, double hi, double xtol = 1e-4, const EstimateOptions& opt = {}) {
  auto at = [&](double n) {
    m.noise_mean = n;
    return holds(model_point(m, order, opt));
  };
  const bool a = at(lo);
  if (at(hi) == a) return std::nullopt;
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) == a ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace tribeam::photonics
