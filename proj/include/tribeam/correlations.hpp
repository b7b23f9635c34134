#pragma once

// Entanglement (PPT) and Gaussian steering quantifiers of symmetric three-beam
// states, their extremal values over the seralian window, and the region
// classification by marginal purities.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tribeam/covariance.hpp"
#include "tribeam/invariants.hpp"

namespace tribeam {

struct PptSpectrum {
  double v1 = 1.0;
  double v_plus = 1.0;
  double v_minus = 1.0;
};

/// Symplectic eigenvalues of the CM with one beam partially transposed.
/// v_minus^2 is taken as det / v_plus^2 to avoid cancellation in X - theta.
inline PptSpectrum ppt_eigenvalues(const StandardFormParams& p, const Tolerances& tol = {}) {
  const double a = p.a, cp = p.c_plus, cm = p.c_minus;
  const double scale = a * a;
  const double v1sq = (a - cm) * (a - cp);
  const double x = 2.0 * a * a - 3.0 * cm * cp + a * (cm + cp);
  const double th2 = 9.0 * a * a * cm * cm + 2.0 * a * cm * cp * (cm - 7.0 * a) + (9.0 * a - 7.0 * cm) * (a + cm) * cp * cp;
  const double theta = detail::clamped_sqrt(th2, scale * scale, tol, "ppt_eigenvalues theta");
  const double vp2 = 0.5 * (x + theta);
  const double prod = (a - cm) * (a + 2.0 * cm) * (a - cp) * (a + 2.0 * cp);
  PptSpectrum s;
  s.v1 = detail::clamped_sqrt(v1sq, scale, tol, "ppt_eigenvalues v1");
  s.v_plus = detail::clamped_sqrt(vp2, scale, tol, "ppt_eigenvalues v+");
  s.v_minus = s.v_plus > 0.0 ? detail::clamped_sqrt(prod, scale * scale, tol, "ppt_eigenvalues v-") / s.v_plus : 0.0;
  return s;
}

inline double log_negativity_3(const StandardFormParams& p, const Tolerances& tol = {}) {
  return std::max(0.0, -std::log(ppt_eigenvalues(p, tol).v_minus));
}

/// Two-beam negativity of any pair; symmetric in (c+, c-).
inline double log_negativity_2(const StandardFormParams& p) {
  const double arg = p.a * p.a - p.a * std::abs(p.c_minus - p.c_plus) - p.c_minus * p.c_plus;
  if (!(arg > 0.0)) throw DomainError("log_negativity_2: non-positive argument " + detail::fmt(arg));
  return std::max(0.0, -0.5 * std::log(arg));
}

/// Residual cotangle E_N3^2 - 2 E_N2^2.
inline double cotangle(const StandardFormParams& p, const Tolerances& tol = {}) {
  const double e3 = log_negativity_3(p, tol);
  const double e2 = log_negativity_2(p);
  return e3 * e3 - 2.0 * e2 * e2;
}

/// Two-beam purity ratio squared, (mu3/mu2)^2 = mu1^2 mu2 t^3 / Q.
inline double purity_ratio_2to1_sq(const StateInvariants& inv, const Tolerances& tol = {}) {
  const double mu2 = require_purity_domain(inv.mu1, inv.mu2, tol);
  const double t = detail::seralian_t(mu2, inv.delta2, tol);
  const double q = detail::schur_factor(inv.mu1, mu2, t);
  if (!(q > 0.0)) throw DomainError("steering: non-positive Schur factor " + detail::fmt(q));
  return inv.mu1 * inv.mu1 * mu2 * t * t * t / q;
}

/// Steering of beam A by the pair BC: max{0, ln(mu3/mu2)}.
inline double steering_2to1(const StateInvariants& inv, const Tolerances& tol = {}) {
  return std::max(0.0, 0.5 * std::log(purity_ratio_2to1_sq(inv, tol)));
}

/// Squared symplectic eigenvalue of the Schur complement for A -> BC steering.
inline double schur_nu_bar_sq(const StateInvariants& inv, const Tolerances& tol = {}) {
  const double mu2 = require_purity_domain(inv.mu1, inv.mu2, tol);
  const double t = detail::seralian_t(mu2, inv.delta2, tol);
  return detail::schur_factor(inv.mu1, mu2, t) / (t * t * mu2 * mu2);
}

/// Steering of the pair BC by beam A: max{0, -ln nu_bar}.
inline double steering_1to2(const StateInvariants& inv, const Tolerances& tol = {}) {
  const double nb2 = schur_nu_bar_sq(inv, tol);
  if (!(nb2 > 0.0)) throw DomainError("steering_1to2: non-positive Schur eigenvalue " + detail::fmt(nb2));
  return std::max(0.0, -0.5 * std::log(nb2));
}

/// One beam steering another: max{0, ln(mu2/mu1)}, identically zero on the domain.
inline double steering_1to1(double mu1, double mu2) { return std::max(0.0, std::log(mu2 / mu1)); }

inline double steering_2to1(const StandardFormParams& p, const Tolerances& tol = {}) {
  return steering_2to1(invariants_from_standard_form(p), tol);
}
inline double steering_1to2(const StandardFormParams& p, const Tolerances& tol = {}) {
  return steering_1to2(invariants_from_standard_form(p), tol);
}

enum class EntanglementRegion { RegionI, RegionII, FullyEntangled };
enum class SteeringRegion { Unsteerable, Coexistence, Steerable };
enum class SteeringDirection { OneToTwo, TwoToOne };
enum class Quantity { EN2, EN3, Cotangle, G12, G21, VMinus };

inline std::string to_string(EntanglementRegion r) {
  switch (r) {
    case EntanglementRegion::RegionI: return "region_i";
    case EntanglementRegion::RegionII: return "region_ii";
    default: return "fully_entangled";
  }
}

inline std::string to_string(SteeringRegion r) {
  switch (r) {
    case SteeringRegion::Unsteerable: return "unsteerable";
    case SteeringRegion::Coexistence: return "coexistence";
    default: return "steerable";
  }
}

inline std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::EN2: return "e_n2";
    case Quantity::EN3: return "e_n3";
    case Quantity::Cotangle: return "cotangle";
    case Quantity::G12: return "g_1to2";
    case Quantity::G21: return "g_2to1";
    default: return "v_minus";
  }
}

/// Purity thresholds separating the regions. Ties belong to the lower region.
struct RegionThresholds {
  static double region_i(double mu1) {
    const double m2 = mu1 * mu1;
    return (3.0 * m2 + std::sqrt(9.0 + 62.0 * m2 - 7.0 * m2 * m2) - 3.0) / (10.0 - 2.0 * m2);
  }
  static double fully_entangled(double mu1) { return mu1 / std::sqrt(2.0 - mu1 * mu1); }
  static double unsteerable_1to2(double mu1) { return 0.5 * (std::sqrt(16.0 * mu1 * mu1 + 9.0) - 3.0); }
  static double steerable_1to2(double mu1) { return std::sqrt(3.0) * mu1 / std::sqrt(4.0 - mu1 * mu1); }
  static double unsteerable_2to1(double mu1) { return seralian_branch_switch(mu1); }
  static double steerable_2to1(double mu1) { return std::sqrt(2.0) * mu1 / std::sqrt(3.0 - mu1 * mu1); }
};

inline EntanglementRegion classify_entanglement(double mu1, double mu2, const Tolerances& tol = {}) {
  mu2 = require_purity_domain(mu1, mu2, tol);
  if (detail::at_or_below(mu2, RegionThresholds::region_i(mu1), tol)) return EntanglementRegion::RegionI;
  if (!detail::at_or_below(mu2, RegionThresholds::fully_entangled(mu1), tol)) return EntanglementRegion::FullyEntangled;
  return EntanglementRegion::RegionII;
}

inline SteeringRegion classify_steering(double mu1, double mu2, SteeringDirection dir, const Tolerances& tol = {}) {
  mu2 = require_purity_domain(mu1, mu2, tol);
  const bool one_to_two = dir == SteeringDirection::OneToTwo;
  const double lo = one_to_two ? RegionThresholds::unsteerable_1to2(mu1) : RegionThresholds::unsteerable_2to1(mu1);
  const double hi = one_to_two ? RegionThresholds::steerable_1to2(mu1) : RegionThresholds::steerable_2to1(mu1);
  if (detail::at_or_below(mu2, lo, tol)) return SteeringRegion::Unsteerable;
  if (!detail::at_or_below(mu2, hi, tol)) return SteeringRegion::Steerable;
  return SteeringRegion::Coexistence;
}

/// Evaluates a quantity on the c+ + c- >= 0 representative of (mu1, mu2, Delta2).
inline double evaluate(Quantity q, const StateInvariants& inv, const Tolerances& tol = {}) {
  switch (q) {
    case Quantity::G12: return steering_1to2(inv, tol);
    case Quantity::G21: return steering_2to1(inv, tol);
    default: break;
  }
  const StandardFormParams p = standard_form(inv, tol);
  switch (q) {
    case Quantity::EN2: return log_negativity_2(p);
    case Quantity::EN3: return log_negativity_3(p, tol);
    case Quantity::Cotangle: return cotangle(p, tol);
    default: return ppt_eigenvalues(p, tol).v_minus;
  }
}

/// Extremal values over the seralian window, attained at its endpoints.
inline Interval correlation_bounds(double mu1, double mu2, Quantity q, const Tolerances& tol = {}) {
  const Interval w = seralian_bounds(mu1, mu2, tol);
  const double lo = evaluate(q, {mu1, mu2, w.min, {}, {}}, tol);
  const double hi = evaluate(q, {mu1, mu2, w.max, {}, {}}, tol);
  return {std::min(lo, hi), std::max(lo, hi)};
}

/// Two-beam Renyi-2 Kullback-Leibler divergence -2 ln mu1 + ln mu2.
inline double kl_divergence_2(double mu1, double mu2) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw DomainError("kl_divergence_2: purities must be positive");
  return -2.0 * std::log(mu1) + std::log(mu2);
}

/// Three-beam divergence between beam A and pair BC: -ln mu1 - ln mu2 + ln mu3.
inline double kl_divergence_3(double mu1, double mu2, double mu3) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0) || !(mu3 > 0.0)) throw DomainError("kl_divergence_3: purities must be positive");
  return -std::log(mu1) - std::log(mu2) + std::log(mu3);
}

struct EntanglementReport {
  double e_n3 = 0.0;
  double e_n2 = 0.0;
  double cotangle = 0.0;
  double v_minus = 1.0;
  std::optional<Interval> e_n3_bounds, e_n2_bounds, cotangle_bounds;
  EntanglementRegion region = EntanglementRegion::RegionI;
};

struct SteeringReport {
  double g_1to2 = 0.0;
  double g_2to1 = 0.0;
  std::optional<Interval> g_1to2_bounds, g_2to1_bounds;
  SteeringRegion region_1to2 = SteeringRegion::Unsteerable;
  SteeringRegion region_2to1 = SteeringRegion::Unsteerable;
};

inline EntanglementReport entanglement_report(const StateInvariants& inv, bool with_bounds = true,
                                              const Tolerances& tol = {}) {
  EntanglementReport r;
  const StandardFormParams p = standard_form(inv, tol);
  r.v_minus = ppt_eigenvalues(p, tol).v_minus;
  r.e_n3 = std::max(0.0, -std::log(r.v_minus));
  r.e_n2 = log_negativity_2(p);
  r.cotangle = r.e_n3 * r.e_n3 - 2.0 * r.e_n2 * r.e_n2;
  r.region = classify_entanglement(inv.mu1, inv.mu2, tol);
  if (with_bounds) {
    r.e_n3_bounds = correlation_bounds(inv.mu1, inv.mu2, Quantity::EN3, tol);
    r.e_n2_bounds = correlation_bounds(inv.mu1, inv.mu2, Quantity::EN2, tol);
    r.cotangle_bounds = correlation_bounds(inv.mu1, inv.mu2, Quantity::Cotangle, tol);
  }
  return r;
}

inline SteeringReport steering_report(const StateInvariants& inv, bool with_bounds = true, const Tolerances& tol = {}) {
  SteeringReport r;
  r.g_1to2 = steering_1to2(inv, tol);
  r.g_2to1 = steering_2to1(inv, tol);
  r.region_1to2 = classify_steering(inv.mu1, inv.mu2, SteeringDirection::OneToTwo, tol);
  r.region_2to1 = classify_steering(inv.mu1, inv.mu2, SteeringDirection::TwoToOne, tol);
  if (with_bounds) {
    r.g_1to2_bounds = correlation_bounds(inv.mu1, inv.mu2, Quantity::G12, tol);
    r.g_2to1_bounds = correlation_bounds(inv.mu1, inv.mu2, Quantity::G21, tol);
  }
  return r;
}

}  // namespace tribeam
