#pragma once

// Noisy GHZ/W reference states: the symmetric family fixed by (mu1, mu2) alone.

#include <cmath>
#include <string>

#include "tribeam/invariants.hpp"

namespace tribeam {

struct GhzwState {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double mu3 = 1.0;
  double delta2 = 2.0;
  StateInvariants invariants() const { return {mu1, mu2, delta2, mu3, {}}; }
};

inline GhzwState ghzw_from_marginals(double mu1, double mu2, const Tolerances& tol = {}) {
  mu2 = require_purity_domain(mu1, mu2, tol);
  const double r = mu2 / mu1;
  return {mu1, mu2, r * r * r, 1.0 / (mu1 * mu1) + mu1 * mu1 / (mu2 * mu2)};
}

enum class GhzwClass { Class1, Class4, Class5 };

inline std::string to_string(GhzwClass c) {
  switch (c) {
    case GhzwClass::Class1: return "class_1";
    case GhzwClass::Class4: return "class_4";
    default: return "class_5";
  }
}

struct GhzwThresholds {
  static double class1(double mu1) { return std::sqrt(mu1 * mu1 * mu1 / (2.0 - mu1)); }
  static double class5(double mu1) {
    const double m2 = mu1 * mu1;
    const double m6 = m2 * m2 * m2;
    return std::sqrt((5.0 * m2 * m2 + 3.0 * std::sqrt(m6 * (8.0 + m2))) / (18.0 - 4.0 * m2));
  }
  /// both coexistence inequalities hold above this mu2
  static double coexistence(double mu1) {
    return std::max(mu1 * std::sqrt((1.0 + mu1 * mu1) / (3.0 - mu1 * mu1)), mu1 / std::sqrt(3.0));
  }
};

inline GhzwClass ghzw_classify(double mu1, double mu2, const Tolerances& tol = {}) {
  mu2 = require_purity_domain(mu1, mu2, tol);
  if (!detail::at_or_below(mu2, GhzwThresholds::class1(mu1), tol)) return GhzwClass::Class1;
  if (detail::at_or_below(mu2, GhzwThresholds::class5(mu1), tol)) return GhzwClass::Class5;
  return GhzwClass::Class4;
}

struct CoexistenceResult {
  bool coexist = false;
  /// set when the strict inequalities are decided by the pure-vacuum tie rule
  bool boundary = false;
};

/// Bi- and tripartite entanglement coexist. At the vacuum corner mu1 = mu2 = 1
/// the first inequality is an equality; it is resolved as true and flagged.
inline CoexistenceResult coexistence(double mu1, double mu2, const Tolerances& tol = {}) {
  mu2 = require_purity_domain(mu1, mu2, tol);
  const double first = mu1 * std::sqrt((1.0 + mu1 * mu1) / (3.0 - mu1 * mu1));
  const bool second = mu1 < std::sqrt(3.0) * mu2;
  if (std::abs(mu1 - 1.0) <= tol.physical && std::abs(mu2 - 1.0) <= tol.physical) return {true, true};
  return {first < mu2 && second, false};
}

inline bool coexistence_check(double mu1, double mu2, const Tolerances& tol = {}) {
  return coexistence(mu1, mu2, tol).coexist;
}

/// Renyi-2 divergence between a state and its GHZ/W counterpart with the same
/// marginal purities. Zero on the GHZ/W family.
inline double kl_to_ghzw(const StateInvariants& inv, const Tolerances& tol = {}) {
  const double m1 = inv.mu1;
  const double m2 = require_purity_domain(inv.mu1, inv.mu2, tol);
  const double d = inv.delta2;
  const double m1sq = m1 * m1, m14 = m1sq * m1sq;
  const double g = detail::clamped_sqrt(d * d * m2 * m2 - 4.0, d * d * m2 * m2, tol, "kl_to_ghzw gamma_aux");
  const double f1 = detail::sq(m1sq * d - 4.0) * m2 * m2 - 4.0 * m14;
  const double f2 = m14 * m14 - 10.0 * m14 * m2 * m2 + 9.0 * m2 * m2 * m2 * m2;
  const double h1 = f1 * f2;
  const double h2 = 3.0 * (m2 * m2 - m14) * (8.0 * m2 + m1sq * g);
  const double h3 = 6.0 + d * d * (d * m1sq - 3.0) * m2 * m2 - 2.0 * m1sq * g / m2 + d * (3.0 - d * m1sq) * m2 * g;
  const double root_h1 = detail::clamped_sqrt(h1, std::abs(f2) * std::max(1.0, std::abs(f1)) * 16.0, tol, "kl_to_ghzw h1");
  if (!(h3 > 0.0)) throw DomainError("kl_to_ghzw: non-positive h3 " + detail::fmt(h3));
  return (h2 - 3.0 * root_h1) / (8.0 * m14 * m2) + std::log(std::sqrt(2.0) * m14 / (m2 * m2 * std::sqrt(h3)));
}

}  // namespace tribeam
