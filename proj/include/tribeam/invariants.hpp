#pragma once

// Universal invariants of symmetric three-beam Gaussian states and their
// conversions to the standard-form covariance parameters (a, c+, c-).

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "tribeam/errors.hpp"

namespace tribeam {

/// Numerical tolerances shared by all physicality checks.
struct Tolerances {
  /// relative slack for domain inequalities and symplectic eigenvalues
  double physical = 1e-9;
  /// square-root arguments in [-radicand * scale, 0] are clamped to zero
  double radicand = 1e-12;
};

/// One-sigma standard errors attached to experimentally estimated invariants.
struct InvariantErrors {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double delta2 = 0.0;
  double mu3 = 0.0;
};

/// (mu1, mu2, Delta2[, mu3]): one-beam purity, two-beam purity, two-beam
/// seralian and optionally the global three-beam purity.
struct StateInvariants {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double delta2 = 2.0;
  std::optional<double> mu3;
  std::optional<InvariantErrors> errors;
};

/// Standard-form entries: alpha = diag(a, a), gamma = diag(c_plus, c_minus).
struct StandardFormParams {
  double a = 1.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
};

struct Interval {
  double min = 0.0;
  double max = 0.0;
  bool contains(double x, double slack = 0.0) const { return x >= min - slack && x <= max + slack; }
  double width() const { return max - min; }
};

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

/// sqrt that tolerates round-off below zero relative to `scale`.
inline double clamped_sqrt(double arg, double scale, const Tolerances& tol, const char* what) {
  if (arg >= 0.0) return std::sqrt(arg);
  if (arg >= -tol.radicand * std::max(1.0, std::abs(scale))) return 0.0;
  throw DomainError(std::string(what) + ": negative square-root argument " + fmt(arg));
}

inline double sq(double x) { return x * x; }

/// Boundary tie rule for the region tables: values within rounding of a
/// threshold count as lying on it, and boundaries belong to the lower region.
inline bool at_or_below(double x, double threshold, const Tolerances& tol) {
  return x <= threshold + tol.radicand * std::max(1.0, std::abs(threshold));
}

}  // namespace detail

/// Validates 0 < mu1 <= 1 and mu1^2 <= mu2 <= mu1; returns mu2 clamped onto the
/// domain when it lies outside by less than the physical tolerance.
inline double require_purity_domain(double mu1, double mu2, const Tolerances& tol = {}) {
  using detail::fmt;
  if (!(mu1 > 0.0) || mu1 > 1.0 + tol.physical)
    throw DomainError("mu1 must lie in (0, 1], got " + fmt(mu1));
  if (!(mu2 > 0.0)) throw DomainError("mu2 must be positive, got " + fmt(mu2));
  const double lo = mu1 * mu1;
  const double hi = std::min(mu1, 1.0);
  if (mu2 < lo * (1.0 - tol.physical))
    throw DomainError("mu2 = " + fmt(mu2) + " below mu1^2 = " + fmt(lo) + " (margin " + fmt(mu2 - lo) + ")");
  if (mu2 > hi * (1.0 + tol.physical))
    throw DomainError("mu2 = " + fmt(mu2) + " above mu1 = " + fmt(hi) + " (margin " + fmt(hi - mu2) + ")");
  return std::clamp(mu2, lo, hi);
}

/// Lower branch switch of the seralian window.
inline double seralian_branch_switch(double mu1) { return 4.0 * mu1 * mu1 / (3.0 + mu1 * mu1); }

/// Admissible seralian window [F(mu1, mu2), min{4/mu1^2 - 2/mu2, 1 + 1/mu2^2}].
inline Interval seralian_bounds(double mu1, double mu2, const Tolerances& tol = {}) {
  mu2 = require_purity_domain(mu1, mu2, tol);
  const double m1sq = mu1 * mu1;
  double lower;
  if (mu2 <= seralian_branch_switch(mu1)) {
    lower = 2.0 / mu2;
  } else {
    const double t1 = detail::sq(m1sq + 3.0) / (m1sq * m1sq);
    const double omega = detail::clamped_sqrt(t1 - 12.0 / (mu2 * mu2), t1, tol, "seralian_bounds omega");
    lower = (2.0 + 6.0 / m1sq - omega) / 3.0;
  }
  const double upper = std::min(4.0 / m1sq - 2.0 / mu2, 1.0 + 1.0 / (mu2 * mu2));
  // the window degenerates to a point on mu2 = mu1^2 and at the pure corner
  return {std::min(lower, upper), upper};
}

/// Invariants -> (a, c+, c-). Follows the c+ + c- >= 0 branch.
inline StandardFormParams standard_form(const StateInvariants& inv, const Tolerances& tol = {}) {
  const double mu1 = inv.mu1;
  const double mu2 = require_purity_domain(inv.mu1, inv.mu2, tol);
  const double d = inv.delta2;
  const double m1sq = mu1 * mu1;

  const double s_scale = m1sq * d * d;
  const double s = 0.25 * detail::clamped_sqrt(m1sq * (d * d - 4.0 / (mu2 * mu2)), s_scale, tol,
                                               "standard_form: Delta2 below 2/mu2");
  const double e1 = detail::sq(4.0 - m1sq * d) / m1sq;
  const double e2 = 4.0 * m1sq / (mu2 * mu2);
  const double eps = 0.25 * detail::clamped_sqrt(e1 - e2, std::max(e1, e2), tol,
                                                 "standard_form: Delta2 above 4/mu1^2 - 2/mu2");
  return {1.0 / mu1, s + eps, s - eps};
}

/// (a, c+, c-) -> (mu1, mu2, Delta2). mu3 is left unset.
inline StateInvariants invariants_from_standard_form(const StandardFormParams& p) {
  using detail::fmt;
  if (!(p.a >= 1.0)) throw DomainError("standard form requires a >= 1, got " + fmt(p.a));
  const double a2 = p.a * p.a;
  const double det2 = (a2 - p.c_plus * p.c_plus) * (a2 - p.c_minus * p.c_minus);
  if (!(det2 > 0.0)) throw DomainError("two-beam determinant is not positive: " + fmt(det2));
  StateInvariants inv;
  inv.mu1 = 1.0 / p.a;
  inv.mu2 = 1.0 / std::sqrt(det2);
  inv.delta2 = 2.0 * a2 + 2.0 * p.c_plus * p.c_minus;
  return inv;
}

namespace detail {

/// t >= 1 with mu2*Delta2 = t + 1/t; sqrt(mu2^2 Delta2^2 - 4) = t - 1/t.
inline double seralian_t(double mu2, double delta2, const Tolerances& tol) {
  const double x = mu2 * delta2;
  const double g = clamped_sqrt(x * x - 4.0, x * x, tol, "mu2^2 Delta2^2 - 4");
  return 0.5 * (x + g);
}

/// mu1^2 (3t^2 + 1) - 3 mu2 t: common factor of Det(sigma_3), the 2->1 purity
/// ratio and the 1->2 Schur eigenvalue.
inline double schur_factor(double mu1, double mu2, double t) {
  return mu1 * mu1 * (3.0 * t * t + 1.0) - 3.0 * mu2 * t;
}

}  // namespace detail

/// Det(sigma_3) as a function of (mu1, mu2, Delta2). Cancellation-free
/// rewriting of the closed form in terms of t (see detail::seralian_t).
inline double det_sigma3(double mu1, double mu2, double delta2, const Tolerances& tol = {}) {
  const double t = detail::seralian_t(mu2, delta2, tol);
  const double q = detail::schur_factor(mu1, mu2, t);
  return q / (mu1 * mu1 * mu2 * mu2 * mu2 * t * t * t);
}

/// Closed form exactly as usually printed; kept to cross-check det_sigma3.
inline double det_sigma3_printed(double mu1, double mu2, double d, const Tolerances& tol = {}) {
  const double g = detail::clamped_sqrt(mu2 * mu2 * d * d - 4.0, mu2 * mu2 * d * d, tol, "gamma_aux");
  const double m1sq = mu1 * mu1;
  const double m23 = mu2 * mu2 * mu2;
  const double num = 6.0 * mu2 - 3.0 * m23 * d * d + m1sq * m23 * d * d * d +
                     g * (3.0 * mu2 * mu2 * d - 2.0 * m1sq - m1sq * mu2 * mu2 * d * d);
  return num / (2.0 * m1sq * m23);
}

inline double purity3(double mu1, double mu2, double delta2, const Tolerances& tol = {}) {
  const double det = det_sigma3(mu1, mu2, delta2, tol);
  if (!(det > 0.0)) throw DomainError("Det(sigma_3) not positive: " + detail::fmt(det));
  return 1.0 / std::sqrt(det);
}

inline double purity3(const StateInvariants& inv, const Tolerances& tol = {}) {
  return purity3(inv.mu1, inv.mu2, inv.delta2, tol);
}

/// Seralian at which purity3 is stationary (c- = 0). purity3 decreases below it
/// and increases above it within the admissible window.
inline double purity3_turning_point(double mu1) { return 2.0 / (mu1 * mu1); }

struct Delta2Inversion {
  /// root on [Delta2_min, min(2/mu1^2, Delta2_max)], the branch holding GHZ/W states
  double delta2 = 0.0;
  /// second root on (2/mu1^2, Delta2_max] when mu3 is attained there as well
  std::optional<double> alternate;
};

/// Inverts purity3 in Delta2 by bisection on each monotone branch.
inline Delta2Inversion delta2_from_mu3(double mu1, double mu2, double mu3, const Tolerances& tol = {}) {
  const Interval w = seralian_bounds(mu1, mu2, tol);
  mu2 = require_purity_domain(mu1, mu2, tol);
  const double split = std::clamp(purity3_turning_point(mu1), w.min, w.max);
  auto f = [&](double d) { return purity3(mu1, mu2, d, tol); };

  const double at_min = f(w.min), at_split = f(split), at_max = f(w.max);
  const double hi_val = std::max(at_min, at_max);
  const double lo_val = at_split;
  const double slack = tol.physical * std::max(1.0, mu3);
  if (mu3 < lo_val - slack || mu3 > hi_val + slack) {
    throw RangeError("mu3 = " + detail::fmt(mu3) + " not attainable; range [" + detail::fmt(lo_val) + ", " +
                         detail::fmt(hi_val) + "]",
                     lo_val, hi_val);
  }

  // bisection on a monotone branch [lo, hi] where f(lo) >= f(hi) if decreasing
  auto bisect = [&](double lo, double hi, bool decreasing) {
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool above = f(mid) > mu3;
      if (above == decreasing) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  Delta2Inversion out;
  const bool on_lower = mu3 <= at_min + slack;
  const bool on_upper = split < w.max && mu3 <= at_max + slack;
  if (on_lower) {
    out.delta2 = bisect(w.min, split, true);
    if (on_upper) out.alternate = bisect(split, w.max, false);
  } else {
    out.delta2 = bisect(split, w.max, false);
  }
  return out;
}

/// Renyi-2 entropy S = -ln(mu) in nats.
inline double renyi2_entropy(double mu) {
  if (!(mu > 0.0)) throw DomainError("purity must be positive, got " + detail::fmt(mu));
  return -std::log(mu);
}

}  // namespace tribeam
