#pragma once

// Estimation of the state invariants from per-mode intensity moments at
// second, fourth and sixth order.

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tribeam/correlations.hpp"
#include "tribeam/covariance.hpp"
#include "tribeam/errors.hpp"
#include "tribeam/invariants.hpp"
#include "tribeam/photonics/model.hpp"
#include "tribeam/photonics/moments.hpp"
#include "tribeam/photonics/wick.hpp"

namespace tribeam::photonics {

struct EstimateOptions {
  /// FitError when the relative RMS moment residual exceeds this
  double fit_tolerance = 1.0;
  /// half-width of the residual-shrunk seralian interval in standard deviations
  double interval_sigmas = 2.0;
  Tolerances tol{};
};

struct StateEstimate {
  int order = 2;
  StateInvariants invariants;
  StandardFormParams params;
  /// admissible seralian window at the estimated (mu1, mu2)
  Interval delta2_window;
  /// window shrunk by the moment-matching residual and moment errors (orders 4, 6)
  std::optional<Interval> delta2_interval;
  /// relative RMS residual over the fitted statistics
  double residual = 0.0;
  bool clamped = false;
  std::string note;
  /// structural-model parameters per mode (order 2)
  std::optional<double> pair_per_mode, noise_per_mode;
};

namespace detail {

/// Standard-form parameters from the correlators <a^dag a> = B, <a_j^dag a_k> = E,
/// <a_j a_k> = D.
inline StandardFormParams params_from_bed(double b, double e, double d) {
  d = std::abs(d);
  return {1.0 + 2.0 * b, 2.0 * (e + d), 2.0 * (e - d)};
}

/// Minimal symplectic eigenvalue of the standard-form CM, closed form.
inline double min_symplectic_sf(const StandardFormParams& p) {
  const double n1 = (p.a - p.c_plus) * (p.a - p.c_minus);
  const double n2 = (p.a + 2.0 * p.c_plus) * (p.a + 2.0 * p.c_minus);
  return std::sqrt(std::max(0.0, std::min(n1, n2))) * ((n1 < 0.0 || n2 < 0.0) ? -1.0 : 1.0);
}

/// Scales the correlations (E, D) down until the CM is physical.
inline StandardFormParams clamp_physical(double b, double e, double d, bool& clamped) {
  StandardFormParams p = params_from_bed(b, e, d);
  if (min_symplectic_sf(p) >= 1.0) return p;
  clamped = true;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_symplectic_sf(params_from_bed(b, mid * e, mid * d)) >= 1.0) lo = mid; else hi = mid;
  }
  return params_from_bed(b, lo * e, lo * d);
}

inline StateInvariants invariants_of(const StandardFormParams& p) {
  StateInvariants inv = invariants_from_standard_form(p);
  inv.mu3 = assemble_cm(p).purity();
  return inv;
}

struct MomentFit : Eigen::DenseFunctor<double> {
  std::vector<Index3> keys;
  std::vector<double> data, scale;

  MomentFit(std::vector<Index3> k, std::vector<double> d, std::vector<double> s)
      : Eigen::DenseFunctor<double>(3, static_cast<int>(k.size())), keys(std::move(k)), data(std::move(d)), scale(std::move(s)) {}

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const int order = total_order(keys.back());
    const MomentTable m = moments_from_cm(params_from_bed(x(0), x(1), x(2)), order);
    for (std::size_t i = 0; i < keys.size(); ++i) f(i) = (m.at(keys[i]) - data[i]) / scale[i];
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    Eigen::VectorXd fp(values()), fm(values());
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(c)));
      Eigen::VectorXd xp = x, xm = x;
      xp(c) += h;
      xm(c) -= h;
      (*this)(xp, fp);
      (*this)(xm, fm);
      j.col(c) = (fp - fm) / (2.0 * h);
    }
    return 0;
  }
};

}  // namespace detail

/// Closed-form second-order fit of the twin-beam + noise structure: per-mode
/// pair mean b from <w_j w_k> - <w>^2 = b (1 + b) and noise n = <w> - 2b. The
/// returned invariants are those of the implied Gaussian state.
inline StateEstimate estimate_order2(const MomentTable& t, const EstimateOptions& opt = {}) {
  if (t.scope != Scope::PerMode) throw DataError("estimation expects a per-mode moment table");
  const MomentTable s = symmetrize(t);
  const double w = s(1, 0, 0);
  const double k11 = s(1, 1, 0) - w * w;
  StateEstimate e;
  e.order = 2;
  double b = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(0.0, k11)) - 1.0);
  if (k11 < 0.0) {
    e.clamped = true;
    e.note = "negative pair covariance; pair mean set to 0";
  }
  double n = w - 2.0 * b;
  if (n < 0.0) {
    e.clamped = true;
    e.note += std::string(e.note.empty() ? "" : "; ") + "negative noise mean clamped to 0";
    n = 0.0;
    b = 0.5 * std::max(0.0, w);
  }
  e.pair_per_mode = b;
  e.noise_per_mode = n;
  bool clamped = false;
  const double dd = std::sqrt(b * (1.0 + b));
  e.params = detail::clamp_physical(2.0 * b + n, 0.0, dd, clamped);
  if (clamped) {
    e.clamped = true;
    e.note += std::string(e.note.empty() ? "" : "; ") + "implied Gaussian clamped to the physical boundary";
  }
  e.invariants = detail::invariants_of(e.params);
  e.delta2_window = seralian_bounds(e.invariants.mu1, e.invariants.mu2, opt.tol);
  e.residual = 0.0;
  return e;
}

/// Least-squares match of (a, c+, c-) to all per-mode moments up to `order`.
inline StateEstimate estimate_by_matching(const MomentTable& t, int order, const EstimateOptions& opt = {}) {
  if (t.scope != Scope::PerMode) throw DataError("estimation expects a per-mode moment table");
  if (!t.has_order(order)) throw DataError("moment table lacks entries up to order " + std::to_string(order));
  const MomentTable s = symmetrize(t);
  const double w = s(1, 0, 0);

  std::vector<Index3> keys;
  std::vector<double> data, scale, rel_scale;
  for (const auto& k : multi_indices()) {
    const int d = total_order(k);
    if (d == 0 || d > order) continue;
    // one representative per permutation class
    if (!(k[0] >= k[1] && k[1] >= k[2])) continue;
    keys.push_back(k);
    data.push_back(s.at(k));
    const double floor = std::pow(std::max(w, 1e-6), d) * 1e-3 + 1e-300;
    rel_scale.push_back(std::abs(s.at(k)) + floor);
    double se = 0.0;
    if (t.std_errors) {
      auto it = t.std_errors->find(k);
      if (it != t.std_errors->end()) se = it->second;
    }
    scale.push_back(se > 0.0 ? se : rel_scale.back());
  }

  detail::MomentFit fit(keys, data, scale);
  const double k11 = std::max(0.0, s(1, 1, 0) - w * w);
  const double r = std::sqrt(k11);
  // the moments are nearly symmetric under E <-> D, so start on a ring of angles
  std::vector<std::array<double, 2>> starts;
  for (int k = 0; k <= 12; ++k) {
    const double phi = M_PI * k / 12.0;
    starts.push_back({r * std::cos(phi), r * std::sin(phi)});
  }

  Eigen::VectorXd best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (const auto& st : starts) {
    Eigen::VectorXd x(3);
    x << w, st[0], st[1];
    Eigen::LevenbergMarquardt<detail::MomentFit> lm(fit);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setGtol(0.0);
    lm.setMaxfev(2000);
    lm.minimize(x);
    Eigen::VectorXd f(fit.values());
    fit(x, f);
    if (f.norm() < best_norm) {
      best_norm = f.norm();
      best = x;
    }
  }

  StateEstimate e;
  e.order = order;
  const StandardFormParams raw = detail::params_from_bed(best(0), best(1), best(2));
  if (!(raw.a >= 1.0)) throw DomainError("fitted single-beam variance below vacuum: a = " + tribeam::detail::fmt(raw.a));
  bool clamped = false;
  e.params = detail::clamp_physical(best(0), best(1), best(2), clamped);
  if (clamped) {
    e.clamped = true;
    e.note = "fitted state unphysical (min symplectic eigenvalue " +
             tribeam::detail::fmt(detail::min_symplectic_sf(raw)) + "); clamped to the physical boundary";
  }

  // relative RMS residual, independent of the weighting used in the fit
  const MomentTable m = moments_from_cm(e.params, order);
  double ss = 0.0;
  for (std::size_t i = 0; i < keys.size(); ++i) ss += std::pow((m.at(keys[i]) - data[i]) / rel_scale[i], 2);
  e.residual = std::sqrt(ss / keys.size());
  if (e.residual > opt.fit_tolerance)
    throw FitError("order-" + std::to_string(order) + " moment matching residual " + tribeam::detail::fmt(e.residual) +
                       " exceeds tolerance " + tribeam::detail::fmt(opt.fit_tolerance),
                   e.residual);

  e.invariants = detail::invariants_of(e.params);
  if (order == 4) {
    e.invariants.mu1 = mu1_from_moments(s);
    e.invariants.mu3.reset();
    e.invariants.mu2 = std::clamp(e.invariants.mu2, e.invariants.mu1 * e.invariants.mu1, e.invariants.mu1);
  }
  e.delta2_window = seralian_bounds(e.invariants.mu1, e.invariants.mu2, opt.tol);

  // seralian uncertainty from the Gauss-Newton covariance of (B, E, D)
  Eigen::MatrixXd jac(fit.values(), 3);
  fit.df(best, jac);
  const double dof = std::max<double>(1.0, static_cast<double>(keys.size()) - 3.0);
  const double s2 = t.std_errors ? 1.0 : best_norm * best_norm / dof;
  const Eigen::MatrixXd info = jac.transpose() * jac;
  double sigma = 0.0;
  if (info.fullPivLu().isInvertible()) {
    const Eigen::MatrixXd cov = info.inverse() * s2;
    Eigen::Vector3d grad;
    for (int c = 0; c < 3; ++c) {
      const double hstep = 1e-6 * std::max(1.0, std::abs(best(c)));
      Eigen::VectorXd xp = best, xm = best;
      xp(c) += hstep;
      xm(c) -= hstep;
      auto d2 = [](const Eigen::VectorXd& x) {
        const StandardFormParams p = detail::params_from_bed(x(0), x(1), x(2));
        return 2.0 * p.a * p.a + 2.0 * p.c_plus * p.c_minus;
      };
      grad(c) = (d2(xp) - d2(xm)) / (2.0 * hstep);
    }
    sigma = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  } else {
    sigma = e.delta2_window.width();
  }
  const double d2 = std::clamp(e.invariants.delta2, e.delta2_window.min, e.delta2_window.max);
  e.invariants.delta2 = d2;
  const double half = opt.interval_sigmas * sigma;
  e.delta2_interval = Interval{std::max(e.delta2_window.min, d2 - half), std::min(e.delta2_window.max, d2 + half)};
  return e;
}

/// Estimate at analysis order 2, 4 or 6.
inline StateEstimate estimate_state_from_moments(const MomentTable& t, int order, const EstimateOptions& opt = {}) {
  switch (order) {
    case 2: return estimate_order2(t, opt);
    case 4:
    case 6: return estimate_by_matching(t, order, opt);
    default: throw ConfigError("analysis order must be 2, 4 or 6");
  }
}

/// Range of a quantity over a seralian interval at the estimated marginal purities.
inline Interval quantity_range(const StateEstimate& e, Quantity q, const Tolerances& tol = {}) {
  const Interval iv = e.delta2_interval.value_or(Interval{e.invariants.delta2, e.invariants.delta2});
  const double lo = evaluate(q, {e.invariants.mu1, e.invariants.mu2, iv.min, {}, {}}, tol);
  const double hi = evaluate(q, {e.invariants.mu1, e.invariants.mu2, iv.max, {}, {}}, tol);
  return {std::min(lo, hi), std::max(lo, hi)};
}

}  // namespace tribeam::photonics
