#pragma once

// First-order propagation of invariant standard errors through any scalar
// function of the invariants, by finite-difference sensitivities.

#include <cmath>
#include <limits>
#include <optional>

#include "tribeam/invariants.hpp"

namespace tribeam {

struct Measured {
  double value = 0.0;
  std::optional<double> error;
};

namespace detail {

template <class F>
std::optional<double> sensitivity(F& f, StateInvariants inv, double StateInvariants::*field, double base, double step) {
  const double x0 = inv.*field;
  auto eval = [&](double x) -> std::optional<double> {
    inv.*field = x;
    try {
      return f(static_cast<const StateInvariants&>(inv));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  const auto up = eval(x0 + step), dn = eval(x0 - step);
  if (up && dn) return (*up - *dn) / (2.0 * step);
  if (up) return (*up - base) / step;
  if (dn) return (base - *dn) / step;
  return std::nullopt;
}

}  // namespace detail

/// Evaluates f(inv); when inv carries errors, attaches sqrt(sum (df/dx_i sigma_i)^2)
/// treating the invariants as uncorrelated. The error is NaN if no derivative
/// can be formed inside the domain.
template <class F>
Measured propagate(F f, const StateInvariants& inv, double rel_step = 1e-6) {
  Measured m{f(inv), std::nullopt};
  if (!inv.errors) return m;
  const InvariantErrors& e = *inv.errors;
  double var = 0.0;
  auto add = [&](double StateInvariants::*field, double sigma) {
    if (sigma <= 0.0) return;
    const double step = rel_step * std::max(1.0, std::abs(inv.*field));
    const auto d = detail::sensitivity(f, inv, field, m.value, step);
    var += d ? (*d * sigma) * (*d * sigma) : std::numeric_limits<double>::quiet_NaN();
  };
  add(&StateInvariants::mu1, e.mu1);
  add(&StateInvariants::mu2, e.mu2);
  add(&StateInvariants::delta2, e.delta2);
  m.error = std::sqrt(var);
  return m;
}

}  // namespace tribeam
