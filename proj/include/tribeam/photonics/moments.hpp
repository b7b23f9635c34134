#pragma once

// Joint moment tables: raw photon-number moments, normally ordered intensity
// (factorial) moments, factorial cumulants, per-mode reduction and the
// single-/two-beam statistics derived from them.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tribeam/errors.hpp"
#include "tribeam/invariants.hpp"
#include "tribeam/photonics/series.hpp"

namespace tribeam::photonics {

enum class Scope { Raw, PerBeam, PerMode };

inline std::string to_string(Scope s) {
  switch (s) {
    case Scope::Raw: return "raw";
    case Scope::PerBeam: return "per_beam";
    default: return "per_mode";
  }
}

/// Moments <x1^k1 x2^k2 x3^k3> for |k| <= max_order. Raw tables hold
/// photon-number moments; PerBeam / PerMode tables hold intensity moments.
struct MomentTable {
  Scope scope = Scope::PerBeam;
  int max_order = kMaxOrder;
  std::map<Index3, double> entries;
  std::optional<std::map<Index3, double>> std_errors;
  std::vector<std::string> warnings;

  double at(const Index3& k) const {
    auto it = entries.find(k);
    if (it == entries.end())
      throw DataError("moment (" + std::to_string(k[0]) + "," + std::to_string(k[1]) + "," + std::to_string(k[2]) +
                      ") not present");
    return it->second;
  }
  double operator()(int k1, int k2, int k3) const { return at({k1, k2, k3}); }
  bool has_order(int order) const {
    for (const auto& k : multi_indices())
      if (total_order(k) <= order && !entries.count(k)) return false;
    return true;
  }
};

/// Signed Stirling numbers of the first kind s(n, k) for n, k <= kMaxOrder.
inline double stirling1(int n, int k) {
  static const auto table = [] {
    std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> s{};
    s[0][0] = 1.0;
    for (int i = 1; i <= kMaxOrder; ++i)
      for (int j = 1; j <= i; ++j) s[i][j] = s[i - 1][j - 1] - (i - 1) * s[i - 1][j];
    return s;
  }();
  if (n < 0 || k < 0 || n > kMaxOrder || k > kMaxOrder) return 0.0;
  return table[n][k];
}

/// Stirling numbers of the second kind S(n, k).
inline double stirling2(int n, int k) {
  static const auto table = [] {
    std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> s{};
    s[0][0] = 1.0;
    for (int i = 1; i <= kMaxOrder; ++i)
      for (int j = 1; j <= i; ++j) s[i][j] = s[i - 1][j - 1] + j * s[i - 1][j];
    return s;
  }();
  if (n < 0 || k < 0 || n > kMaxOrder || k > kMaxOrder) return 0.0;
  return table[n][k];
}

namespace detail {

template <class Coef>
MomentTable convert_each_index(const MomentTable& t, Scope out_scope, Coef coef) {
  MomentTable r;
  r.scope = out_scope;
  r.max_order = t.max_order;
  r.warnings = t.warnings;
  for (const auto& k : multi_indices()) {
    if (total_order(k) > t.max_order) continue;
    double v = 0.0;
    for (int j0 = 0; j0 <= k[0]; ++j0)
      for (int j1 = 0; j1 <= k[1]; ++j1)
        for (int j2 = 0; j2 <= k[2]; ++j2) {
          const double c = coef(k[0], j0) * coef(k[1], j1) * coef(k[2], j2);
          if (c != 0.0) v += c * t.at({j0, j1, j2});
        }
    r.entries[k] = v;
  }
  return r;
}

}  // namespace detail

/// Raw photon-number moments -> normally ordered intensity moments, beam by beam.
inline MomentTable intensity_moments(const MomentTable& raw) {
  if (raw.scope != Scope::Raw) throw DataError("intensity_moments expects a raw photon-moment table");
  return detail::convert_each_index(raw, Scope::PerBeam, stirling1);
}

/// Inverse of intensity_moments.
inline MomentTable raw_moments(const MomentTable& w) {
  if (w.scope == Scope::Raw) throw DataError("raw_moments expects an intensity-moment table");
  return detail::convert_each_index(w, Scope::Raw, stirling2);
}

/// Generating function G(s) = <prod (1 + s_j)^{n_j}> = sum_k <W^k> s^k / k!.
inline Series3 generating_function(const MomentTable& t) {
  Series3 g;
  for (const auto& k : multi_indices())
    if (total_order(k) <= t.max_order) g[k] = t.at(k) / multi_factorial(k);
  return g;
}

inline MomentTable table_from_generating(const Series3& g, Scope scope, int max_order) {
  MomentTable r;
  r.scope = scope;
  r.max_order = max_order;
  for (const auto& k : multi_indices())
    if (total_order(k) <= max_order) r.entries[k] = g[k] * multi_factorial(k);
  return r;
}

/// Factorial cumulants kappa_k, stored with the same k! normalization as moments.
inline MomentTable factorial_cumulants(const MomentTable& t) {
  MomentTable c = table_from_generating(log(generating_function(t)), t.scope, t.max_order);
  c.warnings = t.warnings;
  return c;
}

inline MomentTable moments_from_cumulants(const MomentTable& c) {
  Series3 k;
  for (const auto& idx : multi_indices())
    if (total_order(idx) <= c.max_order && total_order(idx) > 0) k[idx] = c.at(idx) / multi_factorial(idx);
  MomentTable r = table_from_generating(expm(k), c.scope, c.max_order);
  r.warnings = c.warnings;
  return r;
}

namespace detail {

inline MomentTable scale_cumulants(const MomentTable& t, double factor, Scope scope) {
  MomentTable c = factorial_cumulants(t);
  for (auto& [k, v] : c.entries) v *= factor;
  c.scope = scope;
  return moments_from_cumulants(c);
}

}  // namespace detail

/// Per-beam table -> single typical mode, dividing every factorial cumulant by M.
inline MomentTable reduce_per_mode(const MomentTable& t, double modes) {
  if (!(modes > 0.0)) throw DomainError("reduce_per_mode: mode number must be positive");
  if (t.scope != Scope::PerBeam) throw DataError("reduce_per_mode expects a per-beam table");
  return detail::scale_cumulants(t, 1.0 / modes, Scope::PerMode);
}

/// Beam-level table of M independent identical modes.
inline MomentTable aggregate(const MomentTable& per_mode, double modes) {
  if (!(modes > 0.0)) throw DomainError("aggregate: mode number must be positive");
  return detail::scale_cumulants(per_mode, modes, Scope::PerBeam);
}

/// Detector parameters of one beam: binomial loss and Poissonian dark counts.
struct DetectorSpec {
  double efficiency = 1.0;
  double dark_rate = 0.0;
  void validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConfigError("detector efficiency must lie in [0, 1]");
    if (!(dark_rate >= 0.0)) throw ConfigError("dark count mean must be non-negative");
  }
};

using DetectorSet = std::array<DetectorSpec, 3>;

/// Intensity moments of photocounts given intensity moments of photons.
/// Thinning scales kappa_k by prod eta_j^{k_j}; dark counts add to kappa_{e_j}.
inline MomentTable detect_moments(const MomentTable& photons, const DetectorSet& det) {
  MomentTable c = factorial_cumulants(photons);
  for (auto& [k, v] : c.entries) {
    double f = 1.0;
    for (int j = 0; j < 3; ++j) f *= std::pow(det[j].efficiency, k[j]);
    v *= f;
    if (total_order(k) == 1)
      for (int j = 0; j < 3; ++j)
        if (k[j] == 1) v += det[j].dark_rate;
  }
  return moments_from_cumulants(c);
}

/// Inverse of detect_moments: photocount intensity moments -> photon moments.
inline MomentTable correct_detection(const MomentTable& counts, const DetectorSet& det) {
  for (const auto& d : det) {
    d.validate();
    if (d.efficiency <= 0.0) throw ConfigError("cannot correct for zero detection efficiency");
  }
  MomentTable c = factorial_cumulants(counts);
  for (auto& [k, v] : c.entries) {
    if (total_order(k) == 1)
      for (int j = 0; j < 3; ++j)
        if (k[j] == 1) v -= det[j].dark_rate;
    double f = 1.0;
    for (int j = 0; j < 3; ++j) f *= std::pow(det[j].efficiency, k[j]);
    v /= f;
  }
  return moments_from_cumulants(c);
}

inline Index3 unit(int beam, int power = 1) {
  Index3 k{0, 0, 0};
  k[beam] = power;
  return k;
}

/// F = 1 + (<W^2> - <W>^2) / <W>.
inline double fano(const MomentTable& t, int beam) {
  const double m = t.at(unit(beam));
  if (!(m > 0.0)) throw DomainError("fano: beam mean must be positive");
  return 1.0 + (t.at(unit(beam, 2)) - m * m) / m;
}

/// R_ij = 1 + <[Delta(W_i - W_j)]^2> / (<W_i> + <W_j>).
inline double noise_reduction(const MomentTable& t, int i, int j) {
  const double mi = t.at(unit(i)), mj = t.at(unit(j));
  if (!(mi + mj > 0.0)) throw DomainError("noise_reduction: zero mean intensity");
  Index3 kij{0, 0, 0};
  kij[i] += 1;
  kij[j] += 1;
  const double var = t.at(unit(i, 2)) - mi * mi + t.at(unit(j, 2)) - mj * mj - 2.0 * (t.at(kij) - mi * mj);
  return 1.0 + var / (mi + mj);
}

/// One-beam purity from per-mode intensity moments: [1 + 4<w> + 12<w>^2 - 4<w^2>]^{-1/2}.
inline double mu1_from_moments(const MomentTable& t, int beam = 0) {
  const double w = t.at(unit(beam)), w2 = t.at(unit(beam, 2));
  const double bracket = 1.0 + 4.0 * w + 12.0 * w * w - 4.0 * w2;
  if (!(bracket > 0.0)) throw DomainError("mu1_from_moments: non-positive bracket " + tribeam::detail::fmt(bracket));
  return 1.0 / std::sqrt(bracket);
}

/// Averages entries over beam permutations (the symmetric-state projection).
inline MomentTable symmetrize(const MomentTable& t) {
  static const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  MomentTable r = t;
  for (auto& [k, v] : r.entries) {
    double s = 0.0;
    for (const auto& p : perms) s += t.at({k[p[0]], k[p[1]], k[p[2]]});
    v = s / 6.0;
  }
  return r;
}

}  // namespace tribeam::photonics
