#pragma once

// Normally ordered intensity moments of zero-mean Gaussian states by Wick
// pairing of creation/annihilation operators.

#include <array>
#include <complex>
#include <unordered_map>

#include "tribeam/covariance.hpp"
#include "tribeam/photonics/moments.hpp"

namespace tribeam::photonics {

/// Second-order correlators <a_j^dag a_k> and <a_j a_k> of a three-mode state.
struct Correlators {
  std::array<std::array<std::complex<double>, 3>, 3> n{};
  std::array<std::array<std::complex<double>, 3>, 3> m{};
};

/// With a = (x + i p) / 2 and vacuum CM = identity.
inline Correlators correlators_from_cm(const CovarianceMatrix& cm) {
  if (cm.modes() != 3) throw DomainError("correlators_from_cm expects a three-mode CM");
  const Matrix& s = cm.entries();
  Correlators c;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const double xx = s(2 * j, 2 * k), pp = s(2 * j + 1, 2 * k + 1);
      const double xp = s(2 * j, 2 * k + 1), px = s(2 * j + 1, 2 * k);
      // <x x> = sigma + i Omega; the commutator part cancels in normal order
      c.n[j][k] = std::complex<double>(xx + pp, xp - px) * 0.25;
      c.m[j][k] = std::complex<double>(xx - pp, xp + px) * 0.25;
      if (j == k) c.n[j][k] -= 0.5;
    }
  return c;
}

namespace detail {

/// Sum over perfect matchings of a normally ordered product holding cnt[j]
/// creation operators a_j^dag (types 0..2) and cnt[3 + j] annihilators a_j.
class WickEvaluator {
 public:
  explicit WickEvaluator(const Correlators& c) : c_(c) {}

  std::complex<double> operator()(std::array<int, 6> cnt) {
    int total = 0;
    for (int v : cnt) total += v;
    if (total == 0) return 1.0;
    if (total % 2) return 0.0;
    const int key = encode(cnt);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    int u = 0;
    while (cnt[u] == 0) ++u;
    cnt[u] -= 1;
    std::complex<double> sum = 0.0;
    for (int v = 0; v < 6; ++v) {
      if (cnt[v] == 0) continue;
      const std::complex<double> pair = contraction(u, v);
      if (pair == 0.0) continue;
      const double mult = cnt[v];
      cnt[v] -= 1;
      sum += mult * pair * (*this)(cnt);
      cnt[v] += 1;
    }
    memo_.emplace(key, sum);
    return sum;
  }

 private:
  std::complex<double> contraction(int u, int v) const {
    const bool du = u < 3, dv = v < 3;
    const int j = u % 3, k = v % 3;
    if (du && dv) return std::conj(c_.m[j][k]);
    if (!du && !dv) return c_.m[j][k];
    return du ? c_.n[j][k] : c_.n[k][j];
  }
  static int encode(const std::array<int, 6>& cnt) {
    int key = 0;
    for (int v : cnt) key = key * (2 * kMaxOrder + 1) + v;
    return key;
  }

  Correlators c_;
  std::unordered_map<int, std::complex<double>> memo_;
};

}  // namespace detail

/// Exact per-mode intensity moments <:w1^k1 w2^k2 w3^k3:> of the Gaussian state.
inline MomentTable moments_from_cm(const CovarianceMatrix& cm, int max_order = kMaxOrder) {
  if (max_order < 0 || max_order > kMaxOrder) throw DomainError("moments_from_cm: max_order must be in [0, 6]");
  detail::WickEvaluator wick(correlators_from_cm(cm));
  MomentTable t;
  t.scope = Scope::PerMode;
  t.max_order = max_order;
  for (const auto& k : multi_indices()) {
    if (total_order(k) > max_order) continue;
    t.entries[k] = wick({k[0], k[1], k[2], k[0], k[1], k[2]}).real();
  }
  return t;
}

inline MomentTable moments_from_cm(const StandardFormParams& p, int max_order = kMaxOrder) {
  return moments_from_cm(assemble_cm(p), max_order);
}

}  // namespace tribeam::photonics
