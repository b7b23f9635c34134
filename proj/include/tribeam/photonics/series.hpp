#pragma once

// Truncated power series in three variables (total degree <= kMaxOrder), used
// for generating-function manipulations of joint factorial moments.

#include <array>
#include <cmath>
#include <vector>

namespace tribeam::photonics {

inline constexpr int kMaxOrder = 6;

using Index3 = std::array<int, 3>;

namespace detail {

struct SeriesLayout {
  std::vector<Index3> idx;
  std::array<std::array<std::array<int, kMaxOrder + 1>, kMaxOrder + 1>, kMaxOrder + 1> pos{};
  SeriesLayout() {
    for (auto& a : pos)
      for (auto& b : a) b.fill(-1);
    for (int d = 0; d <= kMaxOrder; ++d)
      for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j) {
          const int k = d - i - j;
          pos[i][j][k] = static_cast<int>(idx.size());
          idx.push_back({i, j, k});
        }
  }
};

inline const SeriesLayout& layout() {
  static const SeriesLayout l;
  return l;
}

}  // namespace detail

/// Multi-indices with |k| <= kMaxOrder, ordered by total degree.
inline const std::vector<Index3>& multi_indices() { return detail::layout().idx; }
inline int index_of(const Index3& k) { return detail::layout().pos[k[0]][k[1]][k[2]]; }
inline int total_order(const Index3& k) { return k[0] + k[1] + k[2]; }

class Series3 {
 public:
  Series3() : c_(multi_indices().size(), 0.0) {}

  static Series3 constant(double v) {
    Series3 s;
    s.c_[0] = v;
    return s;
  }
  static Series3 variable(int j) {
    Series3 s;
    Index3 k{0, 0, 0};
    k[j] = 1;
    s[k] = 1.0;
    return s;
  }

  double& operator[](const Index3& k) { return c_[index_of(k)]; }
  double operator[](const Index3& k) const { return c_[index_of(k)]; }
  double coeff(int flat) const { return c_[flat]; }
  double& coeff(int flat) { return c_[flat]; }
  std::size_t size() const { return c_.size(); }

  Series3& operator+=(const Series3& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Series3& operator-=(const Series3& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Series3& operator*=(double v) {
    for (double& x : c_) x *= v;
    return *this;
  }
  friend Series3 operator+(Series3 a, const Series3& b) { return a += b; }
  friend Series3 operator-(Series3 a, const Series3& b) { return a -= b; }
  friend Series3 operator*(Series3 a, double v) { return a *= v; }
  friend Series3 operator*(double v, Series3 a) { return a *= v; }

  friend Series3 operator*(const Series3& a, const Series3& b) {
    const auto& idx = multi_indices();
    Series3 r;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (a.c_[i] == 0.0) continue;
      const Index3& ki = idx[i];
      const int di = total_order(ki);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const Index3& kj = idx[j];
        if (di + total_order(kj) > kMaxOrder) break;
        if (b.c_[j] == 0.0) continue;
        r[{ki[0] + kj[0], ki[1] + kj[1], ki[2] + kj[2]}] += a.c_[i] * b.c_[j];
      }
    }
    return r;
  }

 private:
  std::vector<double> c_;
};

/// log(1 + x) for a series with zero constant term.
inline Series3 log1p(const Series3& x) {
  Series3 r, p = Series3::constant(1.0);
  for (int n = 1; n <= kMaxOrder; ++n) {
    p = p * x;
    r += p * ((n % 2 ? 1.0 : -1.0) / n);
  }
  return r;
}

/// exp(x) for a series with zero constant term.
inline Series3 expm(const Series3& x) {
  Series3 r = Series3::constant(1.0), p = Series3::constant(1.0);
  for (int n = 1; n <= kMaxOrder; ++n) {
    p = p * x * (1.0 / n);
    r += p;
  }
  return r;
}

/// log(g) for a series with constant term 1.
inline Series3 log(const Series3& g) {
  Series3 x = g;
  x[{0, 0, 0}] -= 1.0;
  return log1p(x);
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double multi_factorial(const Index3& k) { return factorial(k[0]) * factorial(k[1]) * factorial(k[2]); }

}  // namespace tribeam::photonics
