#pragma once

// Nonparametric bootstrap over realizations of a photocount histogram.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tribeam/errors.hpp"
#include "tribeam/photonics/histogram.hpp"
#include "tribeam/photonics/sampling.hpp"

namespace tribeam::photonics {

/// Histogram of N draws with replacement from the N realizations of h, drawn
/// as a multinomial over cells by sequential conditional binomials.
inline PhotocountHistogram resample(const PhotocountHistogram& h, std::mt19937_64& rng) {
  const std::uint64_t n = h.total();
  PhotocountHistogram out;
  std::uint64_t left = n;
  double mass_left = 1.0;
  for (auto it = h.counts.begin(); it != h.counts.end() && left > 0; ++it) {
    const double p = static_cast<double>(it->second) / static_cast<double>(n);
    const double q = std::next(it) == h.counts.end() ? 1.0 : std::min(1.0, p / mass_left);
    const std::uint64_t k = q >= 1.0 ? left : std::binomial_distribution<std::uint64_t>(left, q)(rng);
    out.add(it->first, k);
    left -= k;
    mass_left -= p;
  }
  return out;
}

struct BootstrapResult {
  std::vector<double> estimate;
  std::vector<double> std_error;
  int resamples = 0;
  /// resamples on which the statistic threw and were skipped
  int failures = 0;
};

/// Standard errors of a vector statistic. stat(histogram) -> std::vector<double>.
template <class Stat>
BootstrapResult bootstrap(const PhotocountHistogram& h, Stat stat, int resamples = 200, std::uint64_t seed = 1) {
  if (h.empty()) throw DataError("bootstrap: empty histogram");
  BootstrapResult r;
  r.estimate = stat(h);
  const std::size_t dim = r.estimate.size();
  std::vector<double> sum(dim, 0.0), sum2(dim, 0.0);
  int ok = 0;
  for (int b = 0; b < resamples; ++b) {
    auto rng = detail::block_engine(seed, 3, static_cast<std::uint64_t>(b));
    try {
      const std::vector<double> v = stat(resample(h, rng));
      for (std::size_t i = 0; i < dim; ++i) {
        sum[i] += v[i];
        sum2[i] += v[i] * v[i];
      }
      ++ok;
    } catch (const std::exception&) {
      ++r.failures;
    }
  }
  r.resamples = ok;
  r.std_error.assign(dim, std::nan(""));
  if (ok > 1)
    for (std::size_t i = 0; i < dim; ++i) {
      const double mean = sum[i] / ok;
      r.std_error[i] = std::sqrt(std::max(0.0, (sum2[i] - ok * mean * mean) / (ok - 1)));
    }
  return r;
}

}  // namespace tribeam::photonics
