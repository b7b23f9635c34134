#pragma once

// Monte Carlo realizations of the three-beam field and of its detection.
// Work is split into fixed-size blocks with seeds derived from (seed, block),
// so results do not depend on the number of threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "tribeam/errors.hpp"
#include "tribeam/photonics/histogram.hpp"
#include "tribeam/photonics/model.hpp"

namespace tribeam::photonics {

inline constexpr std::uint64_t kBlockSize = 1u << 16;

namespace detail {

inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

/// Runs fn(block_index, first, count, histogram&) over blocks and merges the
/// block histograms in block order.
template <class Fn>
PhotocountHistogram run_blocks(std::uint64_t n, int threads, Fn fn) {
  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<PhotocountHistogram> parts(blocks);
  auto work = [&](std::uint64_t b) {
    const std::uint64_t first = b * kBlockSize;
    fn(b, first, std::min(kBlockSize, n - first), parts[b]);
  };
  threads = std::max(1, threads);
  if (threads == 1 || blocks < 2) {
    for (std::uint64_t b = 0; b < blocks; ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::uint64_t b = t; b < blocks; b += threads) work(b);
      });
    for (auto& th : pool) th.join();
  }
  PhotocountHistogram out;
  for (const auto& p : parts) out.merge(p);
  return out;
}

/// Sum of `modes` iid geometric counts with mean `mean_per_mode` each.
class MultimodeThermal {
 public:
  MultimodeThermal(int modes, double mean_per_mode)
      : active_(modes > 0 && mean_per_mode > 0.0), nb_(std::max(1, modes), 1.0 / (1.0 + std::max(0.0, mean_per_mode))) {}
  template <class Rng>
  int operator()(Rng& rng) {
    return active_ ? nb_(rng) : 0;
  }

 private:
  bool active_;
  std::negative_binomial_distribution<int> nb_;
};

}  // namespace detail

/// Integer mode count used for sampling; per-mode means are rescaled so that
/// beam-level means are preserved.
inline int sampling_modes(double modes) { return std::max(1, static_cast<int>(std::lround(modes))); }

/// True photon numbers of N realizations: per link a multimode twin-beam pair
/// count added to both linked beams, plus per-beam multimode thermal noise.
inline PhotocountHistogram sample_photons(const MultimodeModel& m, std::uint64_t n, std::uint64_t seed, int threads = 1) {
  m.validate();
  if (n < 1) throw ConfigError("number of realizations must be at least 1");
  const int modes = sampling_modes(m.modes);
  const double b = m.pair_mean / modes;
  const int noise_modes = m.noise_modes > 0.0 ? std::max(1, static_cast<int>(std::lround(m.noise_modes))) : 0;
  return detail::run_blocks(n, threads, [&](std::uint64_t block, std::uint64_t, std::uint64_t count, PhotocountHistogram& h) {
    auto rng = detail::block_engine(seed, 1, block);
    detail::MultimodeThermal pairs(modes, b);
    detail::MultimodeThermal noise(noise_modes, noise_modes ? m.noise_mean / noise_modes : 0.0);
    std::poisson_distribution<int> poisson_noise(std::max(m.noise_mean, 1e-300));
    const bool poisson = noise_modes == 0 && m.noise_mean > 0.0;
    for (std::uint64_t i = 0; i < count; ++i) {
      const int p12 = pairs(rng), p23 = pairs(rng), p31 = pairs(rng);
      Index3 c{p12 + p31, p12 + p23, p23 + p31};
      for (int j = 0; j < 3; ++j) c[j] += poisson ? poisson_noise(rng) : noise(rng);
      h.add(c);
    }
  });
}

/// Binomial loss with the beam's efficiency followed by Poissonian dark counts.
inline PhotocountHistogram apply_detector(const PhotocountHistogram& photons, const DetectorSet& det, std::uint64_t seed) {
  for (const auto& d : det) d.validate();
  // realizations are laid out in histogram order so blocks are reproducible
  std::vector<std::pair<Index3, std::uint64_t>> cells(photons.counts.begin(), photons.counts.end());
  std::vector<std::uint64_t> offsets(cells.size() + 1, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) offsets[i + 1] = offsets[i] + cells[i].second;
  const std::uint64_t n = offsets.back();
  if (n == 0) return {};
  return detail::run_blocks(n, 1, [&](std::uint64_t block, std::uint64_t first, std::uint64_t count, PhotocountHistogram& h) {
    auto rng = detail::block_engine(seed, 2, block);
    std::array<std::poisson_distribution<int>, 3> dark;
    for (int j = 0; j < 3; ++j) dark[j] = std::poisson_distribution<int>(std::max(det[j].dark_rate, 1e-300));
    std::size_t cell = std::upper_bound(offsets.begin(), offsets.end(), first) - offsets.begin() - 1;
    for (std::uint64_t r = first; r < first + count; ++r) {
      while (r >= offsets[cell + 1]) ++cell;
      const Index3& nph = cells[cell].first;
      Index3 c{0, 0, 0};
      for (int j = 0; j < 3; ++j) {
        if (nph[j] > 0) c[j] = std::binomial_distribution<int>(nph[j], det[j].efficiency)(rng);
        if (det[j].dark_rate > 0.0) c[j] += dark[j](rng);
      }
      h.add(c);
    }
  });
}

/// sample_photons followed by apply_detector with derived seeds.
inline PhotocountHistogram simulate_counts(const MultimodeModel& m, const DetectorSet& det, std::uint64_t n,
                                           std::uint64_t seed, int threads = 1) {
  return apply_detector(sample_photons(m, n, seed, threads), det, seed ^ 0x9e3779b97f4a7c15ULL);
}

}  // namespace tribeam::photonics
