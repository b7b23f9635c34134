#pragma once

// Joint photocount histograms and photon-number distributions of three beams,
// their moments and their on-disk formats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "tribeam/errors.hpp"
#include "tribeam/photonics/moments.hpp"

namespace tribeam::photonics {

/// Sparse joint frequencies f(c1, c2, c3); total() is the realization count N.
struct PhotocountHistogram {
  std::map<Index3, std::uint64_t> counts;

  void add(const Index3& c, std::uint64_t n = 1) {
    if (c[0] < 0 || c[1] < 0 || c[2] < 0) throw DataError("negative photocount");
    if (n) counts[c] += n;
  }
  void merge(const PhotocountHistogram& o) {
    for (const auto& [c, n] : o.counts) counts[c] += n;
  }
  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& kv : counts) n += kv.second;
    return n;
  }
  bool empty() const { return counts.empty(); }
  Index3 max_counts() const {
    Index3 m{0, 0, 0};
    for (const auto& kv : counts)
      for (int j = 0; j < 3; ++j) m[j] = std::max(m[j], kv.first[j]);
    return m;
  }
  bool operator==(const PhotocountHistogram& o) const { return counts == o.counts; }
};

/// Sparse joint probabilities p(n1, n2, n3) with a per-beam cutoff.
struct PhotonNumberDistribution {
  std::map<Index3, double> probabilities;
  Index3 cutoff{0, 0, 0};
  /// probability mass that the reconstruction could not place below the cutoff
  double tail_mass = 0.0;

  double total() const {
    double s = 0.0;
    for (const auto& kv : probabilities) s += kv.second;
    return s;
  }
};

inline PhotonNumberDistribution to_distribution(const PhotocountHistogram& h) {
  if (h.empty()) throw DataError("empty histogram");
  PhotonNumberDistribution d;
  const double n = static_cast<double>(h.total());
  for (const auto& [c, f] : h.counts) d.probabilities[c] = f / n;
  d.cutoff = h.max_counts();
  return d;
}

namespace detail {

template <class Map, class Weight>
MomentTable raw_moments_of(const Map& m, double norm, int max_order, Weight weight) {
  MomentTable t;
  t.scope = Scope::Raw;
  t.max_order = max_order;
  for (const auto& k : multi_indices())
    if (total_order(k) <= max_order) t.entries[k] = 0.0;
  for (const auto& [c, f] : m) {
    const double w = weight(f) / norm;
    double p0[kMaxOrder + 1], p1[kMaxOrder + 1], p2[kMaxOrder + 1];
    p0[0] = p1[0] = p2[0] = 1.0;
    for (int i = 1; i <= max_order; ++i) {
      p0[i] = p0[i - 1] * c[0];
      p1[i] = p1[i - 1] * c[1];
      p2[i] = p2[i - 1] * c[2];
    }
    for (auto& [k, v] : t.entries) v += w * p0[k[0]] * p1[k[1]] * p2[k[2]];
  }
  return t;
}

}  // namespace detail

/// Raw moments <n1^k1 n2^k2 n3^k3>. Warns when the tail beyond the cutoff could
/// bias the highest-order moments by more than `tail_tolerance`.
inline MomentTable photon_moments(const PhotonNumberDistribution& p, int max_order = kMaxOrder,
                                  double tail_tolerance = 1e-6) {
  if (max_order > kMaxOrder) throw DomainError("photon_moments: max_order must be <= 6");
  MomentTable t = detail::raw_moments_of(p.probabilities, 1.0, max_order, [](double f) { return f; });
  const int cmax = std::max({p.cutoff[0], p.cutoff[1], p.cutoff[2], 1});
  if (p.tail_mass * std::pow(static_cast<double>(cmax), max_order) > tail_tolerance)
    t.warnings.push_back("cutoff: tail mass " + tribeam::detail::fmt(p.tail_mass) + " beyond cutoff " +
                         std::to_string(cmax) + " may bias order-" + std::to_string(max_order) + " moments");
  return t;
}

inline MomentTable photon_moments(const PhotocountHistogram& h, int max_order = kMaxOrder) {
  if (h.empty()) throw DataError("empty histogram");
  return detail::raw_moments_of(h.counts, static_cast<double>(h.total()), max_order,
                                [](std::uint64_t f) { return static_cast<double>(f); });
}

/// Sorted CSV with header c1,c2,c3,count.
inline void write_csv(const PhotocountHistogram& h, std::ostream& os) {
  os << "c1,c2,c3,count\n";
  for (const auto& [c, n] : h.counts) os << c[0] << ',' << c[1] << ',' << c[2] << ',' << n << '\n';
}

inline PhotocountHistogram read_csv(std::istream& is) {
  PhotocountHistogram h;
  std::string line;
  if (!std::getline(is, line)) throw DataError("histogram CSV is empty");
  if (line.rfind("c1,c2,c3,count", 0) != 0) throw DataError("histogram CSV header must be c1,c2,c3,count");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    long long c1, c2, c3;
    unsigned long long n;
    char s1, s2, s3;
    if (!(ls >> c1 >> s1 >> c2 >> s2 >> c3 >> s3 >> n) || s1 != ',' || s2 != ',' || s3 != ',')
      throw DataError("malformed histogram CSV line " + std::to_string(lineno));
    h.add({static_cast<int>(c1), static_cast<int>(c2), static_cast<int>(c3)}, n);
  }
  return h;
}

inline void save_csv(const PhotocountHistogram& h, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  write_csv(h, os);
  if (!os) throw IoError("write failed: " + path);
}

inline PhotocountHistogram load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  return read_csv(is);
}

namespace detail {
inline constexpr char kCacheMagic[4] = {'T', 'B', 'H', '1'};
}

/// Compact binary cache: magic, entry count, then (int32 c1, c2, c3, uint64 count).
inline void save_binary(const PhotocountHistogram& h, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(detail::kCacheMagic, 4);
  const std::uint64_t n = h.counts.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (const auto& [c, f] : h.counts) {
    const std::int32_t idx[3] = {c[0], c[1], c[2]};
    os.write(reinterpret_cast<const char*>(idx), sizeof idx);
    os.write(reinterpret_cast<const char*>(&f), sizeof f);
  }
  if (!os) throw IoError("write failed: " + path);
}

inline PhotocountHistogram load_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  char magic[4];
  std::uint64_t n = 0;
  if (!is.read(magic, 4) || std::string(magic, 4) != std::string(detail::kCacheMagic, 4))
    throw DataError("not a histogram cache: " + path);
  if (!is.read(reinterpret_cast<char*>(&n), sizeof n)) throw DataError("truncated histogram cache: " + path);
  PhotocountHistogram h;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::int32_t idx[3];
    std::uint64_t f;
    if (!is.read(reinterpret_cast<char*>(idx), sizeof idx) || !is.read(reinterpret_cast<char*>(&f), sizeof f))
      throw DataError("truncated histogram cache: " + path);
    h.add({idx[0], idx[1], idx[2]}, f);
  }
  return h;
}

}  // namespace tribeam::photonics
