#pragma once

// Maximum-likelihood reconstruction of p(n1, n2, n3) from photocounts by
// expectation-maximization with a separable three-beam detector kernel.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tribeam/errors.hpp"
#include "tribeam/photonics/histogram.hpp"
#include "tribeam/photonics/moments.hpp"

namespace tribeam::photonics {

/// T(c | n) = sum_j Binomial(j; n, eta) Poisson(c - j; d), for c <= c_max, n <= n_max.
inline Eigen::MatrixXd detector_response_matrix(const DetectorSpec& spec, int n_max, int c_max) {
  spec.validate();
  if (n_max < 0 || c_max < 0) throw ConfigError("response matrix dimensions must be non-negative");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(c_max + 1, n_max + 1);
  std::vector<double> dark(c_max + 1);
  for (int k = 0; k <= c_max; ++k)
    dark[k] = spec.dark_rate > 0.0 ? std::exp(-spec.dark_rate + k * std::log(spec.dark_rate) - std::lgamma(k + 1.0))
                                   : (k == 0 ? 1.0 : 0.0);
  const double eta = spec.efficiency;
  for (int n = 0; n <= n_max; ++n) {
    // the endpoints eta = 0, 1 are exact deltas
    std::vector<double> bin(n + 1, 0.0);
    if (eta >= 1.0) {
      bin[n] = 1.0;
    } else if (eta <= 0.0) {
      bin[0] = 1.0;
    } else {
      for (int j = 0; j <= n; ++j)
        bin[j] = std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * std::log(eta) +
                          (n - j) * std::log1p(-eta));
    }
    for (int c = 0; c <= c_max; ++c) {
      double s = 0.0;
      for (int j = 0; j <= std::min(c, n); ++j) s += bin[j] * dark[c - j];
      t(c, n) = s;
    }
  }
  return t;
}

struct EmOptions {
  int max_iter = 10000;
  double tol = 1e-8;
  /// photon-number cutoff for every beam; negative selects it per beam from the data
  int n_max = -1;
};

struct EmResult {
  PhotonNumberDistribution distribution;
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
  /// set when max_iter was reached before the update fell below tol
  std::string warning;
};

namespace detail {

/// y = (A0 (x) A1 (x) A2) x for a dense tensor x of shape (n0, n1, n2), row-major.
inline std::vector<double> apply_kernel(const std::array<Eigen::MatrixXd, 3>& a, const std::vector<double>& x,
                                        const Index3& in_dim) {
  std::vector<double> cur = x;
  Index3 dim = in_dim;
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::MatrixXd& m = a[axis];
    Index3 out_dim = dim;
    out_dim[axis] = static_cast<int>(m.rows());
    std::vector<double> out(static_cast<std::size_t>(out_dim[0]) * out_dim[1] * out_dim[2], 0.0);
    for (int i0 = 0; i0 < out_dim[0]; ++i0)
      for (int i1 = 0; i1 < out_dim[1]; ++i1)
        for (int i2 = 0; i2 < out_dim[2]; ++i2) {
          const int oi[3] = {i0, i1, i2};
          double s = 0.0;
          int src[3] = {i0, i1, i2};
          for (int k = 0; k < dim[axis]; ++k) {
            src[axis] = k;
            const double v = cur[(static_cast<std::size_t>(src[0]) * dim[1] + src[1]) * dim[2] + src[2]];
            if (v != 0.0) s += m(oi[axis], k) * v;
          }
          out[(static_cast<std::size_t>(i0) * out_dim[1] + i1) * out_dim[2] + i2] = s;
        }
    cur.swap(out);
    dim = out_dim;
  }
  return cur;
}

}  // namespace detail

/// Photon-number cutoff of one beam from its count range.
inline int default_cutoff(const PhotocountHistogram& h, const DetectorSpec& det, int beam) {
  const int c = h.max_counts()[beam];
  if (det.efficiency >= 1.0) return c;
  const double eta = std::max(det.efficiency, 1e-3);
  return std::max(c, static_cast<int>(std::ceil((c + 4) / eta)));
}

/// EM iteration p <- p * K^T (f / K p). Kernel columns are normalized over the
/// count range so that the log-likelihood is non-decreasing.
inline EmResult em_reconstruct(const PhotocountHistogram& hist, const DetectorSet& det, const EmOptions& opt = {}) {
  if (hist.empty()) throw DataError("em_reconstruct: empty histogram");
  const Index3 cmax = hist.max_counts();
  std::array<Eigen::MatrixXd, 3> k, kt;
  Index3 cdim, ndim, ncut;
  for (int j = 0; j < 3; ++j) {
    const int n_max = opt.n_max >= 0 ? opt.n_max : default_cutoff(hist, det[j], j);
    ncut[j] = n_max;
    ndim[j] = n_max + 1;
    cdim[j] = cmax[j] + 1;
    // counts above the observed maximum have zero frequency; fold them into an overflow row
    Eigen::MatrixXd full = detector_response_matrix(det[j], n_max, cmax[j]);
    Eigen::MatrixXd ext(cdim[j] + 1, n_max + 1);
    ext.topRows(cdim[j]) = full;
    ext.row(cdim[j]) = (1.0 - full.colwise().sum().array()).max(0.0).matrix();
    k[j] = ext;
    kt[j] = ext.transpose();
    cdim[j] += 1;
  }

  const double total = static_cast<double>(hist.total());
  std::vector<double> f(static_cast<std::size_t>(cdim[0]) * cdim[1] * cdim[2], 0.0);
  for (const auto& [c, n] : hist.counts) f[(static_cast<std::size_t>(c[0]) * cdim[1] + c[1]) * cdim[2] + c[2]] = n / total;

  std::vector<double> p(static_cast<std::size_t>(ndim[0]) * ndim[1] * ndim[2], 1.0 / (static_cast<double>(ndim[0]) * ndim[1] * ndim[2]));
  EmResult res;
  std::vector<double> ratio(f.size());
  for (int it = 0; it < opt.max_iter; ++it) {
    const std::vector<double> q = detail::apply_kernel(k, p, ndim);
    double ll = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      ratio[i] = f[i] > 0.0 ? f[i] / std::max(q[i], 1e-300) : 0.0;
      if (f[i] > 0.0) ll += total * f[i] * std::log(std::max(q[i], 1e-300));
    }
    res.log_likelihood.push_back(ll);
    const std::vector<double> back = detail::apply_kernel(kt, ratio, cdim);
    double change = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double np = p[i] * back[i];
      change = std::max(change, std::abs(np - p[i]));
      p[i] = np;
    }
    res.iterations = it + 1;
    if (change < opt.tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.warning = "EM reached max_iter=" + std::to_string(opt.max_iter) + " before tol";

  PhotonNumberDistribution& d = res.distribution;
  d.cutoff = ncut;
  double s = 0.0;
  for (int i0 = 0; i0 < ndim[0]; ++i0)
    for (int i1 = 0; i1 < ndim[1]; ++i1)
      for (int i2 = 0; i2 < ndim[2]; ++i2) {
        const double v = p[(static_cast<std::size_t>(i0) * ndim[1] + i1) * ndim[2] + i2];
        if (v > 1e-300) {
          d.probabilities[{i0, i1, i2}] = v;
          s += v;
        }
      }
  for (auto& kv : d.probabilities) kv.second /= s;
  // mass in the top cutoff layer of a lossy beam signals truncation
  double edge = 0.0;
  for (const auto& [n, v] : d.probabilities)
    for (int j = 0; j < 3; ++j)
      if (det[j].efficiency < 1.0 && n[j] == ncut[j]) {
        edge += v;
        break;
      }
  d.tail_mass = edge;
  return res;
}

/// Marginal mean and pair moments from a reconstruction, convenience for tests.
inline MomentTable em_intensity_moments(const EmResult& r, int max_order = kMaxOrder) {
  return intensity_moments(photon_moments(r.distribution, max_order));
}

}  // namespace tribeam::photonics
