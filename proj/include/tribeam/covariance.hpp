#pragma once

// Explicit covariance matrices and the brute-force symplectic machinery used as
// oracles for the closed forms.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tribeam/errors.hpp"
#include "tribeam/invariants.hpp"

namespace tribeam {

using Matrix = Eigen::MatrixXd;

/// Block-diagonal symplectic form for n modes, ordering (x1, p1, x2, p2, ...).
inline Matrix symplectic_form(int n_modes) {
  Matrix om = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    om(2 * k, 2 * k + 1) = 1.0;
    om(2 * k + 1, 2 * k) = -1.0;
  }
  return om;
}

/// Real symmetric 2n x 2n covariance matrix in vacuum units (vacuum = identity).
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  explicit CovarianceMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0)
      throw DomainError("covariance matrix must be square with even dimension");
    const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, m_.cwiseAbs().maxCoeff()))
      throw DomainError("covariance matrix is not symmetric (max asymmetry " + detail::fmt(asym) + ")");
    m_ = 0.5 * (m_ + m_.transpose());
  }

  const Matrix& entries() const { return m_; }
  int modes() const { return static_cast<int>(m_.rows() / 2); }
  Matrix symplectic() const { return symplectic_form(modes()); }
  double determinant() const { return m_.determinant(); }
  double purity() const { return 1.0 / std::sqrt(determinant()); }

  /// Reduced covariance matrix of the listed modes (in the given order).
  CovarianceMatrix reduce(const std::vector<int>& keep) const {
    Matrix r(2 * keep.size(), 2 * keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t j = 0; j < keep.size(); ++j)
        r.block<2, 2>(2 * i, 2 * j) = m_.block<2, 2>(2 * keep[i], 2 * keep[j]);
    return CovarianceMatrix(r);
  }

  /// Partial transposition of one mode: p_k -> -p_k.
  CovarianceMatrix partial_transpose(int mode) const {
    Eigen::VectorXd lam = Eigen::VectorXd::Ones(m_.rows());
    lam(2 * mode + 1) = -1.0;
    return CovarianceMatrix(lam.asDiagonal() * m_ * lam.asDiagonal());
  }

  /// Schur complement of the `conditioned` modes: sigma_B - gamma^T sigma_A^{-1} gamma,
  /// the covariance left on the remaining modes. Used for Gaussian steering.
  CovarianceMatrix schur_complement(const std::vector<int>& conditioned) const {
    std::vector<int> rest;
    for (int k = 0; k < modes(); ++k)
      if (std::find(conditioned.begin(), conditioned.end(), k) == conditioned.end()) rest.push_back(k);
    std::vector<int> order = conditioned;
    order.insert(order.end(), rest.begin(), rest.end());
    const Matrix p = reduce(order).entries();
    const Eigen::Index na = 2 * static_cast<Eigen::Index>(conditioned.size());
    const Eigen::Index nb = p.rows() - na;
    const Matrix a = p.topLeftCorner(na, na);
    const Matrix g = p.topRightCorner(na, nb);
    const Matrix b = p.bottomRightCorner(nb, nb);
    return CovarianceMatrix(b - g.transpose() * a.ldlt().solve(g));
  }

 private:
  Matrix m_ = Matrix::Identity(2, 2);
};

/// Symplectic eigenvalues sorted ascending.
struct SymplecticSpectrum {
  std::vector<double> values;
  double min() const { return values.front(); }
};

/// |eig(i Omega sigma)| with each doubly degenerate pair reported once.
/// Uses the Williamson form sigma^{1/2} Omega^T sigma Omega sigma^{1/2}, which is
/// symmetric with eigenvalues nu_k^2; falls back to a general eigensolver of
/// Omega sigma when sigma is not positive definite.
inline SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& cm) {
  const Matrix& s = cm.entries();
  const Matrix om = cm.symplectic();
  const int n = cm.modes();
  std::vector<double> ev;

  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("symplectic_spectrum: eigensolver failed on sigma");
  if (es.eigenvalues().minCoeff() > 0.0) {
    const Matrix root = es.operatorSqrt();
    const Matrix w = root * om.transpose() * s * om * root;
    Eigen::SelfAdjointEigenSolver<Matrix> ws(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
    if (ws.info() != Eigen::Success) throw NumericalError("symplectic_spectrum: eigensolver failed");
    for (Eigen::Index k = 0; k < ws.eigenvalues().size(); ++k) ev.push_back(std::sqrt(std::max(0.0, ws.eigenvalues()(k))));
  } else {
    Eigen::EigenSolver<Matrix> gs(om * s, false);
    if (gs.info() != Eigen::Success) throw NumericalError("symplectic_spectrum: eigensolver failed");
    for (Eigen::Index k = 0; k < gs.eigenvalues().size(); ++k) ev.push_back(std::abs(gs.eigenvalues()(k)));
  }
  std::sort(ev.begin(), ev.end());
  SymplecticSpectrum out;
  for (int k = 0; k < n; ++k) out.values.push_back(0.5 * (ev[2 * k] + ev[2 * k + 1]));
  return out;
}

/// Standard-form matrix with alpha = diag(a, a) on the diagonal and
/// gamma = diag(c+, c-) in every off-diagonal block.
inline CovarianceMatrix assemble_cm(const StandardFormParams& p) {
  Matrix m(6, 6);
  Eigen::Matrix2d alpha = Eigen::Vector2d(p.a, p.a).asDiagonal();
  Eigen::Matrix2d gamma = Eigen::Vector2d(p.c_plus, p.c_minus).asDiagonal();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.block<2, 2>(2 * i, 2 * j) = (i == j) ? alpha : gamma;
  return CovarianceMatrix(m);
}

struct PhysicalityCondition {
  std::string name;
  bool pass = false;
  /// signed distance to the violated side; positive when satisfied
  double margin = 0.0;
};

struct PhysicalityReport {
  std::vector<PhysicalityCondition> conditions;
  std::optional<double> min_symplectic;
  bool physical() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.pass; });
  }
};

/// Per-condition diagnostics of the invariant domain. Never throws.
inline PhysicalityReport check_physical(const StateInvariants& inv, const Tolerances& tol = {}) {
  PhysicalityReport r;
  const double mu1 = inv.mu1, mu2 = inv.mu2;
  auto add = [&](std::string name, double margin, double scale) {
    r.conditions.push_back({std::move(name), margin >= -tol.physical * std::max(1.0, std::abs(scale)), margin});
  };
  add("mu1 > 0", mu1, 1.0);
  add("mu1 <= 1", 1.0 - mu1, 1.0);
  add("mu2 >= mu1^2", mu2 - mu1 * mu1, mu2);
  add("mu2 <= mu1", mu1 - mu2, mu2);
  if (!r.physical() || !(mu1 > 0.0) || !(mu2 > 0.0)) return r;

  try {
    const Interval w = seralian_bounds(mu1, mu2, tol);
    add("delta2 >= F(mu1, mu2)", inv.delta2 - w.min, w.min);
    add("delta2 <= delta2_max", w.max - inv.delta2, w.max);
    if (!r.physical()) return r;
    const auto spec = symplectic_spectrum(assemble_cm(standard_form(inv, tol)));
    r.min_symplectic = spec.min();
    add("symplectic eigenvalues >= 1", spec.min() - 1.0, 1.0);
    if (inv.mu3) {
      const double p3 = purity3(inv, tol);
      add("mu3 consistent", -std::abs(*inv.mu3 - p3) / p3, 1.0);
    }
  } catch (const std::exception& e) {
    r.conditions.push_back({std::string("evaluation: ") + e.what(), false, -1.0});
  }
  return r;
}

}  // namespace tribeam
