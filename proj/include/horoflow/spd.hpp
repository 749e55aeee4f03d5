#pragma once

// Cone of symmetric positive-definite matrices with the Thompson metric and
// its one-sided (Funk) half.

#include "horoflow/linalg.hpp"
#include "horoflow/metric_core.hpp"

namespace horoflow {

class SpdPoint {
 public:
  SpdPoint() = default;
  // Symmetrizes m after checking max |m_ij - m_ji| <= 1e-12 * max(1, max |m_ij|);
  // throws SymmetryError or NotSpdError.
  explicit SpdPoint(const Matrix& m);

  const Matrix& matrix() const { return m_; }
  const Matrix& cholesky_factor() const { return chol_; }
  std::size_t dim() const { return m_.rows(); }

 private:
  Matrix m_;
  Matrix chol_;
};

// Eigenvalues of p^{-1} q, descending, computed as those of L^{-1} q L^{-T}
// with p = L L^T.
Vector generalized_eigenvalues(const SpdPoint& p, const SpdPoint& q);

// sup over unit v of |log (q v, v) / (p v, v)|
double thompson_dist(const SpdPoint& p, const SpdPoint& q);
// log of the largest eigenvalue of p^{-1} q; negative when q < p
double funk_dist(const SpdPoint& p, const SpdPoint& q);

WeakMetricSpace<SpdPoint> thompson_space();
WeakMetricSpace<SpdPoint> funk_space();

// p -> g p g^T, an isometry of both metrics for invertible g
struct Congruence {
  Matrix g;
  SpdPoint operator()(const SpdPoint& p) const;
};

inline Congruence compose(const Congruence& a, const Congruence& b) { return {a.g * b.g}; }

}  // namespace horoflow
