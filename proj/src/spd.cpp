#include "horoflow/spd.hpp"

#include <algorithm>
#include <cmath>

namespace horoflow {

SpdPoint::SpdPoint(const Matrix& m) {
  if (!m.square() || m.empty()) throw InputError("SpdPoint: matrix must be square and nonempty");
  if (!all_finite(m)) throw NotSpdError("SpdPoint: non-finite entries");
  if (asymmetry(m) > 1e-12 * std::max(1.0, max_abs(m))) throw SymmetryError("SpdPoint: matrix is not symmetric");
  m_ = symmetrized(m);
  auto l = cholesky(m_);
  if (!l) throw NotSpdError("SpdPoint: Cholesky factorization failed");
  chol_ = std::move(*l);
}

Vector generalized_eigenvalues(const SpdPoint& p, const SpdPoint& q) {
  if (p.dim() != q.dim()) throw InputError("generalized_eigenvalues: dimension mismatch");
  const Matrix& l = p.cholesky_factor();
  // L^{-1} q L^{-T} = L^{-1} (L^{-1} q)^T since q is symmetric
  const Matrix x = forward_substitute(l, q.matrix());
  const Matrix m = forward_substitute(l, x.transposed());
  return sym_eigen(m).values;
}

// max(log lambda_max(p^{-1} q), -log lambda_min(p^{-1} q)), with the smallest
// eigenvalue taken as 1 / lambda_max(q^{-1} p): top eigenvalues carry relative
// accuracy, bottom ones only absolute accuracy.
double thompson_dist(const SpdPoint& p, const SpdPoint& q) { return std::max(funk_dist(p, q), funk_dist(q, p)); }

double funk_dist(const SpdPoint& p, const SpdPoint& q) {
  const Vector ev = generalized_eigenvalues(p, q);
  if (!(ev.front() > 0.0)) throw NotSpdError("funk_dist: generalized eigenvalue not positive");
  return std::log(ev.front());
}

WeakMetricSpace<SpdPoint> thompson_space() {
  WeakMetricSpace<SpdPoint> s;
  s.name = "thompson";
  s.dist = thompson_dist;
  s.separates_points = true;
  s.ulp_budget = 4.0;
  return s;
}

WeakMetricSpace<SpdPoint> funk_space() {
  WeakMetricSpace<SpdPoint> s;
  s.name = "funk";
  s.dist = funk_dist;
  // d(I, diag(1, 1/2)) = 0: zero distance between distinct points.
  s.separates_points = false;
  s.ulp_budget = 4.0;
  return s;
}

SpdPoint Congruence::operator()(const SpdPoint& p) const {
  Matrix m = g * p.matrix() * g.transposed();
  return SpdPoint(symmetrized(m));
}

}  // namespace horoflow
