#include "horoflow/operator_thompson.hpp"

#include <algorithm>
#include <cmath>

#include "horoflow/errors.hpp"

namespace horoflow {

namespace {

constexpr double kTrackTol = 1e-6;
constexpr double kSmallEigen = 1e-8;

double normalize(Matrix& m) {
  const double s = spectral_norm(m);
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("ScaledProduct: product lost rank or overflowed");
  m /= s;
  return std::log(s);
}

void require_symmetric(const Matrix& y, double tol, const char* what) {
  if (!y.square()) throw InputError(std::string(what) + ": matrix must be square");
  if (asymmetry(y) > tol * std::max(1.0, max_abs(y))) throw SymmetryError(std::string(what) + ": matrix is not symmetric");
}

}  // namespace

ScaledProduct ScaledProduct::identity(std::size_t dim) {
  return {Matrix::identity(dim), 0.0, Matrix::identity(dim), 0.0, 0};
}

void ScaledProduct::extend(const Matrix& a, Order order) {
  if (a.rows() != forward.rows() || !a.square()) throw InputError("ScaledProduct: dimension mismatch");
  const auto lu = lu_factor(a);
  if (lu.singular) throw DomainError("ScaledProduct: singular step matrix");
  const Matrix a_inv = lu_solve(lu, Matrix::identity(a.rows()));
  if (order == Order::left_increment) {
    forward = a * forward;
    inverse = inverse * a_inv;
  } else {
    forward = forward * a;
    inverse = a_inv * inverse;
  }
  log_scale += normalize(forward);
  inv_log_scale += normalize(inverse);
  ++steps;
}

ScaledProduct accumulate_product(const MatrixDriver& driver, std::size_t n, std::size_t trial) {
  if (n < 1) throw InputError("accumulate_product: n must be at least 1");
  auto stream = driver.stream(trial);
  Matrix first = stream.next();
  auto p = ScaledProduct::identity(first.rows());
  p.extend(first, driver.order());
  for (std::size_t k = 1; k < n; ++k) p.extend(stream.next(), driver.order());
  return p;
}

double consistency_residual(const ScaledProduct& p) {
  Matrix r = p.forward * p.inverse;
  const double c = std::exp(-(p.log_scale + p.inv_log_scale));
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) -= c;
  return spectral_norm(r);
}

double squared_positive_part_lognorm(const ScaledProduct& p) {
  if (consistency_residual(p) > kTrackTol)
    throw ConsistencyError("squared_positive_part_lognorm: forward and inverse tracks disagree");
  const double top = p.log_scale + std::log(spectral_norm(p.forward));
  const double bottom = p.inv_log_scale + std::log(spectral_norm(p.inverse));
  return 2.0 * std::max(top, bottom);
}

Matrix log_positive_part(const ScaledProduct& p) {
  const std::size_t d = p.forward.rows();
  // v^T v = e^{2 ls} F^T F and (v^T v)^{-1} = e^{2 ils} G G^T share eigenvectors;
  // each track resolves the eigenvalues at its own end of the spectrum.
  const auto fwd = sym_eigen(p.forward.transposed() * p.forward);
  const auto inv = sym_eigen(p.inverse * p.inverse.transposed());
  std::vector<Vector> vecs;
  Vector logs;
  for (std::size_t i = 0; i < d; ++i) {
    if (fwd.values[i] < kSmallEigen) break;
    vecs.push_back(fwd.vectors.column(i));
    logs.push_back(2.0 * p.log_scale + std::log(fwd.values[i]));
  }
  for (std::size_t i = 0; i < d && vecs.size() < d; ++i) {
    if (inv.values[i] < kSmallEigen) break;
    Vector v = inv.vectors.column(i);
    for (const auto& u : vecs) {
      const double c = dot(u, v);
      for (std::size_t t = 0; t < d; ++t) v[t] -= c * u[t];
    }
    const double len = norm2(v);
    if (len < 0.5) continue;  // direction already resolved by the forward track
    for (auto& x : v) x /= len;
    vecs.push_back(v);
    logs.push_back(-2.0 * p.inv_log_scale - std::log(inv.values[i]));
  }
  if (vecs.size() < d) throw ConsistencyError("log_positive_part: tracks do not span the space");
  Matrix y(d, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) y(i, j) += logs[k] * vecs[k][i] * vecs[k][j];
  return symmetrized(y);
}

LyapunovEstimate tau_estimate(const MatrixDriver& driver, std::size_t n, std::size_t trials, std::size_t threads) {
  if (n < 10) throw InputError("tau_estimate: n must be at least 10");
  if (trials < 1) throw InputError("tau_estimate: trials must be at least 1");
  std::vector<std::optional<double>> values(trials);
  std::vector<double> slopes(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    auto stream = driver.stream(t);
    Matrix first = stream.next();
    auto p = ScaledProduct::identity(first.rows());
    std::vector<double> a(n + 1, 0.0);
    p.extend(first, driver.order());
    a[1] = squared_positive_part_lognorm(p);
    for (std::size_t k = 2; k <= n; ++k) {
      p.extend(stream.next(), driver.order());
      if (k >= n / 10) a[k] = squared_positive_part_lognorm(p);
    }
    values[t] = a[n] / static_cast<double>(n);
    slopes[t] = tail_slope(a);
  });
  return summarize_trials(n, values, slopes);
}

StateReport extract_vector_state(const Matrix& y, double eps) {
  if (!(eps > 0.0)) throw InputError("extract_vector_state: eps must be positive");
  require_symmetric(y, 1e-9, "extract_vector_state");
  const std::size_t d = y.rows();
  const auto eig = sym_eigen(y);
  double top = 0.0;
  for (double v : eig.values) top = std::max(top, std::abs(v));

  StateReport r;
  r.eps = eps;
  r.norm_y = top;
  r.xi.assign(d, 0.0);
  if (top == 0.0) {
    r.xi[0] = 1.0;
  } else {
    // values are sorted descending, so the first candidate is the largest value
    std::size_t pick = d;
    for (std::size_t i = 0; i < d && pick == d; ++i)
      if (std::abs(eig.values[i]) >= top * (1.0 - 1e-12)) pick = i;
    r.xi = eig.vectors.column(pick);
    const double len = norm2(r.xi);
    std::size_t lead = 0;
    for (std::size_t i = 0; i < d; ++i) {
      r.xi[i] /= len;
      if (std::abs(r.xi[i]) > std::abs(r.xi[lead]) * (1.0 + 1e-12)) lead = i;
    }
    if (r.xi[lead] < 0.0)
      for (auto& x : r.xi) x = -x;
  }
  r.achieved = std::abs(dot(r.xi, y * r.xi));
  if (!(r.achieved > r.norm_y - eps)) throw ConsistencyError("extract_vector_state: extracted state misses the norm by eps");
  return r;
}

std::vector<StateRatioRow> state_ratio_check(const MatrixDriver& driver, std::size_t big_n,
                                             const std::vector<std::size_t>& checkpoints, std::size_t trial,
                                             double eps) {
  if (big_n < 1) throw InputError("state_ratio_check: N must be at least 1");
  for (auto l : checkpoints)
    if (l < 1 || l > big_n) throw InputError("state_ratio_check: checkpoints must lie in [1, N]");
  std::vector<std::size_t> sorted = checkpoints;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  auto stream = driver.stream(trial);
  Matrix first = stream.next();
  auto p = ScaledProduct::identity(first.rows());
  std::vector<Matrix> snapshots;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= big_n; ++k) {
    p.extend(k == 1 ? first : stream.next(), driver.order());
    while (next < sorted.size() && sorted[next] == k) {
      snapshots.push_back(log_positive_part(p));
      ++next;
    }
  }
  const double tau_hat = squared_positive_part_lognorm(p) / static_cast<double>(big_n);
  const auto state = extract_vector_state(log_positive_part(p), eps);

  std::vector<StateRatioRow> rows;
  for (std::size_t l : checkpoints) {
    const auto idx = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin());
    const Matrix& y = snapshots[idx];
    rows.push_back({l, std::abs(dot(state.xi, y * state.xi)) / static_cast<double>(l), tau_hat});
  }
  return rows;
}

SegalResult segal_check(const Matrix& u, const Matrix& v) {
  require_symmetric(u, 1e-12, "segal_check");
  require_symmetric(v, 1e-12, "segal_check");
  if (u.rows() != v.rows()) throw InputError("segal_check: dimension mismatch");
  auto rel = [](const Matrix& a, const Matrix& b) { return max_abs(a - b) / std::max(1.0, max_abs(b)); };

  const Matrix s = symmetrized(u + v);
  const Matrix half_u = symmetrized(u) * 0.5;
  const Matrix vs = symmetrized(v);

  const Matrix e_sum = expm(s);
  const Matrix e_half = expm(half_u);
  const Matrix e_v = expm(vs);
  const Matrix sum_eig = sym_exp(s);
  const Matrix half_eig = sym_exp(half_u);
  const Matrix v_eig = sym_exp(vs);

  SegalResult r;
  r.lhs = spectral_norm(e_sum);
  r.rhs = spectral_norm(e_half * e_v * e_half);
  r.lhs_eig = std::exp(sym_eigen(s).values.front());
  r.rhs_eig = sym_spectral_norm(symmetrized(half_eig * v_eig * half_eig));
  r.path_gap = std::max({rel(e_sum, sum_eig), rel(e_half, half_eig), rel(e_v, v_eig),
                         std::abs(r.lhs - r.lhs_eig) / std::max(1.0, r.lhs_eig),
                         std::abs(r.rhs - r.rhs_eig) / std::max(1.0, r.rhs_eig)});
  return r;
}

}  // namespace horoflow
