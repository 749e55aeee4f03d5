#pragma once

// Products v(n) of invertible matrices tracked in scaled form, the log-norm
// of the squared positive part [v] = v^T v, vector-state extraction and the
// Segal inequality |exp(u + v)| <= |exp(u/2) exp(v) exp(u/2)|.

#include "horoflow/cocycle.hpp"
#include "horoflow/linalg.hpp"
#include "horoflow/oseledets.hpp"

namespace horoflow {

// v(n) = exp(log_scale) forward and v(n)^{-1} = exp(inv_log_scale) inverse,
// with both tracks of unit spectral norm.
struct ScaledProduct {
  Matrix forward;
  double log_scale = 0.0;
  Matrix inverse;
  double inv_log_scale = 0.0;
  std::size_t steps = 0;

  static ScaledProduct identity(std::size_t dim);
  // Multiplies in one step matrix: on the left for left increments, on the
  // right for right increments.
  void extend(const Matrix& a, Order order);
};

ScaledProduct accumulate_product(const MatrixDriver& driver, std::size_t n, std::size_t trial);

// |forward * inverse - exp(-(log_scale + inv_log_scale)) I|; zero in exact arithmetic.
double consistency_residual(const ScaledProduct& p);

// |log(v^T v)| = 2 max(log s_max(v), log s_max(v^{-1})); throws
// ConsistencyError when the tracks disagree by more than 1e-6.
double squared_positive_part_lognorm(const ScaledProduct& p);

// log(v^T v) assembled from the large singular directions of each track.
Matrix log_positive_part(const ScaledProduct& p);

// Per trial (1/n) |log [v(n)]|.
LyapunovEstimate tau_estimate(const MatrixDriver& driver, std::size_t n, std::size_t trials,
                              std::size_t threads = thread_budget());

struct StateReport {
  Vector xi;
  double achieved = 0.0;  // |(y xi, xi)|
  double norm_y = 0.0;
  double eps = 0.0;
  int s_flag = 1;  // weight of the vector-state part; always 1 in finite dimension
};

// Unit eigenvector for an eigenvalue of largest modulus. Ties (relative 1e-12)
// go to the larger eigenvalue, then to the lower index; the largest-magnitude
// component is made positive. y = 0 gives e1.
StateReport extract_vector_state(const Matrix& y, double eps);

struct StateRatioRow {
  std::size_t l = 0;
  double ratio = 0.0;  // |(y_l xi_N, xi_N)| / l
  double tau_hat = 0.0;
};

std::vector<StateRatioRow> state_ratio_check(const MatrixDriver& driver, std::size_t big_n,
                                             const std::vector<std::size_t>& checkpoints, std::size_t trial,
                                             double eps = 1e-9);

struct SegalResult {
  double lhs = 0.0;  // |exp(u + v)| by Pade scaling and squaring
  double rhs = 0.0;  // |exp(u/2) exp(v) exp(u/2)| by Pade scaling and squaring
  double lhs_eig = 0.0;  // same quantities through eigendecompositions
  double rhs_eig = 0.0;
  // max relative disagreement between the two exponential paths, over the
  // exponentials themselves and both norms
  double path_gap = 0.0;
  bool holds(double slack = 1e-10) const { return lhs <= rhs + slack; }
};

SegalResult segal_check(const Matrix& u, const Matrix& v);

}  // namespace horoflow
