#pragma once

// Neural layers as nonexpansive maps, drift of deep residual chains, and
// stretch / Jacobian cocycles of circle diffeomorphisms.

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "horoflow/circle.hpp"
#include "horoflow/cocycle.hpp"
#include "horoflow/linalg.hpp"

namespace horoflow {

enum class Activation { relu, tanh, sigmoid };
// plain: x -> s(W x + b); resnet_adjoint: x -> W^T s(W x + b)
enum class LayerForm { plain, resnet_adjoint };

double activate(Activation a, double t);
const char* to_string(Activation a);
Activation parse_activation(const std::string& name);

struct NormalizedWeight {
  Matrix w;
  double certified_norm = 0.0;  // spectral norm of w, <= 1 + 1e-9
  int iterations = 0;
};

// Top singular value by power iteration on W^T W from a fixed start vector.
double power_iteration_norm(const Matrix& w, int* iterations = nullptr);

// W / max(1, |W|); W is returned unchanged when its norm is already <= 1.
NormalizedWeight spectral_normalize(const Matrix& w);

class LayerMap {
 public:
  LayerMap() = default;
  // Projects W onto the unit operator-norm ball.
  static LayerMap certified(Matrix w, Vector b, Activation act, LayerForm form = LayerForm::resnet_adjoint);
  // Keeps W as given; throws NormConstraintError if |W| > 1 + 1e-9.
  static LayerMap audited(Matrix w, Vector b, Activation act, LayerForm form = LayerForm::resnet_adjoint);
  // Keeps W as given and only records its norm.
  static LayerMap unconstrained(Matrix w, Vector b, Activation act, LayerForm form = LayerForm::resnet_adjoint);

  Vector operator()(const Vector& x) const;

  const Matrix& weight() const { return w_; }
  const Vector& bias() const { return b_; }
  Activation activation() const { return act_; }
  LayerForm form() const { return form_; }
  double certified_norm() const { return norm_; }
  std::size_t width() const { return w_.cols(); }

 private:
  LayerMap(Matrix w, Vector b, Activation act, LayerForm form, double norm);
  Matrix w_;
  Vector b_;
  Activation act_ = Activation::relu;
  LayerForm form_ = LayerForm::resnet_adjoint;
  double norm_ = 0.0;
};

// layers[0] is applied first.
Vector apply_chain(std::span<const LayerMap> layers, const Vector& x0);

struct DriftReport {
  std::vector<Vector> v_hat;  // (1/n) T1 T2 ... Tn x0 per trial
  std::size_t n = 0;
  Vector mean;
  Vector per_coordinate_se;
  // max over trials of |u(n) x0 - u(n) x0'| / n with x0' = x0 + e1
  double cross_input_gap = 0.0;
};

// T1 is the outermost layer: the chain is applied from Tn inward to T1.
DriftReport resnet_drift(const ErgodicDriver<LayerMap>& driver, const Vector& x0, std::size_t n, std::size_t trials,
                         std::size_t threads = thread_budget());

// max over sampled pairs of |u(n) x - u(n) y| / (n |x - y|), n = depth.
double lipschitz_profile(std::span<const LayerMap> layers, const PairSampler<Vector>& sampler, std::size_t n_pairs,
                         std::uint64_t seed);

using CirclePair = std::pair<std::complex<double>, std::complex<double>>;

struct StretchOptions {
  // Offsets of the near-diagonal pairs placed on each side of every grid point.
  std::vector<double> scales{1e-2, 1e-4, 1e-8, 1e-16, 1e-32, 1e-64};
  // Seeded pairs drawn uniformly on the circle, independent of the grid.
  std::size_t global_pairs = 1000;
};

struct StretchReport {
  double lambda_hat = 0.0;
  std::vector<std::size_t> depths;
  std::vector<double> log_stretch;  // log of the max sampled ratio at each depth
  std::vector<CirclePair> argmax_trace;
  std::complex<double> z_hat;
  std::size_t pairs = 0;
  bool truncated = false;
};

// Difference quotients |f(x) - f(y)| / |x - y| of the n-step composition on
// the unit circle in R^2, sampled over near-diagonal pairs around `grid`
// equally spaced points plus global pairs.
StretchReport max_stretch(const ErgodicDriver<CircleMap>& driver, std::size_t n, std::size_t grid, std::size_t trial,
                          const StretchOptions& options = {});

struct JacobianTrace {
  std::vector<double> a;      // a[k-1] = Jacobian distance from the identity to the k-step composition
  std::vector<double> ratio;  // a(k) / k
};

JacobianTrace jacobian_cocycle_dist(const ErgodicDriver<CircleMap>& driver, std::size_t n, std::size_t grid,
                                    std::size_t trial);

}  // namespace horoflow
