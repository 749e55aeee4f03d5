#pragma once

// Lyapunov spectra of invertible matrix cocycles by re-orthonormalized QR,
// and growth rates of individual vectors for probing the filtration.

#include "horoflow/cocycle.hpp"
#include "horoflow/linalg.hpp"

namespace horoflow {

using MatrixDriver = ErgodicDriver<Matrix>;

struct SpectrumEstimate {
  Vector exponents;  // descending, with multiplicity
  std::size_t n = 0;
  Vector resid;      // |lambda_i(n) - lambda_i(n/10)|
  double log_det_rate = 0.0;  // (1/n) sum_k log |det A_k|
};

// Right-increment drivers are handled through the transposed cocycle, which
// has the same singular values.
SpectrumEstimate qr_spectrum(const MatrixDriver& driver, std::size_t n, std::size_t trial);

// (1/n) log |A(n) v| with per-step renormalization.
double vector_growth_rate(const MatrixDriver& driver, const Vector& v, std::size_t n, std::size_t trial);

// Top QR exponent over independent trials.
LyapunovEstimate qr_top_exponent(const MatrixDriver& driver, std::size_t n, std::size_t trials,
                                 std::size_t threads = thread_budget());
// Norm growth of a fixed vector over independent trials.
LyapunovEstimate growth_rate_estimate(const MatrixDriver& driver, const Vector& v, std::size_t n, std::size_t trials,
                                      std::size_t threads = thread_budget());

struct FiltrationProbeReport {
  std::vector<Vector> probes;
  Vector rates;
  Vector resid;  // |rate(n) - rate(n/10)| per probe
  double cluster_tol = 0.0;
  // Probe indices grouped by rate, highest rate first.
  std::vector<std::vector<std::size_t>> clusters;
};

// Growth rates of the probes under powers of A, clustered by single linkage.
// cluster_tol <= 0 selects max(10 * spread(resid), 1e-8).
FiltrationProbeReport filtration_probe(const Matrix& a, const std::vector<Vector>& probes, std::size_t n,
                                       double cluster_tol = 0.0);

// Groups sorted values whose consecutive gaps are below tol.
std::vector<std::vector<std::size_t>> cluster_rates(const Vector& rates, double tol);

}  // namespace horoflow
