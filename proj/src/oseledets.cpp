#include "horoflow/oseledets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace horoflow {

namespace {

std::size_t driver_dim(const MatrixDriver& driver, std::size_t trial) {
  const auto first = driver.maps_for(trial, 1).front();
  if (!first.square() || first.empty()) throw InputError("matrix driver: step matrices must be square");
  return first.rows();
}

void check_support(const MatrixDriver& driver) {
  for (const auto& a : driver.support()) {
    if (!a.square()) throw InputError("matrix driver: step matrices must be square");
    if (!(log_abs_det(a) > std::log(1e-12))) throw InputError("matrix driver: step matrix is singular (|det| <= 1e-12)");
  }
}

}  // namespace

SpectrumEstimate qr_spectrum(const MatrixDriver& driver, std::size_t n, std::size_t trial) {
  if (n < 10) throw InputError("qr_spectrum: n must be at least 10");
  check_support(driver);
  const std::size_t d = driver_dim(driver, trial);
  const bool transpose = driver.order() == Order::right_increment;
  auto stream = driver.stream(trial);

  Matrix q = Matrix::identity(d);
  Vector sums(d, 0.0);
  Vector early(d, 0.0);
  double log_det = 0.0;
  const std::size_t early_step = std::max<std::size_t>(1, n / 10);
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix a = stream.next();
    if (a.rows() != d || a.cols() != d) throw InputError("qr_spectrum: step matrices change dimension");
    if (transpose) a = a.transposed();
    auto qr = mgs_qr(a * q);
    for (std::size_t i = 0; i < d; ++i) {
      const double l = std::log(qr.r(i, i));
      sums[i] += l;
      log_det += l;
    }
    q = std::move(qr.q);
    if (k == early_step) early = sums;
  }

  SpectrumEstimate est;
  est.n = n;
  est.exponents.resize(d);
  Vector early_rates(d);
  for (std::size_t i = 0; i < d; ++i) {
    est.exponents[i] = sums[i] / static_cast<double>(n);
    early_rates[i] = early[i] / static_cast<double>(early_step);
  }
  std::sort(est.exponents.begin(), est.exponents.end(), std::greater<>());
  std::sort(early_rates.begin(), early_rates.end(), std::greater<>());
  est.resid.resize(d);
  for (std::size_t i = 0; i < d; ++i) est.resid[i] = std::abs(est.exponents[i] - early_rates[i]);
  est.log_det_rate = log_det / static_cast<double>(n);
  return est;
}

namespace {

// Rates at step n and at step max(1, n/10).
std::pair<double, double> growth_rates(const MatrixDriver& driver, const Vector& v, std::size_t n, std::size_t trial) {
  const double len = norm2(v);
  if (!(len > 0.0) || !std::isfinite(len)) throw InputError("vector_growth_rate: zero or non-finite vector");
  if (n < 1) throw InputError("vector_growth_rate: n must be at least 1");
  Vector w = (1.0 / len) * v;
  const std::size_t early_step = std::max<std::size_t>(1, n / 10);
  double acc = 0.0;
  double early = 0.0;
  auto step = [&](const Matrix& a) {
    w = a * w;
    const double s = norm2(w);
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("vector_growth_rate: vector collapsed");
    acc += std::log(s);
    for (auto& x : w) x /= s;
  };
  if (driver.order() == Order::left_increment) {
    auto stream = driver.stream(trial);
    for (std::size_t k = 1; k <= n; ++k) {
      step(stream.next());
      if (k == early_step) early = acc;
    }
    return {acc / static_cast<double>(n), early / static_cast<double>(early_step)};
  }
  // A(1) ... A(n) v: the newest matrix acts first.
  const auto maps = driver.maps_for(trial, n);
  for (std::size_t k = n; k-- > 0;) step(maps[k]);
  Vector w_early = (1.0 / len) * v;
  double acc_early = 0.0;
  for (std::size_t k = early_step; k-- > 0;) {
    w_early = maps[k] * w_early;
    const double s = norm2(w_early);
    acc_early += std::log(s);
    for (auto& x : w_early) x /= s;
  }
  return {acc / static_cast<double>(n), acc_early / static_cast<double>(early_step)};
}

}  // namespace

double vector_growth_rate(const MatrixDriver& driver, const Vector& v, std::size_t n, std::size_t trial) {
  return growth_rates(driver, v, n, trial).first;
}

LyapunovEstimate qr_top_exponent(const MatrixDriver& driver, std::size_t n, std::size_t trials, std::size_t threads) {
  if (trials < 1) throw InputError("qr_top_exponent: trials must be at least 1");
  std::vector<std::optional<double>> values(trials);
  std::vector<double> slopes(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) { values[t] = qr_spectrum(driver, n, t).exponents.front(); });
  return summarize_trials(n, values, slopes);
}

LyapunovEstimate growth_rate_estimate(const MatrixDriver& driver, const Vector& v, std::size_t n, std::size_t trials,
                                      std::size_t threads) {
  if (trials < 1) throw InputError("growth_rate_estimate: trials must be at least 1");
  std::vector<std::optional<double>> values(trials);
  std::vector<double> slopes(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) { values[t] = vector_growth_rate(driver, v, n, t); });
  return summarize_trials(n, values, slopes);
}

std::vector<std::vector<std::size_t>> cluster_rates(const Vector& rates, double tol) {
  std::vector<std::size_t> order(rates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rates[a] > rates[b]; });
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || !(rates[order[k - 1]] - rates[order[k]] < tol)) clusters.emplace_back();
    clusters.back().push_back(order[k]);
  }
  return clusters;
}

FiltrationProbeReport filtration_probe(const Matrix& a, const std::vector<Vector>& probes, std::size_t n,
                                       double cluster_tol) {
  if (probes.empty()) throw InputError("filtration_probe: empty probe set");
  if (n < 100) throw InputError("filtration_probe: n must be at least 100");
  const auto driver = MatrixDriver::constant(a, Order::left_increment);
  check_support(driver);
  FiltrationProbeReport r;
  r.probes = probes;
  for (const auto& v : probes) {
    const auto [rate, early] = growth_rates(driver, v, n, 0);
    r.rates.push_back(rate);
    r.resid.push_back(std::abs(rate - early));
  }
  if (cluster_tol <= 0.0) {
    const auto [lo, hi] = std::minmax_element(r.resid.begin(), r.resid.end());
    cluster_tol = std::max(10.0 * (*hi - *lo), 1e-8);
  }
  r.cluster_tol = cluster_tol;
  r.clusters = cluster_rates(r.rates, cluster_tol);
  return r;
}

}  // namespace horoflow
