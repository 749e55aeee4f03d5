#pragma once

// Distance functions on a finite sample of R^k, compared by the stretch weak
// metric log max_{i != j} d2(i, j) / d1(i, j).

#include <functional>
#include <memory>

#include "horoflow/linalg.hpp"
#include "horoflow/metric_core.hpp"

namespace horoflow {

using AmbientMetric = std::function<double(const Vector&, const Vector&)>;
using AmbientMap = std::function<Vector(const Vector&)>;

// Evaluated lazily: pullbacks compose maps into the metric handle and nothing
// is tabulated until a distance is requested.
class SampledDistanceFunction {
 public:
  SampledDistanceFunction() = default;
  SampledDistanceFunction(std::shared_ptr<const std::vector<Vector>> sample, AmbientMetric metric,
                          std::function<bool(const Vector&)> domain = {});

  // Euclidean distance restricted to the sample.
  static SampledDistanceFunction euclidean(std::shared_ptr<const std::vector<Vector>> sample);

  std::size_t size() const { return sample_ ? sample_->size() : 0; }
  const std::vector<Vector>& sample() const { return *sample_; }
  const std::shared_ptr<const std::vector<Vector>>& sample_handle() const { return sample_; }
  double value(std::size_t i, std::size_t j) const;
  double operator()(const Vector& x, const Vector& y) const { return metric_(x, y); }
  bool in_domain(const Vector& x) const { return !domain_ || domain_(x); }

  friend SampledDistanceFunction pullback(const AmbientMap& t, const SampledDistanceFunction& d);

 private:
  std::shared_ptr<const std::vector<Vector>> sample_;
  AmbientMetric metric_;
  std::function<bool(const Vector&)> domain_;
};

// (T* d)(x, y) = d(T x, T y); throws DomainError if T sends a sample point
// outside the domain of d.
SampledDistanceFunction pullback(const AmbientMap& t, const SampledDistanceFunction& d);

double stretch_dist(const SampledDistanceFunction& d1, const SampledDistanceFunction& d2);

WeakMetricSpace<SampledDistanceFunction> stretch_space();

}  // namespace horoflow
