#include "horoflow/stretch.hpp"

#include <cmath>
#include <limits>

namespace horoflow {

SampledDistanceFunction::SampledDistanceFunction(std::shared_ptr<const std::vector<Vector>> sample,
                                                 AmbientMetric metric, std::function<bool(const Vector&)> domain)
    : sample_(std::move(sample)), metric_(std::move(metric)), domain_(std::move(domain)) {
  if (!sample_ || sample_->size() < 2) throw InputError("SampledDistanceFunction: need at least two sample points");
  if (!metric_) throw InputError("SampledDistanceFunction: empty metric");
}

SampledDistanceFunction SampledDistanceFunction::euclidean(std::shared_ptr<const std::vector<Vector>> sample) {
  return {std::move(sample), [](const Vector& x, const Vector& y) { return norm2(x - y); }};
}

double SampledDistanceFunction::value(std::size_t i, std::size_t j) const {
  return metric_((*sample_)[i], (*sample_)[j]);
}

SampledDistanceFunction pullback(const AmbientMap& t, const SampledDistanceFunction& d) {
  for (const auto& x : d.sample()) {
    const Vector tx = t(x);
    if (!all_finite(tx) || !d.in_domain(tx)) throw DomainError("pullback: map leaves the domain of the distance function");
  }
  SampledDistanceFunction out = d;
  auto metric = d.metric_;
  out.metric_ = [metric, t](const Vector& x, const Vector& y) { return metric(t(x), t(y)); };
  auto domain = d.domain_;
  out.domain_ = [domain, t](const Vector& x) {
    const Vector tx = t(x);
    return all_finite(tx) && (!domain || domain(tx));
  };
  return out;
}

double stretch_dist(const SampledDistanceFunction& d1, const SampledDistanceFunction& d2) {
  if (d1.sample_handle() != d2.sample_handle() && d1.sample() != d2.sample())
    throw InputError("stretch_dist: distance functions live on different samples");
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t n = d1.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double a = d1.value(i, j);
      const double b = d2.value(i, j);
      if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DegenerateInputError("stretch_dist: off-diagonal value is not a positive finite number");
      best = std::max(best, b / a);
    }
  return std::log(best);
}

WeakMetricSpace<SampledDistanceFunction> stretch_space() {
  WeakMetricSpace<SampledDistanceFunction> s;
  s.name = "stretch";
  s.dist = stretch_dist;
  s.separates_points = false;
  return s;
}

}  // namespace horoflow
