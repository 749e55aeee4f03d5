#include "horoflow/samplers.hpp"

#include <cmath>
#include <numbers>

namespace horoflow {

PointSampler<EuclideanPoint> euclidean_sampler(std::size_t dim, double scale) {
  return [dim, scale](Rng& rng) { return scale * rng.normal_vector(dim); };
}

PointSampler<DiskPoint> disk_sampler(double max_radius) {
  return [max_radius](Rng& rng) {
    const double r = rng.uniform(0.0, max_radius);
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return DiskPoint::from_polar(r, angle);
  };
}

Matrix random_symmetric(Rng& rng, std::size_t dim, double scale) {
  Matrix s(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      s(i, j) = scale * rng.normal();
      s(j, i) = s(i, j);
    }
  }
  return s;
}

PointSampler<SpdPoint> spd_sampler(std::size_t dim, double spread) {
  return [dim, spread](Rng& rng) { return SpdPoint(sym_exp(random_symmetric(rng, dim, spread))); };
}

std::shared_ptr<const std::vector<Vector>> stretch_sample(std::size_t points, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  auto sample = std::make_shared<std::vector<Vector>>();
  for (std::size_t i = 0; i < points; ++i) sample->push_back(rng.normal_vector(dim));
  return sample;
}

PointSampler<SampledDistanceFunction> stretch_sampler(std::shared_ptr<const std::vector<Vector>> sample) {
  return [sample](Rng& rng) {
    const std::size_t dim = sample->front().size();
    Matrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) a(i, j) = rng.normal();
    AmbientMetric metric = [a](const Vector& x, const Vector& y) { return norm2(a * (x - y)); };
    return SampledDistanceFunction(sample, std::move(metric));
  };
}

PointSampler<CircleMap> circle_map_sampler() {
  return [](Rng& rng) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto rot = CircleMap::rotation(rng.uniform(0.0, two_pi));
    auto mob = CircleMap::mobius_translation(rng.uniform(0.0, 0.6), rng.uniform(0.0, two_pi));
    auto sine = CircleMap::sine_perturbation(rng.uniform(-0.5, 0.5), rng.uniform(0.0, two_pi));
    return CircleMap::composite({rot, mob, sine});
  };
}

}  // namespace horoflow
