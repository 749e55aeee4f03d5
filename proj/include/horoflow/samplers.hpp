#pragma once

// Seeded random points for each registered space, shared by the property
// suite, the acceptance checks and the command-line experiments.

#include <memory>

#include "horoflow/circle.hpp"
#include "horoflow/disk.hpp"
#include "horoflow/euclidean.hpp"
#include "horoflow/spd.hpp"
#include "horoflow/stretch.hpp"

namespace horoflow {

// Standard normal coordinates times `scale`.
PointSampler<EuclideanPoint> euclidean_sampler(std::size_t dim, double scale = 1.0);

// Hyperbolic radius uniform on [0, max_radius], uniform angle.
PointSampler<DiskPoint> disk_sampler(double max_radius = 5.0);

// exp(S) for a symmetric S with N(0, spread^2) entries.
PointSampler<SpdPoint> spd_sampler(std::size_t dim, double spread = 1.0);

// Fixed sample of `points` standard normal vectors in R^dim.
std::shared_ptr<const std::vector<Vector>> stretch_sample(std::size_t points, std::size_t dim, std::uint64_t seed);

// x, y -> |A (x - y)| with a random Gaussian A, on the given sample.
PointSampler<SampledDistanceFunction> stretch_sampler(std::shared_ptr<const std::vector<Vector>> sample);

// Composites of a rotation, a boundary Mobius translation (a <= 0.6) and a
// sine perturbation (|a| <= 0.5).
PointSampler<CircleMap> circle_map_sampler();

// Random symmetric matrix with N(0, scale^2) entries.
Matrix random_symmetric(Rng& rng, std::size_t dim, double scale = 1.0);

}  // namespace horoflow
