#pragma once

#include "horoflow/linalg.hpp"
#include "horoflow/metric_core.hpp"

namespace horoflow {

using EuclideanPoint = Vector;

double euclidean_dist(const EuclideanPoint& x, const EuclideanPoint& y);

WeakMetricSpace<EuclideanPoint> euclidean_space();

// x -> x + offset
struct Translation {
  Vector offset;
  EuclideanPoint operator()(const EuclideanPoint& x) const;
};

inline Translation compose(const Translation& a, const Translation& b) { return {a.offset + b.offset}; }

}  // namespace horoflow
