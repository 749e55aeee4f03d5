#include "horoflow/euclidean.hpp"

#include <cmath>

namespace horoflow {

double euclidean_dist(const EuclideanPoint& x, const EuclideanPoint& y) {
  if (x.size() != y.size()) throw InputError("euclidean_dist: dimension mismatch");
  return norm2(x - y);
}

WeakMetricSpace<EuclideanPoint> euclidean_space() {
  WeakMetricSpace<EuclideanPoint> s;
  s.name = "euclidean";
  s.dist = euclidean_dist;
  s.separates_points = true;
  s.contains = [](const EuclideanPoint& x) { return all_finite(x); };
  return s;
}

EuclideanPoint Translation::operator()(const EuclideanPoint& x) const {
  if (x.size() != offset.size()) throw InputError("Translation: dimension mismatch");
  return x + offset;
}

}  // namespace horoflow
