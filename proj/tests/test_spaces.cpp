#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "horoflow/circle.hpp"
#include "horoflow/disk.hpp"
#include "horoflow/euclidean.hpp"
#include "horoflow/samplers.hpp"
#include "horoflow/spd.hpp"
#include "horoflow/stretch.hpp"
#include "oracle.hpp"

using namespace horoflow;

namespace {

const double kLn2 = std::numbers::ln2;
const double kLn3 = std::log(3.0);
const double kPi = std::numbers::pi;

// Hyperbolic length of the segment [0, r] by Simpson's rule on 2 / (1 - t^2).
double radial_length(double r) {
  const int m = 20000;
  const double h = r / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = i * h;
    const double f = 2.0 / (1.0 - t * t);
    s += (i == 0 || i == m) ? f : (i % 2 ? 4.0 * f : 2.0 * f);
  }
  return s * h / 3.0;
}

// sup over unit v of |log (q v, v) / (p v, v)|: starts from the generalized
// eigenvectors of a reference solver, polishes by coordinate search, and
// evaluates every candidate as an explicit Rayleigh quotient ratio.
double rayleigh_sup(const Matrix& p, const Matrix& q, Rng& rng) {
  const Eigen::MatrixXd ep = oracle::to_eigen(p);
  const Eigen::MatrixXd eq = oracle::to_eigen(q);
  auto value = [&](const Eigen::VectorXd& v) {
    return std::abs(std::log(v.dot(eq * v) / v.dot(ep * v)));
  };
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(eq, ep);
  double best = 0.0;
  std::vector<Eigen::VectorXd> starts;
  for (Eigen::Index k = 0; k < ep.rows(); ++k) starts.push_back(ges.eigenvectors().col(k));
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd v(ep.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    starts.push_back(v);
  }
  for (auto v : starts) {
    double cur = value(v);
    for (double step = 0.1; step > 1e-7; step *= 0.5) {
      bool moved = true;
      for (int sweep = 0; moved && sweep < 20; ++sweep) {
        moved = false;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          for (double sgn : {1.0, -1.0}) {
            Eigen::VectorXd w = v;
            w(i) += sgn * step * w.norm();
            const double val = value(w);
            if (val > cur) {
              cur = val;
              v = w;
              moved = true;
            }
          }
        }
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

SpdPoint diag_point(std::initializer_list<double> d) {
  const Vector v(d);
  return SpdPoint(Matrix::diagonal(v));
}

}  // namespace

TEST_CASE("euclidean distance") {
  CHECK(euclidean_dist({0, 0}, {3, 4}) == 5.0);
  CHECK(euclidean_dist({1.5, -2}, {1.5, -2}) == 0.0);
  CHECK(euclidean_dist({1, 0}, {0, 1}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(euclidean_dist({1, 0}, {1, 0, 0}), InputError);
}

TEST_CASE("poincare distance agrees with the integrated line element") {
  CHECK(radial_length(0.5) == doctest::Approx(kLn3).epsilon(1e-12));
  CHECK(poincare_dist(DiskPoint(), DiskPoint(Complex(0.5, 0))) == doctest::Approx(radial_length(0.5)).epsilon(1e-12));
  const DiskPoint a(Complex(0.5, 0)), b(Complex(-0.5, 0));
  CHECK(poincare_dist(a, b) == doctest::Approx(std::log(9.0)).epsilon(1e-14));
  CHECK(poincare_dist(a, b) ==
        doctest::Approx(poincare_dist(DiskPoint(), a) + poincare_dist(DiskPoint(), b)).epsilon(1e-14));
  CHECK(poincare_dist(a, a) == 0.0);
  CHECK_THROWS_AS(DiskPoint(Complex(1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(DiskPoint(Complex(0.8, 0.6)), DomainError);
}

TEST_CASE("poincare distance agrees with the Mobius-invariant formula") {
  Rng rng(1);
  for (int rep = 0; rep < 2000; ++rep) {
    const Complex z = std::polar(std::sqrt(rng.uniform()) * 0.95, rng.uniform(0.0, 2 * kPi));
    const Complex w = std::polar(std::sqrt(rng.uniform()) * 0.95, rng.uniform(0.0, 2 * kPi));
    const double ref = 2.0 * std::atanh(std::abs((z - w) / (1.0 - std::conj(z) * w)));
    CHECK(poincare_dist(DiskPoint(z), DiskPoint(w)) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(poincare_dist(DiskPoint(z), DiskPoint(w)) == poincare_dist(DiskPoint(w), DiskPoint(z)));
  }
}

TEST_CASE("points far beyond double resolution of |z| keep exact distances") {
  const auto p = DiskPoint::from_polar(100.0, 0.0);
  const auto q = DiskPoint::from_polar(90.0, 0.0);
  CHECK(p.modulus() == 1.0);  // 1 - |z| is below machine epsilon
  CHECK(poincare_dist(p, q) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(poincare_dist(DiskPoint(), p) == doctest::Approx(100.0).epsilon(1e-14));
  // cosh d = cosh^2 R at a right angle, so d = 2R - log 2 up to e^{-2R}
  const auto r = DiskPoint::from_polar(100.0, kPi / 2);
  CHECK(poincare_dist(p, r) == doctest::Approx(200.0 - kLn2).epsilon(1e-13));
  const auto m = MobiusMap::translation(0.5);
  DiskPoint x;
  for (int k = 0; k < 300; ++k) x = m(x);
  CHECK(poincare_dist(DiskPoint(), x) == doctest::Approx(300.0 * kLn3).epsilon(1e-12));
}

TEST_CASE("Busemann function on the disk") {
  const Complex one(1.0, 0.0);
  CHECK(busemann_disk(one, DiskPoint()) == 0.0);
  CHECK(busemann_disk(one, DiskPoint(Complex(0.5, 0))) == doctest::Approx(-kLn3).epsilon(1e-14));
  CHECK(busemann_disk(one, DiskPoint(Complex(-0.5, 0))) == doctest::Approx(kLn3).epsilon(1e-14));
  CHECK(busemann_disk(one, DiskPoint(Complex(0.5, 0))) == doctest::Approx(-poincare_dist(DiskPoint(), DiskPoint(Complex(0.5, 0)))));
}

TEST_CASE("Busemann function is the radial limit of metric functionals") {
  const auto disk = poincare_space();
  Rng rng(2);
  const auto sampler = disk_sampler(3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double angle = rng.uniform(0.0, 2 * kPi);
    const Complex xi = std::polar(1.0, angle);
    const DiskPoint z = sampler(rng);
    double prev = INFINITY;
    for (double radius : {5.0, 10.0, 20.0, 40.0}) {
      const double h = eval_metric_functional(disk, DiskPoint(), DiskPoint::from_polar(radius, angle), z);
      const double err = std::abs(h - busemann_disk(xi, z));
      CHECK(err <= prev + 1e-12);
      prev = err;
    }
    CHECK(prev < 1e-9);
    const DiskPoint y = sampler(rng);
    const double b = busemann_disk(xi, z);
    CHECK(b >= -poincare_dist(DiskPoint(), z) - 1e-9);
    CHECK(b <= poincare_dist(z, DiskPoint()) + 1e-9);
    CHECK(std::abs(b - busemann_disk(xi, y)) <= poincare_dist(z, y) + 1e-9);
  }
}

TEST_CASE("Mobius maps are disk isometries and compose correctly") {
  Rng rng(3);
  const auto sampler = disk_sampler(4.0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto f = MobiusMap::translation(rng.uniform(0.0, 0.9), rng.uniform(0.0, 2 * kPi));
    const auto g = compose(MobiusMap::rotation(rng.uniform(0.0, 2 * kPi)), MobiusMap::translation(0.3, 1.0));
    const auto x = sampler(rng);
    const auto y = sampler(rng);
    CHECK(poincare_dist(f(x), f(y)) == doctest::Approx(poincare_dist(x, y)).epsilon(1e-10));
    const auto fg = compose(f, g);
    CHECK(std::abs(fg(x).z() - f(g(x)).z()) < 1e-12);
  }
  CHECK(MobiusMap::translation(0.5).translation_length() == doctest::Approx(kLn3).epsilon(1e-14));
}

TEST_CASE("Thompson distance examples") {
  const auto id = diag_point({1.0, 1.0});
  const auto q = diag_point({std::exp(2.0), std::exp(-1.0)});
  CHECK(thompson_dist(id, q) == doctest::Approx(2.0).epsilon(1e-14));
  // grid over unit vectors in the plane
  double best = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double t = kPi * i / 200000.0;
    const double c = std::cos(t), s = std::sin(t);
    best = std::max(best, std::abs(std::log(std::exp(2.0) * c * c + std::exp(-1.0) * s * s)));
  }
  CHECK(thompson_dist(id, q) == doctest::Approx(best).epsilon(1e-10));
  CHECK(thompson_dist(q, q) <= kIdentityTol);
}

TEST_CASE("Thompson spectral form equals the Rayleigh supremum") {
  Rng rng(4);
  for (std::size_t d = 1; d <= 6; ++d) {
    const auto sampler = spd_sampler(d, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
      const auto p = sampler(rng);
      const auto q = sampler(rng);
      CHECK(thompson_dist(p, q) == doctest::Approx(rayleigh_sup(p.matrix(), q.matrix(), rng)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("congruences are Thompson isometries") {
  Rng rng(5);
  const auto sampler = spd_sampler(3, 0.7);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto p = sampler(rng);
    const auto q = sampler(rng);
    const Congruence g{oracle::random_matrix(rng, 3, 3)};
    CHECK(thompson_dist(g(p), g(q)) == doctest::Approx(thompson_dist(p, q)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("exp is distance preserving on lines through the identity") {
  Rng rng(6);
  const SpdPoint id(Matrix::identity(3));
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix u = random_symmetric(rng, 3, 1.0);
    const double s = rng.uniform(-3.0, 3.0);
    CHECK(thompson_dist(id, SpdPoint(sym_exp(u * s))) ==
          doctest::Approx(std::abs(s) * sym_spectral_norm(u)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("Funk distance") {
  const auto id = diag_point({1.0, 1.0});
  CHECK(funk_dist(id, diag_point({0.5, 0.5})) == doctest::Approx(-kLn2).epsilon(1e-15));
  CHECK(funk_dist(id, id) == 0.0);
  const auto q = diag_point({std::exp(2.0), std::exp(-1.0)});
  CHECK(std::max(funk_dist(id, q), funk_dist(q, id)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(funk_dist(id, diag_point({1.0, 0.5})) == 0.0);  // distinct points at distance 0
  CHECK_FALSE(funk_space().separates_points);
  Rng rng(7);
  const auto sampler = spd_sampler(4);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = sampler(rng);
    const auto r = sampler(rng);
    CHECK(symmetrize(funk_space(), p, r) == doctest::Approx(rayleigh_sup(p.matrix(), r.matrix(), rng)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("SPD construction rejects bad input") {
  CHECK_THROWS_AS(SpdPoint(Matrix{{1.0, 0.5}, {0.4, 1.0}}), SymmetryError);
  CHECK_THROWS_AS(SpdPoint(Matrix{{1.0, 2.0}, {2.0, 1.0}}), NotSpdError);
  CHECK_THROWS_AS(SpdPoint(Matrix{{0.0, 0.0}, {0.0, 1.0}}), NotSpdError);
  CHECK_NOTHROW(SpdPoint(Matrix{{2.0, 1.0 + 1e-13}, {1.0, 2.0}}));
}

TEST_CASE("stretch metric") {
  const auto sample = stretch_sample(6, 2, 9);
  const auto d1 = SampledDistanceFunction::euclidean(sample);
  const SampledDistanceFunction d2(sample, [](const Vector& x, const Vector& y) { return 2.0 * norm2(x - y); });
  CHECK(stretch_dist(d1, d2) == doctest::Approx(kLn2).epsilon(1e-14));
  CHECK(stretch_dist(d2, d1) == doctest::Approx(-kLn2).epsilon(1e-14));
  CHECK(stretch_dist(d1, d1) == 0.0);
  const auto doubled = pullback([](const Vector& x) { return 2.0 * x; }, d1);
  CHECK(stretch_dist(d1, doubled) == doctest::Approx(kLn2).epsilon(1e-14));
  const auto same = pullback([](const Vector& x) { return x; }, d1);
  for (std::size_t i = 0; i < sample->size(); ++i)
    for (std::size_t j = 0; j < sample->size(); ++j) CHECK(same.value(i, j) == d1.value(i, j));
}

TEST_CASE("pullback by a permutation of the sample preserves stretch distances") {
  auto sample = std::make_shared<std::vector<Vector>>();
  for (int i = 0; i < 6; ++i) sample->push_back({std::cos(2 * kPi * i / 6), std::sin(2 * kPi * i / 6)});
  // rotation by 2 pi / 6 permutes the hexagon
  AmbientMap rot = [](const Vector& x) {
    const double c = std::cos(2 * kPi / 6), s = std::sin(2 * kPi / 6);
    return Vector{c * x[0] - s * x[1], s * x[0] + c * x[1]};
  };
  Rng rng(10);
  const auto sampler = stretch_sampler(sample);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = sampler(rng);
    const auto b = sampler(rng);
    CHECK(stretch_dist(pullback(rot, a), pullback(rot, b)) == doctest::Approx(stretch_dist(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("stretch metric rejects degenerate input") {
  auto sample = std::make_shared<std::vector<Vector>>(std::vector<Vector>{{0, 0}, {1, 0}, {1, 0}});
  const auto d = SampledDistanceFunction::euclidean(sample);
  CHECK_THROWS_AS(stretch_dist(d, d), DegenerateInputError);
  const auto good = SampledDistanceFunction::euclidean(stretch_sample(4, 2, 1));
  const SampledDistanceFunction bounded(good.sample_handle(), [](const Vector& x, const Vector& y) { return norm2(x - y); },
                                        [](const Vector& x) { return norm2(x) < 100.0; });
  CHECK_THROWS_AS(pullback([](const Vector& x) { return 1e3 * x; }, bounded), DomainError);
  const auto other = SampledDistanceFunction::euclidean(stretch_sample(4, 2, 2));
  CHECK_THROWS_AS(stretch_dist(good, other), InputError);
}

TEST_CASE("Jacobian weak metric") {
  const auto id = CircleMap::identity();
  const auto sine = CircleMap::sine_perturbation(0.5);
  double best = 0.0;
  for (int i = 0; i < 100000; ++i) best = std::max(best, std::abs(std::log(1.0 + 0.5 * std::cos(2 * kPi * i / 100000.0))));
  CHECK(best == doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(jacobian_dist(id, sine, 1024) == doctest::Approx(best).epsilon(1e-12));
  CHECK(jacobian_dist(sine, sine, 64) == 0.0);
  CHECK(jacobian_dist(CircleMap::rotation(0.3), CircleMap::rotation(2.0), 64) == 0.0);
  CHECK(jacobian_dist(id, CircleMap::rotation(1.0), 64) == 0.0);
  CHECK_THROWS_AS(jacobian_dist(id, sine, 15), InputError);
  const auto folded = CircleMap::from_functions([](double t) { return t + std::sin(t); },
                                                [](double t) { return 1.0 + std::cos(t); });
  CHECK_THROWS_AS(jacobian_dist(id, folded, 64), NotDiffeomorphismError);
  CHECK_THROWS_AS(CircleMap::sine_perturbation(1.0), NotDiffeomorphismError);
  // numerical derivative fallback
  const auto numeric = CircleMap::from_functions([](double t) { return t + 0.5 * std::sin(t); });
  CHECK(jacobian_dist(id, numeric, 1024) == doctest::Approx(kLn2).epsilon(1e-8));
}

TEST_CASE("circle maps: lift, complex action and differences agree") {
  Rng rng(11);
  const auto sampler = circle_map_sampler();
  for (int rep = 0; rep < 200; ++rep) {
    const auto f = sampler(rng);
    const double t = rng.uniform(-kPi, kPi);
    const Complex z = std::polar(1.0, t);
    CHECK(std::abs(f.apply(z) - std::polar(1.0, f.lift(t))) < 1e-12);
    CHECK(f.derivative_at(z) == doctest::Approx(f.derivative(t)).epsilon(1e-12));
    const double delta = 1e-3;
    CHECK(f.difference(z, delta) == doctest::Approx(f.lift(t + delta) - f.lift(t)).epsilon(1e-9));
    // tiny offsets keep full relative accuracy
    const double tiny = 1e-40;
    CHECK(f.difference(z, tiny) / tiny == doctest::Approx(f.derivative(t)).epsilon(1e-12));
  }
  const auto m = CircleMap::mobius_translation(0.5);
  CHECK(m.apply(Complex(-1.0, 0.0)) == Complex(-1.0, 0.0));
  CHECK(m.derivative_at(Complex(-1.0, 0.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(circle_point(250, 1000) == Complex(0.0, 1.0));
  CHECK(circle_point(500, 1000) == Complex(-1.0, 0.0));
}
