#include <cmath>
#include <numbers>

#include "doctest.h"
#include "horoflow/cocycle.hpp"
#include "horoflow/disk.hpp"
#include "horoflow/euclidean.hpp"
#include "horoflow/samplers.hpp"

using namespace horoflow;

namespace {

const double kLn3 = std::log(3.0);

Translation shift(double a) { return {Vector{a}}; }

ErgodicDriver<Translation> plus_one(Order order = Order::right_increment) {
  return ErgodicDriver<Translation>::constant(shift(1.0), order, 1);
}

ErgodicDriver<Translation> fair_walk(std::uint64_t seed) {
  return ErgodicDriver<Translation>::iid_finite({shift(1.0), shift(-1.0)}, {0.5, 0.5}, Order::right_increment, seed);
}

ErgodicDriver<MobiusMap> two_mobius(Order order, std::uint64_t seed) {
  return ErgodicDriver<MobiusMap>::iid_finite({MobiusMap::translation(0.5), MobiusMap::translation(0.3, std::numbers::pi / 2)},
                                              {0.5, 0.5}, order, seed);
}

// E|S_n| / n for the simple random walk with n even: C(n, n/2) / 2^n.
double folded_walk_mean(std::size_t n) {
  const double m = static_cast<double>(n) / 2.0;
  return std::exp(std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0) - 2.0 * m * std::numbers::ln2);
}

}  // namespace

TEST_CASE("orbit examples") {
  const auto R = euclidean_space();
  const auto o = generate_orbit(plus_one(), R, Vector{0.0}, 3, 0);
  REQUIRE(o.points.size() == 3);
  CHECK(!o.truncated);
  CHECK(o.points[0][0] == 1.0);
  CHECK(o.points[1][0] == 2.0);
  CHECK(o.points[2][0] == 3.0);

  const auto disk = poincare_space();
  const auto m = ErgodicDriver<MobiusMap>::constant(MobiusMap::translation(0.5));
  const auto d = generate_orbit(m, disk, DiskPoint(), 2, 0);
  REQUIRE(d.points.size() == 2);
  CHECK(std::abs(d.points[0].z() - Complex(0.5, 0.0)) <= 1e-15);
  CHECK(std::abs(d.points[1].z() - Complex(0.8, 0.0)) <= 1e-15);
  CHECK_THROWS_AS(generate_orbit(m, disk, DiskPoint(), 0, 0), InputError);
}

TEST_CASE("orbits are deterministic per seed and trial") {
  const auto R = euclidean_space();
  const auto a = generate_orbit(fair_walk(42), R, Vector{0.0}, 500, 3);
  const auto b = generate_orbit(fair_walk(42), R, Vector{0.0}, 500, 3);
  const auto c = generate_orbit(fair_walk(42), R, Vector{0.0}, 500, 4);
  const auto e = generate_orbit(fair_walk(43), R, Vector{0.0}, 500, 3);
  REQUIRE(a.points.size() == 500);
  bool same = true;
  for (std::size_t k = 0; k < 500; ++k) same = same && a.points[k] == b.points[k];
  CHECK(same);
  CHECK(a.points != c.points);
  CHECK(a.points != e.points);

  const auto D = poincare_space();
  const auto x = generate_orbit(two_mobius(Order::right_increment, 9), D, DiskPoint(), 200, 1);
  const auto y = generate_orbit(two_mobius(Order::right_increment, 9), D, DiskPoint(), 200, 1);
  for (std::size_t k = 0; k < 200; ++k) {
    CHECK(x.points[k].z() == y.points[k].z());
    CHECK(x.points[k].log_defect() == y.points[k].log_defect());
  }
}

TEST_CASE("subadditive trace examples") {
  const auto R = euclidean_space();
  const auto t = subadditive_trace(plus_one(), R, Vector{0.0}, 50, 0);
  REQUIRE(t.a.size() == 51);
  for (std::size_t k = 0; k <= 50; ++k) CHECK(t.a[k] == static_cast<double>(k));

  const auto driver = fair_walk(5);
  const auto maps = driver.maps_for(2, 300);
  const auto w = subadditive_trace(driver, R, Vector{0.0}, 300, 2);
  double s = 0.0;
  for (std::size_t k = 0; k < 300; ++k) {
    s += maps[k].offset[0];
    CHECK(w.a[k + 1] == std::abs(s));
  }

  const auto D = poincare_space();
  const auto m = ErgodicDriver<MobiusMap>::constant(MobiusMap::translation(0.5));
  const auto h = subadditive_trace(m, D, DiskPoint(), 1000, 0);
  for (std::size_t k : {1, 10, 100, 1000}) CHECK(h.a[k] == doctest::Approx(k * kLn3).epsilon(1e-12));
}

TEST_CASE("top exponent examples") {
  const auto R = euclidean_space();
  const auto e = estimate_top_exponent(plus_one(), R, Vector{0.0}, 100, 5, 2);
  CHECK(e.lambda_hat == 1.0);
  CHECK(e.std_error == 0.0);
  CHECK(e.trials == 5);
  CHECK(e.truncated == 0);

  const auto D = poincare_space();
  const auto m = ErgodicDriver<MobiusMap>::constant(MobiusMap::translation(0.5));
  const auto h = estimate_top_exponent(m, D, DiskPoint(), 1000, 3, 2);
  CHECK(std::abs(h.lambda_hat - kLn3) <= 1e-3);

  CHECK_THROWS_AS(estimate_top_exponent(plus_one(), R, Vector{0.0}, 9, 1), InputError);
  CHECK_THROWS_AS(estimate_top_exponent(plus_one(), R, Vector{0.0}, 100, 0), InputError);
}

// The literal statement fails at any finite n: E|S_n|/n = sqrt(2 / (pi n)) ~ 8e-3
// at n = 1e4 while the standard error over 100 trials is ~ 6e-4, so the mean
// sits about 13 standard errors above 0. The limit is 0 only as n -> infinity.
TEST_CASE("folded random walk exponent is within 3 standard errors of 0" * doctest::should_fail()) {
  const auto e = estimate_top_exponent(fair_walk(11), euclidean_space(), Vector{0.0}, 10000, 100, 4);
  CHECK(std::abs(e.lambda_hat) <= 3.0 * e.std_error);
}

TEST_CASE("folded random walk exponent matches the exact finite-n mean") {
  const std::size_t n = 10000;
  const auto e = estimate_top_exponent(fair_walk(11), euclidean_space(), Vector{0.0}, n, 100, 4);
  const double exact = folded_walk_mean(n);
  CHECK(exact == doctest::Approx(std::sqrt(2.0 / (std::numbers::pi * n))).epsilon(1e-4));
  CHECK(std::abs(e.lambda_hat - exact) <= 3.0 * e.std_error);
  CHECK(e.per_trial.size() == 100);
}

TEST_CASE("estimates do not depend on the thread count") {
  const auto D = poincare_space();
  const auto a = estimate_top_exponent(two_mobius(Order::right_increment, 3), D, DiskPoint(), 400, 16, 1);
  const auto b = estimate_top_exponent(two_mobius(Order::right_increment, 3), D, DiskPoint(), 400, 16, 8);
  CHECK(a.per_trial == b.per_trial);
  CHECK(a.lambda_hat == b.lambda_hat);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("integrability examples") {
  const auto R = euclidean_space();
  const auto r = check_integrability(plus_one(), R, Vector{0.0}, 100);
  CHECK(r.exact);
  CHECK(r.mean_step == 1.0);
  CHECK(!r.heavy);

  const auto D = poincare_space();
  const auto m = check_integrability(two_mobius(Order::right_increment, 1), D, DiskPoint(), 100);
  CHECK(m.exact);
  CHECK(m.mean_step == doctest::Approx(0.5 * (kLn3 + std::log(1.3 / 0.7))).epsilon(1e-14));

  const auto cauchy = ErgodicDriver<Translation>::iid_parametric(
      [](Rng& rng) { return shift(rng.cauchy()); }, Order::right_increment, 17, false);
  const auto c = check_integrability(cauchy, R, Vector{0.0}, 10000);
  CHECK(!c.exact);
  CHECK(c.heavy);
  CHECK(!cauchy.bounded());

  const auto normal = ErgodicDriver<Translation>::iid_parametric(
      [](Rng& rng) { return shift(rng.normal()); }, Order::right_increment, 17);
  const auto g = check_integrability(normal, R, Vector{0.0}, 10000);
  CHECK(!g.heavy);
  CHECK(g.mean_step == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(0.05));

  CHECK_THROWS_AS(check_integrability(plus_one(), R, Vector{0.0}, 99), InputError);
  const auto inf = ErgodicDriver<Translation>::constant(shift(INFINITY));
  CHECK_THROWS_AS(check_integrability(inf, R, Vector{0.0}, 100), IntegrabilityError);
}

TEST_CASE("horofunction gap examples") {
  const auto D = poincare_space();
  const auto m = ErgodicDriver<MobiusMap>::constant(MobiusMap::translation(0.5));
  GapOptions<DiskPoint> bus;
  bus.functional = [](const DiskPoint&) {
    return std::function<double(const DiskPoint&)>([](const DiskPoint& y) { return busemann_disk(1.0, y); });
  };
  const auto g = horofunction_gap(m, D, DiskPoint(), 100, 10, 0, bus);
  REQUIRE(!g.truncated);
  CHECK(g.k.back() == 100);
  for (double v : g.gap) CHECK(v <= 1e-9);

  const auto a = horofunction_gap(m, D, DiskPoint(), 100, 10, 0);
  for (double v : a.gap) CHECK(v <= 1e-9);

  GapOptions<EuclideanPoint> lin;
  lin.functional = [](const EuclideanPoint&) {
    return std::function<double(const EuclideanPoint&)>([](const EuclideanPoint& y) { return -y[0]; });
  };
  const auto t = horofunction_gap(plus_one(), euclidean_space(), Vector{0.0}, 100, 10, 0, lin);
  for (double v : t.gap) CHECK(v == 0.0);
  CHECK_THROWS_AS(horofunction_gap(plus_one(), euclidean_space(), Vector{0.0}, 99, 10, 0), InputError);
}

TEST_CASE("tail evaluation of the gap agrees with the direct one") {
  const auto D = poincare_space();
  const auto walk = ErgodicDriver<MobiusMap>::iid_finite(
      {MobiusMap::translation(0.05, std::numbers::pi / 6), MobiusMap::translation(0.05, -std::numbers::pi / 6)},
      {0.5, 0.5}, Order::right_increment, 3);
  GapOptions<DiskPoint> direct;
  direct.anchor_horizon = 200;
  GapOptions<DiskPoint> tail = direct;
  tail.isometric_tail = true;
  for (std::size_t t = 0; t < 5; ++t) {
    const auto a = horofunction_gap(walk, D, DiskPoint(), 100, 8, t, direct);
    const auto b = horofunction_gap(walk, D, DiskPoint(), 100, 8, t, tail);
    REQUIRE(a.k == b.k);
    CHECK(a.kingman == b.kingman);
    for (std::size_t i = 0; i < a.k.size(); ++i) CHECK(b.gap[i] == doctest::Approx(a.gap[i]).epsilon(1e-9).scale(1.0));
  }

  GapOptions<EuclideanPoint> lin;
  lin.isometric_tail = true;
  CHECK_THROWS_AS(horofunction_gap(plus_one(Order::left_increment), euclidean_space(), Vector{0.0}, 100, 4, 0, lin),
                  InputError);
  lin.functional = [](const EuclideanPoint&) {
    return std::function<double(const EuclideanPoint&)>([](const EuclideanPoint& y) { return -y[0]; });
  };
  CHECK_THROWS_AS(horofunction_gap(plus_one(), euclidean_space(), Vector{0.0}, 100, 4, 0, lin), InputError);
}

TEST_CASE("gap of a strongly hyperbolic i.i.d. walk vanishes with tail evaluation") {
  const auto walk = ErgodicDriver<MobiusMap>::iid_finite(
      {MobiusMap::translation(0.5, std::numbers::pi / 6), MobiusMap::translation(0.5, -std::numbers::pi / 6)}, {0.5, 0.5},
      Order::right_increment, 5);
  GapOptions<DiskPoint> opt;
  opt.anchor_horizon = 8000;
  opt.isometric_tail = true;
  double sum = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const auto g = horofunction_gap(walk, poincare_space(), DiskPoint(), 2000, 4, t, opt);
    REQUIRE(!g.truncated);
    CHECK(g.kingman.back() > 0.5);
    sum += g.gap.back();
  }
  CHECK(sum / 20.0 < 0.05);
}

TEST_CASE("geometric checkpoints") {
  const auto ks = geometric_checkpoints(2000, 10);
  CHECK(ks.front() == 1);
  CHECK(ks.back() == 2000);
  for (std::size_t i = 1; i < ks.size(); ++i) CHECK(ks[i] > ks[i - 1]);
  CHECK(geometric_checkpoints(50, 1) == std::vector<std::size_t>{50});
}

TEST_CASE("subadditivity across shifted streams") {
  const auto D = poincare_space();
  const auto driver = two_mobius(Order::right_increment, 21);
  Rng rng(99);
  const DiskPoint x0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.bits() % 30;
    const std::size_t m = 1 + rng.bits() % 30;
    const auto maps = driver.maps_for(static_cast<std::size_t>(rep), n + m);
    const std::span<const MobiusMap> all(maps);
    const auto full = orbit_from_maps<DiskPoint, MobiusMap>(all, Order::right_increment, D, x0);
    const auto head = orbit_from_maps<DiskPoint, MobiusMap>(all.first(n), Order::right_increment, D, x0);
    const auto tail = orbit_from_maps<DiskPoint, MobiusMap>(all.subspan(n), Order::right_increment, D, x0);
    const double anm = D.dist(x0, full.points.back());
    const double an = D.dist(x0, head.points.back());
    const double am = D.dist(x0, tail.points.back());
    CHECK(anm <= an + am + 1e-9);
  }
}

TEST_CASE("basepoint independence of the exponent") {
  const auto D = poincare_space();
  const auto driver = two_mobius(Order::right_increment, 4);
  const auto sample = disk_sampler(3.0);
  Rng rng(8);
  const std::size_t n = 200;
  for (std::size_t t = 0; t < 50; ++t) {
    const auto x = sample(rng);
    const auto y = sample(rng);
    const auto ax = subadditive_trace(driver, D, x, n, t);
    const auto ay = subadditive_trace(driver, D, y, n, t);
    const double bound = (D.dist(x, y) + D.dist(y, x)) / n;
    CHECK(std::abs(ax.a[n] / n - ay.a[n] / n) <= bound + 1e-9);
  }
}

TEST_CASE("increment order changes non-commuting orbits") {
  const auto D = poincare_space();
  const auto right = two_mobius(Order::right_increment, 12);
  const auto left = right.with_order(Order::left_increment);
  const auto r = generate_orbit(right, D, DiskPoint(), 20, 0);
  const auto l = generate_orbit(left, D, DiskPoint(), 20, 0);
  const auto maps = right.maps_for(0, 20);

  // Hand composition: right order g0(g1(... x)), left order ...g1(g0(x)).
  DiskPoint lx;
  for (std::size_t k = 0; k < 20; ++k) {
    lx = maps[k](lx);
    DiskPoint rx;
    for (std::size_t j = k + 1; j-- > 0;) rx = maps[j](rx);
    CHECK(poincare_dist(rx, r.points[k]) <= 1e-9);
    CHECK(poincare_dist(lx, l.points[k]) <= 1e-9);
  }
  double diff = 0.0;
  for (std::size_t k = 0; k < 20; ++k) diff = std::max(diff, poincare_dist(r.points[k], l.points[k]));
  CHECK(diff > 1e-3);
}

TEST_CASE("rotation driver") {
  const auto driver = ErgodicDriver<Translation>::rotation({0.3}, {shift(1.0), shift(-1.0)}, Order::right_increment, 6);
  CHECK(driver.kind() == DriverKind::rotation);
  CHECK(driver.weights()[0] == doctest::Approx(0.3));
  CHECK(driver.weights()[1] == doctest::Approx(0.7));
  const auto maps = driver.maps_for(0, 10000);
  std::size_t ups = 0;
  for (const auto& m : maps) ups += m.offset[0] > 0.0;
  // Three-gap equidistribution of the golden rotation: discrepancy O(log n / n).
  CHECK(std::abs(static_cast<double>(ups) / 10000.0 - 0.3) <= 1e-3);
  CHECK(driver.maps_for(0, 100).size() == 100);
  const auto again = driver.maps_for(0, 10000);
  bool same = true;
  for (std::size_t i = 0; i < maps.size(); ++i) same = same && maps[i].offset == again[i].offset;
  CHECK(same);

  const auto e = estimate_top_exponent(driver, euclidean_space(), Vector{0.0}, 10000, 4, 2);
  CHECK(e.lambda_hat == doctest::Approx(0.4).epsilon(1e-3));
  const auto r = check_integrability(driver, euclidean_space(), Vector{0.0}, 100);
  CHECK(r.exact);
  CHECK(r.mean_step == doctest::Approx(1.0));

  CHECK_THROWS_AS(ErgodicDriver<Translation>::rotation({0.6, 0.4}, {shift(1), shift(2), shift(3)}, Order::right_increment, 0),
                  InputError);
  CHECK_THROWS_AS(ErgodicDriver<Translation>::rotation({0.5}, {shift(1)}, Order::right_increment, 0), InputError);
}

TEST_CASE("driver construction errors") {
  CHECK_THROWS_AS(ErgodicDriver<Translation>::iid_finite({shift(1)}, {0.5}, Order::right_increment, 0), InputError);
  CHECK_THROWS_AS(ErgodicDriver<Translation>::iid_finite({}, {}, Order::right_increment, 0), InputError);
  CHECK_THROWS_AS(ErgodicDriver<Translation>::iid_finite({shift(1), shift(2)}, {1.5, -0.5}, Order::right_increment, 0),
                  InputError);
  CHECK_THROWS_AS(ErgodicDriver<Translation>::iid_parametric({}, Order::right_increment, 0), InputError);
}

TEST_CASE("truncated trials are excluded and counted") {
  std::vector<std::optional<double>> v(10, 1.0);
  v[3].reset();
  const auto e = summarize_trials(10, v, std::vector<double>(10, 0.0));
  CHECK(e.truncated == 1);
  CHECK(e.trials == 9);
  CHECK(e.trial_ids[3] == 4);
  v[7].reset();
  CHECK_THROWS_AS(summarize_trials(10, v, std::vector<double>(10, 0.0)), EstimationError);

  auto bounded = euclidean_space();
  bounded.contains = [](const EuclideanPoint& x) { return std::abs(x[0]) < 5.0; };
  CHECK_THROWS_AS(estimate_top_exponent(fair_walk(2), bounded, Vector{0.0}, 100, 20, 2), EstimationError);
  const auto o = generate_orbit(plus_one(), bounded, Vector{0.0}, 10, 0);
  CHECK(o.truncated);
  CHECK(o.truncated_at == 5);
  CHECK(o.points.size() == 4);
  const auto t = subadditive_trace(plus_one(), bounded, Vector{0.0}, 10, 0);
  CHECK(t.truncated);
  CHECK(t.a.size() == 5);
}
