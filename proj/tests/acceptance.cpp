// Acceptance suite: one PASS/FAIL line per criterion with its runtime.
// Usage: horoflow_acceptance [--work <dir>] [--only <k>]

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "horoflow/circle.hpp"
#include "horoflow/cli/experiments.hpp"
#include "horoflow/cli/runner.hpp"
#include "horoflow/cocycle.hpp"
#include "horoflow/deepnet.hpp"
#include "horoflow/disk.hpp"
#include "horoflow/euclidean.hpp"
#include "horoflow/metric_core.hpp"
#include "horoflow/operator_thompson.hpp"
#include "horoflow/oseledets.hpp"
#include "horoflow/samplers.hpp"
#include "horoflow/spd.hpp"
#include "horoflow/stretch.hpp"

using namespace horoflow;
namespace fs = std::filesystem;

namespace {

const double kLn2 = std::numbers::ln2;
const double kLn3 = std::log(3.0);
const std::size_t kSamples = 10000;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  std::string name;
  double budget_seconds;  // 0: no runtime bound
  std::function<void(Outcome&)> body;
};

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

// ---------------------------------------------------------------- metric spaces

struct SpaceCase {
  std::string name;
  std::function<void(Outcome&, std::uint64_t)> axioms;
  std::function<void(Outcome&, std::uint64_t)> bounds;
};

template <class P>
void axioms_on(Outcome& o, const WeakMetricSpace<P>& space, const PointSampler<P>& sampler, std::uint64_t seed) {
  Rng rng(seed);
  double self = 0.0;
  double excess = -INFINITY;
  for (std::size_t t = 0; t < kSamples; ++t) {
    const P x = sampler(rng);
    const P y = sampler(rng);
    const P z = sampler(rng);
    self = std::max(self, std::abs(space.dist(x, x)));
    excess = std::max(excess, space.dist(x, y) - space.dist(x, z) - space.dist(z, y));
  }
  o.detail << " " << space.name << "(self " << self << ", triangle " << excess << ")";
  o.require(self <= 1e-12, space.name + " identity");
  o.require(excess <= 1e-9, space.name + " triangle");
}

template <class P>
void bounds_on(Outcome& o, const WeakMetricSpace<P>& space, const P& x0, const PointSampler<P>& sampler,
               std::uint64_t seed) {
  Rng rng(seed);
  double worst = -INFINITY;
  for (std::size_t t = 0; t < kSamples; ++t) {
    const P anchor = sampler(rng);
    const P y = sampler(rng);
    const P z = sampler(rng);
    const double base = space.dist(x0, anchor);
    const double hy = space.dist(y, anchor) - base;
    const double hz = space.dist(z, anchor) - base;
    worst = std::max({worst, -space.dist(x0, y) - hy, hy - space.dist(y, x0),
                      std::abs(hy - hz) - std::max(space.dist(y, z), space.dist(z, y))});
  }
  o.detail << " " << space.name << "(" << worst << ")";
  o.require(worst <= 1e-9, space.name + " functional bounds");
}

template <class P>
SpaceCase space_case(WeakMetricSpace<P> space, PointSampler<P> sampler, P x0) {
  return {space.name, [=](Outcome& o, std::uint64_t seed) { axioms_on(o, space, sampler, seed); },
          [=](Outcome& o, std::uint64_t seed) { bounds_on(o, space, x0, sampler, seed); }};
}

std::vector<SpaceCase> all_spaces() {
  const auto sample = stretch_sample(8, 3, 100);
  return {space_case(euclidean_space(), euclidean_sampler(3), Vector(3, 0.0)),
          space_case(poincare_space(), disk_sampler(), DiskPoint()),
          space_case(thompson_space(), spd_sampler(3), SpdPoint(Matrix::identity(3))),
          space_case(funk_space(), spd_sampler(3), SpdPoint(Matrix::identity(3))),
          space_case(stretch_space(), stretch_sampler(sample), SampledDistanceFunction::euclidean(sample)),
          space_case(jacobian_space(64), circle_map_sampler(), CircleMap::identity())};
}

void metric_axioms(Outcome& o) {
  std::uint64_t seed = 1;
  for (const auto& c : all_spaces()) c.axioms(o, seed++);
}

void functional_bounds(Outcome& o) {
  std::uint64_t seed = 11;
  for (const auto& c : all_spaces()) c.bounds(o, seed++);
}

// ---------------------------------------------------------------- Thompson

// sup over v of |log (q v, v) / (p v, v)| by coordinate search from the
// generalized eigenvectors of Eigen's solver and from random starts.
double rayleigh_sup(const Matrix& p, const Matrix& q, Rng& rng) {
  const Eigen::MatrixXd ep = to_eigen(p);
  const Eigen::MatrixXd eq = to_eigen(q);
  auto value = [&](const Eigen::VectorXd& v) { return std::abs(std::log(v.dot(eq * v) / v.dot(ep * v))); };
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(eq, ep);
  std::vector<Eigen::VectorXd> starts;
  for (Eigen::Index k = 0; k < ep.rows(); ++k) starts.push_back(ges.eigenvectors().col(k));
  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXd v(ep.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    starts.push_back(v);
  }
  double best = 0.0;
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

void thompson_dual(Outcome& o) {
  Rng rng(3);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t d = 1 + static_cast<std::size_t>(rep) % 6;
    const auto sampler = spd_sampler(d, 1.0);
    const auto p = sampler(rng);
    const auto q = sampler(rng);
    const double oracle = rayleigh_sup(p.matrix(), q.matrix(), rng);
    worst = std::max(worst, std::abs(thompson_dist(p, q) - oracle) / std::max(1.0, oracle));
  }
  o.detail << " worst relative difference " << worst;
  o.require(worst <= 1e-8, "spectral vs Rayleigh");
}

// ---------------------------------------------------------------- Oseledets

void oseledets_constant(Outcome& o) {
  Eigen::Matrix3d s;
  s << 1.0, 0.4, -0.3, 0.2, 1.1, 0.5, -0.6, 0.1, 0.9;
  const Eigen::Matrix3d a = s * Eigen::Vector3d(3.0, 1.0, 0.5).asDiagonal() * s.inverse();
  Matrix m(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a(i, j);
  const auto r = qr_spectrum(MatrixDriver::constant(m, Order::left_increment), 100000, 0);
  const double expected[3] = {kLn3, 0.0, -kLn2};
  for (std::size_t i = 0; i < 3; ++i) {
    o.detail << " " << r.exponents[i];
    o.require(std::abs(r.exponents[i] - expected[i]) <= 5e-3, "exponent " + std::to_string(i));
  }
}

MatrixDriver sl2_pair(std::uint64_t seed) {
  return MatrixDriver::iid_finite({Matrix{{2, 1}, {1, 1}}, Matrix{{1, 1}, {1, 2}}}, {0.5, 0.5}, Order::left_increment,
                                  seed);
}

void two_estimators(Outcome& o) {
  const auto qr = qr_top_exponent(sl2_pair(2024), 10000, 100);
  const auto growth = growth_rate_estimate(sl2_pair(77), Vector{1.0, 0.3}, 10000, 100);
  const double se = std::hypot(qr.std_error, growth.std_error);
  o.detail << " qr " << qr.lambda_hat << ", growth " << growth.lambda_hat << ", combined SE " << se;
  o.require(std::abs(qr.lambda_hat - growth.lambda_hat) <= 3.0 * se, "within 3 SE");
}

// ---------------------------------------------------------------- operator

void operator_tau(Outcome& o) {
  const auto dg = MatrixDriver::constant(Matrix{{2, 0}, {0, 0.5}}, Order::left_increment);
  double worst_tau = 0.0;
  double worst_ratio = 0.0;
  for (std::size_t n : {10, 100, 1000, 10000}) {
    for (double v : tau_estimate(dg, n, 1, 1).per_trial) worst_tau = std::max(worst_tau, std::abs(v - 2.0 * kLn2));
    for (const auto& row : state_ratio_check(dg, n, {n}, 0))
      worst_ratio = std::max({worst_ratio, std::abs(row.ratio - row.tau_hat), std::abs(row.ratio - 2.0 * kLn2)});
  }
  o.detail << " tau error " << worst_tau << ", ratio error " << worst_ratio;
  o.require(worst_tau <= 1e-9, "tau");
  o.require(worst_ratio <= 1e-9, "state ratio");
}

void segal(Outcome& o) {
  Rng rng(7);
  auto draw = [&rng] {
    Matrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j) m(i, j) = m(j, i) = rng.uniform(-2.0, 2.0);
    return m;
  };
  double excess = -INFINITY;
  double path = 0.0;
  for (std::size_t rep = 0; rep < kSamples; ++rep) {
    const Matrix u = draw();
    const Matrix v = draw();
    const auto r = segal_check(u, v);
    excess = std::max(excess, r.lhs - r.rhs);
    path = std::max(path, r.path_gap);
  }
  o.detail << " max lhs - rhs " << excess << ", path gap " << path;
  o.require(excess <= 1e-10, "lhs <= rhs");
  o.require(path <= 1e-9, "exponential paths");
}

// ---------------------------------------------------------------- deepnet

void resnet(Outcome& o) {
  auto relu1 = [](double b) { return LayerMap::certified(Matrix{{1.0}}, Vector{b}, Activation::relu); };
  const std::size_t n = 10000;
  const auto coin = ErgodicDriver<LayerMap>::iid_finite({relu1(0.5), relu1(1.5)}, {0.5, 0.5}, Order::left_increment, 2024);
  const auto r = resnet_drift(coin, Vector{0.0}, n, 100);
  o.detail << " relu mean " << r.mean[0] << " (SE " << r.per_coordinate_se[0] << ")";
  o.require(std::abs(r.mean[0] - 1.0) <= 3.0 * r.per_coordinate_se[0], "relu drift");
  o.require(r.cross_input_gap <= 1.0 / n, "relu cross-input gap");

  Rng rng(8);
  for (std::size_t d : {2, 4}) {
    std::vector<LayerMap> support;
    for (int i = 0; i < 4; ++i) {
      Matrix w(d, d);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) w(a, b) = rng.normal();
      support.push_back(LayerMap::certified(w, rng.normal_vector(d), Activation::tanh, LayerForm::resnet_adjoint));
    }
    const auto driver =
        ErgodicDriver<LayerMap>::iid_finite(support, std::vector<double>(4, 0.25), Order::left_increment, 9);
    Vector x0 = rng.normal_vector(d);
    for (auto& v : x0) v *= 50.0;
    const auto e = resnet_drift(driver, x0, n, 20);
    double worst = 0.0;
    for (const auto& v : e.v_hat) worst = std::max(worst, norm2(v));
    o.detail << ", tanh d=" << d << " max |v_hat| " << worst << " gap " << e.cross_input_gap;
    o.require(worst <= std::sqrt(static_cast<double>(d)) / static_cast<double>(n), "tanh drift bound");
    o.require(e.cross_input_gap <= 1.0 / static_cast<double>(n), "tanh cross-input gap");
  }
}

void horofunction(Outcome& o) {
  const auto D = poincare_space();
  const auto constant = ErgodicDriver<MobiusMap>::constant(MobiusMap::translation(0.5));
  const auto c = horofunction_gap(constant, D, DiskPoint(), 2000, 12, 0);
  double worst = c.truncated ? INFINITY : 0.0;
  for (double g : c.gap) worst = std::max(worst, g);
  o.detail << " constant max gap " << worst;
  o.require(worst <= 1e-9, "constant driver gap");

  const auto pair = ErgodicDriver<MobiusMap>::iid_finite(
      {MobiusMap::translation(0.5, std::numbers::pi / 6), MobiusMap::translation(0.5, -std::numbers::pi / 6)}, {0.5, 0.5},
      Order::right_increment, 5);
  GapOptions<DiskPoint> opt;
  opt.anchor_horizon = 8000;
  opt.isometric_tail = true;
  double sum = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const auto g = horofunction_gap(pair, D, DiskPoint(), 2000, 4, t, opt);
    o.require(!g.truncated, "untruncated trial " + std::to_string(t));
    sum += g.gap.back();
  }
  o.detail << ", i.i.d. mean gap(2000) " << sum / 20.0;
  o.require(sum / 20.0 < 0.05, "i.i.d. mean gap");
}

void stretch(Outcome& o) {
  const auto rot = ErgodicDriver<CircleMap>::constant(CircleMap::rotation(0.9), Order::left_increment);
  const auto r = max_stretch(rot, 50, 1000, 0);
  o.detail << " rotation " << r.lambda_hat;
  o.require(r.lambda_hat <= 1e-6, "rotation");

  const auto mob = ErgodicDriver<CircleMap>::constant(CircleMap::mobius_translation(0.5), Order::left_increment);
  const auto m = max_stretch(mob, 50, 1000, 0);
  const double dz = std::abs(m.z_hat - std::complex<double>(-1.0, 0.0));
  o.detail << ", mobius " << m.lambda_hat << " at distance " << dz << " from -1";
  o.require(std::abs(m.lambda_hat - kLn3) <= 0.05 * kLn3, "mobius exponent");
  o.require(dz <= 1e-2, "mobius location");
}

// ---------------------------------------------------------------- determinism

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Outcome& o, const fs::path& work) {
  fs::remove_all(work);
  for (const auto& e : cli::registry()) {
    std::vector<std::string> runs;
    for (std::size_t threads : {1, 8}) {
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = work / ("lib" + std::to_string(threads) + "-" + std::to_string(rep));
        std::ostringstream err;
        const auto r = cli::run(cli::Json{{"experiment", e.name}, {"seed", 17}, {"out", dir.string()}}, threads, err);
        o.require(r.exit_code == cli::kExitOk, e.name + " in-process run: " + err.str());
        runs.push_back(slurp(r.data_file));
      }
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = work / ("tool" + std::to_string(threads) + "-" + std::to_string(rep));
        const std::string cmd = "HOROFLOW_THREADS=" + std::to_string(threads) + " \"" + HOROFLOW_TOOL +
                                "\" run --experiment " + e.name + " --seed 17 --out \"" + dir.string() + "\" >/dev/null 2>&1";
        o.require(std::system(cmd.c_str()) == 0, e.name + " tool run");
        runs.push_back(slurp(dir / (e.name + "-17.csv")));
      }
    }
    bool same = !runs.front().empty();
    for (const auto& bytes : runs) same = same && bytes == runs.front();
    o.require(same, e.name + " bytes");
  }
  o.detail << " " << cli::registry().size() << " experiments x 8 runs";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("horoflow acceptance suite");
  std::string work = (fs::temp_directory_path() / "horoflow_acceptance").string();
  int only = 0;
  app.add_option("--work", work, "scratch directory for the determinism runs");
  app.add_option("--only", only, "run a single criterion (1-based)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"metric axioms on six spaces", 30, metric_axioms},
      {"metric-functional bounds and continuity", 30, functional_bounds},
      {"Thompson spectral vs Rayleigh supremum", 10, thompson_dual},
      {"constant-matrix Lyapunov spectrum", 5, oseledets_constant},
      {"QR vs norm-growth top exponent", 60, two_estimators},
      {"operator tau and vector-state ratio", 1, operator_tau},
      {"Segal inequality sweep", 30, segal},
      {"ResNet drift", 60, resnet},
      {"horofunction gap", 60, horofunction},
      {"maximal stretch", 60, stretch},
      {"byte-identical reruns across thread counts", 0, [&](Outcome& o) { determinism(o, work); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    const auto& c = criteria[i];
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& ex) {
      o.ok = false;
      o.detail << " [exception: " << ex.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds == 0 || secs < c.budget_seconds;
    if (!in_time) o.detail << " [over the " << c.budget_seconds << " s budget]";
    const bool pass = o.ok && in_time;
    failures += !pass;
    std::printf("%s %2zu %-44s %8.3f s%s\n", pass ? "PASS" : "FAIL", i + 1, c.name.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
