#include "horoflow/cli/experiments.hpp"

#include <cmath>
#include <numbers>

#include "horoflow/cocycle.hpp"
#include "horoflow/deepnet.hpp"
#include "horoflow/operator_thompson.hpp"
#include "horoflow/oseledets.hpp"
#include "horoflow/samplers.hpp"

namespace horoflow::cli {

namespace {

constexpr double kSixth = std::numbers::pi / 6.0;

using Diagnostics = std::vector<Diagnostic>;

ParamSpec number(std::string name, double def, std::string help, std::optional<double> lo = {},
                 std::optional<double> hi = {}) {
  return {std::move(name), ParamKind::number, def, std::move(help), lo, hi, {}};
}

ParamSpec integer(std::string name, std::int64_t def, std::string help, std::optional<double> lo = 1,
                  std::optional<double> hi = {}) {
  return {std::move(name), ParamKind::integer, def, std::move(help), lo, hi, {}};
}

ParamSpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string help) {
  return {std::move(name), ParamKind::string, def, std::move(help), {}, {}, std::move(choices)};
}

ParamSpec numbers(std::string name, std::vector<double> def, std::string help, std::optional<double> lo = {},
                  std::optional<double> hi = {}) {
  return {std::move(name), ParamKind::number_list, def, std::move(help), lo, hi, {}};
}

ParamSpec matrix(std::string name, Json def, std::string help) {
  return {std::move(name), ParamKind::matrix, std::move(def), std::move(help), {}, {}, {}};
}

ParamSpec matrices(std::string name, Json def, std::string help) {
  return {std::move(name), ParamKind::matrix_list, std::move(def), std::move(help), {}, {}, {}};
}

ParamSpec order_param(const char* def = "right_increment") {
  return choice("order", def, {"right_increment", "left_increment"},
                "right_increment: newest map innermost; left_increment: newest map outermost");
}

Order parse_order(const std::string& s) { return s == "left_increment" ? Order::left_increment : Order::right_increment; }

std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

void check_weights(const ExperimentConfig& c, std::size_t count, Diagnostics& d) {
  const auto w = c.numbers("weights");
  if (w.size() != count) {
    d.push_back({"weights", "need " + std::to_string(count) + " weights, one per map; got " + std::to_string(w.size())});
    return;
  }
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) d.push_back({"weights", "must have a positive sum"});
}

Diagnostics check_strengths(const ExperimentConfig& c) {
  Diagnostics d;
  const auto s = c.numbers("strengths");
  if (c.numbers("angles").size() != s.size()) d.push_back({"angles", "need one angle per strength"});
  check_weights(c, s.size(), d);
  return d;
}

std::vector<MobiusMap> mobius_maps(const ExperimentConfig& c) {
  const auto s = c.numbers("strengths");
  const auto a = c.numbers("angles");
  std::vector<MobiusMap> maps;
  for (std::size_t i = 0; i < s.size(); ++i) maps.push_back(MobiusMap::translation(s[i], a[i]));
  return maps;
}

template <class M>
ErgodicDriver<M> finite_driver(const ExperimentConfig& c, std::vector<M> maps) {
  return ErgodicDriver<M>::iid_finite(std::move(maps), normalized(c.numbers("weights")), parse_order(c.string("order")),
                                      c.seed);
}

Json estimate_json(const LyapunovEstimate& e) {
  return {{"lambda_hat", e.lambda_hat}, {"std_error", e.std_error}, {"tail_slope", e.tail_slope},
          {"trials_used", e.trials},     {"truncated", e.truncated}, {"n", e.n}};
}

// ---------------------------------------------------------------- hyperbolic-walk

ExperimentOutput run_hyperbolic_walk(const ExperimentConfig& c, std::size_t threads) {
  const auto space = poincare_space();
  const auto driver = finite_driver(c, mobius_maps(c));
  GapOptions<DiskPoint> opt;
  opt.anchor_horizon = c.n * static_cast<std::size_t>(c.integer("anchor_factor"));
  // Mobius maps are isometries, so right-increment gaps can use the tail orbit
  opt.isometric_tail = c.string("functional") == "anchor" && driver.order() == Order::right_increment;
  if (c.string("functional") == "busemann") {
    opt.functional = [](const DiskPoint& anchor) {
      const Complex xi = anchor.direction();
      return std::function<double(const DiskPoint&)>([xi](const DiskPoint& y) { return busemann_disk(xi, y); });
    };
  }
  const auto probes = static_cast<std::size_t>(c.integer("checkpoints"));
  std::vector<GapReport> reports(c.trials);
  parallel_for(c.trials, threads,
               [&](std::size_t t) { reports[t] = horofunction_gap(driver, space, DiskPoint(), c.n, probes, t, opt); });

  ExperimentOutput out{Table({"trial", "k", "gap", "kingman"})};
  double gap_sum = 0.0;
  double kingman_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const auto& r = reports[t];
    if (r.truncated) {
      ++out.truncated;
      continue;
    }
    for (std::size_t i = 0; i < r.k.size(); ++i)
      out.table.add_row({std::uint64_t{t}, std::uint64_t{r.k[i]}, r.gap[i], r.kingman[i]});
    gap_sum += r.gap.back();
    kingman_sum += r.kingman.back();
    ++used;
  }
  out.summary = {{"mean_final_gap", used ? gap_sum / static_cast<double>(used) : NAN},
                 {"mean_final_kingman", used ? kingman_sum / static_cast<double>(used) : NAN},
                 {"anchor_horizon", opt.anchor_horizon}};
  return out;
}

// ---------------------------------------------------------------- top-exponent

template <class P, class M>
ExperimentOutput top_exponent_table(const ExperimentConfig& c, const ErgodicDriver<M>& driver,
                                    const WeakMetricSpace<P>& space, const P& x0, std::size_t threads) {
  const auto e = estimate_top_exponent(driver, space, x0, c.n, c.trials, threads);
  const auto integ = check_integrability(driver, space, x0, static_cast<std::size_t>(c.integer("integrability_samples")));
  ExperimentOutput out{Table({"trial", "lambda"})};
  for (std::size_t i = 0; i < e.per_trial.size(); ++i) out.table.add_row({std::uint64_t{e.trial_ids[i]}, e.per_trial[i]});
  out.truncated = e.truncated;
  out.summary = estimate_json(e);
  out.summary["integrability"] = {{"mean_step", integ.mean_step}, {"exact", integ.exact}, {"heavy", integ.heavy}};
  return out;
}

Diagnostics check_top_exponent(const ExperimentConfig& c) {
  Diagnostics d;
  const auto space = c.string("space");
  if (space == "thompson") {
    const auto ms = c.matrices("matrices");
    check_weights(c, ms.size(), d);
    for (const auto& m : ms)
      if (std::abs(log_abs_det(m)) == INFINITY) d.push_back({"matrices", "every matrix must be invertible"});
  } else {
    auto more = check_strengths(c);
    d.insert(d.end(), more.begin(), more.end());
    if (space == "poincare") {
      for (double s : c.numbers("strengths"))
        if (!(s < 1.0)) d.push_back({"strengths", "poincare translations need strengths below 1"});
    }
  }
  if (c.n < 10) d.push_back({"n", "must be at least 10"});
  return d;
}

ExperimentOutput run_top_exponent(const ExperimentConfig& c, std::size_t threads) {
  const auto space = c.string("space");
  if (space == "euclidean") {
    const auto s = c.numbers("strengths");
    const auto a = c.numbers("angles");
    std::vector<Translation> maps;
    for (std::size_t i = 0; i < s.size(); ++i) maps.push_back({{s[i] * std::cos(a[i]), s[i] * std::sin(a[i])}});
    return top_exponent_table(c, finite_driver(c, std::move(maps)), euclidean_space(), EuclideanPoint{0.0, 0.0},
                              threads);
  }
  if (space == "poincare") return top_exponent_table(c, finite_driver(c, mobius_maps(c)), poincare_space(), DiskPoint(), threads);
  std::vector<Congruence> maps;
  for (auto& m : c.matrices("matrices")) maps.push_back({std::move(m)});
  const std::size_t dim = maps.front().g.rows();
  return top_exponent_table(c, finite_driver(c, std::move(maps)), thompson_space(), SpdPoint(Matrix::identity(dim)),
                            threads);
}

// ---------------------------------------------------------------- matrix drivers

const Json kSl2Pair = Json::array({Json::array({Json::array({2, 1}), Json::array({1, 1})}),
                                   Json::array({Json::array({1, 1}), Json::array({1, 2})})});

std::vector<ParamSpec> matrix_driver_params(const char* default_driver, const char* default_matrix) {
  return {choice("driver", default_driver, {"constant", "iid"}, "constant: A every step; iid: draw from matrices"),
          matrix("matrix", default_matrix, "step matrix of the constant driver"),
          matrices("matrices", kSl2Pair, "support of the iid driver"),
          numbers("weights", {0.5, 0.5}, "probabilities of the iid support", 0.0),
          order_param()};
}

Diagnostics check_matrix_driver(const ExperimentConfig& c) {
  Diagnostics d;
  if (c.string("driver") == "iid") {
    const auto ms = c.matrices("matrices");
    check_weights(c, ms.size(), d);
    for (const auto& m : ms)
      if (!std::isfinite(log_abs_det(m))) d.push_back({"matrices", "every matrix must be invertible"});
  } else if (!std::isfinite(log_abs_det(c.matrix("matrix")))) {
    d.push_back({"matrix", "must be invertible"});
  }
  return d;
}

MatrixDriver matrix_driver(const ExperimentConfig& c) {
  if (c.string("driver") == "iid") return finite_driver(c, c.matrices("matrices"));
  return MatrixDriver::constant(c.matrix("matrix"), parse_order(c.string("order")), c.seed);
}

ExperimentOutput run_oseledets(const ExperimentConfig& c, std::size_t threads) {
  const auto driver = matrix_driver(c);
  std::vector<SpectrumEstimate> est(c.trials);
  parallel_for(c.trials, threads, [&](std::size_t t) { est[t] = qr_spectrum(driver, c.n, t); });
  ExperimentOutput out{Table({"trial", "index", "exponent", "resid"})};
  const std::size_t dim = est.front().exponents.size();
  Vector mean(dim, 0.0);
  for (std::size_t t = 0; t < c.trials; ++t) {
    for (std::size_t i = 0; i < dim; ++i) {
      out.table.add_row({std::uint64_t{t}, std::uint64_t{i + 1}, est[t].exponents[i], est[t].resid[i]});
      mean[i] += est[t].exponents[i] / static_cast<double>(c.trials);
    }
  }
  out.summary = {{"mean_exponents", mean}, {"log_det_rate", est.front().log_det_rate}};
  return out;
}

ExperimentOutput run_filtration(const ExperimentConfig& c, std::size_t) {
  const Matrix a = c.matrix("matrix");
  const std::size_t dim = a.rows();
  std::vector<Vector> probes;
  for (std::size_t i = 0; i < dim; ++i) {
    Vector e(dim, 0.0);
    e[i] = 1.0;
    probes.push_back(std::move(e));
  }
  Rng rng(trial_seed(c.seed, 0));
  for (std::int64_t i = 0; i < c.integer("random_probes"); ++i) probes.push_back(rng.normal_vector(dim));
  const auto r = filtration_probe(a, probes, c.n, c.number("cluster_tol"));
  std::vector<std::size_t> cluster_of(probes.size());
  for (std::size_t k = 0; k < r.clusters.size(); ++k)
    for (std::size_t p : r.clusters[k]) cluster_of[p] = k;
  ExperimentOutput out{Table({"probe", "rate", "resid", "cluster"})};
  for (std::size_t p = 0; p < probes.size(); ++p)
    out.table.add_row({std::uint64_t{p}, r.rates[p], r.resid[p], std::uint64_t{cluster_of[p]}});
  out.summary = {{"clusters", r.clusters.size()}, {"cluster_tol", r.cluster_tol}};
  return out;
}

ExperimentOutput run_operator_tau(const ExperimentConfig& c, std::size_t threads) {
  const auto e = tau_estimate(matrix_driver(c), c.n, c.trials, threads);
  ExperimentOutput out{Table({"trial", "tau"})};
  for (std::size_t i = 0; i < e.per_trial.size(); ++i) out.table.add_row({std::uint64_t{e.trial_ids[i]}, e.per_trial[i]});
  out.truncated = e.truncated;
  out.summary = estimate_json(e);
  return out;
}

ExperimentOutput run_state_ratio(const ExperimentConfig& c, std::size_t threads) {
  const auto driver = matrix_driver(c);
  const auto ls = geometric_checkpoints(c.n, static_cast<std::size_t>(c.integer("checkpoints")));
  std::vector<std::vector<StateRatioRow>> rows(c.trials);
  parallel_for(c.trials, threads,
               [&](std::size_t t) { rows[t] = state_ratio_check(driver, c.n, ls, t, c.number("eps")); });
  ExperimentOutput out{Table({"trial", "l", "ratio", "tau_hat"})};
  double worst = 0.0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    for (const auto& r : rows[t]) out.table.add_row({std::uint64_t{t}, std::uint64_t{r.l}, r.ratio, r.tau_hat});
    const auto& last = rows[t].back();
    worst = std::max(worst, std::abs(last.ratio - last.tau_hat));
  }
  out.summary = {{"max_final_ratio_gap", worst}};
  return out;
}

// ---------------------------------------------------------------- segal-sweep

ExperimentOutput run_segal(const ExperimentConfig& c, std::size_t threads) {
  const auto dim = static_cast<std::size_t>(c.integer("dim"));
  const double scale = c.number("scale");
  std::vector<SegalResult> res(c.trials);
  parallel_for(c.trials, threads, [&](std::size_t t) {
    Rng rng(trial_seed(c.seed, t));
    const Matrix u = random_symmetric(rng, dim, scale);
    const Matrix v = random_symmetric(rng, dim, scale);
    res[t] = segal_check(u, v);
  });
  ExperimentOutput out{Table({"draw", "lhs", "rhs", "path_gap"})};
  std::size_t violations = 0;
  double max_gap = 0.0;
  double max_excess = -INFINITY;
  for (std::size_t t = 0; t < c.trials; ++t) {
    out.table.add_row({std::uint64_t{t}, res[t].lhs, res[t].rhs, res[t].path_gap});
    if (!res[t].holds()) ++violations;
    max_gap = std::max(max_gap, res[t].path_gap);
    max_excess = std::max(max_excess, res[t].lhs - res[t].rhs);
  }
  out.summary = {{"violations", violations}, {"max_lhs_minus_rhs", max_excess}, {"max_path_gap", max_gap}};
  return out;
}

// ---------------------------------------------------------------- deep networks

Matrix layer_weight(const std::string& kind, std::size_t d, Rng& rng) {
  if (kind == "identity") return Matrix::identity(d);
  Matrix w(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) w(i, j) = rng.normal() / std::sqrt(static_cast<double>(d));
  return w;
}

LayerForm parse_form(const std::string& s) { return s == "plain" ? LayerForm::plain : LayerForm::resnet_adjoint; }

ExperimentOutput run_resnet_drift(const ExperimentConfig& c, std::size_t threads) {
  const auto d = static_cast<std::size_t>(c.integer("d"));
  const auto act = parse_activation(c.string("activation"));
  const auto support = c.numbers("b_support");
  const auto weights = c.string("weights");
  const auto form = parse_form(c.string("form"));
  auto sampler = [=](Rng& rng) {
    Matrix w = layer_weight(weights, d, rng);
    Vector b(d);
    for (auto& x : b) x = support[rng.index(support.size())];
    return LayerMap::certified(std::move(w), std::move(b), act, form);
  };
  const auto driver = ErgodicDriver<LayerMap>::iid_parametric(sampler, Order::right_increment, c.seed, true);
  const auto r = resnet_drift(driver, Vector(d, c.number("x0")), c.n, c.trials, threads);
  ExperimentOutput out{Table({"trial", "coord", "v_hat", "se"})};
  for (std::size_t t = 0; t < c.trials; ++t)
    for (std::size_t i = 0; i < d; ++i)
      out.table.add_row({std::uint64_t{t}, std::uint64_t{i}, r.v_hat[t][i], r.per_coordinate_se[i]});
  out.summary = {{"mean", r.mean}, {"se", r.per_coordinate_se}, {"cross_input_gap", r.cross_input_gap},
                 {"cross_input_bound", 1.0 / static_cast<double>(c.n)}};
  return out;
}

ExperimentOutput run_lipschitz(const ExperimentConfig& c, std::size_t threads) {
  const auto d = static_cast<std::size_t>(c.integer("d"));
  const auto act = parse_activation(c.string("activation"));
  const auto form = parse_form(c.string("form"));
  Rng rng(trial_seed(c.seed, 0));
  std::vector<LayerMap> layers;
  for (std::size_t k = 0; k < c.n; ++k) {
    Matrix w = layer_weight(c.string("weights"), d, rng);
    layers.push_back(LayerMap::certified(std::move(w), rng.normal_vector(d), act, form));
  }
  const double radius = c.number("radius");
  PairSampler<Vector> pairs = [d, radius](Rng& r) { return std::pair{radius * r.normal_vector(d), radius * r.normal_vector(d)}; };
  const auto depths = geometric_checkpoints(c.n, static_cast<std::size_t>(c.integer("checkpoints")));
  std::vector<double> profile(depths.size());
  const auto n_pairs = static_cast<std::size_t>(c.integer("pairs"));
  parallel_for(depths.size(), threads, [&](std::size_t i) {
    profile[i] = lipschitz_profile(std::span<const LayerMap>(layers.data(), depths[i]), pairs, n_pairs, trial_seed(c.seed, 1));
  });
  ExperimentOutput out{Table({"depth", "profile", "bound"})};
  bool within = true;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const double bound = 1.0 / static_cast<double>(depths[i]);
    out.table.add_row({std::uint64_t{depths[i]}, profile[i], bound});
    within = within && profile[i] <= bound + 1e-12;
  }
  out.summary = {{"within_bound", within}};
  return out;
}

// ---------------------------------------------------------------- circle cocycles

std::vector<ParamSpec> circle_params() {
  return {choice("family", "mobius", {"mobius", "rotation", "sine"},
                 "mobius: boundary translation; rotation: rigid rotation; sine: theta + a sin theta"),
          number("strength", 0.5, "Mobius translation parameter or sine amplitude, in (-1, 1)", -0.999999, 0.999999),
          number("angle", 0.0, "Mobius axis or rotation angle"),
          choice("driver", "constant", {"constant", "iid"}, "iid: the map or its inverse-axis mirror with probability 1/2"),
          order_param("left_increment")};
}

CircleMap circle_map(const std::string& family, double strength, double angle) {
  if (family == "rotation") return CircleMap::rotation(angle);
  if (family == "sine") return CircleMap::sine_perturbation(strength, angle);
  return CircleMap::mobius_translation(strength, angle);
}

ErgodicDriver<CircleMap> circle_driver(const ExperimentConfig& c) {
  const auto family = c.string("family");
  const double s = c.number("strength");
  const double a = c.number("angle");
  const auto order = parse_order(c.string("order"));
  if (c.string("driver") == "iid") {
    return ErgodicDriver<CircleMap>::iid_finite({circle_map(family, s, a), circle_map(family, s, a + std::numbers::pi / 2)},
                                                {0.5, 0.5}, order, c.seed);
  }
  return ErgodicDriver<CircleMap>::constant(circle_map(family, s, a), order, c.seed);
}

ExperimentOutput run_max_stretch(const ExperimentConfig& c, std::size_t threads) {
  const auto driver = circle_driver(c);
  StretchOptions opt;
  opt.global_pairs = static_cast<std::size_t>(c.integer("global_pairs"));
  const auto grid = static_cast<std::size_t>(c.integer("grid"));
  std::vector<StretchReport> rep(c.trials);
  parallel_for(c.trials, threads, [&](std::size_t t) { rep[t] = max_stretch(driver, c.n, grid, t, opt); });
  ExperimentOutput out{Table({"trial", "depth", "log_stretch", "lambda", "x_re", "x_im", "y_re", "y_im"})};
  Json per_trial = Json::array();
  for (std::size_t t = 0; t < c.trials; ++t) {
    const auto& r = rep[t];
    if (r.truncated) ++out.truncated;
    for (std::size_t i = 0; i < r.depths.size(); ++i) {
      const auto& [x, y] = r.argmax_trace[i];
      out.table.add_row({std::uint64_t{t}, std::uint64_t{r.depths[i]}, r.log_stretch[i],
                         r.log_stretch[i] / static_cast<double>(r.depths[i]), x.real(), x.imag(), y.real(), y.imag()});
    }
    per_trial.push_back({{"lambda_hat", r.lambda_hat}, {"z_hat", {r.z_hat.real(), r.z_hat.imag()}}, {"pairs", r.pairs}});
  }
  out.summary = {{"trials", per_trial}};
  return out;
}

ExperimentOutput run_jacobian(const ExperimentConfig& c, std::size_t threads) {
  const auto driver = circle_driver(c);
  const auto grid = static_cast<std::size_t>(c.integer("grid"));
  std::vector<JacobianTrace> tr(c.trials);
  parallel_for(c.trials, threads, [&](std::size_t t) { tr[t] = jacobian_cocycle_dist(driver, c.n, grid, t); });
  ExperimentOutput out{Table({"trial", "k", "a", "ratio"})};
  double mean = 0.0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    for (std::size_t k = 0; k < tr[t].a.size(); ++k) out.table.add_row({std::uint64_t{t}, std::uint64_t{k + 1}, tr[t].a[k], tr[t].ratio[k]});
    mean += tr[t].ratio.back() / static_cast<double>(c.trials);
  }
  out.summary = {{"mean_final_ratio", mean}};
  return out;
}

// ---------------------------------------------------------------- metric-axioms

struct AxiomRows {
  std::string space;
  AxiomReport axioms;
  FunctionalBoundsReport bounds;
};

template <class P>
AxiomRows axiom_rows(const WeakMetricSpace<P>& space, const PointSampler<P>& sampler, const P& x0, std::size_t samples,
                     std::uint64_t seed) {
  return {space.name, check_axioms(space, sampler, samples, seed),
          check_functional_bounds(space, x0, sampler, samples, splitmix64(seed))};
}

const std::vector<std::string> kSpaces = {"euclidean", "poincare", "thompson", "funk", "stretch", "jacobian"};

ExperimentOutput run_axioms(const ExperimentConfig& c, std::size_t threads) {
  const auto dim = static_cast<std::size_t>(c.integer("dim"));
  const auto which = c.string("spaces");
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < kSpaces.size(); ++i)
    if (which == "all" || which == kSpaces[i]) chosen.push_back(i);
  const auto sample = stretch_sample(static_cast<std::size_t>(c.integer("stretch_points")), dim, trial_seed(c.seed, 100));
  const auto grid = static_cast<std::size_t>(c.integer("grid"));
  std::vector<AxiomRows> rows(chosen.size());
  parallel_for(chosen.size(), threads, [&](std::size_t i) {
    const std::uint64_t seed = trial_seed(c.seed, chosen[i]);
    switch (chosen[i]) {
      case 0: rows[i] = axiom_rows(euclidean_space(), euclidean_sampler(dim), Vector(dim, 0.0), c.trials, seed); break;
      case 1: rows[i] = axiom_rows(poincare_space(), disk_sampler(), DiskPoint(), c.trials, seed); break;
      case 2: rows[i] = axiom_rows(thompson_space(), spd_sampler(dim), SpdPoint(Matrix::identity(dim)), c.trials, seed); break;
      case 3: rows[i] = axiom_rows(funk_space(), spd_sampler(dim), SpdPoint(Matrix::identity(dim)), c.trials, seed); break;
      case 4: rows[i] = axiom_rows(stretch_space(), stretch_sampler(sample), SampledDistanceFunction::euclidean(sample), c.trials, seed); break;
      default: rows[i] = axiom_rows(jacobian_space(grid), circle_map_sampler(), CircleMap::identity(), c.trials, seed); break;
    }
  });
  ExperimentOutput out{Table({"space", "check", "samples", "failures", "worst"})};
  bool passed = true;
  for (const auto& r : rows) {
    const auto n = std::uint64_t{r.axioms.triples};
    const auto m = std::uint64_t{r.bounds.samples};
    out.table.add_row({r.space, std::string("identity"), n, std::uint64_t{r.axioms.identity_failures}, r.axioms.max_self_distance});
    out.table.add_row({r.space, std::string("triangle"), n, std::uint64_t{r.axioms.triangle_failures}, r.axioms.max_triangle_excess});
    out.table.add_row({r.space, std::string("functional_lower"), m, std::uint64_t{r.bounds.lower_failures}, r.bounds.worst_violation});
    out.table.add_row({r.space, std::string("functional_upper"), m, std::uint64_t{r.bounds.upper_failures}, r.bounds.worst_violation});
    out.table.add_row({r.space, std::string("functional_continuity"), m, std::uint64_t{r.bounds.continuity_failures}, r.bounds.worst_violation});
    passed = passed && r.axioms.passed() && r.bounds.passed();
  }
  out.summary = {{"passed", passed}};
  return out;
}

std::vector<ExperimentInfo> build_registry() {
  std::vector<ExperimentInfo> r;
  const std::vector<ParamSpec> disk_driver = {
      numbers("strengths", {0.5, 0.5}, "Mobius translation parameters a (0 -> a e^{i angle})", 0.0, 1e9),
      numbers("angles", {-kSixth, kSixth}, "translation axes, one per strength"),
      numbers("weights", {0.5, 0.5}, "probabilities of the maps", 0.0),
      order_param()};

  {
    auto p = disk_driver;
    p.push_back(integer("anchor_factor", 4, "anchor orbit point at step anchor_factor * n"));
    p.push_back(choice("functional", "anchor", {"anchor", "busemann"},
                       "anchor: h from the anchor orbit point; busemann: horofunction at its boundary direction"));
    p.push_back(integer("checkpoints", 10, "geometric checkpoints in [1, n]"));
    r.push_back({"hyperbolic-walk", "gap between -h(u(k) x0)/k and d(x0, u(k) x0)/k for a random Mobius walk", p, 2000,
                 20,
                 [](const ExperimentConfig& c) {
                   auto d = check_strengths(c);
                   for (double s : c.numbers("strengths"))
                     if (!(s < 1.0)) d.push_back({"strengths", "must be below 1"});
                   if (c.n < 100) d.push_back({"n", "must be at least 100"});
                   return d;
                 },
                 run_hyperbolic_walk});
  }
  {
    auto p = disk_driver;
    p.insert(p.begin(), choice("space", "poincare", {"euclidean", "poincare", "thompson"},
                               "euclidean: translations by strength e^{i angle}; poincare: Mobius translations; "
                               "thompson: congruences by matrices"));
    p.push_back(matrices("matrices", kSl2Pair, "congruence matrices for the thompson space"));
    p.push_back(integer("integrability_samples", 1000, "samples for the step-size moment diagnostic", 100));
    r.push_back({"top-exponent", "Kingman estimate of lim d(x0, u(n) x0) / n", p, 1000, 20, check_top_exponent,
                 run_top_exponent});
  }
  r.push_back({"oseledets-spectrum", "Lyapunov spectrum of a matrix cocycle by QR", matrix_driver_params("constant", "diag(3,1)"),
               100000, 1, check_matrix_driver, run_oseledets});
  r.push_back({"filtration-probe", "growth rates of probe vectors under powers of a matrix, clustered",
               {matrix("matrix", "diag(3,1,0.5)", "invertible matrix"),
                integer("random_probes", 4, "random probes besides the coordinate axes", 0, 1000),
                number("cluster_tol", 0.0, "clustering tolerance; 0 selects it from the residuals", 0.0)},
               2000, 1,
               [](const ExperimentConfig& c) {
                 Diagnostics d;
                 if (!std::isfinite(log_abs_det(c.matrix("matrix")))) d.push_back({"matrix", "must be invertible"});
                 if (c.n < 10) d.push_back({"n", "must be at least 10"});
                 return d;
               },
               run_filtration});
  r.push_back({"operator-tau", "(1/n) |log [v(n)]| for the squared positive part of a matrix product",
               matrix_driver_params("iid", "diag(2,0.5)"), 1000, 20, check_matrix_driver, run_operator_tau});
  {
    auto p = matrix_driver_params("iid", "diag(2,0.5)");
    p.push_back(integer("checkpoints", 8, "geometric checkpoints l in [1, n]"));
    p.push_back(number("eps", 1e-9, "tolerance of the vector state", 0.0));
    r.push_back({"state-ratio", "vector-state ratio |(y_l xi, xi)| / l against tau", p, 1000, 5, check_matrix_driver,
                 run_state_ratio});
  }
  r.push_back({"segal-sweep", "Segal inequality |exp(u+v)| <= |exp(u/2) exp(v) exp(u/2)| on random symmetric pairs; "
                              "trials is the number of pairs",
               {integer("dim", 3, "matrix dimension", 1, 16), number("scale", 1.0, "entry standard deviation", 0.0)}, 1,
               10000, {}, run_segal});
  r.push_back({"resnet-drift", "drift (1/n) T1 ... Tn x0 of random nonexpansive residual layers",
               {integer("d", 1, "width", 1, 64), choice("activation", "relu", {"relu", "tanh", "sigmoid"}, "activation"),
                numbers("b_support", {0.5, 1.5}, "bias coordinates drawn uniformly from these values"),
                choice("weights", "identity", {"identity", "random"}, "identity or spectrally normalized Gaussian W"),
                choice("form", "resnet_adjoint", {"resnet_adjoint", "plain"}, "W^T s(Wx + b) or s(Wx + b)"),
                number("x0", 0.0, "every coordinate of the input")},
               10000, 100, {}, run_resnet_drift});
  r.push_back({"lipschitz-profile", "max |u(k)x - u(k)y| / (k |x - y|) of a random certified chain against 1/k",
               {integer("d", 4, "width", 1, 64), choice("activation", "tanh", {"relu", "tanh", "sigmoid"}, "activation"),
                choice("weights", "random", {"identity", "random"}, "identity or spectrally normalized Gaussian W"),
                choice("form", "resnet_adjoint", {"resnet_adjoint", "plain"}, "W^T s(Wx + b) or s(Wx + b)"),
                integer("pairs", 1000, "sampled input pairs"), integer("checkpoints", 10, "depth checkpoints"),
                number("radius", 1.0, "input coordinate scale", 0.0)},
               100, 1,
               [](const ExperimentConfig& c) {
                 Diagnostics d;
                 if (c.n > 1000) d.push_back({"n", "depth must be at most 1000"});
                 return d;
               },
               run_lipschitz});
  {
    auto p = circle_params();
    p.push_back(integer("grid", 1000, "grid points carrying near-diagonal pairs", 1));
    p.push_back(integer("global_pairs", 1000, "seeded pairs drawn over the whole circle", 0));
    r.push_back({"max-stretch", "growth rate of the largest difference quotient of a circle cocycle", p, 50, 1,
                 [](const ExperimentConfig& c) {
                   Diagnostics d;
                   if (12 * c.integer("grid") + c.integer("global_pairs") < 1000)
                     d.push_back({"grid", "need at least 1000 sampled pairs (12 per grid point plus global_pairs)"});
                   return d;
                 },
                 run_max_stretch});
  }
  {
    auto p = circle_params();
    p.push_back(integer("grid", 1024, "grid points", 16));
    r.push_back({"jacobian-cocycle", "Jacobian distance a(k) from the identity to the k-step composition", p, 200, 1, {},
                 run_jacobian});
  }
  r.push_back({"metric-axioms", "identity, triangle and metric-functional bounds on seeded triples; trials is the "
                                "number of triples per space",
               {choice("spaces", "all", {"all", "euclidean", "poincare", "thompson", "funk", "stretch", "jacobian"},
                       "spaces to check"),
                integer("dim", 3, "dimension of the Euclidean, SPD and stretch samples", 1, 16),
                integer("stretch_points", 8, "sample size of the stretch space", 2, 256),
                integer("grid", 64, "grid of the Jacobian metric", 16)},
               1, 10000, {}, run_axioms});
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = build_registry();
  return r;
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace horoflow::cli
