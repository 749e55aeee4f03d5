#include "horoflow/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "horoflow/cli/experiments.hpp"
#include "horoflow/errors.hpp"

namespace horoflow::cli {

namespace {

constexpr const char* kReserved[] = {"experiment", "seed", "n", "trials", "format", "out", "params"};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\n");
  const auto e = s.find_last_not_of(" \t\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::optional<std::uint64_t> parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> json_u64(const Json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 0x1.0p53 && d == std::floor(d)) return static_cast<std::uint64_t>(d);
  }
  if (v.is_string()) return parse_u64(v.get<std::string>());
  return std::nullopt;
}

std::optional<double> json_number(const Json& v) {
  if (!v.is_number()) return std::nullopt;
  const double d = v.get<double>();
  if (!std::isfinite(d)) return std::nullopt;
  return d;
}

std::optional<std::int64_t> json_integer(const Json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 0x1.0p53) return static_cast<std::int64_t>(d);
  }
  return std::nullopt;
}

// Rows of the matrix, or a reason.
std::optional<Matrix> json_matrix(const Json& v, std::string& reason) {
  std::vector<Vector> rows;
  if (v.is_string()) {
    const std::string s = trim(v.get<std::string>());
    if (s.rfind("diag(", 0) != 0 || s.back() != ')') {
      reason = "expected an array of rows or \"diag(a, b, ...)\"";
      return std::nullopt;
    }
    Vector diag;
    std::stringstream ss(s.substr(5, s.size() - 6));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
      if (ec != std::errc() || ptr != item.data() + item.size() || item.empty() || !std::isfinite(x)) {
        reason = "bad diagonal entry '" + item + "'";
        return std::nullopt;
      }
      diag.push_back(x);
    }
    if (diag.empty()) {
      reason = "empty diagonal";
      return std::nullopt;
    }
    return Matrix::diagonal(diag);
  }
  if (!v.is_array() || v.empty()) {
    reason = "expected a nonempty array of rows or \"diag(a, b, ...)\"";
    return std::nullopt;
  }
  for (const auto& row : v) {
    if (!row.is_array() || row.size() != v.front().size() || row.empty()) {
      reason = "rows must be nonempty arrays of equal length";
      return std::nullopt;
    }
    Vector r;
    for (const auto& x : row) {
      const auto d = json_number(x);
      if (!d) {
        reason = "matrix entries must be finite numbers";
        return std::nullopt;
      }
      r.push_back(*d);
    }
    rows.push_back(std::move(r));
  }
  if (rows.size() != rows.front().size()) {
    reason = "matrix must be square";
    return std::nullopt;
  }
  Matrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  return rows;
}

std::string range_reason(const ParamSpec& spec) {
  std::ostringstream os;
  os << "must lie in [" << (spec.min ? std::to_string(*spec.min) : "-inf") << ", "
     << (spec.max ? std::to_string(*spec.max) : "inf") << "]";
  return os.str();
}

bool in_range(const ParamSpec& spec, double x) { return (!spec.min || x >= *spec.min) && (!spec.max || x <= *spec.max); }

// Empty string when the value fits the spec.
std::string check_param(const ParamSpec& spec, const Json& v) {
  switch (spec.kind) {
    case ParamKind::number: {
      const auto d = json_number(v);
      if (!d) return "expected a finite number";
      return in_range(spec, *d) ? "" : range_reason(spec);
    }
    case ParamKind::integer: {
      const auto i = json_integer(v);
      if (!i) return "expected an integer";
      return in_range(spec, static_cast<double>(*i)) ? "" : range_reason(spec);
    }
    case ParamKind::string: {
      if (!v.is_string()) return "expected a string";
      if (spec.choices.empty()) return "";
      for (const auto& c : spec.choices)
        if (c == v.get<std::string>()) return "";
      std::string r = "must be one of";
      for (const auto& c : spec.choices) r += " " + c;
      return r;
    }
    case ParamKind::number_list: {
      if (!v.is_array() || v.empty()) return "expected a nonempty array of numbers";
      for (const auto& x : v) {
        const auto d = json_number(x);
        if (!d) return "expected a nonempty array of numbers";
        if (!in_range(spec, *d)) return "entries " + range_reason(spec);
      }
      return "";
    }
    case ParamKind::matrix: {
      std::string reason;
      return json_matrix(v, reason) ? "" : reason;
    }
    case ParamKind::matrix_list: {
      if (!v.is_array() || v.empty()) return "expected a nonempty array of matrices";
      std::size_t dim = 0;
      for (const auto& m : v) {
        std::string reason;
        const auto mat = json_matrix(m, reason);
        if (!mat) return reason;
        if (dim != 0 && mat->rows() != dim) return "matrices must share one dimension";
        dim = mat->rows();
      }
      return "";
    }
  }
  return "unknown parameter kind";
}

Json normalize_param(const ParamSpec& spec, const Json& v) {
  std::string reason;
  switch (spec.kind) {
    case ParamKind::number: return *json_number(v);
    case ParamKind::integer: return *json_integer(v);
    case ParamKind::matrix: return matrix_json(*json_matrix(v, reason));
    case ParamKind::matrix_list: {
      Json out = Json::array();
      for (const auto& m : v) out.push_back(matrix_json(*json_matrix(m, reason)));
      return out;
    }
    default: return v;
  }
}

// Experiment parameters: top-level non-reserved keys plus the params object.
std::vector<std::pair<std::string, const Json*>> collect_params(const Json& doc, std::vector<Diagnostic>* diags) {
  std::vector<std::pair<std::string, const Json*>> out;
  for (const auto& [key, value] : doc.items()) {
    if (!is_reserved_key(key)) out.emplace_back(key, &value);
  }
  if (doc.contains("params")) {
    const Json& p = doc.at("params");
    if (!p.is_object()) {
      if (diags) diags->push_back({"params", "expected an object"});
    } else {
      for (const auto& [key, value] : p.items()) {
        for (const auto& [k, v] : out) {
          if (k == key && diags) diags->push_back({key, "given both at top level and in params"});
        }
        out.emplace_back(key, &value);
      }
    }
  }
  return out;
}

ExperimentConfig resolve_unchecked(const Json& doc);

std::string registry_listing() {
  std::string s;
  for (const auto& e : registry()) s += (s.empty() ? "" : ", ") + e.name;
  return s;
}

}  // namespace

bool is_reserved_key(const std::string& key) {
  for (const char* r : kReserved)
    if (key == r) return true;
  return false;
}

std::optional<Json> parse_document(const std::string& text, std::vector<Diagnostic>& diagnostics) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    diagnostics.push_back({"document", std::string("unparseable JSON: ") + e.what()});
    return std::nullopt;
  }
}

void apply_overrides(Json& doc, const Overrides& o, std::vector<Diagnostic>& diagnostics) {
  if (!doc.is_object()) return;
  if (o.experiment) doc["experiment"] = *o.experiment;
  if (o.seed) {
    if (const auto s = parse_u64(*o.seed)) {
      doc["seed"] = *s;
    } else {
      diagnostics.push_back({"seed", "--seed must be an unsigned 64-bit integer, got '" + *o.seed + "'"});
    }
  }
  if (o.out) doc["out"] = *o.out;
  if (o.format) doc["format"] = *o.format;
}

std::vector<Diagnostic> validate(const Json& doc) {
  std::vector<Diagnostic> d;
  if (!doc.is_object()) {
    d.push_back({"document", "expected a JSON object"});
    return d;
  }
  const ExperimentInfo* info = nullptr;
  if (!doc.contains("experiment")) {
    d.push_back({"experiment", "missing; registered experiments: " + registry_listing()});
  } else if (!doc["experiment"].is_string()) {
    d.push_back({"experiment", "expected a string"});
  } else if (!(info = find_experiment(doc["experiment"].get<std::string>()))) {
    d.push_back({"experiment", "unknown experiment '" + doc["experiment"].get<std::string>() +
                                   "'; registered experiments: " + registry_listing()});
  }
  if (!doc.contains("seed")) {
    d.push_back({"seed", "missing"});
  } else if (!json_u64(doc["seed"])) {
    d.push_back({"seed", "expected an unsigned 64-bit integer"});
  }
  for (const char* key : {"n", "trials"}) {
    if (!doc.contains(key)) continue;
    const auto v = json_integer(doc[key]);
    if (!v || *v < 1) d.push_back({key, "must be an integer >= 1"});
  }
  if (doc.contains("format")) {
    const Json& f = doc["format"];
    if (!f.is_string() || (f != "csv" && f != "jsonl")) d.push_back({"format", "must be \"csv\" or \"jsonl\""});
  }
  if (doc.contains("out") && (!doc["out"].is_string() || doc["out"].get<std::string>().empty()))
    d.push_back({"out", "expected a nonempty path string"});

  const auto params = collect_params(doc, &d);
  if (info) {
    for (const auto& [key, value] : params) {
      const ParamSpec* spec = nullptr;
      for (const auto& p : info->params)
        if (p.name == key) spec = &p;
      if (!spec) {
        std::string known;
        for (const auto& p : info->params) known += (known.empty() ? "" : ", ") + p.name;
        d.push_back({key, "not a parameter of " + info->name + " (parameters: " + known + ")"});
        continue;
      }
      if (auto reason = check_param(*spec, *value); !reason.empty()) d.push_back({key, reason});
    }
    if (d.empty() && info->check) d = info->check(resolve_unchecked(doc));
  }
  return d;
}

ExperimentConfig resolve(const Json& doc) {
  if (const auto d = validate(doc); !d.empty()) throw InputError("resolve: invalid config, field '" + d.front().field + "'");
  return resolve_unchecked(doc);
}

namespace {

ExperimentConfig resolve_unchecked(const Json& doc) {
  const ExperimentInfo& info = *find_experiment(doc["experiment"].get<std::string>());
  ExperimentConfig c;
  c.experiment = info.name;
  c.seed = *json_u64(doc["seed"]);
  c.n = doc.contains("n") ? static_cast<std::size_t>(*json_integer(doc["n"])) : info.default_n;
  c.trials = doc.contains("trials") ? static_cast<std::size_t>(*json_integer(doc["trials"])) : info.default_trials;
  c.output_format = doc.value("format", std::string("csv"));
  c.output_dir = doc.value("out", std::string("."));
  const auto given = collect_params(doc, nullptr);
  for (const auto& spec : info.params) {
    const Json* value = &spec.default_value;
    for (const auto& [k, v] : given)
      if (k == spec.name) value = v;
    c.params[spec.name] = normalize_param(spec, *value);
  }
  return c;
}

}  // namespace

double ExperimentConfig::number(const std::string& key) const { return params.at(key).get<double>(); }

std::int64_t ExperimentConfig::integer(const std::string& key) const { return params.at(key).get<std::int64_t>(); }

std::string ExperimentConfig::string(const std::string& key) const { return params.at(key).get<std::string>(); }

std::vector<double> ExperimentConfig::numbers(const std::string& key) const {
  return params.at(key).get<std::vector<double>>();
}

Matrix ExperimentConfig::matrix(const std::string& key) const {
  const auto rows = params.at(key).get<std::vector<Vector>>();
  Matrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::vector<Matrix> ExperimentConfig::matrices(const std::string& key) const {
  std::vector<Matrix> out;
  for (const auto& m : params.at(key)) {
    const auto rows = m.get<std::vector<Vector>>();
    Matrix a(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows.size(); ++j) a(i, j) = rows[i][j];
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace horoflow::cli
