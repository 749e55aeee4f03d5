#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "horoflow/linalg.hpp"
#include "json.hpp"

namespace horoflow::cli {

using Json = nlohmann::json;

// Matrices are written as arrays of rows or as "diag(a, b, ...)".
enum class ParamKind { number, integer, string, number_list, matrix, matrix_list };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::number;
  Json default_value;
  std::string help;
  std::optional<double> min;  // inclusive; applies to numbers, integers and list entries
  std::optional<double> max;
  std::vector<std::string> choices;  // allowed strings
};

struct Diagnostic {
  std::string field;
  std::string reason;
};

// Fully resolved run parameters: every experiment parameter is present,
// defaults filled in.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t n = 1;
  std::size_t trials = 1;
  Json params = Json::object();
  std::string output_format = "csv";
  std::string output_dir = ".";

  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::string string(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  Matrix matrix(const std::string& key) const;
  std::vector<Matrix> matrices(const std::string& key) const;
};

// Command-line values that replace the document's.
struct Overrides {
  std::optional<std::string> experiment;
  std::optional<std::string> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

// Parses a JSON document; on failure returns nullopt and one diagnostic
// naming "document".
std::optional<Json> parse_document(const std::string& text, std::vector<Diagnostic>& diagnostics);

// Applies overrides; a malformed --seed becomes a diagnostic.
void apply_overrides(Json& doc, const Overrides& o, std::vector<Diagnostic>& diagnostics);

// Empty iff the run would start.
std::vector<Diagnostic> validate(const Json& doc);

// Requires validate(doc) to be empty.
ExperimentConfig resolve(const Json& doc);

// Reserved top-level keys; any other key is an experiment parameter, as is
// every key inside an optional "params" object.
bool is_reserved_key(const std::string& key);

}  // namespace horoflow::cli
