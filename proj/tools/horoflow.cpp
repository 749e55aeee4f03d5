// horoflow run|validate|list

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "horoflow/cli/config.hpp"
#include "horoflow/cli/runner.hpp"
#include "horoflow/parallel.hpp"

using namespace horoflow::cli;

namespace {

struct Flags {
  std::string config_path;
  Overrides overrides;
};

void add_config_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config document");
  cmd->add_option_function<std::string>("--experiment", [&f](const std::string& v) { f.overrides.experiment = v; },
                                        "experiment name (overrides the document)");
  cmd->add_option_function<std::string>("--seed", [&f](const std::string& v) { f.overrides.seed = v; },
                                        "master seed (overrides the document)");
  cmd->add_option_function<std::string>("--out", [&f](const std::string& v) { f.overrides.out = v; },
                                        "output directory (overrides the document)");
  cmd->add_option_function<std::string>("--format", [&f](const std::string& v) { f.overrides.format = v; },
                                        "csv or jsonl (overrides the document)");
}

// Loads the document and applies flag overrides; nullopt on diagnostics.
std::optional<Json> load(const Flags& f) {
  std::vector<Diagnostic> diags;
  std::optional<Json> doc = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::cerr << "config error: config: cannot read " << f.config_path << "\n";
      return std::nullopt;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    doc = parse_document(ss.str(), diags);
  }
  if (doc) apply_overrides(*doc, f.overrides, diags);
  for (const auto& d : diags) std::cerr << "config error: " << d.field << ": " << d.reason << "\n";
  if (!diags.empty()) return std::nullopt;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded experiments on metric functionals and ergodic cocycles"};
  app.require_subcommand(1);
  Flags run_flags, validate_flags;
  auto* run_cmd = app.add_subcommand("run", "validate a config, run it and write the data table and manifest");
  add_config_flags(run_cmd, run_flags);
  auto* validate_cmd = app.add_subcommand("validate", "print config diagnostics, one per line");
  add_config_flags(validate_cmd, validate_flags);
  auto* list_cmd = app.add_subcommand("list", "list registered experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (list_cmd->parsed()) {
    list_experiments(std::cout);
    return kExitOk;
  }
  if (validate_cmd->parsed()) {
    const auto doc = load(validate_flags);
    if (!doc) return kExitConfig;
    const auto diags = validate(*doc);
    for (const auto& d : diags) std::cout << d.field << ": " << d.reason << "\n";
    return diags.empty() ? kExitOk : kExitConfig;
  }
  const auto doc = load(run_flags);
  if (!doc) return kExitConfig;
  const auto result = run(*doc, horoflow::thread_budget(), std::cerr);
  if (result.exit_code == kExitOk)
    std::cout << result.data_file.string() << "\n" << result.manifest_file.string() << "\n";
  return result.exit_code;
}
