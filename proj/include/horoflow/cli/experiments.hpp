#pragma once

#include <functional>
#include <string>
#include <vector>

#include "horoflow/cli/config.hpp"
#include "horoflow/cli/table.hpp"

namespace horoflow::cli {

struct ExperimentOutput {
  Table table;
  Json summary = Json::object();
  std::size_t truncated = 0;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::size_t default_n = 1;
  std::size_t default_trials = 1;
  // Constraints spanning several fields, checked after defaults are filled.
  std::function<std::vector<Diagnostic>(const ExperimentConfig&)> check;
  std::function<ExperimentOutput(const ExperimentConfig&, std::size_t threads)> run;
};

// Stable order.
const std::vector<ExperimentInfo>& registry();
const ExperimentInfo* find_experiment(const std::string& name);

}  // namespace horoflow::cli
