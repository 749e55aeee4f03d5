#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "horoflow/cli/config.hpp"

namespace horoflow::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

struct RunResult {
  int exit_code = kExitOk;
  std::filesystem::path data_file;
  std::filesystem::path manifest_file;
};

// Validates, runs and writes <experiment>-<seed>.<csv|jsonl> and
// <experiment>-<seed>.manifest.json into the output directory. Diagnostics
// and errors go to `err`.
RunResult run(const Json& doc, std::size_t threads, std::ostream& err);

// name, required parameters, optional parameters, description
void list_experiments(std::ostream& out);

}  // namespace horoflow::cli
