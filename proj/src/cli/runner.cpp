#include "horoflow/cli/runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "horoflow/cli/experiments.hpp"
#include "horoflow/errors.hpp"
#include "horoflow/rng.hpp"

namespace horoflow::cli {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json config_echo(const ExperimentConfig& c) {
  return {{"experiment", c.experiment}, {"seed", c.seed},   {"n", c.n},
          {"trials", c.trials},         {"format", c.output_format}, {"out", c.output_dir},
          {"params", c.params}};
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& err) {
  for (const auto& d : diags) err << "config error: " << d.field << ": " << d.reason << "\n";
}

}  // namespace

RunResult run(const Json& doc, std::size_t threads, std::ostream& err) {
  RunResult result;
  if (const auto diags = validate(doc); !diags.empty()) {
    print_diagnostics(diags, err);
    result.exit_code = kExitConfig;
    return result;
  }
  const ExperimentConfig config = resolve(doc);
  const ExperimentInfo& info = *find_experiment(config.experiment);

  const std::string started = utc_now();
  ExperimentOutput out;
  try {
    out = info.run(config, threads);
  } catch (const InputError& e) {
    err << "config error: " << e.what() << "\n";
    result.exit_code = kExitConfig;
    return result;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    result.exit_code = kExitRuntime;
    return result;
  }
  if (out.truncated * 10 > config.trials) {
    err << "runtime error: " << out.truncated << " of " << config.trials << " trials truncated (limit 10%)\n";
    result.exit_code = kExitRuntime;
    return result;
  }
  const std::string finished = utc_now();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  const std::string stem = config.experiment + "-" + std::to_string(config.seed);
  result.data_file = fs::path(config.output_dir) / (stem + "." + config.output_format);
  result.manifest_file = fs::path(config.output_dir) / (stem + ".manifest.json");

  std::ofstream data(result.data_file, std::ios::binary);
  if (!data) {
    err << "runtime error: cannot write " << result.data_file.string() << "\n";
    result.exit_code = kExitRuntime;
    return result;
  }
  if (config.output_format == "jsonl") {
    out.table.write_jsonl(data);
  } else {
    out.table.write_csv(data);
  }

  std::vector<std::uint64_t> seeds(config.trials);
  for (std::size_t t = 0; t < config.trials; ++t) seeds[t] = trial_seed(config.seed, t);
  Json manifest = {{"config", config_echo(config)},
                   {"generator", kGeneratorName},
                   {"seed_derivation", "trial_seed = splitmix64(seed XOR trial)"},
                   {"version", kVersion},
                   {"started_utc", started},
                   {"finished_utc", finished},
                   {"trial_seeds", seeds},
                   {"truncated", out.truncated},
                   {"rows", out.table.rows().size()},
                   {"summary", out.summary}};
  std::ofstream mf(result.manifest_file, std::ios::binary);
  if (!mf) {
    err << "runtime error: cannot write " << result.manifest_file.string() << "\n";
    result.exit_code = kExitRuntime;
    return result;
  }
  mf << manifest.dump(2) << "\n";
  return result;
}

void list_experiments(std::ostream& out) {
  for (const auto& e : registry()) {
    out << e.name << "\n  required: experiment, seed\n  parameters:";
    out << " n (default " << e.default_n << "), trials (default " << e.default_trials << ")";
    for (const auto& p : e.params) out << ", " << p.name << " (default " << p.default_value.dump() << ")";
    out << "\n  " << e.description << "\n";
  }
}

}  // namespace horoflow::cli
