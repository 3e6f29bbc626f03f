// Copyright 2026 The suscept-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// suscept-lab: runs experiment configs and writes their artifacts.
//
//   suscept-lab run <config.json> [--out DIR] [--seed N] [--threads K]
//   suscept-lab validate <config.json>
//
// Exit status: 0 success, 1 other failure, 2 invalid config, 3 numerical
// failure.

#include <iostream>

#include <CLI11.hpp>

#include "lab/config.hpp"
#include "lab/runner.hpp"

namespace {

using namespace suscept::lab;

void report(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << "error: " << d.message() << "\n";
}

std::optional<ExperimentConfig> load(const std::string& path) {
  ConfigLoad loaded = load_config(path);
  if (!loaded.config) {
    report(loaded.diagnostics);
    return std::nullopt;
  }
  return loaded.config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Susceptibility experiments"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* out_opt = run_cmd->add_option("--out", out, "Output directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");
  auto* threads_opt =
      run_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    auto config = load(config_path);
    if (!config) return kExitValidation;
    if (validate_cmd->parsed()) {
      const auto diagnostics = validate(*config);
      if (!diagnostics.empty()) {
        report(diagnostics);
        return kExitValidation;
      }
      std::cout << config_path << ": ok (" << to_string(config->kind) << ", config "
                << config->hash() << ")\n";
      return kExitOk;
    }
    if (*out_opt) options.output = out;
    if (*seed_opt) options.seed = seed;
    if (*threads_opt) options.threads = threads;
    const RunManifest m = run(with_overrides(*config, options));
    std::cout << m.kind << " wrote " << m.files.size() + 1 << " files to " << m.directory.string()
              << "\n";
    for (const auto& t : m.timings) std::cout << "  " << t.stage << ": " << t.seconds << " s\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    report(e.diagnostics());
    return kExitValidation;
  } catch (const StageError& e) {
    std::cerr << "numerical failure in " << e.what() << "\n";
    return kExitNumerical;
  } catch (const suscept::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
