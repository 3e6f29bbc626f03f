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

// Experiment runner behind the suscept-lab command line.

#ifndef SUSCEPT_LAB_RUNNER_HPP_
#define SUSCEPT_LAB_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lab/artifacts.hpp"
#include "lab/config.hpp"
#include "suscept/errors.hpp"

namespace suscept::lab {

const char* version();

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

ExperimentConfig with_overrides(ExperimentConfig config, const RunOptions& options);

// Checks the parameter block against the kind's schema, including file
// references. Empty iff the config is runnable.
std::vector<Diagnostic> validate(const ExperimentConfig& config);

// A numerical failure tagged with the stage that raised it.
class StageError : public NumericalError {
 public:
  StageError(std::string stage, const std::string& what)
      : NumericalError("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Validates, runs and writes all artifacts plus manifest.json into
// config.output. Throws ValidationError or StageError; nothing is written
// when either is thrown.
RunManifest run(const ExperimentConfig& config);

}  // namespace suscept::lab

#endif  // SUSCEPT_LAB_RUNNER_HPP_
