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

// Experiment configuration files.
//
// A config is a JSON object:
//
//   {
//     "kind": "ising-phase",        // see ExperimentKind
//     "seed": 1,                    // default 0
//     "output": "out/phase",        // default "out/<kind>"
//     "threads": 1,                 // default 1
//     "parameters": { ... }         // kind-specific block, see configs/README
//   }
//
// Relative file references inside "parameters" resolve against the directory
// holding the config file.

#ifndef SUSCEPT_LAB_CONFIG_HPP_
#define SUSCEPT_LAB_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "suscept/errors.hpp"

namespace suscept::lab {

enum class ExperimentKind {
  kIsingPhase,
  kIsingSweep,
  kIsingResponse,
  kFdtCheck,
  kLaplaceCheck,
  kLlcCheck,
  kSusceptEstimate,
  kPatternSolve,
};

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> kind_from_string(std::string_view name);
std::vector<std::string> kind_names();

struct Diagnostic {
  std::string field;       // dotted path, e.g. "parameters.beta_range.start"
  std::string constraint;  // e.g. "must be > 0"
  std::string value;       // offending value as written, or empty

  std::string message() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kIsingPhase;
  std::uint64_t seed = 0;
  std::filesystem::path output;
  std::size_t threads = 1;
  // Canonical JSON text of the "parameters" object.
  std::string parameters = "{}";
  std::filesystem::path base_dir;

  // Canonical JSON of kind, seed and parameters; output and threads do not
  // affect results and are left out.
  std::string canonical() const;
  // FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
};

struct ConfigLoad {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> diagnostics;
};

// Parses the envelope only; the parameter block is checked by validate().
ConfigLoad parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ConfigLoad load_config(const std::filesystem::path& path);

class ValidationError : public InvalidArgument {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace suscept::lab

#endif  // SUSCEPT_LAB_CONFIG_HPP_
