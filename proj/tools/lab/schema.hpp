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

// JSON field reader that records a Diagnostic instead of throwing, so one
// pass reports every problem in a parameter block. Internal to the lab.

#ifndef SUSCEPT_LAB_SCHEMA_HPP_
#define SUSCEPT_LAB_SCHEMA_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lab/config.hpp"

namespace suscept::lab {

using nlohmann::json;

std::string show(const json& value);

class Reader {
 public:
  Reader(const json& object, std::string path, std::vector<Diagnostic>& sink);

  bool has(const std::string& key) const;
  const std::string& path() const { return path_; }
  std::string field(const std::string& key) const;
  void fail(const std::string& key, const std::string& constraint, const std::string& value = "");

  double real(const std::string& key, double fallback);
  // Range checks record a diagnostic and return the value unchanged.
  double positive(const std::string& key, double fallback);
  double non_negative(const std::string& key, double fallback);
  long integer(const std::string& key, long fallback, long minimum);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& options);
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
  std::vector<std::vector<double>> rows(const std::string& key);
  // Empty optional when the key is absent.
  std::optional<Reader> child(const std::string& key);
  std::vector<Reader> children(const std::string& key);
  const json* raw(const std::string& key);

  // Records "unknown field" for every key not read so far.
  void finish();

 private:
  const json* get(const std::string& key);

  const json& object_;
  std::string path_;
  std::vector<Diagnostic>* sink_;
  std::set<std::string> seen_;
};

}  // namespace suscept::lab

#endif  // SUSCEPT_LAB_SCHEMA_HPP_
