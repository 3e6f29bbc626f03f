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

// Run outputs: files are collected in memory, then written together at the
// end of a run, followed by a manifest listing each file with its SHA-256.

#ifndef SUSCEPT_LAB_ARTIFACTS_HPP_
#define SUSCEPT_LAB_ARTIFACTS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace suscept::lab {

struct FileRecord {
  std::string path;  // relative to the run directory, '/' separated
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string tool = "suscept-lab";
  std::string version;
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::vector<StageTiming> timings;
  std::vector<FileRecord> files;
  // Interpretation choices that affect how the outputs should be read.
  std::vector<std::string> notes;
  std::filesystem::path directory;
};

std::string sha256_hex(std::string_view bytes);

class ArtifactSet {
 public:
  // `relative` must be a relative path without ".." components. Adding the
  // same path twice replaces the earlier content.
  void add(const std::string& relative, std::string content);
  bool contains(const std::string& relative) const { return files_.count(relative) > 0; }
  const std::map<std::string, std::string>& files() const { return files_; }

  // Writes every file atomically under `directory`, in path order.
  std::vector<FileRecord> commit(const std::filesystem::path& directory) const;

 private:
  std::map<std::string, std::string> files_;
};

std::string manifest_json(const RunManifest& manifest, const std::string& canonical_config);

}  // namespace suscept::lab

#endif  // SUSCEPT_LAB_ARTIFACTS_HPP_
