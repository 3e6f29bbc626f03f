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

#include "lab/artifacts.hpp"

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "suscept/errors.hpp"
#include "suscept/io.hpp"

namespace suscept::lab {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

void ArtifactSet::add(const std::string& relative, std::string content) {
  const std::filesystem::path p(relative);
  if (relative.empty() || p.is_absolute() || p.has_root_name())
    throw InvalidArgument("artifact path must be relative: '" + relative + "'");
  for (const auto& part : p)
    if (part == "..") throw InvalidArgument("artifact path leaves the run directory: '" + relative + "'");
  files_[p.lexically_normal().generic_string()] = std::move(content);
}

std::vector<FileRecord> ArtifactSet::commit(const std::filesystem::path& directory) const {
  std::vector<FileRecord> out;
  for (const auto& [rel, content] : files_) {
    io::write_file_atomic(directory / rel, content);
    out.push_back({rel, content.size(), sha256_hex(content)});
  }
  return out;
}

std::string manifest_json(const RunManifest& m, const std::string& canonical_config) {
  nlohmann::ordered_json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["kind"] = m.kind;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["config"] = nlohmann::json::parse(canonical_config);
  j["timings"] = nlohmann::ordered_json::array();
  double total = 0.0;
  for (const auto& t : m.timings) {
    j["timings"].push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    total += t.seconds;
  }
  j["total_seconds"] = total;
  j["notes"] = m.notes;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : m.files)
    j["files"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  return j.dump(2) + "\n";
}

}  // namespace suscept::lab
