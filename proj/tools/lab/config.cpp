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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "lab/config.hpp"
#include "lab/schema.hpp"
#include "suscept/io.hpp"
#include "suscept/rng.hpp"

namespace suscept::lab {
namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::kIsingPhase, "ising-phase"},
    {ExperimentKind::kIsingSweep, "ising-sweep"},
    {ExperimentKind::kIsingResponse, "ising-response"},
    {ExperimentKind::kFdtCheck, "fdt-check"},
    {ExperimentKind::kLaplaceCheck, "laplace-check"},
    {ExperimentKind::kLlcCheck, "llc-check"},
    {ExperimentKind::kSusceptEstimate, "suscept-estimate"},
    {ExperimentKind::kPatternSolve, "pattern-solve"},
};

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "unknown";
}

std::optional<ExperimentKind> kind_from_string(std::string_view name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  return std::nullopt;
}

std::vector<std::string> kind_names() {
  std::vector<std::string> out;
  for (const auto& k : kKinds) out.emplace_back(k.name);
  return out;
}

std::string Diagnostic::message() const {
  std::string m = field + ": " + constraint;
  if (!value.empty()) m += " (got " + value + ")";
  return m;
}

std::string ExperimentConfig::canonical() const {
  json j;
  j["kind"] = to_string(kind);
  j["seed"] = seed;
  j["parameters"] = json::parse(parameters);
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : InvalidArgument(diagnostics.empty()
                          ? std::string("invalid configuration")
                          : diagnostics.front().message() +
                                (diagnostics.size() > 1
                                     ? " (+" + std::to_string(diagnostics.size() - 1) + " more)"
                                     : std::string())),
      diagnostics_(std::move(diagnostics)) {}

ConfigLoad parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ConfigLoad out;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    out.diagnostics.push_back({"<file>", "is not valid JSON: " + std::string(e.what()), ""});
    return out;
  }
  if (!root.is_object()) {
    out.diagnostics.push_back({"<file>", "must be a JSON object", show(root)});
    return out;
  }
  Reader r(root, "", out.diagnostics);
  ExperimentConfig c;
  const std::string kind = r.text("kind", "");
  if (!r.has("kind")) {
    r.fail("kind", "is required; one of ising-phase, ising-sweep, ising-response, fdt-check, "
                   "laplace-check, llc-check, suscept-estimate, pattern-solve");
  } else if (auto k = kind_from_string(kind)) {
    c.kind = *k;
  } else {
    r.fail("kind", "must name a known experiment", show(kind));
  }
  c.seed = r.unsigned_integer("seed", 0);
  c.output = r.text("output", "out/" + kind);
  c.threads = static_cast<std::size_t>(r.integer("threads", 1, 1));
  if (const json* p = r.raw("parameters")) {
    if (!p->is_object())
      r.fail("parameters", "must be an object", show(*p));
    else
      c.parameters = p->dump();
  }
  r.finish();
  c.base_dir = base_dir;
  if (out.diagnostics.empty()) out.config = std::move(c);
  return out;
}

ConfigLoad load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigLoad out;
    out.diagnostics.push_back({"<file>", "cannot be read", path.string()});
    return out;
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.parent_path());
}

// ---------------------------------------------------------------------------
// Reader

std::string show(const json& value) {
  std::string s = value.dump();
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

Reader::Reader(const json& object, std::string path, std::vector<Diagnostic>& sink)
    : object_(object), path_(std::move(path)), sink_(&sink) {}

bool Reader::has(const std::string& key) const { return object_.contains(key); }

std::string Reader::field(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void Reader::fail(const std::string& key, const std::string& constraint,
                  const std::string& value) {
  sink_->push_back({field(key), constraint, value});
}

const json* Reader::get(const std::string& key) {
  seen_.insert(key);
  auto it = object_.find(key);
  return it == object_.end() ? nullptr : &*it;
}

const json* Reader::raw(const std::string& key) { return get(key); }

double Reader::real(const std::string& key, double fallback) {
  const json* v = get(key);
  if (!v) return fallback;
  if (!v->is_number()) {
    fail(key, "must be a number", show(*v));
    return fallback;
  }
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite", show(*v));
  return x;
}

double Reader::positive(const std::string& key, double fallback) {
  const double x = real(key, fallback);
  if (has(key) && object_.at(key).is_number() && !(x > 0.0))
    fail(key, "must be > 0", show(object_.at(key)));
  return x;
}

double Reader::non_negative(const std::string& key, double fallback) {
  const double x = real(key, fallback);
  if (has(key) && object_.at(key).is_number() && !(x >= 0.0))
    fail(key, "must be >= 0", show(object_.at(key)));
  return x;
}

long Reader::integer(const std::string& key, long fallback, long minimum) {
  const json* v = get(key);
  if (!v) return fallback;
  if (!v->is_number_integer()) {
    fail(key, "must be an integer", show(*v));
    return fallback;
  }
  const long x = v->get<long>();
  if (x < minimum) fail(key, "must be >= " + std::to_string(minimum), show(*v));
  return x;
}

std::uint64_t Reader::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  const json* v = get(key);
  if (!v) return fallback;
  if (!v->is_number_unsigned()) {
    fail(key, "must be a non-negative integer", show(*v));
    return fallback;
  }
  return v->get<std::uint64_t>();
}

bool Reader::flag(const std::string& key, bool fallback) {
  const json* v = get(key);
  if (!v) return fallback;
  if (!v->is_boolean()) {
    fail(key, "must be true or false", show(*v));
    return fallback;
  }
  return v->get<bool>();
}

std::string Reader::text(const std::string& key, const std::string& fallback) {
  const json* v = get(key);
  if (!v) return fallback;
  if (!v->is_string()) {
    fail(key, "must be a string", show(*v));
    return fallback;
  }
  return v->get<std::string>();
}

std::string Reader::choice(const std::string& key, const std::string& fallback,
                           const std::vector<std::string>& options) {
  const std::string s = text(key, fallback);
  for (const auto& o : options)
    if (o == s) return s;
  std::string list;
  for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
  fail(key, "must be one of " + list, show(json(s)));
  return fallback;
}

std::vector<double> Reader::reals(const std::string& key, const std::vector<double>& fallback) {
  const json* v = get(key);
  if (!v) return fallback;
  if (!v->is_array()) {
    fail(key, "must be an array of numbers", show(*v));
    return fallback;
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < v->size(); ++k) {
    const json& e = (*v)[k];
    if (!e.is_number() || !std::isfinite(e.get<double>())) {
      fail(key + "[" + std::to_string(k) + "]", "must be a finite number", show(e));
      return fallback;
    }
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> Reader::rows(const std::string& key) {
  const json* v = get(key);
  if (!v) return {};
  if (!v->is_array()) {
    fail(key, "must be an array of arrays", show(*v));
    return {};
  }
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const json& row = (*v)[i];
    const std::string at = key + "[" + std::to_string(i) + "]";
    if (row.is_number()) {
      out.push_back({row.get<double>()});
      continue;
    }
    if (!row.is_array()) {
      fail(at, "must be a number or an array of numbers", show(row));
      return {};
    }
    std::vector<double> r;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number() || !std::isfinite(row[j].get<double>())) {
        fail(at + "[" + std::to_string(j) + "]", "must be a finite number", show(row[j]));
        return {};
      }
      r.push_back(row[j].get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<Reader> Reader::child(const std::string& key) {
  const json* v = get(key);
  if (!v) return std::nullopt;
  if (!v->is_object()) {
    fail(key, "must be an object", show(*v));
    return std::nullopt;
  }
  return Reader(*v, field(key), *sink_);
}

std::vector<Reader> Reader::children(const std::string& key) {
  const json* v = get(key);
  if (!v) return {};
  if (!v->is_array()) {
    fail(key, "must be an array of objects", show(*v));
    return {};
  }
  std::vector<Reader> out;
  for (std::size_t k = 0; k < v->size(); ++k) {
    const std::string at = key + "[" + std::to_string(k) + "]";
    if (!(*v)[k].is_object()) {
      fail(at, "must be an object", show((*v)[k]));
      continue;
    }
    out.emplace_back((*v)[k], field(at), *sink_);
  }
  return out;
}

void Reader::finish() {
  for (auto it = object_.begin(); it != object_.end(); ++it)
    if (!seen_.count(it.key())) fail(it.key(), "is not a recognised field");
}

}  // namespace suscept::lab
