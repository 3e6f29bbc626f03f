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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "lab/artifacts.hpp"
#include "lab/blocks.hpp"
#include "lab/config.hpp"
#include "lab/runner.hpp"
#include "suscept/io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace suscept;
using namespace suscept::lab;
using nlohmann::json;

class LabTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    root_ = fs::temp_directory_path() / ("suscept_lab_" + std::to_string(rd()));
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  ExperimentConfig config(const std::string& text) {
    ConfigLoad l = parse_config(text, root_);
    for (const auto& d : l.diagnostics) ADD_FAILURE() << d.message();
    EXPECT_TRUE(l.config.has_value());
    return *l.config;
  }

  ExperimentConfig load(const std::string& name) {
    ConfigLoad l = load_config(fs::path(SUSCEPT_CONFIG_DIR) / name);
    EXPECT_TRUE(l.config.has_value());
    return *l.config;
  }

  RunManifest run_into(ExperimentConfig c, const std::string& dir, std::size_t threads = 1) {
    RunOptions o;
    o.output = root_ / dir;
    o.threads = threads;
    return run(with_overrides(std::move(c), o));
  }

  std::string read(const std::string& rel) { return io::read_file(root_ / rel); }

  fs::path root_;
};

bool has_field(const std::vector<Diagnostic>& ds, const std::string& field,
               const std::string& fragment = "") {
  for (const auto& d : ds)
    if (d.field == field && d.message().find(fragment) != std::string::npos) return true;
  return false;
}

std::string dump(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) out += d.message() + "\n";
  return out;
}

const char* kSmallEstimate = R"({
  "kind": "suscept-estimate", "seed": 5,
  "parameters": {
    "problem": {
      "model": {"name": "polynomial", "dimension": 2, "quadratic": [1, 2],
                "cubic": [0.5, -0.4], "quartic": [0.3, 0.3], "coupling": 0.4},
      "data": [[-0.5, 0.3], [0.1, -0.2], [0.6, 0.4], [-0.2, -0.5]],
      "beta": 50, "gamma": 1
    },
    "components": [{"name": "a", "indices": [0]}, {"name": "b", "indices": [1]}],
    "observables": ["w0", "cos w1"],
    "sgld": {"steps": 20000, "burn_in": 1000, "thinning": 10, "chains": 2},
    "save_chains": true
  }
})";

TEST(LabConfig, ShippedConfigsValidate) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(SUSCEPT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ConfigLoad l = load_config(entry.path());
    ASSERT_TRUE(l.config.has_value()) << entry.path();
    EXPECT_TRUE(validate(*l.config).empty()) << entry.path() << "\n" << dump(validate(*l.config));
    ++count;
  }
  EXPECT_GE(count, 8);
}

TEST(LabConfig, EnvelopeErrors) {
  auto l = parse_config(R"({"kind": "nope", "sede": 1})");
  EXPECT_FALSE(l.config);
  EXPECT_TRUE(has_field(l.diagnostics, "kind"));
  EXPECT_TRUE(has_field(l.diagnostics, "sede", "not a recognised field"));
  EXPECT_FALSE(parse_config("{not json").config);
  EXPECT_FALSE(parse_config(R"({"seed": 1})").config);
}

TEST(LabConfig, HashIgnoresOutputAndThreads) {
  auto a = parse_config(R"({"kind": "laplace-check", "seed": 2, "output": "x", "threads": 1})");
  auto b = parse_config(R"({"parameters": {}, "threads": 4, "kind": "laplace-check", "seed": 2})");
  auto c = parse_config(R"({"kind": "laplace-check", "seed": 3})");
  ASSERT_TRUE(a.config && b.config && c.config);
  EXPECT_EQ(a.config->hash(), b.config->hash());
  EXPECT_NE(a.config->hash(), c.config->hash());
  EXPECT_EQ(a.config->hash().size(), 16u);
}

TEST_F(LabTest, NegativeBetaIsReported) {
  auto ds = validate(config(R"({"kind": "ising-response", "parameters": {"beta": -1}})"));
  ASSERT_EQ(ds.size(), 1u) << dump(ds);
  EXPECT_EQ(ds[0].field, "parameters.beta");
  EXPECT_EQ(ds[0].constraint, "must be > 0");
  EXPECT_EQ(ds[0].value, "-1");
}

TEST_F(LabTest, EveryProblemIsReportedInOnePass) {
  auto ds = validate(config(R"({"kind": "ising-phase", "parameters": {
      "side": 1, "betas": [0.2, -0.1], "chain": {"samples": 0, "init": "hot"}, "extra": 1}})"));
  EXPECT_TRUE(has_field(ds, "parameters.side", ">= 2")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.betas", "> 0")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.chain.samples")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.chain.init")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.extra", "not a recognised field")) << dump(ds);
}

TEST_F(LabTest, CustomWallLayoutIsValid) {
  EXPECT_TRUE(validate(load("ising-sweep-custom.json")).empty());
  auto ds = validate(config(R"({"kind": "ising-sweep", "parameters": {"layout": {
      "side": 8, "masked": [{"rows": [0, 7], "cols": 4}],
      "regions": [{"name": "L", "rows": [0, 7], "cols": [0, 3]},
                  {"name": "R", "rows": [0, 7], "cols": [5, 7]}],
      "probes": [{"name": "p", "row": 3, "col": 1}]}}})"));
  EXPECT_TRUE(ds.empty()) << dump(ds);
}

TEST_F(LabTest, LayoutProblemsAreReported) {
  auto ds = validate(config(R"({"kind": "ising-sweep", "parameters": {"layout": {
      "side": 8, "masked": [{"rows": [0, 7], "cols": 4}],
      "regions": [{"name": "L", "rows": [0, 7], "cols": [0, 4]},
                  {"name": "R", "rows": [0, 9], "cols": [3, 7]}],
      "probes": [{"name": "p", "row": 2, "col": 4}]}}})"));
  EXPECT_TRUE(has_field(ds, "parameters.layout.regions[1].rows", "< 8")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.layout.probes[0].row", "unmasked")) << dump(ds);

  ds = validate(config(R"({"kind": "ising-sweep", "parameters": {"layout": {
      "side": 8,
      "regions": [{"name": "L", "rows": [0, 7], "cols": [0, 4]},
                  {"name": "R", "rows": [0, 7], "cols": [4, 7]}],
      "probes": [{"name": "p", "row": 2, "col": 1}]}}})"));
  EXPECT_TRUE(has_field(ds, "parameters.layout.regions")) << dump(ds);

  ds = validate(config(R"({"kind": "ising-sweep", "parameters": {"left": "Q"}})"));
  EXPECT_TRUE(has_field(ds, "parameters.left", "no region")) << dump(ds);
}

TEST_F(LabTest, ComponentIndexOutOfRangeNamesTheIndex) {
  auto ds = validate(config(R"({"kind": "suscept-estimate", "parameters": {
      "problem": {"model": {"name": "gaussian_location", "dimension": 2},
                  "data": [[0, 1], [1, 0]]},
      "components": [{"name": "a", "indices": [0, 5]}]}})"));
  ASSERT_EQ(ds.size(), 1u) << dump(ds);
  EXPECT_EQ(ds[0].field, "parameters.components[0].indices[1]");
  EXPECT_EQ(ds[0].constraint, "must be in [0, 2)");
  EXPECT_EQ(ds[0].value, "5");
}

TEST_F(LabTest, ProblemBlockErrors) {
  auto ds = validate(config(R"({"kind": "llc-check", "parameters": {
      "problem": {"model": {"name": "polynomial", "dimension": 2, "quadratic": [1, 2, 3]},
                  "data": [[0, 1]], "gamma": -1}}})"));
  EXPECT_TRUE(has_field(ds, "parameters.problem.model")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.problem.gamma", ">= 0")) << dump(ds);

  ds = validate(config(R"({"kind": "llc-check", "parameters": {
      "problem": {"model": {"name": "gaussian_location", "dimension": 2},
                  "data": [[0, 1], [1]], "weights": [1]},
      "sgld": {"step_size": 0.1, "step_fraction": 0.1}}})"));
  EXPECT_TRUE(has_field(ds, "parameters.problem.data[1]", "length 2")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.problem.weights")) << dump(ds);
  EXPECT_TRUE(has_field(ds, "parameters.sgld.step_fraction")) << dump(ds);

  ds = validate(config(R"({"kind": "llc-check", "parameters": {}})"));
  EXPECT_TRUE(has_field(ds, "parameters.problem", "required")) << dump(ds);
}

TEST_F(LabTest, ObservableGrammar) {
  EXPECT_TRUE(parse_observable("w1", 2));
  EXPECT_TRUE(parse_observable("w0^3", 2));
  EXPECT_TRUE(parse_observable("w0*w1", 2));
  EXPECT_TRUE(parse_observable("cos(w1)", 2));
  EXPECT_TRUE(parse_observable("excess_loss", 2));
  EXPECT_FALSE(parse_observable("w2", 2));
  EXPECT_FALSE(parse_observable("tan w0", 2));
  Vector w(2);
  w << 0.5, -2.0;
  EXPECT_DOUBLE_EQ(parse_observable("w0^3", 2)->spec.function(w), 0.125);
  EXPECT_DOUBLE_EQ(parse_observable("w0 * w1", 2)->spec.function(w), -1.0);
  EXPECT_DOUBLE_EQ(parse_observable("exp w1", 2)->spec.function(w), std::exp(-2.0));
}

TEST(LabArtifacts, Sha256KnownAnswers) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(LabArtifacts, RejectsEscapingPaths) {
  ArtifactSet set;
  EXPECT_THROW(set.add("../x.csv", ""), InvalidArgument);
  EXPECT_THROW(set.add("a/../../x.csv", ""), InvalidArgument);
  EXPECT_THROW(set.add("/tmp/x.csv", ""), InvalidArgument);
  EXPECT_THROW(set.add("", ""), InvalidArgument);
  set.add("a/./b.csv", "1");
  EXPECT_TRUE(set.contains("a/b.csv"));
}

TEST_F(LabTest, ManifestListsEveryFileWithChecksums) {
  const RunManifest m = run_into(load("pattern-solve.json"), "p");
  const json j = json::parse(read("p/manifest.json"));
  EXPECT_EQ(j["kind"], "pattern-solve");
  EXPECT_EQ(j["config_hash"], load("pattern-solve.json").hash());
  EXPECT_EQ(j["version"], version());
  ASSERT_EQ(j["files"].size(), m.files.size());
  for (const auto& f : j["files"]) {
    const std::string content = read("p/" + f["path"].get<std::string>());
    EXPECT_EQ(f["sha256"], sha256_hex(content));
    EXPECT_EQ(f["bytes"].get<std::size_t>(), content.size());
  }
  for (const char* name : {"plan.json", "plan.csv", "modes.csv"})
    EXPECT_TRUE(fs::exists(root_ / "p" / name)) << name;
}

TEST_F(LabTest, SameSeedGivesIdenticalBytes) {
  const auto c = load("ising-phase.json");
  run_into(c, "a");
  run_into(c, "b");
  EXPECT_EQ(read("a/phase.csv"), read("b/phase.csv"));
  const json manifest = json::parse(read("a/manifest.json"));
  ASSERT_EQ(manifest["notes"].size(), 1u);
  EXPECT_NE(manifest["notes"][0].get<std::string>().find("uniform random"), std::string::npos);
  RunOptions o;
  o.seed = 99;
  run_into(with_overrides(c, o), "c");
  EXPECT_NE(read("a/phase.csv"), read("c/phase.csv"));
}

TEST_F(LabTest, ThreadCountDoesNotChangeResults) {
  const auto phase = load("ising-phase.json");
  run_into(phase, "p1", 1);
  run_into(phase, "p3", 3);
  EXPECT_EQ(read("p1/phase.csv"), read("p3/phase.csv"));

  const auto laplace = load("laplace-check.json");
  run_into(laplace, "l1", 1);
  run_into(laplace, "l4", 4);
  EXPECT_EQ(read("l1/residuals.csv"), read("l4/residuals.csv"));

  const auto est = config(kSmallEstimate);
  run_into(est, "e1", 1);
  run_into(est, "e2", 2);
  for (const char* f : {"structural.csv", "per_sample.csv", "chains/full.draws.csv"})
    EXPECT_EQ(read(std::string("e1/") + f), read(std::string("e2/") + f)) << f;
}

TEST_F(LabTest, EstimateFeedsPatternSolve) {
  run_into(config(kSmallEstimate), "est");
  const auto chains = io::load_chain_samples(root_ / "est/chains/a");
  ASSERT_TRUE(chains.restriction.has_value());
  EXPECT_EQ(chains.restriction->name, "a");

  const auto z = io::read_susceptibility_matrix(root_ / "est/structural_standardized");
  EXPECT_EQ(z.standardization, Standardization::kFullyStandardized);
  EXPECT_EQ(z.values.rows(), 2);
  EXPECT_EQ(z.values.cols(), 4);

  const auto c = config(R"({"kind": "pattern-solve", "parameters": {
      "matrix": "est/structural_standardized", "target": [0.1, -0.1], "epsilon": 0.05}})");
  EXPECT_TRUE(validate(c).empty()) << dump(validate(c));
  run_into(c, "plan");
  const json plan = json::parse(read("plan/plan.json"));
  EXPECT_EQ(plan["standardization"], "fully_standardized");
  EXPECT_EQ(plan["rows"], 2);

  auto bad = config(R"({"kind": "pattern-solve", "parameters": {
      "matrix": "est/structural_standardized", "target": [0.1]}})");
  EXPECT_TRUE(has_field(validate(bad), "parameters.target", "one entry per matrix row"));
  bad = config(R"({"kind": "pattern-solve", "parameters": {"matrix": "missing", "target": [1]}})");
  EXPECT_TRUE(has_field(validate(bad), "parameters.matrix", "cannot be read"));
}

TEST_F(LabTest, NumericalFailureNamesTheStage) {
  auto c = config(R"({"kind": "llc-check", "parameters": {
      "problem": {"model": {"name": "gaussian_location", "dimension": 1},
                  "data": [0.1, -0.1], "beta": 100},
      "sgld": {"step_size": 1.0, "steps": 1000, "burn_in": 0}}})");
  try {
    run_into(c, "diverge");
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "sample");
  }
  EXPECT_FALSE(fs::exists(root_ / "diverge" / "manifest.json"));
}

TEST_F(LabTest, InvalidConfigWritesNothing) {
  EXPECT_THROW(run_into(config(R"({"kind": "ising-response", "parameters": {"beta": 0}})"), "x"),
               ValidationError);
  EXPECT_FALSE(fs::exists(root_ / "x"));
}

class LabBinary : public LabTest {
 protected:
  int exit_code(const std::string& args) {
    const std::string cmd = std::string(SUSCEPT_LAB_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

TEST_F(LabBinary, ExitCodes) {
  const std::string good = std::string(SUSCEPT_CONFIG_DIR) + "/pattern-solve.json";
  EXPECT_EQ(exit_code("validate " + good), 0);
  EXPECT_EQ(exit_code("run " + good + " --out " + (root_ / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(root_ / "ok" / "manifest.json"));

  const auto invalid = write("bad.json", R"({"kind": "ising-response", "parameters": {"beta": -1}})");
  EXPECT_EQ(exit_code("validate " + invalid), 2);
  EXPECT_EQ(exit_code("run " + invalid), 2);
  EXPECT_EQ(exit_code("validate " + write("broken.json", "{")), 2);
  EXPECT_EQ(exit_code("frobnicate"), 2);

  const auto diverge = write("div.json", R"({"kind": "llc-check", "parameters": {
      "problem": {"model": {"name": "gaussian_location", "dimension": 1},
                  "data": [0.1, -0.1], "beta": 100},
      "sgld": {"step_size": 1.0, "steps": 1000, "burn_in": 0}}})");
  EXPECT_EQ(exit_code("run " + diverge + " --out " + (root_ / "d").string()), 3);

  write("blocker", "");
  EXPECT_EQ(exit_code("run " + good + " --out " + (root_ / "blocker" / "sub").string()), 1);
}

}  // namespace
