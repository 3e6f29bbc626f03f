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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "suscept/errors.hpp"
#include "suscept/io.hpp"
#include "suscept/rng.hpp"

namespace suscept::io {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("suscept_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(Csv, QuotingRoundTrip) {
  CsvTable t;
  t.header = {"name", "note"};
  t.rows = {{"plain", "a,b"}, {"quote \"x\"", "line\nbreak"}, {"", "cr\rhere"}};
  const std::string text = to_csv(t);
  EXPECT_NE(text.find("\"a,b\""), std::string::npos);
  EXPECT_NE(text.find("\"quote \"\"x\"\"\""), std::string::npos);
  const CsvTable back = parse_csv(text);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  std::istringstream in(text);
  EXPECT_EQ(read_csv(in).rows, t.rows);
  EXPECT_EQ(csv_field("x"), "x");
}

TEST(Csv, AcceptsLfAndMissingFinalNewline) {
  const CsvTable t = parse_csv("a,b\n1,2\n3,4");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][1], "4");
  EXPECT_TRUE(parse_csv("").header.empty());
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv("a,b\r\n1\r\n"), InvalidArgument);
  EXPECT_THROW(parse_csv("a,b\r\n\"1,2\r\n"), InvalidArgument);
  EXPECT_THROW(parse_csv("a,b\r\n1\"x\",2\r\n"), InvalidArgument);
  EXPECT_THROW(parse_csv("a,b\r\n\"1\"x,2\r\n"), InvalidArgument);
}

TEST(Csv, DoublesRoundTripExactly) {
  Rng rng(1);
  std::normal_distribution<double> normal;
  Matrix m(3, 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::ldexp(normal(rng), i - 6);
  m(0, 0) = -0.0;
  m(2, 3) = 1e-300;
  const auto back = matrix_from_csv(matrix_to_csv(m, {"r0", "r,1", "r2"}, {"a", "b", "c", "d"}));
  EXPECT_TRUE(back.values == m);
  EXPECT_EQ(back.row_labels[1], "r,1");
  EXPECT_EQ(back.column_labels[3], "d");
  EXPECT_THROW(matrix_to_csv(m, {"r0"}, {"a", "b", "c", "d"}), InvalidArgument);
  EXPECT_THROW(matrix_from_csv("l,a\r\nr,notanumber\r\n"), InvalidArgument);
}

TEST_F(TempDir, AtomicWriteLeavesNoTemporary) {
  const fs::path p = dir_ / "nested" / "out.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  EXPECT_EQ(read_file(p), "second");
  EXPECT_FALSE(fs::exists(fs::path(p.string() + ".tmp")));
  EXPECT_THROW(read_file(dir_ / "missing"), InvalidArgument);
}

TEST_F(TempDir, SusceptibilityMatrixWithSidecar) {
  SusceptibilityMatrix m;
  m.values = Matrix::Random(2, 3);
  m.standard_errors = Matrix::Random(2, 3).cwiseAbs();
  m.row_labels = {"head", "tail"};
  m.column_labels = {"z0", "z1", "z2"};
  m.standardization = Standardization::kFullyStandardized;
  m.renormalized = true;
  m.fingerprints = {"00000000deadbeef", "0123456789abcdef"};
  const auto written = write_susceptibility_matrix(dir_ / "chi", m);
  EXPECT_EQ(written.size(), 3u);
  for (const auto& p : written) EXPECT_TRUE(fs::exists(p));
  const auto back = read_susceptibility_matrix(dir_ / "chi");
  EXPECT_TRUE(back.values == m.values);
  EXPECT_TRUE(back.standard_errors == m.standard_errors);
  EXPECT_EQ(back.row_labels, m.row_labels);
  EXPECT_EQ(back.column_labels, m.column_labels);
  EXPECT_EQ(back.standardization, m.standardization);
  EXPECT_TRUE(back.renormalized);
  EXPECT_EQ(back.fingerprints, m.fingerprints);
  const std::string meta = read_file(dir_ / "chi.json");
  EXPECT_NE(meta.find("fully_standardized"), std::string::npos);
}

TEST_F(TempDir, ChainSamplesRoundTrip) {
  GibbsProblem p;
  p.loss = make_toy_loss({"gaussian_location", 2, {}, {}, {}, 0.0});
  p.data = {Vector::Constant(2, 0.5), Vector::Constant(2, -0.25), Vector::Constant(2, 1.0)};
  p.w_star = Vector::Zero(2);
  SGLDConfig c;
  c.step_size = 1e-2;
  c.steps = 200;
  c.burn_in = 10;
  c.thinning = 10;
  c.seed = 77;
  const auto s = sgld_run(p, c, ComponentSpec{"first", {0}});
  save_chain_samples(dir_ / "chain", s, c);
  const auto back = load_chain_samples(dir_ / "chain");
  EXPECT_TRUE(back.draws == s.draws);
  EXPECT_TRUE(back.per_sample_losses == s.per_sample_losses);
  EXPECT_LT((back.full_loss - s.full_loss).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(back.fingerprint, s.fingerprint);
  EXPECT_EQ(back.reference_loss, s.reference_loss);
  ASSERT_TRUE(back.restriction.has_value());
  EXPECT_EQ(back.restriction->name, "first");
  EXPECT_EQ(back.restriction->indices, std::vector<int>{0});
  EXPECT_NE(read_file(dir_ / "chain.json").find("\"seed\": 77"), std::string::npos);
}

}  // namespace
}  // namespace suscept::io
