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

// CSV (RFC 4180) tables, labelled matrices with JSON sidecars, and chain
// persistence.

#ifndef SUSCEPT_IO_HPP_
#define SUSCEPT_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "suscept/estimators.hpp"
#include "suscept/gibbs.hpp"
#include "suscept/types.hpp"

namespace suscept::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Shortest round-trip representation ("%.17g").
std::string format_double(double x);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view field);
void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);
// Throws InvalidArgument on malformed quoting or ragged rows.
CsvTable read_csv(std::istream& in);
CsvTable parse_csv(std::string_view text);

// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct LabeledMatrix {
  Matrix values;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
};

// First column holds row labels, header holds column labels.
std::string matrix_to_csv(const Matrix& values, const std::vector<std::string>& row_labels,
                          const std::vector<std::string>& column_labels,
                          std::string_view corner = "label");
LabeledMatrix matrix_from_csv(std::string_view text);

// <stem>.csv plus <stem>.json carrying standardization, renormalization and
// fingerprints. Returns the two paths written.
std::vector<std::filesystem::path> write_susceptibility_matrix(
    const std::filesystem::path& stem, const SusceptibilityMatrix& matrix);
SusceptibilityMatrix read_susceptibility_matrix(const std::filesystem::path& stem);

// <stem>.draws.csv, <stem>.losses.csv and <stem>.json (seed, config, restriction,
// fingerprint).
std::vector<std::filesystem::path> save_chain_samples(const std::filesystem::path& stem,
                                                      const ChainSamples& samples,
                                                      const SGLDConfig& config);
ChainSamples load_chain_samples(const std::filesystem::path& stem);

}  // namespace suscept::io

#endif  // SUSCEPT_IO_HPP_
