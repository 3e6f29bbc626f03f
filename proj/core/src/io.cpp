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

#include "suscept/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "suscept/errors.hpp"

namespace suscept::io {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
  return fs::path(stem.string() + suffix);
}

Standardization standardization_from(const std::string& s) {
  for (auto v : {Standardization::kRaw, Standardization::kComponentZScored,
                 Standardization::kFullyStandardized})
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown standardization '" + s + "'");
}

std::vector<std::string> index_labels(const char* prefix, Eigen::Index count) {
  std::vector<std::string> out;
  for (Eigen::Index k = 0; k < count; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) out << (k ? "," : "") << csv_field(fields[k]);
    out << "\r\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false, after_quote = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = after_quote = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == ',') {
      end_field();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else if (c == '"') {
      if (field_started || after_quote)
        throw InvalidArgument("CSV: stray quote in field at offset " + std::to_string(i));
      quoted = true;
      field_started = true;
    } else {
      if (after_quote)
        throw InvalidArgument("CSV: text after closing quote at offset " + std::to_string(i));
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw InvalidArgument("CSV: unterminated quoted field");
  if (field_started || after_quote || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw InvalidArgument("CSV: row " + std::to_string(r) + " has " +
                            std::to_string(records[r].size()) + " fields, header has " +
                            std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_csv(text);
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = with_suffix(path, ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string matrix_to_csv(const Matrix& values, const std::vector<std::string>& row_labels,
                          const std::vector<std::string>& column_labels,
                          std::string_view corner) {
  if (static_cast<Eigen::Index>(row_labels.size()) != values.rows() ||
      static_cast<Eigen::Index>(column_labels.size()) != values.cols())
    throw InvalidArgument("label counts do not match the matrix shape");
  CsvTable t;
  t.header.emplace_back(corner);
  t.header.insert(t.header.end(), column_labels.begin(), column_labels.end());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    std::vector<std::string> row{row_labels[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < values.cols(); ++j) row.push_back(format_double(values(i, j)));
    t.rows.push_back(std::move(row));
  }
  return to_csv(t);
}

LabeledMatrix matrix_from_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  if (t.header.empty()) throw InvalidArgument("matrix CSV is empty");
  LabeledMatrix m;
  m.column_labels.assign(t.header.begin() + 1, t.header.end());
  m.values.resize(static_cast<Eigen::Index>(t.rows.size()),
                  static_cast<Eigen::Index>(m.column_labels.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    m.row_labels.push_back(t.rows[i][0]);
    for (std::size_t j = 1; j < t.rows[i].size(); ++j)
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) =
          parse_double(t.rows[i][j]);
  }
  return m;
}

std::vector<fs::path> write_susceptibility_matrix(const fs::path& stem,
                                                  const SusceptibilityMatrix& matrix) {
  matrix.validate();
  const fs::path csv = with_suffix(stem, ".csv");
  const fs::path meta = with_suffix(stem, ".json");
  write_file_atomic(csv, matrix_to_csv(matrix.values, matrix.row_labels, matrix.column_labels));
  json j;
  j["rows"] = matrix.values.rows();
  j["columns"] = matrix.values.cols();
  j["standardization"] = to_string(matrix.standardization);
  j["renormalized"] = matrix.renormalized;
  j["fingerprints"] = matrix.fingerprints;
  j["zscore_variance"] = "population (1/D)";
  j["covariance_normalization"] = "1/(S-1)";
  std::vector<fs::path> written{csv, meta};
  if (matrix.standard_errors.size() != 0) {
    const fs::path se = with_suffix(stem, ".se.csv");
    write_file_atomic(se, matrix_to_csv(matrix.standard_errors, matrix.row_labels,
                                        matrix.column_labels));
    j["standard_errors"] = se.filename().string();
    written.push_back(se);
  }
  write_file_atomic(meta, j.dump(2) + "\n");
  return written;
}

SusceptibilityMatrix read_susceptibility_matrix(const fs::path& stem) {
  const LabeledMatrix m = matrix_from_csv(read_file(with_suffix(stem, ".csv")));
  SusceptibilityMatrix out;
  out.values = m.values;
  out.row_labels = m.row_labels;
  out.column_labels = m.column_labels;
  const fs::path meta = with_suffix(stem, ".json");
  if (fs::exists(meta)) {
    const json j = json::parse(read_file(meta));
    out.standardization = standardization_from(j.value("standardization", "raw"));
    out.renormalized = j.value("renormalized", false);
    out.fingerprints = j.value("fingerprints", std::vector<std::string>{});
    if (j.contains("standard_errors")) {
      out.standard_errors =
          matrix_from_csv(read_file(stem.parent_path() / j["standard_errors"].get<std::string>()))
              .values;
    }
  }
  out.validate();
  return out;
}

std::vector<fs::path> save_chain_samples(const fs::path& stem, const ChainSamples& samples,
                                         const SGLDConfig& config) {
  const fs::path draws = with_suffix(stem, ".draws.csv");
  const fs::path losses = with_suffix(stem, ".losses.csv");
  const fs::path meta = with_suffix(stem, ".json");
  write_file_atomic(draws, matrix_to_csv(samples.draws, index_labels("t", samples.draws.rows()),
                                         index_labels("w", samples.draws.cols()), "draw"));
  write_file_atomic(losses, matrix_to_csv(samples.per_sample_losses,
                                          index_labels("t", samples.per_sample_losses.rows()),
                                          index_labels("z", samples.per_sample_losses.cols()),
                                          "draw"));
  json j;
  j["fingerprint"] = samples.fingerprint;
  j["draws"] = samples.size();
  j["chains"] = samples.chains;
  j["reference_loss"] = samples.reference_loss;
  j["seed"] = config.seed;
  j["config"] = {{"step_size", config.step_size},
                 {"minibatch_size", config.minibatch_size},
                 {"steps", config.steps},
                 {"burn_in", config.burn_in},
                 {"thinning", config.thinning},
                 {"chains", config.chains}};
  if (samples.restriction) {
    j["restriction"] = {{"name", samples.restriction->name},
                        {"indices", samples.restriction->indices}};
  } else {
    j["restriction"] = nullptr;
  }
  write_file_atomic(meta, j.dump(2) + "\n");
  return {draws, losses, meta};
}

ChainSamples load_chain_samples(const fs::path& stem) {
  const json j = json::parse(read_file(with_suffix(stem, ".json")));
  ChainSamples out;
  out.draws = matrix_from_csv(read_file(with_suffix(stem, ".draws.csv"))).values;
  out.per_sample_losses = matrix_from_csv(read_file(with_suffix(stem, ".losses.csv"))).values;
  if (out.per_sample_losses.rows() != out.draws.rows())
    throw InvalidArgument("draws and losses have different row counts");
  out.fingerprint = j.at("fingerprint").get<std::string>();
  out.chains = j.value("chains", 1);
  out.reference_loss = j.at("reference_loss").get<double>();
  out.full_loss = out.per_sample_losses.rowwise().mean();
  if (!j["restriction"].is_null()) {
    out.restriction = ComponentSpec{j["restriction"].at("name").get<std::string>(),
                                    j["restriction"].at("indices").get<std::vector<int>>()};
  }
  return out;
}

}  // namespace suscept::io
