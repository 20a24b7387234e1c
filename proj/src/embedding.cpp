// Copyright 2026 The Tonguegraft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tonguegraft/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <sstream>

#include "tonguegraft/corpus.hpp"
#include "tonguegraft/error.hpp"

namespace tonguegraft {
namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<std::uint8_t>(in[offset + i])) << (8 * i);
  }
  return value;
}

void require_finite(std::span<const float> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::kNonFinite, "matrix value " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::kSizeMismatch, "matrix of " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + " needs " +
                                              std::to_string(rows * cols) + " values, got " +
                                              std::to_string(data_.size()));
  }
  require_finite(data_);
}

std::string serialize_matrix(const EmbeddingMatrix& m) {
  std::string out;
  out.reserve(kMatrixHeaderBytes + m.data().size() * 4);
  out.append(kMatrixMagic, 4);
  put_le<std::uint32_t>(out, kMatrixVersion);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint64_t>(out, m.cols());
  for (float v : m.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingMatrix parse_matrix(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMatrixMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "matrix file does not start with TGEM");
  }
  if (bytes.size() < kMatrixHeaderBytes) {
    throw Error(ErrorCode::kSizeMismatch, "matrix file header is truncated");
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kMatrixVersion) {
    throw Error(ErrorCode::kBadVersion, "unsupported matrix version " + std::to_string(version));
  }
  const auto rows = get_le<std::uint64_t>(bytes, 8);
  const auto cols = get_le<std::uint64_t>(bytes, 16);
  const std::size_t payload = bytes.size() - kMatrixHeaderBytes;
  if (cols != 0 && rows > payload / 4 / cols) {
    throw Error(ErrorCode::kSizeMismatch, "header declares " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + " but payload has " +
                                              std::to_string(payload) + " bytes");
  }
  if (payload != rows * cols * 4) {
    throw Error(ErrorCode::kSizeMismatch, "header declares " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + " but payload has " +
                                              std::to_string(payload) + " bytes");
  }
  std::vector<float> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, kMatrixHeaderBytes + 4 * i));
  }
  return EmbeddingMatrix(rows, cols, std::move(data));
}

EmbeddingMatrix read_matrix(const std::filesystem::path& path) {
  return parse_matrix(read_file(path));
}

void write_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  require_finite(m.data());
  write_file(path, serialize_matrix(m));
}

EmbeddingMatrix mean_init(const EmbeddingMatrix& base, const AdditionSet& addition) {
  if (base.rows() != addition.base_vocab_size) {
    throw Error(ErrorCode::kShapeMismatch, "base matrix has " + std::to_string(base.rows()) +
                                               " rows but the addition expects " +
                                               std::to_string(addition.base_vocab_size));
  }
  const std::size_t dim = base.cols();
  std::vector<float> data(base.data().begin(), base.data().end());
  data.resize((base.rows() + addition.size()) * dim);
  std::vector<double> acc(dim);
  for (std::size_t e = 0; e < addition.size(); ++e) {
    const AdditionEntry& entry = addition.entries[e];
    if (entry.constituents.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "addition entry " + std::to_string(e) + " has no constituents");
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (TokenId c : entry.constituents) {
      if (c >= base.rows()) {
        throw Error(ErrorCode::kIdOutOfRange, "constituent id " + std::to_string(c) +
                                                  " of entry " + std::to_string(e) +
                                                  " exceeds base rows " +
                                                  std::to_string(base.rows()));
      }
      const auto row = base.row(c);
      for (std::size_t j = 0; j < dim; ++j) acc[j] += row[j];
    }
    const double n = static_cast<double>(entry.constituents.size());
    float* out = data.data() + (base.rows() + e) * dim;
    for (std::size_t j = 0; j < dim; ++j) out[j] = static_cast<float>(acc[j] / n);
  }
  return EmbeddingMatrix(base.rows() + addition.size(), dim, std::move(data));
}

std::string LogitCheckReport::summary() const {
  std::ostringstream os;
  os.precision(6);
  os << (passed ? "PASS" : "FAIL") << " trials=" << trials
     << " max_base_deviation=" << max_base_deviation
     << " max_relative_deviation=" << std::scientific << max_relative_deviation;
  if (worst_row) os << " worst_row=" << *worst_row;
  if (!failing_rows.empty()) {
    os << " failing_rows=";
    for (std::size_t i = 0; i < failing_rows.size() && i < 16; ++i) {
      os << (i ? "," : "") << failing_rows[i];
    }
    if (failing_rows.size() > 16) os << ",...";
  }
  return os.str();
}

LogitCheckReport logit_consistency_check(const EmbeddingMatrix& base_out,
                                         const EmbeddingMatrix& expanded_out,
                                         const AdditionSet& addition,
                                         const LogitCheckOptions& options) {
  if (base_out.cols() != expanded_out.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "matrices differ in width");
  }
  if (base_out.rows() != addition.base_vocab_size ||
      expanded_out.rows() != base_out.rows() + addition.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "row counts do not match the addition (base " + std::to_string(base_out.rows()) +
                    ", expanded " + std::to_string(expanded_out.rows()) + ", addition " +
                    std::to_string(addition.size()) + ")");
  }
  const std::size_t dim = base_out.cols();
  const std::size_t base_rows = base_out.rows();
  auto dot = [dim](std::span<const float> row, const std::vector<double>& h) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += static_cast<double>(row[j]) * h[j];
    return s;
  };

  for (const AdditionEntry& entry : addition.entries) {
    for (TokenId c : entry.constituents) {
      if (c >= base_rows) {
        throw Error(ErrorCode::kIdOutOfRange,
                    "constituent id " + std::to_string(c) + " exceeds base rows");
      }
    }
  }
  // Exact constituent means, used only to scale the deviation.
  std::vector<std::vector<double>> means(addition.size(), std::vector<double>(dim, 0.0));
  for (std::size_t e = 0; e < addition.size(); ++e) {
    const auto& cons = addition.entries[e].constituents;
    for (TokenId c : cons) {
      for (std::size_t j = 0; j < dim; ++j) means[e][j] += base_out.row(c)[j];
    }
    for (double& m : means[e]) m /= static_cast<double>(cons.size());
  }

  LogitCheckReport report;
  report.trials = options.trials;
  std::set<std::size_t> failing;
  std::mt19937_64 rng(options.seed);
  std::vector<double> h(dim);
  std::vector<double> base_logits(base_rows);
  for (std::size_t t = 0; t < options.trials; ++t) {
    for (double& x : h) x = 2.0 * uniform_unit(rng) - 1.0;
    for (std::size_t r = 0; r < base_rows; ++r) {
      base_logits[r] = dot(base_out.row(r), h);
      const double dev = std::abs(base_logits[r] - dot(expanded_out.row(r), h));
      if (dev > report.max_base_deviation) report.max_base_deviation = dev;
      if (dev != 0.0) failing.insert(r);
    }
    for (std::size_t e = 0; e < addition.size(); ++e) {
      const auto& cons = addition.entries[e].constituents;
      double mean_logit = 0.0;
      for (TokenId c : cons) mean_logit += base_logits[c];
      mean_logit /= static_cast<double>(cons.size());
      double scale = 0.0;
      for (std::size_t j = 0; j < dim; ++j) scale += std::abs(h[j] * means[e][j]);
      const std::size_t row = base_rows + e;
      const double denom = std::max(std::abs(mean_logit), scale);
      const double diff = std::abs(dot(expanded_out.row(row), h) - mean_logit);
      const double rel = denom > 0.0 ? diff / denom : diff;
      if (!report.worst_row || rel > report.max_relative_deviation) {
        report.max_relative_deviation = rel;
        report.worst_row = row;
      }
      if (!(rel <= options.tolerance)) failing.insert(row);
    }
  }
  report.failing_rows.assign(failing.begin(), failing.end());
  report.passed = report.failing_rows.empty();
  return report;
}

}  // namespace tonguegraft
