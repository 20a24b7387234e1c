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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tonguegraft/vocab_expansion.hpp"

namespace tonguegraft {

// Row-major rows x cols matrix of finite 32-bit floats; row i belongs to
// token id i.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t cols);
  EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const float> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

// TGEM layout: "TGEM", u32 version (1), u64 rows, u64 cols, then rows*cols
// IEEE-754 binary32 values, all little-endian.
inline constexpr char kMatrixMagic[4] = {'T', 'G', 'E', 'M'};
inline constexpr std::uint32_t kMatrixVersion = 1;
inline constexpr std::size_t kMatrixHeaderBytes = 24;

std::string serialize_matrix(const EmbeddingMatrix& m);
EmbeddingMatrix parse_matrix(std::string_view bytes);
EmbeddingMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path);

// Appends one row per addition entry holding the mean of its constituent
// base rows (accumulated in double, rounded once to float). Base rows are
// copied bit for bit. Use the same call for input embeddings and the output
// projection.
EmbeddingMatrix mean_init(const EmbeddingMatrix& base, const AdditionSet& addition);

struct LogitCheckOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 7;
  double tolerance = 1e-6;
};

struct LogitCheckReport {
  bool passed = false;
  std::size_t trials = 0;
  // |base logit - expanded logit| over base rows; zero when rows are copied.
  double max_base_deviation = 0.0;
  // |new logit - mean constituent logit| / max(|mean logit|, sum_i |h_i m_i|).
  // The second term keeps the ratio meaningful when the dot product cancels.
  double max_relative_deviation = 0.0;
  std::optional<std::size_t> worst_row;
  std::vector<std::size_t> failing_rows;

  std::string summary() const;
};

// Draws `trials` hidden vectors uniformly from [-1, 1)^cols and compares the
// logits each matrix induces.
LogitCheckReport logit_consistency_check(const EmbeddingMatrix& base_out,
                                         const EmbeddingMatrix& expanded_out,
                                         const AdditionSet& addition,
                                         const LogitCheckOptions& options = {});

}  // namespace tonguegraft
