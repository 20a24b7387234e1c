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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tonguegraft/embedding.hpp"
#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft::testing {

std::filesystem::path data_dir();
std::filesystem::path golden_dir();

// Removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline constexpr std::size_t kBaseVocabSize = 32000;
inline constexpr std::size_t kFixtureAdditionSize = 11176;

// Llama-sized base: reserved tokens, printable ASCII, and lowercase
// letter strings of length 2 to 4 built by appending one letter at a time.
// Has no CJK coverage.
TokenizerModel synthetic_base();

// A trained CJK vocabulary that yields exactly kFixtureAdditionSize entries
// against synthetic_base(): 3,000 single ideographs (猫 among them), 8,180
// two-ideograph pieces, plus a few tokens each filter has to drop.
TokenizerModel synthetic_cjk_trained();

// The ideographs used by synthetic_cjk_trained(), in id order.
std::vector<std::string> fixture_ideographs();

EmbeddingMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

// Mixed-script text: ASCII, Latin with combining marks, kana, ideographs,
// Hangul, compatibility forms, emoji, and arbitrary scalar values.
std::string random_unicode(std::mt19937_64& rng, std::size_t max_code_points);

std::u32string decode_utf8(const std::string& s);

// Lays out a full pipeline run in `dir`: the synthetic base tokenizer, a
// random base embedding matrix, copies of the bundled corpora and a config
// with relative paths. Returns the config path.
std::filesystem::path write_pipeline_workspace(const std::filesystem::path& dir);

// CLI argument lists (without the program name) for train-vocab, expand,
// init-embeddings, check-logits, mix, format-parallel and pack.
std::vector<std::vector<std::string>> pipeline_commands(const std::filesystem::path& config);

// Files the pipeline writes, relative to the workspace.
std::vector<std::string> pipeline_outputs();

}  // namespace tonguegraft::testing
