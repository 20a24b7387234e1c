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


#include "fixtures.hpp"

#include <atomic>
#include <chrono>
#include <system_error>

#include <json.hpp>

#include "tonguegraft/corpus.hpp"
#include "tonguegraft/unicode.hpp"

#ifndef TONGUEGRAFT_TEST_DATA_DIR
#error "TONGUEGRAFT_TEST_DATA_DIR must be defined"
#endif
#ifndef TONGUEGRAFT_TEST_GOLDEN_DIR
#error "TONGUEGRAFT_TEST_GOLDEN_DIR must be defined"
#endif

namespace tonguegraft::testing {

std::filesystem::path data_dir() { return TONGUEGRAFT_TEST_DATA_DIR; }
std::filesystem::path golden_dir() { return TONGUEGRAFT_TEST_GOLDEN_DIR; }

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = std::filesystem::temp_directory_path() /
          ("tonguegraft-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

TokenizerModel synthetic_base() {
  std::vector<Token> tokens = reserved_tokens();
  std::vector<std::pair<std::string, std::string>> merges;
  for (char c = 0x20; c <= 0x7E; ++c) tokens.push_back({std::string(1, c), 0.0, TokenKind::kNormal});

  std::vector<std::string> frontier;
  for (char c = 'a'; c <= 'z'; ++c) frontier.emplace_back(1, c);
  while (tokens.size() < kBaseVocabSize) {
    std::vector<std::string> next;
    for (const auto& stem : frontier) {
      for (char c = 'a'; c <= 'z' && tokens.size() < kBaseVocabSize; ++c) {
        std::string piece = stem + c;
        merges.emplace_back(stem, std::string(1, c));
        tokens.push_back({piece, -static_cast<double>(merges.size()), TokenKind::kNormal});
        next.push_back(std::move(piece));
      }
    }
    frontier = std::move(next);
  }
  return TokenizerModel(std::move(tokens), std::move(merges));
}

std::vector<std::string> fixture_ideographs() {
  std::vector<std::string> out;
  for (char32_t cp = 0x4E00; out.size() < 2999; ++cp) out.push_back(unicode::encode_utf8(cp));
  out.push_back("猫");
  return out;
}

TokenizerModel synthetic_cjk_trained() {
  const auto chars = fixture_ideographs();
  std::vector<Token> tokens = reserved_tokens();
  std::vector<std::pair<std::string, std::string>> merges;
  tokens.push_back({"\xE2\x96\x81", 0.0, TokenKind::kNormal});
  for (const auto& c : chars) tokens.push_back({c, 0.0, TokenKind::kNormal});
  for (std::size_t i = 0; merges.size() < 8180; ++i) {
    for (std::size_t j = 0; j < chars.size() && merges.size() < 8180; ++j) {
      merges.emplace_back(chars[i], chars[j]);
      tokens.push_back({chars[i] + chars[j], -static_cast<double>(merges.size()), TokenKind::kNormal});
    }
  }
  // Survives only as a duplicate of 猫 once the escape is stripped.
  merges.emplace_back("\xE2\x96\x81", "猫");
  tokens.push_back({"\xE2\x96\x81猫", -8181.0, TokenKind::kNormal});
  tokens.push_back({"the", -8182.0, TokenKind::kNormal});
  tokens.push_back({"\x01", -8183.0, TokenKind::kNormal});
  return TokenizerModel(std::move(tokens), std::move(merges));
}

EmbeddingMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<float> data(rows * cols);
  for (float& v : data) v = static_cast<float>(2.0 * uniform_unit(rng) - 1.0);
  return EmbeddingMatrix(rows, cols, std::move(data));
}

std::string random_unicode(std::mt19937_64& rng, std::size_t max_code_points) {
  struct Range {
    char32_t lo, hi;
    unsigned weight;
  };
  static const Range kRanges[] = {
      {0x20, 0x7E, 25},     {0x09, 0x0A, 2},      {0xC0, 0x24F, 10},   {0x300, 0x36F, 8},
      {0x3041, 0x30FF, 12}, {0x4E00, 0x9FFF, 12}, {0xFF01, 0xFFEF, 5}, {0xAC00, 0xD7A3, 3},
      {0x1100, 0x1175, 2},  {0xFB00, 0xFB06, 1},  {0x2460, 0x24FF, 2}, {0xF900, 0xFAD9, 1},
      {0x2070, 0x209F, 1},  {0x1F300, 0x1FAFF, 5}, {0x0, 0x10FFFF, 11},
  };
  unsigned total = 0;
  for (const auto& r : kRanges) total += r.weight;
  const std::size_t n = uniform_below(rng, max_code_points + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    auto pick = static_cast<unsigned>(uniform_below(rng, total));
    const Range* range = kRanges;
    while (pick >= range->weight) pick -= (range++)->weight;
    char32_t cp;
    do {
      cp = range->lo + static_cast<char32_t>(uniform_below(rng, range->hi - range->lo + 1));
    } while (cp >= 0xD800 && cp <= 0xDFFF);
    out += unicode::encode_utf8(cp);
  }
  return out;
}

std::u32string decode_utf8(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    int len = b < 0x80 ? 1 : b < 0xE0 ? 2 : b < 0xF0 ? 3 : 4;
    char32_t cp = len == 1 ? b : b & (0x7F >> len);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::filesystem::path write_pipeline_workspace(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "data");
  for (const char* name : {"ja_segmented.txt", "ja_sample.txt", "parallel.tsv", "web_en.txt", "arxiv_en.txt"}) {
    fs::copy_file(data_dir() / name, dir / "data" / name, fs::copy_options::overwrite_existing);
  }
  synthetic_base().save(dir / "base.json");
  write_matrix(random_matrix(kBaseVocabSize, 16, 7), dir / "base.tgem");

  nlohmann::ordered_json c;
  c["seed"] = 1234;
  c["vocab"] = {{"corpus", "data/ja_segmented.txt"}, {"size", 400}, {"out", "trained.json"}};
  c["expand"] = {{"base", "base.json"}, {"trained", "trained.json"},
                 {"out_model", "expanded.json"}, {"out_addition", "addition.json"}};
  c["embeddings"] = {{"base", "base.tgem"}, {"addition", "addition.json"}, {"out", "expanded.tgem"}};
  c["check"] = {{"base", "base.tgem"}, {"expanded", "expanded.tgem"}, {"addition", "addition.json"}};
  c["mixture"] = {{"total_tokens", 300},
                  {"model", "expanded.json"},
                  {"out", "plan.txt"},
                  {"sources",
                   {{{"id", "ja"}, {"weight", 0.9}, {"path", "data/ja_sample.txt"}},
                    {{"id", "web"}, {"weight", 0.05}, {"path", "data/web_en.txt"}},
                    {{"id", "arxiv"}, {"weight", 0.05}, {"path", "data/arxiv_en.txt"}}}}};
  c["parallel"] = {{"format", "ntp"},     {"mode", "mixed"},           {"model", "expanded.json"},
                   {"path", "data/parallel.tsv"}, {"plan", "plan.txt"}, {"out", "examples.jsonl"}};
  c["pack"] = {{"context_length", 256}, {"examples", "examples.jsonl"}, {"model", "expanded.json"},
               {"out", "packed.jsonl"}};
  const fs::path config = dir / "pipeline.json";
  write_file(config, c.dump(2) + "\n");
  return config;
}

std::vector<std::vector<std::string>> pipeline_commands(const std::filesystem::path& config) {
  std::vector<std::vector<std::string>> out;
  for (const char* sub : {"train-vocab", "expand", "init-embeddings", "check-logits", "mix",
                          "format-parallel", "pack"}) {
    out.push_back({sub, "--config", config.string()});
  }
  return out;
}

std::vector<std::string> pipeline_outputs() {
  return {"trained.json", "expanded.json", "addition.json", "expanded.tgem",
          "plan.txt",     "examples.jsonl", "packed.jsonl"};
}

}  // namespace tonguegraft::testing
