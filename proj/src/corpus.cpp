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

#include "tonguegraft/corpus.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tonguegraft/error.hpp"
#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  std::size_t line_no = 1;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    fn(text.substr(start, end - start), line_no++);
    start = end + 1;
  }
}

}  // namespace

std::size_t SegmentedCorpus::word_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.size();
  return n;
}

SegmentedCorpus parse_segmented_corpus(std::string_view text, std::string source_id) {
  SegmentedCorpus corpus;
  corpus.source_id = std::move(source_id);
  for_each_line(text, [&](std::string_view line, std::size_t) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      if (j > i) words.emplace_back(line.substr(i, j - i));
      i = j;
    }
    if (!words.empty()) corpus.records.push_back(std::move(words));
  });
  return corpus;
}

SegmentedCorpus read_segmented_corpus(const std::filesystem::path& path) {
  return parse_segmented_corpus(read_file(path), path.filename().string());
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "uniform_below: bound is zero");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SegmentedCorpus sample_records(const SegmentedCorpus& corpus, std::size_t count,
                               std::uint64_t seed) {
  if (count >= corpus.records.size()) return corpus;
  std::vector<std::size_t> idx(corpus.records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_below(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  SegmentedCorpus out;
  out.source_id = corpus.source_id;
  out.records.reserve(count);
  for (std::size_t i : idx) out.records.push_back(corpus.records[i]);
  return out;
}

std::vector<std::string> parse_documents(std::string_view data, DocumentFormat format) {
  std::vector<std::string> docs;
  if (format == DocumentFormat::kLines) {
    for_each_line(data, [&](std::string_view line, std::size_t) { docs.emplace_back(line); });
    return docs;
  }
  std::size_t pos = 0;
  while (pos < data.size()) {
    if (data.size() - pos < 4) {
      throw Error(ErrorCode::kParse, "record file: truncated length prefix at byte " +
                                         std::to_string(pos));
    }
    std::uint32_t len = 0;
    for (int b = 3; b >= 0; --b) {
      len = (len << 8) | static_cast<std::uint8_t>(data[pos + static_cast<std::size_t>(b)]);
    }
    pos += 4;
    if (data.size() - pos < len) {
      throw Error(ErrorCode::kParse, "record file: record of " + std::to_string(len) +
                                         " bytes overruns the file");
    }
    docs.emplace_back(data.substr(pos, len));
    pos += len;
  }
  return docs;
}

std::vector<std::string> read_documents(const std::filesystem::path& path,
                                        DocumentFormat format) {
  return parse_documents(read_file(path), format);
}

std::string serialize_records(const std::vector<std::string>& documents) {
  std::string out;
  for (const auto& d : documents) {
    const auto len = static_cast<std::uint32_t>(d.size());
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((len >> (8 * b)) & 0xFF));
    out += d;
  }
  return out;
}

std::vector<ParallelPair> parse_parallel_tsv(std::string_view text) {
  std::vector<ParallelPair> pairs;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw Error(ErrorCode::kParse, "parallel corpus line " + std::to_string(line_no) +
                                         ": expected exactly one tab");
    }
    ParallelPair p{std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)),
                   pairs.size()};
    if (p.ja.empty() || p.en.empty()) {
      throw Error(ErrorCode::kParse,
                  "parallel corpus line " + std::to_string(line_no) + ": empty side");
    }
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::vector<ParallelPair> read_parallel_tsv(const std::filesystem::path& path) {
  return parse_parallel_tsv(read_file(path));
}

}  // namespace tonguegraft
