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
#include <string_view>
#include <vector>

namespace tonguegraft {

// Pre-segmented text: one record per line, words separated by ASCII
// whitespace. Segmentation itself happens upstream.
struct SegmentedCorpus {
  std::string source_id;
  std::vector<std::vector<std::string>> records;

  std::size_t word_count() const;
};

SegmentedCorpus parse_segmented_corpus(std::string_view text, std::string source_id = {});
SegmentedCorpus read_segmented_corpus(const std::filesystem::path& path);

// Uniform sample of `count` records without replacement; record order in the
// result follows the original corpus. count >= size returns the corpus.
SegmentedCorpus sample_records(const SegmentedCorpus& corpus, std::size_t count,
                               std::uint64_t seed);

enum class DocumentFormat { kLines, kRecords };

// kLines: one UTF-8 document per LF-terminated line (a trailing CR is kept).
// kRecords: repeated [u32 little-endian byte length][bytes].
std::vector<std::string> read_documents(const std::filesystem::path& path,
                                        DocumentFormat format);
std::vector<std::string> parse_documents(std::string_view data, DocumentFormat format);
std::string serialize_records(const std::vector<std::string>& documents);

struct ParallelPair {
  std::string ja;
  std::string en;
  std::size_t pair_id = 0;
};

// Tab-separated "ja<TAB>en" lines. Lines with an empty side or without
// exactly one tab are rejected with the 1-based line number.
std::vector<ParallelPair> parse_parallel_tsv(std::string_view text);
std::vector<ParallelPair> read_parallel_tsv(const std::filesystem::path& path);

// Unbiased integer in [0, bound) from a 64-bit engine; stable across
// standard library implementations, unlike std::uniform_int_distribution.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Uniform double in [0, 1) built from the top 53 bits.
double uniform_unit(std::mt19937_64& rng);

}  // namespace tonguegraft
