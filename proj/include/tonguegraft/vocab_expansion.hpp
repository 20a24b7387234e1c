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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft {

// SentencePiece's word-boundary marker, U+2581.
inline constexpr std::string_view kWordBoundaryEscape = "\xE2\x96\x81";

struct AdditionEntry {
  std::string piece;
  double score = 0.0;
  // The piece as segmented by the base tokenizer.
  std::vector<TokenId> constituents;
};

// New-language tokens to graft onto a base tokenizer. Entry i receives id
// base_vocab_size + i in the expanded model. `merges` holds one rule per
// multi-character entry, in entry (descending score) order.
struct AdditionSet {
  std::size_t base_vocab_size = 0;
  std::vector<AdditionEntry> entries;
  std::vector<std::pair<std::string, std::string>> merges;

  std::size_t size() const { return entries.size(); }

  std::string to_json() const;
  static AdditionSet from_json(std::string_view document);
  void save(const std::filesystem::path& path) const;
  static AdditionSet load(const std::filesystem::path& path);
};

struct AdditionStats {
  std::size_t candidates = 0;
  std::size_t empty_after_escape = 0;
  std::size_t in_base = 0;
  std::size_t single_byte = 0;
  std::size_t duplicates = 0;
  std::size_t unreachable = 0;
  std::size_t truncated = 0;
};

inline constexpr std::size_t kAdditionMultiple = 8;

// Filters trained tokens down to the set worth adding:
//   1. strip U+2581 from every piece;
//   2. drop pieces the base already has, and one-byte pieces that byte
//      fallback covers;
//   3. deduplicate, keeping the highest score;
//   4. drop pieces the expanded encoder could never produce (not NFKC-stable,
//      or no split into already-available pieces);
//   5. truncate the lowest-score end to a multiple of 8.
// Scores are carried over unchanged. Throws kNothingToAdd if nothing is left.
AdditionSet build_addition(const TokenizerModel& trained, const TokenizerModel& base,
                           AdditionStats* stats = nullptr);

// Checks the AdditionSet invariants against `base`; throws Error on the
// first violation.
void validate_addition(const AdditionSet& addition, const TokenizerModel& base);

// Base ids are preserved; additions are appended, and their merge rules run
// after every base merge. The expanded model always normalizes with NFKC.
TokenizerModel merge_vocabularies(const TokenizerModel& base, const AdditionSet& addition);

}  // namespace tonguegraft
