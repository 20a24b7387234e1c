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
#include <unordered_map>
#include <utility>
#include <vector>

namespace tonguegraft {

using TokenId = std::uint32_t;

enum class TokenKind : std::uint8_t { kNormal, kByte, kSpecial };

struct Token {
  std::string piece;
  double score = 0.0;
  TokenKind kind = TokenKind::kNormal;
};

struct MergeRule {
  TokenId left;
  TokenId right;
  TokenId result;
};

struct Normalization {
  bool nfkc = true;
};

struct DecodeResult {
  std::string text;
  // Set when a run of byte tokens was not well-formed UTF-8 and U+FFFD was
  // substituted.
  bool replaced_invalid_bytes = false;
};

inline constexpr std::string_view kUnkPiece = "<unk>";
inline constexpr std::string_view kBosPiece = "<s>";
inline constexpr std::string_view kEosPiece = "</s>";

// "<0xHH>" with uppercase hex digits.
std::string byte_piece(std::uint8_t byte);
std::optional<std::uint8_t> parse_byte_piece(std::string_view piece);

// Builds the conventional reserved prefix: <unk>, <s>, </s>, then the 256
// byte tokens, all with score 0.
std::vector<Token> reserved_tokens();

// Immutable BPE tokenizer with byte fallback. Ids are dense and 0-based;
// merges are applied lowest rank first. Safe to share across threads.
class TokenizerModel {
 public:
  // Validates every invariant (unique pieces, exactly 256 byte tokens, merge
  // results equal to left+right) and throws Error on violation.
  TokenizerModel(std::vector<Token> tokens,
                 std::vector<std::pair<std::string, std::string>> merges,
                 Normalization normalization = {});

  std::size_t size() const { return tokens_.size(); }
  const Token& token(TokenId id) const;
  std::string_view piece(TokenId id) const { return token(id).piece; }
  std::span<const Token> tokens() const { return tokens_; }
  std::span<const MergeRule> merges() const { return merges_; }
  const Normalization& normalization() const { return normalization_; }

  // Lookup among normal (text-matching) tokens only.
  std::optional<TokenId> find(std::string_view piece) const;
  // Lookup among all tokens, including byte and special pieces.
  std::optional<TokenId> find_any(std::string_view piece) const;
  TokenId byte_token(std::uint8_t byte) const { return byte_ids_[byte]; }
  std::optional<TokenId> eos_id() const { return find_any(kEosPiece); }

  std::vector<TokenId> encode(std::string_view text) const;
  DecodeResult decode(std::span<const TokenId> ids) const;

  std::string to_json() const;
  static TokenizerModel from_json(std::string_view document);
  void save(const std::filesystem::path& path) const;
  static TokenizerModel load(const std::filesystem::path& path);

 private:
  struct MergeInfo {
    std::uint32_t rank;
    TokenId result;
  };
  static std::uint64_t pair_key(TokenId left, TokenId right) {
    return (static_cast<std::uint64_t>(left) << 32) | right;
  }
  void encode_run(std::span<const TokenId> symbols, std::vector<TokenId>& out) const;

  std::vector<Token> tokens_;
  std::vector<MergeRule> merges_;
  Normalization normalization_;
  std::unordered_map<std::string, TokenId> text_index_;
  std::unordered_map<std::string, TokenId> all_index_;
  std::unordered_map<std::uint64_t, MergeInfo> merge_index_;
  TokenId byte_ids_[256] = {};
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace tonguegraft
