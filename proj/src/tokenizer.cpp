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

#include "tonguegraft/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "tonguegraft/error.hpp"
#include "tonguegraft/unicode.hpp"

namespace tonguegraft {
namespace {

constexpr int kFormatVersion = 1;

std::string json_quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

}  // namespace

std::string byte_piece(std::uint8_t byte) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out = "<0x";
  out.push_back(kHex[byte >> 4]);
  out.push_back(kHex[byte & 0xF]);
  out.push_back('>');
  return out;
}

std::optional<std::uint8_t> parse_byte_piece(std::string_view piece) {
  if (piece.size() != 6 || piece.substr(0, 3) != "<0x" || piece[5] != '>') {
    return std::nullopt;
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  const int hi = nibble(piece[3]);
  const int lo = nibble(piece[4]);
  if (hi < 0 || lo < 0) return std::nullopt;
  return static_cast<std::uint8_t>(hi * 16 + lo);
}

std::vector<Token> reserved_tokens() {
  std::vector<Token> tokens;
  tokens.reserve(259);
  tokens.push_back({std::string(kUnkPiece), 0.0, TokenKind::kSpecial});
  tokens.push_back({std::string(kBosPiece), 0.0, TokenKind::kSpecial});
  tokens.push_back({std::string(kEosPiece), 0.0, TokenKind::kSpecial});
  for (int b = 0; b < 256; ++b) {
    tokens.push_back({byte_piece(static_cast<std::uint8_t>(b)), 0.0, TokenKind::kByte});
  }
  return tokens;
}

TokenizerModel::TokenizerModel(std::vector<Token> tokens,
                               std::vector<std::pair<std::string, std::string>> merges,
                               Normalization normalization)
    : tokens_(std::move(tokens)), normalization_(normalization) {
  std::array<bool, 256> seen_byte{};
  std::size_t byte_count = 0;
  text_index_.reserve(tokens_.size());
  all_index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const Token& t = tokens_[i];
    const auto id = static_cast<TokenId>(i);
    if (t.piece.empty()) {
      throw Error(ErrorCode::kParse, "token " + std::to_string(i) + " has an empty string");
    }
    if (!all_index_.emplace(t.piece, id).second) {
      throw Error(ErrorCode::kIdCollision, "duplicate token string " + json_quote(t.piece));
    }
    const auto byte = parse_byte_piece(t.piece);
    switch (t.kind) {
      case TokenKind::kByte:
        if (!byte) {
          throw Error(ErrorCode::kParse, "byte token " + json_quote(t.piece) + " is not <0xHH>");
        }
        seen_byte[*byte] = true;
        byte_ids_[*byte] = id;
        ++byte_count;
        break;
      case TokenKind::kNormal:
        if (byte) {
          throw Error(ErrorCode::kParse,
                      "normal token " + json_quote(t.piece) + " collides with byte notation");
        }
        if (!unicode::is_valid_utf8(t.piece)) {
          throw Error(ErrorCode::kParse, "token " + std::to_string(i) + " is not valid UTF-8");
        }
        text_index_.emplace(t.piece, id);
        break;
      case TokenKind::kSpecial:
        break;
    }
  }
  if (byte_count != 256 ||
      !std::all_of(seen_byte.begin(), seen_byte.end(), [](bool b) { return b; })) {
    throw Error(ErrorCode::kParse, "model must contain all 256 byte tokens exactly once (found " +
                                       std::to_string(byte_count) + ")");
  }

  merges_.reserve(merges.size());
  merge_index_.reserve(merges.size());
  for (auto& [left, right] : merges) {
    auto l = find(left);
    auto r = find(right);
    auto res = find(left + right);
    if (!l || !r) {
      throw Error(ErrorCode::kParse,
                  "merge [" + json_quote(left) + ", " + json_quote(right) + "] references an unknown token");
    }
    if (!res) {
      throw Error(ErrorCode::kParse, "merge result " + json_quote(left + right) + " is not in the vocabulary");
    }
    const auto rank = static_cast<std::uint32_t>(merges_.size());
    if (!merge_index_.emplace(pair_key(*l, *r), MergeInfo{rank, *res}).second) {
      throw Error(ErrorCode::kIdCollision,
                  "duplicate merge [" + json_quote(left) + ", " + json_quote(right) + "]");
    }
    merges_.push_back({*l, *r, *res});
  }
}

const Token& TokenizerModel::token(TokenId id) const {
  if (id >= tokens_.size()) {
    throw Error(ErrorCode::kIdOutOfRange, "token id " + std::to_string(id) +
                                              " out of range (size " +
                                              std::to_string(tokens_.size()) + ")");
  }
  return tokens_[id];
}

std::optional<TokenId> TokenizerModel::find(std::string_view piece) const {
  auto it = text_index_.find(std::string(piece));
  if (it == text_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> TokenizerModel::find_any(std::string_view piece) const {
  auto it = all_index_.find(std::string(piece));
  if (it == all_index_.end()) return std::nullopt;
  return it->second;
}

void TokenizerModel::encode_run(std::span<const TokenId> symbols,
                                std::vector<TokenId>& out) const {
  if (symbols.size() < 2 || merge_index_.empty()) {
    out.insert(out.end(), symbols.begin(), symbols.end());
    return;
  }
  const int n = static_cast<int>(symbols.size());
  std::vector<TokenId> ids(symbols.begin(), symbols.end());
  std::vector<int> prev(n), next(n);
  std::vector<bool> alive(n, true);
  for (int i = 0; i < n; ++i) {
    prev[i] = i - 1;
    next[i] = i + 1 < n ? i + 1 : -1;
  }

  struct Candidate {
    std::uint32_t rank;
    int left;
    TokenId left_id;
    TokenId right_id;
    bool operator>(const Candidate& o) const {
      return rank != o.rank ? rank > o.rank : left > o.left;
    }
  };
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue;
  auto consider = [&](int left) {
    if (left < 0 || next[left] < 0) return;
    auto it = merge_index_.find(pair_key(ids[left], ids[next[left]]));
    if (it != merge_index_.end()) {
      queue.push({it->second.rank, left, ids[left], ids[next[left]]});
    }
  };
  for (int i = 0; i + 1 < n; ++i) consider(i);

  while (!queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    if (!alive[c.left] || ids[c.left] != c.left_id) continue;
    const int right = next[c.left];
    if (right < 0 || ids[right] != c.right_id) continue;
    ids[c.left] = merge_index_.at(pair_key(c.left_id, c.right_id)).result;
    alive[right] = false;
    next[c.left] = next[right];
    if (next[right] >= 0) prev[next[right]] = c.left;
    consider(prev[c.left]);
    consider(c.left);
  }
  for (int i = 0; i >= 0; i = next[i]) out.push_back(ids[i]);
}

std::vector<TokenId> TokenizerModel::encode(std::string_view text) const {
  const std::string normalized =
      normalization_.nfkc ? unicode::normalize(text) : std::string(text);
  std::vector<TokenId> out;
  out.reserve(normalized.size());
  std::vector<TokenId> run;
  for (std::string_view cp : unicode::split_code_points(normalized)) {
    if (auto id = find(cp)) {
      run.push_back(*id);
      continue;
    }
    encode_run(run, out);
    run.clear();
    for (char c : cp) out.push_back(byte_ids_[static_cast<std::uint8_t>(c)]);
  }
  encode_run(run, out);
  return out;
}

DecodeResult TokenizerModel::decode(std::span<const TokenId> ids) const {
  DecodeResult result;
  std::string pending;
  auto flush = [&] {
    if (pending.empty()) return;
    bool replaced = false;
    result.text += unicode::sanitize_utf8(pending, &replaced);
    result.replaced_invalid_bytes |= replaced;
    pending.clear();
  };
  for (TokenId id : ids) {
    const Token& t = token(id);
    switch (t.kind) {
      case TokenKind::kByte:
        pending.push_back(static_cast<char>(*parse_byte_piece(t.piece)));
        break;
      case TokenKind::kNormal:
        flush();
        result.text += t.piece;
        break;
      case TokenKind::kSpecial:
        flush();
        break;
    }
  }
  flush();
  return result;
}

std::string TokenizerModel::to_json() const {
  std::ostringstream os;
  os << "{\n  \"version\": " << kFormatVersion << ",\n";
  os << "  \"normalization\": {\"nfkc\": " << (normalization_.nfkc ? "true" : "false") << "},\n";
  os << "  \"tokens\": [";
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const Token& t = tokens_[i];
    os << (i == 0 ? "\n" : ",\n") << "    {\"string\": " << json_quote(t.piece)
       << ", \"score\": " << nlohmann::json(t.score).dump();
    if (t.kind == TokenKind::kSpecial) os << ", \"special\": true";
    os << "}";
  }
  os << "\n  ],\n  \"merges\": [";
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    os << (i == 0 ? "\n" : ",\n") << "    [" << json_quote(tokens_[merges_[i].left].piece) << ", "
       << json_quote(tokens_[merges_[i].right].piece) << "]";
  }
  os << (merges_.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

TokenizerModel TokenizerModel::from_json(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("tokenizer file: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kBadVersion, "tokenizer file: unsupported version " +
                                              doc.at("version").dump());
    }
    Normalization norm;
    norm.nfkc = doc.at("normalization").at("nfkc").get<bool>();
    std::vector<Token> tokens;
    for (const auto& entry : doc.at("tokens")) {
      Token t;
      t.piece = entry.at("string").get<std::string>();
      t.score = entry.at("score").get<double>();
      if (entry.value("special", false)) {
        t.kind = TokenKind::kSpecial;
      } else if (parse_byte_piece(t.piece)) {
        t.kind = TokenKind::kByte;
      }
      tokens.push_back(std::move(t));
    }
    std::vector<std::pair<std::string, std::string>> merges;
    for (const auto& m : doc.at("merges")) {
      if (!m.is_array() || m.size() != 2) {
        throw Error(ErrorCode::kParse, "tokenizer file: merge must be a [left, right] pair");
      }
      merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
    }
    return TokenizerModel(std::move(tokens), std::move(merges), norm);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("tokenizer file: ") + e.what());
  }
}

void TokenizerModel::save(const std::filesystem::path& path) const {
  write_file(path, to_json());
}

TokenizerModel TokenizerModel::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace tonguegraft
