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

#include "tonguegraft/vocab_expansion.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tonguegraft/error.hpp"
#include "tonguegraft/unicode.hpp"

namespace tonguegraft {
namespace {

constexpr int kAdditionVersion = 1;

std::string strip_escape(std::string_view piece) {
  std::string out;
  out.reserve(piece.size());
  std::size_t pos = 0;
  while (pos < piece.size()) {
    const std::size_t hit = piece.find(kWordBoundaryEscape, pos);
    if (hit == std::string_view::npos) {
      out.append(piece.substr(pos));
      break;
    }
    out.append(piece.substr(pos, hit - pos));
    pos = hit + kWordBoundaryEscape.size();
  }
  return out;
}

std::string json_quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

struct Candidate {
  std::string piece;
  double score;
  TokenId trained_id;
  std::optional<std::pair<std::string, std::string>> trained_merge;
};

}  // namespace

AdditionSet build_addition(const TokenizerModel& trained, const TokenizerModel& base,
                           AdditionStats* stats) {
  AdditionStats local;
  AdditionStats& st = stats != nullptr ? *stats : local;
  st = {};

  std::unordered_map<TokenId, std::pair<std::string, std::string>> merge_of;
  for (const MergeRule& m : trained.merges()) {
    merge_of[m.result] = {strip_escape(trained.piece(m.left)), strip_escape(trained.piece(m.right))};
  }

  std::vector<Candidate> candidates;
  for (TokenId id = 0; id < trained.size(); ++id) {
    const Token& t = trained.token(id);
    if (t.kind != TokenKind::kNormal) continue;
    ++st.candidates;
    std::string piece = strip_escape(t.piece);
    if (piece.empty()) {
      ++st.empty_after_escape;
      continue;
    }
    if (base.find_any(piece)) {
      ++st.in_base;
      continue;
    }
    if (piece.size() == 1) {
      ++st.single_byte;
      continue;
    }
    std::optional<std::pair<std::string, std::string>> merge;
    if (auto it = merge_of.find(id); it != merge_of.end()) merge = it->second;
    candidates.push_back({std::move(piece), t.score, id, std::move(merge)});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  // Pieces the expanded encoder can form as symbols: single code points of
  // either vocabulary, plus merge results whose inputs are themselves
  // available.
  std::unordered_set<std::string> available;
  for (const Token& t : base.tokens()) {
    if (t.kind == TokenKind::kNormal && unicode::count_code_points(t.piece) == 1) {
      available.insert(t.piece);
    }
  }
  for (const MergeRule& m : base.merges()) available.insert(std::string(base.piece(m.result)));

  AdditionSet out;
  out.base_vocab_size = base.size();
  std::unordered_set<std::string> seen;
  std::vector<std::optional<std::pair<std::string, std::string>>> entry_merges;
  for (const Candidate& c : candidates) {
    if (!seen.insert(c.piece).second) {
      ++st.duplicates;
      continue;
    }
    if (unicode::normalize(c.piece) != c.piece || !unicode::is_valid_utf8(c.piece)) {
      ++st.unreachable;
      continue;
    }
    const auto cps = unicode::split_code_points(c.piece);
    std::optional<std::pair<std::string, std::string>> rule;
    if (cps.size() > 1) {
      auto usable = [&](const std::pair<std::string, std::string>& m) {
        return !m.first.empty() && !m.second.empty() && m.first + m.second == c.piece &&
               available.count(m.first) > 0 && available.count(m.second) > 0;
      };
      if (c.trained_merge && usable(*c.trained_merge)) {
        rule = c.trained_merge;
      } else {
        std::size_t offset = 0;
        for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
          offset += cps[i].size();
          std::pair<std::string, std::string> split{c.piece.substr(0, offset),
                                                    c.piece.substr(offset)};
          if (usable(split)) {
            rule = std::move(split);
            break;
          }
        }
      }
      if (!rule) {
        ++st.unreachable;
        continue;
      }
    }
    available.insert(c.piece);
    out.entries.push_back({c.piece, c.score, {}});
    entry_merges.push_back(std::move(rule));
  }

  const std::size_t keep = out.entries.size() - out.entries.size() % kAdditionMultiple;
  st.truncated = out.entries.size() - keep;
  out.entries.resize(keep);
  entry_merges.resize(keep);
  if (out.entries.empty()) {
    throw Error(ErrorCode::kNothingToAdd,
                "nothing to add: no trained token survives filtering against the base vocabulary");
  }

  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    out.entries[i].constituents = base.encode(out.entries[i].piece);
    if (entry_merges[i]) out.merges.push_back(*entry_merges[i]);
  }
  return out;
}

void validate_addition(const AdditionSet& addition, const TokenizerModel& base) {
  if (addition.base_vocab_size != base.size()) {
    throw Error(ErrorCode::kIdCollision,
                "addition was built for a base of " + std::to_string(addition.base_vocab_size) +
                    " tokens, but the base has " + std::to_string(base.size()));
  }
  if (addition.entries.size() % kAdditionMultiple != 0) {
    throw Error(ErrorCode::kInvalidArgument, "addition size " +
                                                 std::to_string(addition.entries.size()) +
                                                 " is not a multiple of 8");
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < addition.entries.size(); ++i) {
    const AdditionEntry& e = addition.entries[i];
    if (base.find_any(e.piece)) {
      throw Error(ErrorCode::kIdCollision,
                  "added token " + json_quote(e.piece) + " already exists in the base vocabulary");
    }
    if (!seen.insert(e.piece).second) {
      throw Error(ErrorCode::kIdCollision, "added token " + json_quote(e.piece) + " appears twice");
    }
    if (e.constituents.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "added token " + json_quote(e.piece) + " has no constituents");
    }
    for (TokenId c : e.constituents) {
      if (c >= base.size()) {
        throw Error(ErrorCode::kIdOutOfRange, "constituent id " + std::to_string(c) +
                                                  " of " + json_quote(e.piece) +
                                                  " is outside the base vocabulary");
      }
    }
    if (base.decode(e.constituents).text != e.piece) {
      throw Error(ErrorCode::kInvalidArgument,
                  "constituents of " + json_quote(e.piece) + " do not decode to the token");
    }
  }
}

TokenizerModel merge_vocabularies(const TokenizerModel& base, const AdditionSet& addition) {
  validate_addition(addition, base);

  std::vector<Token> tokens(base.tokens().begin(), base.tokens().end());
  std::unordered_map<std::string, double> added_score;
  for (const AdditionEntry& e : addition.entries) {
    tokens.push_back({e.piece, e.score, TokenKind::kNormal});
    added_score.emplace(e.piece, e.score);
  }

  std::vector<std::pair<std::string, std::string>> merges;
  merges.reserve(base.merges().size() + addition.merges.size());
  for (const MergeRule& m : base.merges()) {
    merges.emplace_back(base.piece(m.left), base.piece(m.right));
  }
  std::vector<std::pair<std::string, std::string>> extra = addition.merges;
  for (const auto& m : extra) {
    if (!added_score.count(m.first + m.second)) {
      throw Error(ErrorCode::kIdCollision, "addition merge [" + json_quote(m.first) + ", " +
                                               json_quote(m.second) +
                                               "] does not produce an added token");
    }
  }
  std::stable_sort(extra.begin(), extra.end(), [&](const auto& a, const auto& b) {
    return added_score.at(a.first + a.second) > added_score.at(b.first + b.second);
  });
  merges.insert(merges.end(), extra.begin(), extra.end());
  return TokenizerModel(std::move(tokens), std::move(merges), Normalization{true});
}

std::string AdditionSet::to_json() const {
  std::ostringstream os;
  os << "{\n  \"version\": " << kAdditionVersion << ",\n";
  os << "  \"base_vocab_size\": " << base_vocab_size << ",\n";
  os << "  \"tokens\": [";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const AdditionEntry& e = entries[i];
    os << (i == 0 ? "\n" : ",\n") << "    {\"string\": " << json_quote(e.piece)
       << ", \"score\": " << nlohmann::json(e.score).dump()
       << ", \"constituents\": " << nlohmann::json(e.constituents).dump() << "}";
  }
  os << (entries.empty() ? "],\n" : "\n  ],\n");
  os << "  \"merges\": [";
  for (std::size_t i = 0; i < merges.size(); ++i) {
    os << (i == 0 ? "\n" : ",\n") << "    [" << json_quote(merges[i].first) << ", "
       << json_quote(merges[i].second) << "]";
  }
  os << (merges.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

AdditionSet AdditionSet::from_json(std::string_view document) {
  try {
    const auto doc = nlohmann::json::parse(document);
    if (doc.at("version").get<int>() != kAdditionVersion) {
      throw Error(ErrorCode::kBadVersion,
                  "addition file: unsupported version " + doc.at("version").dump());
    }
    AdditionSet out;
    out.base_vocab_size = doc.at("base_vocab_size").get<std::size_t>();
    for (const auto& t : doc.at("tokens")) {
      out.entries.push_back({t.at("string").get<std::string>(), t.at("score").get<double>(),
                             t.at("constituents").get<std::vector<TokenId>>()});
    }
    for (const auto& m : doc.at("merges")) {
      if (!m.is_array() || m.size() != 2) {
        throw Error(ErrorCode::kParse, "addition file: merge must be a [left, right] pair");
      }
      out.merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("addition file: ") + e.what());
  }
}

void AdditionSet::save(const std::filesystem::path& path) const { write_file(path, to_json()); }

AdditionSet AdditionSet::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

}  // namespace tonguegraft
