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

#include "tonguegraft/bpe_trainer.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>

#include "tonguegraft/error.hpp"
#include "tonguegraft/unicode.hpp"

namespace tonguegraft {
namespace {

using PairKey = std::uint64_t;

PairKey make_key(std::uint32_t left, std::uint32_t right) {
  return (static_cast<PairKey>(left) << 32) | right;
}
std::uint32_t key_left(PairKey k) { return static_cast<std::uint32_t>(k >> 32); }
std::uint32_t key_right(PairKey k) { return static_cast<std::uint32_t>(k & 0xFFFFFFFFu); }

struct Word {
  std::vector<std::uint32_t> symbols;
  std::int64_t count;
};

struct HeapEntry {
  std::int64_t count;
  std::string merged;
  std::size_t left_length;
  PairKey key;
};

// std::priority_queue pops the "largest"; largest here means the preferred
// merge: higher count, then smaller merged string, then shorter left piece.
struct HeapOrder {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.count != b.count) return a.count < b.count;
    if (a.merged != b.merged) return a.merged > b.merged;
    return a.left_length > b.left_length;
  }
};

class MergeLearner {
 public:
  explicit MergeLearner(const std::vector<std::pair<std::string, std::uint64_t>>& word_counts) {
    std::map<std::string, std::int64_t> char_freq;
    for (const auto& [word, count] : word_counts) {
      for (std::string_view cp : unicode::split_code_points(word)) {
        char_freq[std::string(cp)] += static_cast<std::int64_t>(count);
      }
    }
    std::vector<std::pair<std::string, std::int64_t>> chars(char_freq.begin(), char_freq.end());
    std::stable_sort(chars.begin(), chars.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (auto& [piece, freq] : chars) add_piece(piece, 0.0);
    char_count_ = pieces_.size();

    words_.reserve(word_counts.size());
    for (const auto& [word, count] : word_counts) {
      Word w{{}, static_cast<std::int64_t>(count)};
      for (std::string_view cp : unicode::split_code_points(word)) {
        w.symbols.push_back(index_.at(std::string(cp)));
      }
      words_.push_back(std::move(w));
    }
    for (std::uint32_t wi = 0; wi < words_.size(); ++wi) {
      const Word& w = words_[wi];
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        const PairKey k = make_key(w.symbols[i], w.symbols[i + 1]);
        pair_counts_[k] += w.count;
        where_[k].push_back(wi);
      }
    }
    for (const auto& [k, c] : pair_counts_) push(k, c);
  }

  std::size_t char_count() const { return char_count_; }

  void run(std::size_t target) {
    visit_stamp_.assign(words_.size(), 0);
    while (pieces_.size() < target) {
      auto best = pop_best();
      if (!best) break;
      apply(*best);
    }
  }

  std::vector<Token> learned_tokens() const {
    std::vector<Token> out;
    out.reserve(pieces_.size());
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      out.push_back({pieces_[i], scores_[i], TokenKind::kNormal});
    }
    return out;
  }

  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }

 private:
  std::uint32_t add_piece(const std::string& piece, double score) {
    auto [it, inserted] = index_.emplace(piece, static_cast<std::uint32_t>(pieces_.size()));
    if (inserted) {
      pieces_.push_back(piece);
      scores_.push_back(score);
    }
    return it->second;
  }

  void push(PairKey k, std::int64_t count) {
    const std::string& l = pieces_[key_left(k)];
    heap_.push({count, l + pieces_[key_right(k)], l.size(), k});
  }

  std::optional<PairKey> pop_best() {
    while (!heap_.empty()) {
      HeapEntry top = heap_.top();
      heap_.pop();
      auto it = pair_counts_.find(top.key);
      if (it == pair_counts_.end() || it->second != top.count || top.count <= 0) continue;
      // Merged strings must not shadow a reserved byte or special token.
      if (parse_byte_piece(top.merged) || top.merged == kUnkPiece || top.merged == kBosPiece ||
          top.merged == kEosPiece) {
        pair_counts_.erase(it);
        continue;
      }
      return top.key;
    }
    return std::nullopt;
  }

  void apply(PairKey k) {
    const std::uint32_t a = key_left(k);
    const std::uint32_t b = key_right(k);
    const std::string merged = pieces_[a] + pieces_[b];
    const double score = -static_cast<double>(merges_.size() + 1);
    const std::uint32_t c = add_piece(merged, score);
    merges_.emplace_back(pieces_[a], pieces_[b]);
    ++stamp_;

    std::vector<std::uint32_t> affected = std::move(where_[k]);
    where_.erase(k);
    std::unordered_map<PairKey, std::int64_t> delta;
    for (std::uint32_t wi : affected) {
      if (visit_stamp_[wi] == stamp_) continue;
      visit_stamp_[wi] = stamp_;
      Word& w = words_[wi];
      std::vector<std::uint32_t> merged_syms;
      merged_syms.reserve(w.symbols.size());
      bool changed = false;
      for (std::size_t i = 0; i < w.symbols.size(); ++i) {
        if (i + 1 < w.symbols.size() && w.symbols[i] == a && w.symbols[i + 1] == b) {
          merged_syms.push_back(c);
          ++i;
          changed = true;
        } else {
          merged_syms.push_back(w.symbols[i]);
        }
      }
      if (!changed) continue;
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        delta[make_key(w.symbols[i], w.symbols[i + 1])] -= w.count;
      }
      for (std::size_t i = 0; i + 1 < merged_syms.size(); ++i) {
        const PairKey nk = make_key(merged_syms[i], merged_syms[i + 1]);
        delta[nk] += w.count;
        if (merged_syms[i] == c || merged_syms[i + 1] == c) where_[nk].push_back(wi);
      }
      w.symbols = std::move(merged_syms);
    }
    // Sorted so heap insertion order never depends on hash iteration order.
    std::vector<std::pair<PairKey, std::int64_t>> changes(delta.begin(), delta.end());
    std::sort(changes.begin(), changes.end());
    for (const auto& [pk, d] : changes) {
      if (d == 0) continue;
      auto& count = pair_counts_[pk];
      count += d;
      if (count <= 0) {
        pair_counts_.erase(pk);
      } else {
        push(pk, count);
      }
    }
  }

  std::vector<std::string> pieces_;
  std::vector<double> scores_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t char_count_ = 0;
  std::vector<Word> words_;
  std::unordered_map<PairKey, std::int64_t> pair_counts_;
  std::unordered_map<PairKey, std::vector<std::uint32_t>> where_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::vector<std::uint64_t> visit_stamp_;
  std::uint64_t stamp_ = 0;
};

}  // namespace

std::vector<std::pair<std::string, std::uint64_t>> prepare_word_counts(
    const SegmentedCorpus& corpus, const BpeTrainOptions& options) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& record : corpus.records) {
    for (const auto& raw : record) {
      if (raw.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "segmented corpus contains an empty word");
      }
      if (!unicode::is_valid_utf8(raw)) {
        throw Error(ErrorCode::kInvalidArgument, "segmented corpus word is not valid UTF-8");
      }
      const std::string word = options.nfkc ? unicode::normalize(raw) : raw;
      if (options.split_symbols) {
        for (auto& piece : unicode::split_symbols(word)) ++counts[piece];
      } else if (!word.empty()) {
        ++counts[word];
      }
    }
  }
  return {counts.begin(), counts.end()};
}

TokenizerModel train_bpe(const SegmentedCorpus& corpus, std::size_t target_vocab_size,
                         const BpeTrainOptions& options) {
  const auto word_counts = prepare_word_counts(corpus, options);
  if (word_counts.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot train BPE on an empty corpus");
  }
  MergeLearner learner(word_counts);
  if (target_vocab_size < learner.char_count()) {
    throw Error(ErrorCode::kVocabTooSmall,
                "target vocabulary size " + std::to_string(target_vocab_size) +
                    " is below the character inventory; minimum is " +
                    std::to_string(learner.char_count()));
  }
  learner.run(target_vocab_size);

  std::vector<Token> tokens = reserved_tokens();
  for (auto& t : learner.learned_tokens()) tokens.push_back(std::move(t));
  return TokenizerModel(std::move(tokens), learner.merges(), Normalization{options.nfkc});
}

}  // namespace tonguegraft
