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

#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tonguegraft/error.hpp"

namespace tonguegraft {
namespace {

constexpr std::size_t kReserved = 259;

SegmentedCorpus corpus_of(std::vector<std::vector<std::string>> records) {
  SegmentedCorpus c;
  c.records = std::move(records);
  return c;
}

std::vector<std::pair<std::string, std::string>> merge_strings(const TokenizerModel& m) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const MergeRule& r : m.merges()) {
    out.emplace_back(std::string(m.piece(r.left)), std::string(m.piece(r.right)));
  }
  return out;
}

// Random corpus over a small alphabet with no symbol characters, so the
// word list the trainer sees is exactly the generated one.
SegmentedCorpus random_corpus(std::mt19937_64& rng, std::size_t max_words) {
  static const std::vector<std::string> kAlphabet = {"a", "b", "c", "d", "e", "ね", "こ", "ず", "み", "猫"};
  const std::size_t letters = 2 + uniform_below(rng, 5);
  std::vector<std::string> alphabet(kAlphabet.begin(), kAlphabet.end());
  for (std::size_t i = alphabet.size(); i > 1; --i) std::swap(alphabet[i - 1], alphabet[uniform_below(rng, i)]);
  alphabet.resize(letters);
  const std::size_t words = 1 + uniform_below(rng, max_words);
  SegmentedCorpus c;
  c.records.emplace_back();
  for (std::size_t w = 0; w < words; ++w) {
    if (uniform_below(rng, 8) == 0) c.records.emplace_back();
    std::string word;
    const std::size_t len = 1 + uniform_below(rng, 6);
    for (std::size_t k = 0; k < len; ++k) word += alphabet[uniform_below(rng, alphabet.size())];
    c.records.back().push_back(word);
  }
  return c;
}

std::vector<std::pair<std::string, std::uint64_t>> count_words(const SegmentedCorpus& c) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& r : c.records) {
    for (const auto& w : r) ++counts[w];
  }
  return {counts.begin(), counts.end()};
}

TEST(TrainBpe, FirstMergeIsMostFrequentPair) {
  const auto m = train_bpe(corpus_of({{"ねこ", "ねこ", "ねずみ"}}), 5);
  ASSERT_FALSE(m.merges().empty());
  EXPECT_EQ(merge_strings(m)[0], (std::pair<std::string, std::string>{"ね", "こ"}));
  EXPECT_EQ(m.size(), kReserved + 5);
}

TEST(TrainBpe, SingleCharacterCorpus) {
  const auto m = train_bpe(corpus_of({{"a"}}), 1);
  EXPECT_EQ(m.size(), kReserved + 1);
  EXPECT_TRUE(m.merges().empty());
  EXPECT_TRUE(m.find("a"));
}

TEST(TrainBpe, TargetEqualToInventoryEmitsNoMerges) {
  const auto m = train_bpe(corpus_of({{"abc", "cab", "bca"}}), 3);
  EXPECT_TRUE(m.merges().empty());
  EXPECT_EQ(m.size(), kReserved + 3);
}

TEST(TrainBpe, EmptyCorpusFails) {
  try {
    train_bpe(corpus_of({}), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(TrainBpe, TargetBelowInventoryNamesMinimum) {
  try {
    train_bpe(corpus_of({{"abc", "d"}}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVocabTooSmall);
    EXPECT_NE(std::string(e.what()).find("minimum is 4"), std::string::npos) << e.what();
  }
}

TEST(TrainBpe, RejectsEmptyAndIllFormedWords) {
  EXPECT_THROW(train_bpe(corpus_of({{"a", ""}}), 5), Error);
  EXPECT_THROW(train_bpe(corpus_of({{"a\xFF"}}), 5), Error);
}

TEST(TrainBpe, StopsWhenNoPairsRemain) {
  const auto m = train_bpe(corpus_of({{"ab"}}), 50);
  EXPECT_EQ(m.size(), kReserved + 3);
  EXPECT_EQ(m.merges().size(), 1u);
}

TEST(TrainBpe, ScoresFollowMergeRank) {
  const auto m = train_bpe(corpus_of({{"abcd", "abcd", "abc", "ab"}}), 7);
  const auto merges = m.merges();
  ASSERT_EQ(merges.size(), 3u);
  for (std::size_t k = 0; k < merges.size(); ++k) {
    EXPECT_EQ(m.token(merges[k].result).score, -static_cast<double>(k + 1));
  }
  EXPECT_EQ(m.token(*m.find("a")).score, 0.0);
}

TEST(TrainBpe, TieBreakPrefersSmallestMergedString) {
  // (b,c) and (a,b) both occur twice; "ab" < "bc".
  const auto m = train_bpe(corpus_of({{"abc", "abc"}}), 4);
  EXPECT_EQ(merge_strings(m)[0], (std::pair<std::string, std::string>{"a", "b"}));
}

TEST(TrainBpe, SymbolsAreSplitOut) {
  const auto m = train_bpe(corpus_of({{"cat-dog", "cat-dog", "a++b"}}), 40);
  for (const Token& t : m.tokens()) {
    if (t.kind != TokenKind::kNormal || t.piece.size() < 2) continue;
    const bool has_symbol = t.piece.find_first_of("-+") != std::string::npos;
    const bool has_letter = t.piece.find_first_of("abcdgot") != std::string::npos;
    EXPECT_FALSE(has_symbol && has_letter) << t.piece;
  }
  EXPECT_TRUE(m.find("++"));
}

TEST(TrainBpe, NormalizesWordsByDefault) {
  const auto m = train_bpe(corpus_of({{"Ａ"}}), 1);
  EXPECT_TRUE(m.find("A"));
  EXPECT_TRUE(m.normalization().nfkc);
  const auto raw = train_bpe(corpus_of({{"Ａ"}}), 1, BpeTrainOptions{false, true});
  EXPECT_TRUE(raw.find("Ａ"));
  EXPECT_FALSE(raw.normalization().nfkc);
}

TEST(TrainBpe, MatchesRecountOracleOnRandomCorpora) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const auto corpus = random_corpus(rng, 100);
    const auto words = count_words(corpus);
    std::size_t chars = 0;
    {
      std::map<std::string, int> seen;
      for (const auto& [w, c] : words) {
        for (std::size_t i = 0; i < w.size();) {
          const auto b = static_cast<unsigned char>(w[i]);
          const std::size_t len = b < 0x80 ? 1 : 3;
          seen[w.substr(i, len)] = 1;
          i += len;
        }
      }
      chars = seen.size();
    }
    const std::size_t target = chars + uniform_below(rng, 65 - chars);
    const auto m = train_bpe(corpus, target);
    ASSERT_EQ(merge_strings(m), oracle::bpe_merges(words, target)) << "trial " << trial;
  }
}

TEST(TrainBpe, LearnedTokensNeverSpanWords) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto corpus = random_corpus(rng, 60);
    const auto m = train_bpe(corpus, 64);
    for (TokenId id = kReserved; id < m.size(); ++id) {
      bool inside = false;
      for (const auto& r : corpus.records) {
        for (const auto& w : r) inside = inside || w.find(m.piece(id)) != std::string::npos;
      }
      ASSERT_TRUE(inside) << m.piece(id);
    }
  }
}

TEST(TrainBpe, DeterministicSerialization) {
  auto corpus = parse_segmented_corpus(read_file(testing::data_dir() / "ja_segmented.txt"));
  EXPECT_EQ(train_bpe(corpus, 500).to_json(), train_bpe(corpus, 500).to_json());
}

TEST(PrepareWordCounts, CountsSplitPieces) {
  const auto counts = prepare_word_counts(corpus_of({{"猫。", "猫"}}));
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_EQ(counts[0].first, "。");
  EXPECT_EQ(counts[1], (std::pair<std::string, std::uint64_t>{"猫", 2}));
}

}  // namespace
}  // namespace tonguegraft
