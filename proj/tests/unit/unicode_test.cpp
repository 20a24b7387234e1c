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


#include "tonguegraft/unicode.hpp"

#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

namespace tonguegraft::unicode {
namespace {

using Pieces = std::vector<std::string>;

TEST(Normalize, FoldsCompatibilityForms) {
  EXPECT_EQ(normalize("Ａ"), "A");
  EXPECT_EQ(normalize("①"), "1");
  EXPECT_EQ(normalize("ﬁ"), "fi");
  EXPECT_EQ(normalize("ｶ"), "カ");
}

TEST(Normalize, IdeographIsFixedPoint) { EXPECT_EQ(normalize("猫"), "猫"); }

TEST(Normalize, ComposesCombiningMarks) { EXPECT_EQ(normalize("e\xCC\x81"), "\xC3\xA9"); }

TEST(Normalize, EmptyStaysEmpty) { EXPECT_EQ(normalize(""), ""); }

TEST(Normalize, IllFormedBytesPassThrough) {
  const std::string s = "Ａ\xFF" "Ａ";
  EXPECT_EQ(normalize(s), "A\xFF" "A");
}

TEST(Normalize, IdempotentOnRandomText) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = testing::random_unicode(rng, 24);
    const std::string once = normalize(s);
    ASSERT_EQ(normalize(once), once);
  }
}

TEST(Utf8, Validity) {
  EXPECT_TRUE(is_valid_utf8("猫 cat"));
  EXPECT_FALSE(is_valid_utf8("\xE7\x8C"));
  EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));
  EXPECT_FALSE(is_valid_utf8("\xED\xA0\x80"));
}

TEST(Utf8, SplitCodePointsConcatenatesBack) {
  const std::string s = "a猫\xFF" "b";
  const auto cps = split_code_points(s);
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[1], "猫");
  EXPECT_EQ(cps[2], "\xFF");
  std::string joined;
  for (auto cp : cps) joined += cp;
  EXPECT_EQ(joined, s);
  EXPECT_EQ(count_code_points("猫と犬"), 3u);
}

TEST(Utf8, EncodeMatchesKnownBytes) {
  EXPECT_EQ(encode_utf8(0x732B), "\xE7\x8C\xAB");
  EXPECT_EQ(encode_utf8(0x41), "A");
  EXPECT_EQ(encode_utf8(0x1F600), "\xF0\x9F\x98\x80");
}

TEST(Utf8, SanitizeFlagsReplacement) {
  bool replaced = false;
  EXPECT_EQ(sanitize_utf8("\xE7\x8C\xAB", &replaced), "猫");
  EXPECT_FALSE(replaced);
  EXPECT_EQ(sanitize_utf8("a\xE7\x8C" "b", &replaced), "a\xEF\xBF\xBD" "b");
  EXPECT_TRUE(replaced);
}

TEST(SplitSymbols, Examples) {
  EXPECT_EQ(split_symbols("cat-dog"), (Pieces{"cat", "-", "dog"}));
  EXPECT_EQ(split_symbols("猫"), (Pieces{"猫"}));
  EXPECT_EQ(split_symbols("a++b"), (Pieces{"a", "++", "b"}));
  EXPECT_EQ(split_symbols("「猫」"), (Pieces{"「", "猫", "」"}));
  EXPECT_EQ(split_symbols("$5"), (Pieces{"$", "5"}));
  EXPECT_EQ(split_symbols("..."), (Pieces{"..."}));
}

TEST(SplitSymbols, ClassOfKnownCodePoints) {
  EXPECT_TRUE(is_symbol(U'-'));
  EXPECT_TRUE(is_symbol(U'。'));
  EXPECT_TRUE(is_symbol(U'+'));
  EXPECT_TRUE(is_symbol(U'¥'));
  EXPECT_FALSE(is_symbol(U'a'));
  EXPECT_FALSE(is_symbol(U'猫'));
  EXPECT_FALSE(is_symbol(U'5'));
}

TEST(SplitSymbols, MatchesCategoryOracleOnRandomWords) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 3000; ++i) {
    std::string word = testing::random_unicode(rng, 12);
    if (word.empty()) continue;
    const auto pieces = split_symbols(word);
    ASSERT_EQ(pieces, oracle::split_symbols(word)) << word;
    std::string joined;
    for (const auto& p : pieces) {
      ASSERT_FALSE(p.empty());
      joined += p;
    }
    ASSERT_EQ(joined, word);
  }
}

}  // namespace
}  // namespace tonguegraft::unicode
