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


#include "tonguegraft/parallel_format.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tonguegraft/bpe_trainer.hpp"
#include "tonguegraft/error.hpp"

namespace tonguegraft {
namespace {

constexpr std::string_view kJa = "[Japanese sentence]";
constexpr std::string_view kEn = "[English sentence]";

std::string golden(const std::string& name) { return read_file(testing::golden_dir() / name); }

const TokenizerModel& tok() {
  static const TokenizerModel m = train_bpe(
      parse_segmented_corpus(read_file(testing::data_dir() / "ja_segmented.txt")), 800);
  return m;
}

std::vector<TokenId> masked_in(const FormattedExample& ex) {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < ex.token_ids.size(); ++i) {
    if (ex.loss_mask[i]) out.push_back(ex.token_ids[i]);
  }
  return out;
}

TEST(Templates, NtpMatchesGolden) {
  EXPECT_EQ(render_ntp(kJa, kEn).text(), golden("ntp_ja_en.txt"));
  EXPECT_EQ(render_ntp(kEn, kJa).text(), golden("ntp_en_ja.txt"));
  EXPECT_TRUE(render_ntp(kJa, kEn).prefix.empty());
}

TEST(Templates, TiMatchesGolden) {
  EXPECT_EQ(render_ti(Direction::kJaToEn, kJa, kEn).text(), golden("ti_ja_en.txt"));
  EXPECT_EQ(render_ti(Direction::kEnToJa, kEn, kJa).text(), golden("ti_en_ja.txt"));
}

TEST(Templates, TiSplitsBeforeTarget) {
  const auto r = render_ti(Direction::kJaToEn, "こんにちは", "Hello");
  EXPECT_EQ(r.target, "Hello");
  EXPECT_EQ(r.prefix, "Please translate the following Japanese text into English.  \nこんにちは ");
  EXPECT_EQ(r.text().rfind("Please translate the following Japanese text into English.", 0), 0u);
}

TEST(Templates, InstructionBytes) {
  EXPECT_EQ(kJaToEnInstruction.size(), 60u);
  EXPECT_EQ(kEnToJaInstruction.size(), 59u);
  EXPECT_EQ(kJaToEnInstruction.substr(kJaToEnInstruction.size() - 2), "  ");
  EXPECT_EQ(kEnToJaInstruction.back(), ' ');
}

TEST(FormatNtp, BothDirectionsFullyTrained) {
  const ParallelPair p{"こんにちは", "Hello", 3};
  const auto ex = format_ntp(p, tok());
  EXPECT_EQ(tok().decode(ex[0].token_ids).text, "こんにちは Hello");
  EXPECT_EQ(tok().decode(ex[1].token_ids).text, "Hello こんにちは");
  for (const auto& e : ex) {
    ASSERT_EQ(e.token_ids.size(), e.loss_mask.size());
    std::size_t sum = 0;
    for (auto m : e.loss_mask) sum += m;
    EXPECT_EQ(sum, e.token_ids.size());
    EXPECT_EQ(e.format, TaskFormat::kNtp);
    EXPECT_EQ(e.pair_id, 3u);
  }
  EXPECT_EQ(ex[0].direction, Direction::kJaToEn);
  EXPECT_EQ(ex[1].direction, Direction::kEnToJa);
}

TEST(FormatTi, MaskSelectsExactlyTheTarget) {
  const ParallelPair p{"こんにちは", "Hello", 0};
  const auto ex = format_ti(p, tok());
  EXPECT_EQ(tok().decode(masked_in(ex[0])).text, "Hello");
  EXPECT_EQ(tok().decode(masked_in(ex[1])).text, "こんにちは");
  EXPECT_EQ(tok().decode(ex[0].token_ids).text.rfind(kJaToEnInstruction, 0), 0u);
  EXPECT_EQ(tok().decode(ex[1].token_ids).text.rfind(kEnToJaInstruction, 0), 0u);
}

TEST(FormatTi, InstructionPositionsAreMaskedOut) {
  const ParallelPair p{"猫が窓の外を見ている。", "A cat is looking out of the window.", 0};
  for (const auto& e : format_ti(p, tok())) {
    const auto instr = tok().encode(e.direction == Direction::kJaToEn ? kJaToEnInstruction : kEnToJaInstruction);
    for (std::size_t i = 0; i < instr.size(); ++i) ASSERT_EQ(e.loss_mask[i], 0);
    // 0...0 1...1 with at least one 1.
    std::size_t first_one = e.loss_mask.size();
    for (std::size_t i = 0; i < e.loss_mask.size(); ++i) {
      if (e.loss_mask[i]) {
        first_one = std::min(first_one, i);
      } else {
        ASSERT_LT(i, first_one);
      }
    }
    ASSERT_LT(first_one, e.loss_mask.size());
  }
}

TEST(FormatTi, EveryFixturePairMasksItsTarget) {
  for (const auto& p : read_parallel_tsv(testing::data_dir() / "parallel.tsv")) {
    const auto ex = format_ti(p, tok());
    ASSERT_EQ(tok().decode(masked_in(ex[0])).text, p.en);
    ASSERT_EQ(tok().decode(masked_in(ex[1])).text, p.ja);
  }
}

TEST(Format, EmptySideRejected) {
  EXPECT_THROW(format_ntp(ParallelPair{"", "x", 0}, tok()), Error);
  EXPECT_THROW(format_ti(ParallelPair{"x", "", 0}, tok()), Error);
}

TEST(Schedule, TiMixedIsRejected) {
  const std::vector<ParallelPair> pairs = {{"猫", "cat", 0}};
  try {
    build_schedule(pairs, tok(), {}, ScheduleMode::kMixed, TaskFormat::kTi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedCombination);
    EXPECT_NE(std::string(e.what()).find("two-staged"), std::string::npos);
  }
}

TEST(Schedule, SupportedCombinations) {
  const std::vector<ParallelPair> pairs = {{"猫", "cat", 0}};
  const std::vector<PlanEntry> plain = {{0, 0, 10}};
  EXPECT_NO_THROW(build_schedule(pairs, tok(), plain, ScheduleMode::kTwoStaged, TaskFormat::kNtp));
  EXPECT_NO_THROW(build_schedule(pairs, tok(), plain, ScheduleMode::kMixed, TaskFormat::kNtp));
  EXPECT_NO_THROW(build_schedule(pairs, tok(), plain, ScheduleMode::kTwoStaged, TaskFormat::kTi));
}

TEST(Schedule, TwoStagedPutsParallelFirst) {
  const auto pairs = read_parallel_tsv(testing::data_dir() / "parallel.tsv");
  std::vector<PlanEntry> plain;
  for (std::size_t i = 0; i < 30; ++i) plain.push_back({0, i, 20});
  const auto s = build_schedule(pairs, tok(), plain, ScheduleMode::kTwoStaged, TaskFormat::kTi);
  ASSERT_EQ(s.parallel.size(), 2 * pairs.size());
  ASSERT_EQ(s.order.size(), s.parallel.size() + plain.size());
  std::size_t last_parallel = 0, first_plain = s.order.size();
  for (std::size_t i = 0; i < s.order.size(); ++i) {
    if (s.order[i].kind == ScheduleItem::Kind::kParallel) last_parallel = i;
    if (s.order[i].kind == ScheduleItem::Kind::kPlain) first_plain = std::min(first_plain, i);
  }
  EXPECT_LT(last_parallel, first_plain);
}

TEST(Schedule, MixedKeepsParallelShareWithinOneDocument) {
  // About 10% of 10,000 tokens are parallel.
  std::vector<ParallelPair> pairs;
  for (std::size_t i = 0; i < 25; ++i) pairs.push_back({"猫が窓の外を見ている。", "A cat.", i});
  const auto probe = format_ntp(pairs[0], tok());
  const std::size_t parallel_tokens = 25 * (probe[0].token_ids.size() + probe[1].token_ids.size());
  std::vector<PlanEntry> plain;
  std::uint64_t plain_tokens = 0;
  for (std::size_t i = 0; plain_tokens + parallel_tokens < 10000; ++i) {
    const std::uint64_t len = 60 + (i * 37) % 90;
    plain.push_back({0, i, len});
    plain_tokens += len;
  }
  const auto s = build_schedule(pairs, tok(), plain, ScheduleMode::kMixed, TaskFormat::kNtp);
  std::vector<std::size_t> sources;
  std::vector<std::uint64_t> tokens;
  for (const auto& item : s.order) {
    sources.push_back(item.kind == ScheduleItem::Kind::kParallel ? 0 : 1);
    tokens.push_back(item.tokens);
  }
  EXPECT_NEAR(static_cast<double>(parallel_tokens) / (parallel_tokens + plain_tokens), 0.1, 0.02);
  EXPECT_LE(oracle::prefix_deviation(sources, tokens, 2).worst_in_documents, 1.0);
  std::size_t parallel_seen = 0;
  for (const auto& item : s.order) {
    if (item.kind == ScheduleItem::Kind::kParallel) {
      ASSERT_EQ(item.index, parallel_seen++);
    }
  }
}

TEST(Schedule, Deterministic) {
  const auto pairs = read_parallel_tsv(testing::data_dir() / "parallel.tsv");
  std::vector<PlanEntry> plain;
  for (std::size_t i = 0; i < 40; ++i) plain.push_back({0, i, 5 + i});
  const auto a = build_schedule(pairs, tok(), plain, ScheduleMode::kMixed, TaskFormat::kNtp);
  const auto b = build_schedule(pairs, tok(), plain, ScheduleMode::kMixed, TaskFormat::kNtp);
  ASSERT_EQ(a.order.size(), b.order.size());
  for (std::size_t i = 0; i < a.order.size(); ++i) {
    ASSERT_EQ(a.order[i].kind, b.order[i].kind);
    ASSERT_EQ(a.order[i].index, b.order[i].index);
  }
}

TEST(Names, ParseAndPrint) {
  EXPECT_EQ(parse_task_format("ntp"), TaskFormat::kNtp);
  EXPECT_EQ(parse_task_format("ti"), TaskFormat::kTi);
  EXPECT_EQ(parse_schedule_mode("two-staged"), ScheduleMode::kTwoStaged);
  EXPECT_EQ(parse_schedule_mode("mixed"), ScheduleMode::kMixed);
  EXPECT_THROW(parse_task_format("mt"), Error);
  EXPECT_THROW(parse_schedule_mode("interleaved"), Error);
  EXPECT_EQ(to_string(Direction::kEnToJa), "en-ja");
  EXPECT_EQ(to_string(ScheduleMode::kTwoStaged), "two-staged");
}

}  // namespace
}  // namespace tonguegraft
