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


#include "config.hpp"

#include <gtest/gtest.h>

#include <functional>

#include "fixtures.hpp"
#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft::cli {
namespace {

std::string usage_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const UsageError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, DottedLookup) {
  const auto c = Config::parse(R"({"a": {"b": {"c": 3}}, "s": "x", "n": null})");
  ASSERT_NE(c.find("a.b.c"), nullptr);
  EXPECT_EQ(c.uint("a.b.c"), 3u);
  EXPECT_EQ(c.find("a.b.d"), nullptr);
  EXPECT_EQ(c.find("a.b.c.d"), nullptr);
  EXPECT_EQ(c.find("n"), nullptr);
  EXPECT_EQ(c.string("s"), "x");
  EXPECT_FALSE(c.string("missing").has_value());
}

TEST(Config, TypeErrorsNameTheField) {
  const auto c = Config::parse(R"({"vocab": {"size": "big", "rate": -1.5}})");
  EXPECT_NE(usage_message([&] { c.uint("vocab.size"); }).find("vocab.size"), std::string::npos);
  EXPECT_NE(usage_message([&] { c.uint("vocab.rate"); }).find("vocab.rate"), std::string::npos);
  EXPECT_NE(usage_message([&] { c.string("vocab.rate"); }).find("vocab.rate"), std::string::npos);
  EXPECT_EQ(c.number("vocab.rate"), -1.5);
}

TEST(Config, IntegralFloatsAccepted) {
  EXPECT_EQ(Config::parse(R"({"t": 1e6})").uint("t"), 1000000u);
  EXPECT_FALSE(usage_message([] { Config::parse(R"({"t": 1.5})").uint("t"); }).empty());
}

TEST(Config, InvalidDocuments) {
  EXPECT_FALSE(usage_message([] { Config::parse("{"); }).empty());
  EXPECT_FALSE(usage_message([] { Config::parse("[1, 2]"); }).empty());
  EXPECT_NE(usage_message([] { Config::load("/nonexistent/tonguegraft.json"); }).find("not found"),
            std::string::npos);
}

TEST(Config, PathsResolveAgainstConfigDirectory) {
  testing::TempDir dir;
  write_file(dir / "corpus.txt", "x\n");
  write_file(dir / "c.json", R"({"vocab": {"corpus": "corpus.txt", "out": "/abs/out.json"}})");
  const auto c = Config::load(dir / "c.json");
  EXPECT_EQ(c.path(std::nullopt, "vocab.corpus", "--corpus", true), (dir / "corpus.txt").string());
  EXPECT_EQ(c.path(std::nullopt, "vocab.out", "--out", false), "/abs/out.json");
  EXPECT_EQ(c.path(std::string("flag.txt"), "vocab.corpus", "--corpus", false), "flag.txt");
}

TEST(Config, MissingPathNamesFieldAndFlag) {
  const Config c;
  const auto msg = usage_message([&] { c.path(std::nullopt, "vocab.corpus", "--corpus", true); });
  EXPECT_NE(msg.find("vocab.corpus"), std::string::npos);
  EXPECT_NE(msg.find("--corpus"), std::string::npos);
  const auto c2 = Config::parse(R"({"vocab": {"corpus": "nope.txt"}})", "/nonexistent");
  EXPECT_NE(usage_message([&] { c2.path(std::nullopt, "vocab.corpus", "--corpus", true); })
                .find("vocab.corpus"),
            std::string::npos);
}

TEST(Config, MixtureSpec) {
  const auto c = Config::parse(R"({"seed": 9, "mixture": {"total_tokens": 100, "sources": [
    {"id": "ja", "weight": 0.9}, {"id": "en", "weight": 0.1, "token_cap": 5}]}})");
  const auto spec = mixture_spec(c, nullptr, std::nullopt);
  EXPECT_EQ(spec.seed, 9u);
  EXPECT_EQ(spec.total_tokens, 100u);
  ASSERT_EQ(spec.sources.size(), 2u);
  EXPECT_EQ(spec.sources[1].token_cap, 5u);
  EXPECT_FALSE(spec.sources[0].token_cap.has_value());
  EXPECT_EQ(mixture_spec(c, nullptr, 4).seed, 4u);
}

TEST(Config, MixtureSpecErrors) {
  auto msg = [](const char* text) {
    return usage_message([&] { mixture_spec(Config::parse(text), nullptr, std::nullopt); });
  };
  EXPECT_NE(msg(R"({"seed": 1})").find("mixture.sources"), std::string::npos);
  EXPECT_NE(msg(R"({"seed": 1, "mixture": {"sources": [{"id": "a", "weight": 1}]}})")
                .find("mixture.total_tokens"),
            std::string::npos);
  EXPECT_NE(msg(R"({"mixture": {"total_tokens": 5, "sources": [{"id": "a", "weight": 1}]}})")
                .find("seed"),
            std::string::npos);
  EXPECT_NE(msg(R"({"seed": 1, "mixture": {"total_tokens": 5, "sources": [{"id": "a"}]}})")
                .find("mixture.sources[0]"),
            std::string::npos);
  EXPECT_FALSE(
      msg(R"({"seed": 1, "mixture": {"total_tokens": 5, "sources": [{"id": "a", "weight": -1}]}})")
          .empty());
  std::vector<MixtureSourceFiles> files;
  const auto c = Config::parse(
      R"({"seed": 1, "mixture": {"total_tokens": 5, "sources": [{"id": "a", "weight": 1}]}})");
  EXPECT_NE(usage_message([&] { mixture_spec(c, &files, std::nullopt); }).find("mixture.sources[0].path"),
            std::string::npos);
}

TEST(Config, TrainConfigOverrides) {
  const auto c = Config::parse(R"({"train": {"max_lr": 3e-4, "warmup_steps": 10, "total_steps": 100}})");
  const auto t = train_config(c);
  EXPECT_EQ(t.max_lr, 3e-4);
  EXPECT_EQ(t.warmup_steps, 10u);
  EXPECT_EQ(t.total_steps, 100u);
  EXPECT_EQ(t.final_lr_fraction, 1.0 / 30.0);
}

TEST(Config, Digest) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}

}  // namespace
}  // namespace tonguegraft::cli
