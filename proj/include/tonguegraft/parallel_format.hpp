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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tonguegraft/corpus.hpp"
#include "tonguegraft/mixture.hpp"
#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft {

enum class TaskFormat { kNtp, kTi };
enum class Direction { kJaToEn, kEnToJa };
enum class ScheduleMode { kTwoStaged, kMixed };

std::string_view to_string(TaskFormat f);
std::string_view to_string(Direction d);
std::string_view to_string(ScheduleMode m);
TaskFormat parse_task_format(std::string_view s);
ScheduleMode parse_schedule_mode(std::string_view s);

// Instruction lines, byte for byte, including their trailing spaces.
inline constexpr std::string_view kJaToEnInstruction =
    "Please translate the following Japanese text into English.  ";
inline constexpr std::string_view kEnToJaInstruction =
    "Please translate the following English text into Japanese. ";

// A rendered example split where the loss mask switches on. For NTP the
// prefix is empty and everything is trained.
struct RenderedExample {
  std::string prefix;
  std::string target;

  std::string text() const { return prefix + target; }
};

// "<first> <second>".
RenderedExample render_ntp(std::string_view first, std::string_view second);
// "<instruction>\n<source> <target>", trained only on <target>.
RenderedExample render_ti(Direction direction, std::string_view source, std::string_view target);

struct FormattedExample {
  std::vector<TokenId> token_ids;
  std::vector<std::uint8_t> loss_mask;
  TaskFormat format = TaskFormat::kNtp;
  Direction direction = Direction::kJaToEn;
  std::size_t pair_id = 0;
};

// Both directions, Ja->En first.
std::array<FormattedExample, 2> format_ntp(const ParallelPair& pair, const TokenizerModel& tok);
std::array<FormattedExample, 2> format_ti(const ParallelPair& pair, const TokenizerModel& tok);

struct ScheduleItem {
  enum class Kind { kParallel, kPlain };
  Kind kind;
  // Index into Schedule::parallel or Schedule::plain.
  std::size_t index;
  std::uint64_t tokens;
};

struct Schedule {
  std::vector<FormattedExample> parallel;
  std::vector<PlanEntry> plain;
  std::vector<ScheduleItem> order;
};

// two_staged: every parallel example precedes every plain document.
// mixed: parallel examples are interleaved with the plain plan by token
// share. Translation-instruction data is only supported two-staged; TI+mixed
// throws kUnsupportedCombination.
Schedule build_schedule(std::span<const ParallelPair> pairs, const TokenizerModel& tok,
                        std::span<const PlanEntry> plain, ScheduleMode mode, TaskFormat format);

}  // namespace tonguegraft
