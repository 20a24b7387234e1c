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

#include "tonguegraft/error.hpp"

namespace tonguegraft {

std::string_view to_string(TaskFormat f) { return f == TaskFormat::kNtp ? "ntp" : "ti"; }
std::string_view to_string(Direction d) { return d == Direction::kJaToEn ? "ja-en" : "en-ja"; }
std::string_view to_string(ScheduleMode m) {
  return m == ScheduleMode::kTwoStaged ? "two-staged" : "mixed";
}

TaskFormat parse_task_format(std::string_view s) {
  if (s == "ntp") return TaskFormat::kNtp;
  if (s == "ti") return TaskFormat::kTi;
  throw Error(ErrorCode::kInvalidArgument, "unknown task format '" + std::string(s) +
                                               "' (expected ntp or ti)");
}

ScheduleMode parse_schedule_mode(std::string_view s) {
  if (s == "two-staged" || s == "two_staged") return ScheduleMode::kTwoStaged;
  if (s == "mixed") return ScheduleMode::kMixed;
  throw Error(ErrorCode::kInvalidArgument, "unknown schedule mode '" + std::string(s) +
                                               "' (expected two-staged or mixed)");
}

RenderedExample render_ntp(std::string_view first, std::string_view second) {
  RenderedExample r;
  r.target.reserve(first.size() + second.size() + 1);
  r.target.append(first).append(" ").append(second);
  return r;
}

RenderedExample render_ti(Direction direction, std::string_view source,
                          std::string_view target) {
  RenderedExample r;
  r.prefix.append(direction == Direction::kJaToEn ? kJaToEnInstruction : kEnToJaInstruction);
  r.prefix.append("\n").append(source).append(" ");
  r.target.assign(target);
  return r;
}

namespace {

void check_pair(const ParallelPair& pair) {
  if (pair.ja.empty() || pair.en.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "parallel pair " + std::to_string(pair.pair_id) + " has an empty side");
  }
}

FormattedExample tokenize(const RenderedExample& r, const TokenizerModel& tok, TaskFormat format,
                          Direction direction, std::size_t pair_id) {
  FormattedExample ex;
  ex.format = format;
  ex.direction = direction;
  ex.pair_id = pair_id;
  ex.token_ids = tok.encode(r.prefix);
  ex.loss_mask.assign(ex.token_ids.size(), 0);
  const auto target = tok.encode(r.target);
  ex.token_ids.insert(ex.token_ids.end(), target.begin(), target.end());
  ex.loss_mask.resize(ex.token_ids.size(), 1);
  return ex;
}

}  // namespace

std::array<FormattedExample, 2> format_ntp(const ParallelPair& pair, const TokenizerModel& tok) {
  check_pair(pair);
  return {tokenize(render_ntp(pair.ja, pair.en), tok, TaskFormat::kNtp, Direction::kJaToEn,
                   pair.pair_id),
          tokenize(render_ntp(pair.en, pair.ja), tok, TaskFormat::kNtp, Direction::kEnToJa,
                   pair.pair_id)};
}

std::array<FormattedExample, 2> format_ti(const ParallelPair& pair, const TokenizerModel& tok) {
  check_pair(pair);
  return {tokenize(render_ti(Direction::kJaToEn, pair.ja, pair.en), tok, TaskFormat::kTi,
                   Direction::kJaToEn, pair.pair_id),
          tokenize(render_ti(Direction::kEnToJa, pair.en, pair.ja), tok, TaskFormat::kTi,
                   Direction::kEnToJa, pair.pair_id)};
}

Schedule build_schedule(std::span<const ParallelPair> pairs, const TokenizerModel& tok,
                        std::span<const PlanEntry> plain, ScheduleMode mode, TaskFormat format) {
  if (format == TaskFormat::kTi && mode == ScheduleMode::kMixed) {
    throw Error(ErrorCode::kUnsupportedCombination,
                "translation-instruction format is only supported with the two-staged "
                "schedule; ti + mixed was never a configured setting");
  }
  Schedule s;
  s.plain.assign(plain.begin(), plain.end());
  s.parallel.reserve(pairs.size() * 2);
  for (const ParallelPair& p : pairs) {
    auto examples = format == TaskFormat::kNtp ? format_ntp(p, tok) : format_ti(p, tok);
    for (auto& ex : examples) s.parallel.push_back(std::move(ex));
  }

  if (mode == ScheduleMode::kTwoStaged) {
    for (std::size_t i = 0; i < s.parallel.size(); ++i) {
      s.order.push_back({ScheduleItem::Kind::kParallel, i, s.parallel[i].token_ids.size()});
    }
    for (std::size_t i = 0; i < s.plain.size(); ++i) {
      s.order.push_back({ScheduleItem::Kind::kPlain, i, s.plain[i].tokens});
    }
    return s;
  }

  std::vector<std::vector<std::uint64_t>> lengths(2);
  for (const auto& ex : s.parallel) lengths[0].push_back(ex.token_ids.size());
  for (const auto& e : s.plain) lengths[1].push_back(e.tokens);
  for (const InterleaveSlot& slot : interleave(lengths)) {
    const auto kind = slot.stream == 0 ? ScheduleItem::Kind::kParallel : ScheduleItem::Kind::kPlain;
    s.order.push_back({kind, slot.item, lengths[slot.stream][slot.item]});
  }
  return s;
}

}  // namespace tonguegraft
