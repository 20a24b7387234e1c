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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tonguegraft {

struct MixtureSource {
  std::string id;
  double weight = 0.0;
  std::optional<std::uint64_t> token_cap;
};

struct MixtureSpec {
  std::vector<MixtureSource> sources;
  std::uint64_t total_tokens = 0;
  std::uint64_t seed = 0;

  // Weights positive and summing to 1 within 1e-9, ids unique and free of
  // whitespace, total positive.
  void validate() const;
};

// Replay mixture used for continual pre-training: 90% Japanese, 5% English
// web text, 5% English arXiv text. JA:EN is 9:1.
MixtureSpec default_replay_mixture(std::uint64_t total_tokens, std::uint64_t seed);

// Largest-remainder apportionment of `total` by `weights` (normalized
// internally). Remainder ties go to the lower index. Sums to `total` exactly.
std::vector<std::uint64_t> apportion(std::span<const double> weights, std::uint64_t total);

// Per-source budgets. A source whose share exceeds its cap (token_cap, or
// `available[i]` when given) is pinned at the cap and the overflow is
// re-apportioned over the remaining sources by weight. Throws kInfeasible
// when every source is pinned and the total is still not met.
std::vector<std::uint64_t> compute_budgets(const MixtureSpec& spec,
                                           std::span<const std::uint64_t> available = {});

// Merge order for several ordered streams of items with token lengths.
// Item j of stream i is keyed by the fraction of its stream completed at the
// item's midpoint, and streams are merged by that key (ties to the lower
// stream index). For three or fewer streams this keeps every prefix within
// one maximum-length item of each stream's share, measured in tokens.
struct InterleaveSlot {
  std::size_t stream;
  std::size_t item;
};
std::vector<InterleaveSlot> interleave(const std::vector<std::vector<std::uint64_t>>& lengths);

struct PlanEntry {
  std::size_t source = 0;
  std::size_t doc = 0;
  // Tokens taken from the document; the last document of a source may be
  // cut short so the budget is met exactly.
  std::uint64_t tokens = 0;
};

struct MixturePlan {
  std::vector<std::string> source_ids;
  std::vector<std::uint64_t> budgets;
  std::uint64_t total_tokens = 0;
  std::uint64_t seed = 0;
  std::vector<PlanEntry> entries;

  std::string to_text() const;
  static MixturePlan from_text(std::string_view text);
};

// `doc_lengths[i]` lists the token length of every document of source i.
// Each source's documents are visited in a seeded random order and taken
// until its budget is met; the per-source streams are then interleaved.
MixturePlan plan_mixture(const MixtureSpec& spec,
                         const std::vector<std::vector<std::uint64_t>>& doc_lengths);

}  // namespace tonguegraft
