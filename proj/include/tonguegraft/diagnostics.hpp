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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft {

struct EfficiencyReport {
  std::size_t documents = 0;
  std::size_t characters = 0;
  std::size_t base_tokens = 0;
  std::size_t expanded_tokens = 0;
  double token_ratio = 0.0;      // expanded / base
  double efficiency_gain = 0.0;  // 1 / token_ratio - 1
  double base_chars_per_token = 0.0;
  double expanded_chars_per_token = 0.0;

  std::string to_text() const;
  std::string to_json() const;
};

// A 0.562 expanded/base ratio is a 77.9% generation-efficiency gain.
double efficiency_gain_from_ratio(double token_ratio);

// Both models tokenize the same NFKC-normalized text.
EfficiencyReport efficiency_report(const TokenizerModel& base, const TokenizerModel& expanded,
                                   std::span<const std::string> corpus);

inline constexpr double kDefaultInstabilityThreshold = 0.9;

struct BalanceReport {
  std::size_t n = 0;
  std::map<std::string, std::size_t> prediction_counts;
  std::map<std::string, std::size_t> label_counts;
  std::string majority_prediction;
  std::string majority_label;
  double majority_pred_fraction = 0.0;
  double majority_label_fraction = 0.0;
  bool majorities_coincide = false;
  double threshold = kDefaultInstabilityThreshold;
  // majority_pred_fraction > threshold
  bool unstable = false;

  std::string to_text() const;
  std::string to_json() const;
};

// Majority ties resolve to the lexicographically smallest label.
BalanceReport class_balance(std::span<const std::string> predictions,
                            std::span<const std::string> gold,
                            double threshold = kDefaultInstabilityThreshold);

// Joint distribution of per-question scores between two evaluations, e.g.
// two checkpoints: key (before, after) -> count.
std::map<std::pair<std::string, std::string>, std::size_t> score_transitions(
    std::span<const std::string> before, std::span<const std::string> after);

// F1 over code-point multisets. Two empty strings score 1.
double char_f1(std::string_view prediction, std::string_view gold);

// 1 when the strings match after trimming surrounding whitespace.
int exact_match(std::string_view prediction, std::string_view gold);

}  // namespace tonguegraft
