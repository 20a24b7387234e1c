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

#include "tonguegraft/diagnostics.hpp"

#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "tonguegraft/error.hpp"
#include "tonguegraft/unicode.hpp"

namespace tonguegraft {

double efficiency_gain_from_ratio(double token_ratio) {
  if (!(token_ratio > 0.0)) throw Error(ErrorCode::kInvalidArgument, "token ratio must be positive");
  return 1.0 / token_ratio - 1.0;
}

EfficiencyReport efficiency_report(const TokenizerModel& base, const TokenizerModel& expanded,
                                   std::span<const std::string> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "efficiency report needs a non-empty corpus");
  EfficiencyReport r;
  for (const std::string& doc : corpus) {
    const std::string text = unicode::normalize(doc);
    r.characters += unicode::count_code_points(text);
    r.base_tokens += base.encode(text).size();
    r.expanded_tokens += expanded.encode(text).size();
    ++r.documents;
  }
  if (r.base_tokens == 0 || r.expanded_tokens == 0) {
    throw Error(ErrorCode::kEmptyCorpus, "efficiency report corpus has no text");
  }
  r.token_ratio = static_cast<double>(r.expanded_tokens) / static_cast<double>(r.base_tokens);
  r.efficiency_gain = efficiency_gain_from_ratio(r.token_ratio);
  r.base_chars_per_token = static_cast<double>(r.characters) / static_cast<double>(r.base_tokens);
  r.expanded_chars_per_token =
      static_cast<double>(r.characters) / static_cast<double>(r.expanded_tokens);
  return r;
}

std::string EfficiencyReport::to_text() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "documents " << documents << "\n"
     << "characters " << characters << "\n"
     << "base_tokens " << base_tokens << "\n"
     << "expanded_tokens " << expanded_tokens << "\n"
     << "token_ratio " << token_ratio << "\n"
     << "efficiency_gain " << efficiency_gain << "\n"
     << "base_chars_per_token " << base_chars_per_token << "\n"
     << "expanded_chars_per_token " << expanded_chars_per_token << "\n";
  return os.str();
}

std::string EfficiencyReport::to_json() const {
  nlohmann::ordered_json j;
  j["documents"] = documents;
  j["characters"] = characters;
  j["base_tokens"] = base_tokens;
  j["expanded_tokens"] = expanded_tokens;
  j["token_ratio"] = token_ratio;
  j["efficiency_gain"] = efficiency_gain;
  j["base_chars_per_token"] = base_chars_per_token;
  j["expanded_chars_per_token"] = expanded_chars_per_token;
  return j.dump(2) + "\n";
}

namespace {

std::pair<std::string, std::size_t> majority(const std::map<std::string, std::size_t>& counts) {
  std::pair<std::string, std::size_t> best{"", 0};
  for (const auto& [label, c] : counts) {
    if (c > best.second) best = {label, c};
  }
  return best;
}

}  // namespace

BalanceReport class_balance(std::span<const std::string> predictions,
                            std::span<const std::string> gold, double threshold) {
  if (predictions.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "predictions (" + std::to_string(predictions.size()) +
                                                ") and gold labels (" +
                                                std::to_string(gold.size()) +
                                                ") differ in length");
  }
  if (predictions.empty()) throw Error(ErrorCode::kEmptyCorpus, "no predictions to analyse");
  BalanceReport r;
  r.n = predictions.size();
  r.threshold = threshold;
  for (const auto& p : predictions) ++r.prediction_counts[p];
  for (const auto& g : gold) ++r.label_counts[g];
  const auto mp = majority(r.prediction_counts);
  const auto ml = majority(r.label_counts);
  r.majority_prediction = mp.first;
  r.majority_label = ml.first;
  r.majority_pred_fraction = static_cast<double>(mp.second) / static_cast<double>(r.n);
  r.majority_label_fraction = static_cast<double>(ml.second) / static_cast<double>(r.n);
  r.majorities_coincide = mp.first == ml.first;
  r.unstable = r.majority_pred_fraction > threshold;
  return r;
}

std::string BalanceReport::to_text() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "n " << n << "\n";
  for (const auto& [label, c] : prediction_counts) os << "pred " << label << " " << c << "\n";
  for (const auto& [label, c] : label_counts) os << "gold " << label << " " << c << "\n";
  os << "majority_prediction " << majority_prediction << " " << majority_pred_fraction << "\n"
     << "majority_label " << majority_label << " " << majority_label_fraction << "\n"
     << "majorities_coincide " << (majorities_coincide ? "yes" : "no") << "\n"
     << "threshold " << threshold << "\n"
     << "status " << (unstable ? "UNSTABLE" : "stable") << "\n";
  return os.str();
}

std::string BalanceReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["prediction_counts"] = prediction_counts;
  j["label_counts"] = label_counts;
  j["majority_prediction"] = majority_prediction;
  j["majority_label"] = majority_label;
  j["majority_pred_fraction"] = majority_pred_fraction;
  j["majority_label_fraction"] = majority_label_fraction;
  j["majorities_coincide"] = majorities_coincide;
  j["threshold"] = threshold;
  j["unstable"] = unstable;
  return j.dump(2) + "\n";
}

std::map<std::pair<std::string, std::string>, std::size_t> score_transitions(
    std::span<const std::string> before, std::span<const std::string> after) {
  if (before.size() != after.size()) {
    throw Error(ErrorCode::kLengthMismatch, "score vectors differ in length");
  }
  std::map<std::pair<std::string, std::string>, std::size_t> joint;
  for (std::size_t i = 0; i < before.size(); ++i) ++joint[{before[i], after[i]}];
  return joint;
}

double char_f1(std::string_view prediction, std::string_view gold) {
  const auto p = unicode::split_code_points(prediction);
  const auto g = unicode::split_code_points(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::unordered_map<std::string_view, long> counts;
  for (auto cp : g) ++counts[cp];
  std::size_t overlap = 0;
  for (auto cp : p) {
    auto it = counts.find(cp);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(p.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\n\r\f\v";
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

}  // namespace

int exact_match(std::string_view prediction, std::string_view gold) {
  return trim(prediction) == trim(gold) ? 1 : 0;
}

}  // namespace tonguegraft
