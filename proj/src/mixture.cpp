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

#include "tonguegraft/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "tonguegraft/corpus.hpp"
#include "tonguegraft/error.hpp"

namespace tonguegraft {

void MixtureSpec::validate() const {
  if (sources.empty()) throw Error(ErrorCode::kInvalidArgument, "mixture has no sources");
  if (total_tokens == 0) throw Error(ErrorCode::kInvalidArgument, "mixture total_tokens is zero");
  double sum = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    if (s.id.empty() || s.id.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mixture source " + std::to_string(i) + " needs a non-empty id without spaces");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (sources[j].id == s.id) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate mixture source id " + s.id);
      }
    }
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
      throw Error(ErrorCode::kInvalidArgument, "mixture source " + s.id + " needs a positive weight");
    }
    sum += s.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "mixture weights sum to " << sum << ", expected 1";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

MixtureSpec default_replay_mixture(std::uint64_t total_tokens, std::uint64_t seed) {
  MixtureSpec spec;
  spec.sources = {{"ja", 0.90, std::nullopt},
                  {"web_en", 0.05, std::nullopt},
                  {"arxiv_en", 0.05, std::nullopt}};
  spec.total_tokens = total_tokens;
  spec.seed = seed;
  return spec;
}

std::vector<std::uint64_t> apportion(std::span<const double> weights, std::uint64_t total) {
  const long double sum = std::accumulate(weights.begin(), weights.end(), 0.0L);
  if (weights.empty() || !(sum > 0.0L)) {
    throw Error(ErrorCode::kInvalidArgument, "apportion needs positive weights");
  }
  std::vector<std::uint64_t> out(weights.size());
  // Remainders on a 1e-9 grid so quotas that are equal in exact arithmetic
  // tie (and go to the lower index) despite rounding in the division.
  std::vector<std::int64_t> remainder(weights.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    long double quota = static_cast<long double>(total) * weights[i] / sum;
    const long double nearest = std::round(quota);
    if (std::fabs(quota - nearest) <= 1e-9L * std::max(1.0L, nearest)) quota = nearest;
    auto share = static_cast<std::uint64_t>(std::floor(quota));
    share = std::min(share, total - assigned);
    out[i] = share;
    remainder[i] = std::llround((quota - static_cast<long double>(share)) * 1e9L);
    assigned += share;
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++out[order[k]];
    ++assigned;
  }
  return out;
}

std::vector<std::uint64_t> compute_budgets(const MixtureSpec& spec,
                                           std::span<const std::uint64_t> available) {
  spec.validate();
  const std::size_t n = spec.sources.size();
  if (!available.empty() && available.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "availability list does not match the sources");
  }
  std::vector<std::optional<std::uint64_t>> cap(n);
  for (std::size_t i = 0; i < n; ++i) {
    cap[i] = spec.sources[i].token_cap;
    if (!available.empty()) cap[i] = std::min(cap[i].value_or(available[i]), available[i]);
  }

  std::vector<std::uint64_t> budget(n, 0);
  std::vector<bool> pinned(n, false);
  std::uint64_t remaining = spec.total_tokens;
  while (true) {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pinned[i]) free.push_back(i);
    }
    if (free.empty()) {
      if (remaining == 0) break;
      throw Error(ErrorCode::kInfeasible,
                  "mixture is infeasible: every source is capped and " +
                      std::to_string(remaining) + " of " + std::to_string(spec.total_tokens) +
                      " tokens remain unassigned");
    }
    std::vector<double> w;
    for (std::size_t i : free) w.push_back(spec.sources[i].weight);
    const auto shares = apportion(w, remaining);
    bool violated = false;
    for (std::size_t k = 0; k < free.size(); ++k) {
      const std::size_t i = free[k];
      if (cap[i] && shares[k] > *cap[i]) {
        pinned[i] = true;
        budget[i] = *cap[i];
        remaining -= *cap[i];
        violated = true;
      }
    }
    if (!violated) {
      for (std::size_t k = 0; k < free.size(); ++k) budget[free[k]] = shares[k];
      break;
    }
  }
  return budget;
}

std::vector<InterleaveSlot> interleave(const std::vector<std::vector<std::uint64_t>>& lengths) {
  __extension__ using u128 = unsigned __int128;
  const std::size_t n = lengths.size();
  std::vector<std::uint64_t> total(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    total[i] = std::accumulate(lengths[i].begin(), lengths[i].end(), std::uint64_t{0});
  }
  struct Head {
    std::size_t stream;
    std::size_t item;
  };
  std::vector<std::uint64_t> start(n, 0);
  // Doubled midpoint (2*start + len) over the stream total, compared by
  // cross-multiplication so no rounding enters the order.
  auto later = [&](const Head& a, const Head& b) {
    const u128 ka = u128(2 * start[a.stream] + lengths[a.stream][a.item]) * total[b.stream];
    const u128 kb = u128(2 * start[b.stream] + lengths[b.stream][b.item]) * total[a.stream];
    if (ka != kb) return ka > kb;
    return a.stream > b.stream;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> queue(later);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += lengths[i].size();
    if (total[i] > 0 && !lengths[i].empty()) queue.push({i, 0});
  }
  std::vector<InterleaveSlot> order;
  order.reserve(count);
  while (!queue.empty()) {
    const Head h = queue.top();
    queue.pop();
    order.push_back({h.stream, h.item});
    start[h.stream] += lengths[h.stream][h.item];
    if (h.item + 1 < lengths[h.stream].size()) queue.push({h.stream, h.item + 1});
  }
  return order;
}

MixturePlan plan_mixture(const MixtureSpec& spec,
                         const std::vector<std::vector<std::uint64_t>>& doc_lengths) {
  spec.validate();
  const std::size_t n = spec.sources.size();
  if (doc_lengths.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "document lists do not match the mixture sources");
  }
  std::vector<std::uint64_t> available(n);
  for (std::size_t i = 0; i < n; ++i) {
    available[i] =
        std::accumulate(doc_lengths[i].begin(), doc_lengths[i].end(), std::uint64_t{0});
  }
  MixturePlan plan;
  plan.budgets = compute_budgets(spec, available);
  plan.total_tokens = spec.total_tokens;
  plan.seed = spec.seed;
  for (const auto& s : spec.sources) plan.source_ids.push_back(s.id);

  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<PlanEntry>> per_source(n);
  std::vector<std::vector<std::uint64_t>> taken(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order(doc_lengths[i].size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = order.size(); k > 1; --k) {
      std::swap(order[k - 1], order[uniform_below(rng, k)]);
    }
    std::uint64_t left = plan.budgets[i];
    for (std::size_t doc : order) {
      if (left == 0) break;
      const std::uint64_t len = std::min(doc_lengths[i][doc], left);
      if (len == 0) continue;
      per_source[i].push_back({i, doc, len});
      taken[i].push_back(len);
      left -= len;
    }
  }
  for (const InterleaveSlot& slot : interleave(taken)) {
    plan.entries.push_back(per_source[slot.stream][slot.item]);
  }
  return plan;
}

std::string MixturePlan::to_text() const {
  std::ostringstream os;
  os << "# tonguegraft mixture plan\n";
  os << "version 1\n";
  os << "seed " << seed << "\n";
  os << "total_tokens " << total_tokens << "\n";
  for (std::size_t i = 0; i < source_ids.size(); ++i) {
    os << "source " << source_ids[i] << " " << budgets[i] << "\n";
  }
  os << "entries " << entries.size() << "\n";
  for (const PlanEntry& e : entries) {
    os << source_ids[e.source] << "\t" << e.doc << "\t" << e.tokens << "\n";
  }
  return os.str();
}

MixturePlan MixturePlan::from_text(std::string_view text) {
  MixturePlan plan;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> expected_entries;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kParse, "plan line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (expected_entries) {
      std::istringstream fields(line);
      std::string id;
      PlanEntry e;
      if (!std::getline(fields, id, '\t') || !(fields >> e.doc >> e.tokens)) fail("bad entry");
      auto it = std::find(plan.source_ids.begin(), plan.source_ids.end(), id);
      if (it == plan.source_ids.end()) fail("unknown source " + id);
      e.source = static_cast<std::size_t>(it - plan.source_ids.begin());
      plan.entries.push_back(e);
      continue;
    }
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "version") {
      int v = 0;
      fields >> v;
      if (v != 1) throw Error(ErrorCode::kBadVersion, "unsupported plan version");
    } else if (key == "seed") {
      fields >> plan.seed;
    } else if (key == "total_tokens") {
      fields >> plan.total_tokens;
    } else if (key == "source") {
      std::string id;
      std::uint64_t budget = 0;
      if (!(fields >> id >> budget)) fail("bad source line");
      plan.source_ids.push_back(id);
      plan.budgets.push_back(budget);
    } else if (key == "entries") {
      std::size_t count = 0;
      if (!(fields >> count)) fail("bad entry count");
      expected_entries = count;
    } else {
      fail("unknown key " + key);
    }
  }
  if (!expected_entries || plan.entries.size() != *expected_entries) {
    throw Error(ErrorCode::kParse, "plan entry count does not match its header");
  }
  return plan;
}

}  // namespace tonguegraft
