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

#include "tonguegraft/packing.hpp"

#include "tonguegraft/error.hpp"

namespace tonguegraft {

SequencePacker::SequencePacker(PackOptions options) : options_(options) {
  if (options_.context_length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "context length must be positive");
  }
  current_.ids.reserve(options_.context_length);
  current_.mask.reserve(options_.context_length);
}

void SequencePacker::push_token(TokenId id, std::uint8_t m) {
  if (current_.ids.size() == options_.context_length) close_window();
  current_.ids.push_back(id);
  current_.mask.push_back(m);
}

void SequencePacker::close_window() {
  if (current_.ids.empty()) return;
  current_.used = current_.ids.size();
  stats_.used_positions += current_.used;
  stats_.padding += options_.context_length - current_.used;
  current_.ids.resize(options_.context_length, options_.pad);
  current_.mask.resize(options_.context_length, 0);
  done_.push_back(std::move(current_));
  current_ = {};
  current_.ids.reserve(options_.context_length);
  current_.mask.reserve(options_.context_length);
  ++stats_.sequences;
}

void SequencePacker::add(std::span<const TokenId> ids, std::span<const std::uint8_t> mask) {
  if (ids.size() != mask.size()) {
    throw Error(ErrorCode::kLengthMismatch, "document ids and mask differ in length");
  }
  if (ids.empty()) return;
  ++stats_.documents;
  const std::size_t ctx = options_.context_length;
  const bool oversized = ids.size() > ctx;
  if (oversized) ++stats_.split_documents;

  if (!current_.ids.empty()) {
    const std::size_t room = ctx - current_.ids.size();
    if (oversized ? room < 2 : room < ids.size() + 1) {
      close_window();
    } else {
      push_token(options_.separator, current_.mask.back());
      ++stats_.separators;
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) push_token(ids[i], mask[i]);
}

std::vector<PackedSequence> SequencePacker::finish() {
  close_window();
  return std::move(done_);
}

PackResult pack_sequences(std::span<const PackInput> documents, const PackOptions& options) {
  SequencePacker packer(options);
  for (const PackInput& d : documents) packer.add(d.ids, d.mask);
  PackResult result;
  result.sequences = packer.finish();
  result.stats = packer.stats();
  return result;
}

}  // namespace tonguegraft
