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
#include <span>
#include <vector>

#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft {

struct PackOptions {
  std::size_t context_length = 4096;
  TokenId separator = 2;
  TokenId pad = 2;
};

struct PackedSequence {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;
  std::size_t used = 0;
};

struct PackStats {
  std::size_t documents = 0;
  std::size_t sequences = 0;
  std::size_t used_positions = 0;
  std::size_t separators = 0;
  std::size_t padding = 0;
  // Documents longer than the context, split across sequence boundaries.
  std::size_t split_documents = 0;
};

// Greedy, order-preserving packer into fixed-length windows.
//
// Documents sharing a window are joined by one separator token whose mask
// copies the mask of the token before it. A document that does not fit in
// the rest of the current window starts a new one; a document longer than
// the whole context instead flows across windows and is counted in
// split_documents. The last window is padded with `pad` at mask 0.
class SequencePacker {
 public:
  explicit SequencePacker(PackOptions options);

  void add(std::span<const TokenId> ids, std::span<const std::uint8_t> mask);
  // Pads and emits the open window, then returns everything packed so far.
  std::vector<PackedSequence> finish();
  const PackStats& stats() const { return stats_; }

 private:
  void push_token(TokenId id, std::uint8_t m);
  void close_window();

  PackOptions options_;
  PackStats stats_;
  PackedSequence current_;
  std::vector<PackedSequence> done_;
};

struct PackInput {
  std::span<const TokenId> ids;
  std::span<const std::uint8_t> mask;
};

struct PackResult {
  std::vector<PackedSequence> sequences;
  PackStats stats;
};

PackResult pack_sequences(std::span<const PackInput> documents, const PackOptions& options);

}  // namespace tonguegraft
