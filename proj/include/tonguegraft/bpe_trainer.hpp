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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tonguegraft/corpus.hpp"
#include "tonguegraft/tokenizer.hpp"

namespace tonguegraft {

struct BpeTrainOptions {
  bool nfkc = true;
  bool split_symbols = true;
};

// Distinct training words after normalization and symbol splitting, with
// their occurrence counts, sorted by word.
std::vector<std::pair<std::string, std::uint64_t>> prepare_word_counts(
    const SegmentedCorpus& corpus, const BpeTrainOptions& options = {});

// Classic BPE over the words of `corpus`. Every word starts as one symbol per
// code point; the most frequent adjacent pair is merged until the learned
// vocabulary (characters plus merge results) reaches `target_vocab_size` or
// no pair is left. Merges never cross word boundaries.
//
// Ties on frequency go to the lexicographically smallest merged string, then
// to the smallest left piece. Learned characters score 0; the k-th merge
// result scores -k. The returned model also carries the reserved special and
// byte tokens ahead of the learned vocabulary.
TokenizerModel train_bpe(const SegmentedCorpus& corpus, std::size_t target_vocab_size,
                         const BpeTrainOptions& options = {});

}  // namespace tonguegraft
