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

#include "tonguegraft/error.hpp"

namespace tonguegraft {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kEmptyCorpus: return "empty corpus";
    case ErrorCode::kVocabTooSmall: return "vocabulary too small";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kIdOutOfRange: return "id out of range";
    case ErrorCode::kNothingToAdd: return "nothing to add";
    case ErrorCode::kIdCollision: return "id collision";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kBadVersion: return "bad version";
    case ErrorCode::kSizeMismatch: return "size mismatch";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kUnsupportedCombination: return "unsupported combination";
    case ErrorCode::kLengthMismatch: return "length mismatch";
  }
  return "unknown";
}

}  // namespace tonguegraft
