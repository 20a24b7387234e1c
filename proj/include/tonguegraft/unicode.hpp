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
#include <string_view>
#include <vector>

namespace tonguegraft::unicode {

// NFKC normal form. Ill-formed UTF-8 bytes are passed through untouched and
// only the well-formed runs between them are normalized.
std::string normalize(std::string_view text);

bool is_valid_utf8(std::string_view text);

// Splits text into code points. An ill-formed byte becomes its own
// single-byte element, so the concatenation of the result is always `text`.
std::vector<std::string_view> split_code_points(std::string_view text);

std::size_t count_code_points(std::string_view text);

// Unicode general category P* or S*.
bool is_symbol(char32_t cp);

// Maximal runs of symbol characters become standalone pieces; the pieces
// concatenate back to `word`.
std::vector<std::string> split_symbols(std::string_view word);

std::string encode_utf8(char32_t cp);

// Replaces every ill-formed subsequence with U+FFFD. `replaced` is set when
// at least one replacement happened.
std::string sanitize_utf8(std::string_view bytes, bool* replaced);

}  // namespace tonguegraft::unicode
