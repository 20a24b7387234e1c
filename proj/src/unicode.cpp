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

#include "tonguegraft/unicode.hpp"

#include <unicode/bytestream.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace tonguegraft::unicode {
namespace {

const icu::Normalizer2& nfkc() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status)) {
      throw std::runtime_error(std::string("ICU NFKC unavailable: ") +
                               u_errorName(status));
    }
    return n;
  }();
  return *instance;
}

void normalize_run(std::string_view run, std::string& out) {
  if (run.empty()) return;
  UErrorCode status = U_ZERO_ERROR;
  icu::StringByteSink<std::string> sink(&out);
  nfkc().normalizeUTF8(0, icu::StringPiece(run.data(), static_cast<int32_t>(run.size())),
                       sink, nullptr, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error(std::string("NFKC normalization failed: ") +
                             u_errorName(status));
  }
}

// Calls `fn(start, length, cp)` per element; cp < 0 marks one ill-formed byte.
template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      i = start + 1;
    }
    fn(static_cast<std::size_t>(start), static_cast<std::size_t>(i - start), c);
  }
}

}  // namespace

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t run_start = 0;
  for_each_code_point(text, [&](std::size_t start, std::size_t len, int32_t cp) {
    if (cp >= 0) return;
    normalize_run(text.substr(run_start, start - run_start), out);
    out.append(text.substr(start, len));
    run_start = start + len;
  });
  normalize_run(text.substr(run_start), out);
  return out;
}

bool is_valid_utf8(std::string_view text) {
  bool valid = true;
  for_each_code_point(text, [&](std::size_t, std::size_t, int32_t cp) {
    if (cp < 0) valid = false;
  });
  return valid;
}

std::vector<std::string_view> split_code_points(std::string_view text) {
  std::vector<std::string_view> out;
  out.reserve(text.size());
  for_each_code_point(text, [&](std::size_t start, std::size_t len, int32_t) {
    out.push_back(text.substr(start, len));
  });
  return out;
}

std::size_t count_code_points(std::string_view text) {
  std::size_t n = 0;
  for_each_code_point(text, [&](std::size_t, std::size_t, int32_t) { ++n; });
  return n;
}

bool is_symbol(char32_t cp) {
  return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

std::vector<std::string> split_symbols(std::string_view word) {
  std::vector<std::string> pieces;
  int state = -1;  // -1 none yet, 0 non-symbol run, 1 symbol run
  for_each_code_point(word, [&](std::size_t start, std::size_t len, int32_t cp) {
    const int cls = (cp >= 0 && is_symbol(static_cast<char32_t>(cp))) ? 1 : 0;
    if (cls != state) {
      pieces.emplace_back();
      state = cls;
    }
    pieces.back().append(word.substr(start, len));
  });
  return pieces;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    throw std::invalid_argument("not a Unicode scalar value");
  }
  out.assign(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  return out;
}

std::string sanitize_utf8(std::string_view bytes, bool* replaced) {
  std::string out;
  out.reserve(bytes.size());
  bool any = false;
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      // U8_NEXT already skipped the maximal ill-formed subpart.
      out.append("\xEF\xBF\xBD");
      any = true;
    } else {
      out.append(bytes.substr(static_cast<std::size_t>(start),
                              static_cast<std::size_t>(i - start)));
    }
  }
  if (replaced != nullptr) *replaced = any;
  return out;
}

}  // namespace tonguegraft::unicode
