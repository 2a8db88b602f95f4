// Copyright 2026 The modaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "modaudit/text.h"

namespace modaudit {
namespace {

std::string ToStd(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

icu::UnicodeString FromStd(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

// Appends the alnum runs of `lowered` as tokens, all sharing one span.
void SplitLowered(const std::string& lowered, std::size_t begin, std::size_t end,
                  std::vector<Token>& out) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(lowered.data());
  const auto len = static_cast<int32_t>(lowered.size());
  int32_t i = 0;
  int32_t run_start = -1;
  while (i < len) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, len, c);
    bool word = c >= 0 && IsAlnum(static_cast<char32_t>(c));
    if (word && run_start < 0) run_start = start;
    if (!word && run_start >= 0) {
      out.push_back({lowered.substr(run_start, start - run_start), begin, end});
      run_start = -1;
    }
  }
  if (run_start >= 0) out.push_back({lowered.substr(run_start), begin, end});
}

}  // namespace

std::string ToNfc(std::string_view utf8) {
  UErrorCode err = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(err);
  if (U_FAILURE(err)) return std::string(utf8);
  icu::UnicodeString src = FromStd(utf8);
  icu::UnicodeString dst = nfc->normalize(src, err);
  if (U_FAILURE(err)) return std::string(utf8);
  return ToStd(dst);
}

std::string ToLower(std::string_view utf8) {
  icu::UnicodeString s = FromStd(utf8);
  s.toLower(icu::Locale::getRoot());
  return ToStd(s);
}

std::u32string ToUtf32(std::string_view utf8) {
  std::u32string out;
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto len = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(bytes, i, len, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

std::string ToUtf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
    if (error) {
      out += "\xEF\xBF\xBD";
    } else {
      out.append(reinterpret_cast<const char*>(buf), n);
    }
  }
  return out;
}

bool IsAlnum(char32_t cp) { return u_isalnum(static_cast<UChar32>(cp)); }

TokenizedText Tokenize(std::string_view utf8) {
  TokenizedText result;
  result.nfc = ToNfc(utf8);
  const std::string& s = result.nfc;
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto len = static_cast<int32_t>(s.size());

  int32_t i = 0;
  int32_t run_start = -1;
  auto flush = [&](int32_t run_end) {
    std::string lowered = ToLower(std::string_view(s).substr(run_start, run_end - run_start));
    SplitLowered(lowered, run_start, run_end, result.tokens);
    run_start = -1;
  };
  while (i < len) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, len, c);
    bool word = c >= 0 && IsAlnum(static_cast<char32_t>(c));
    if (word && run_start < 0) run_start = start;
    if (!word && run_start >= 0) flush(start);
  }
  if (run_start >= 0) flush(len);

  // Lowercasing is context sensitive (final sigma), so token text comes from
  // the whole string; the per-run pass above only supplies the spans.
  std::vector<Token> whole;
  SplitLowered(ToLower(s), 0, 0, whole);
  if (whole.size() == result.tokens.size()) {
    for (std::size_t k = 0; k < whole.size(); ++k) result.tokens[k].text = std::move(whole[k].text);
  }
  return result;
}

std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : Tokenize(text).tokens) out.push_back(std::move(t.text));
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace modaudit
