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

#ifndef MODAUDIT_TEXT_H_
#define MODAUDIT_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace modaudit {

std::string ToNfc(std::string_view utf8);
std::string ToLower(std::string_view utf8);

// Code point views used by the perturbation rules. Invalid sequences decode
// to U+FFFD.
std::u32string ToUtf32(std::string_view utf8);
std::string ToUtf8(std::u32string_view cps);

bool IsAlnum(char32_t cp);

struct Token {
  std::string text;  // lowercased
  std::size_t begin = 0;  // byte span in TokenizedText::nfc
  std::size_t end = 0;
};

struct TokenizedText {
  std::string nfc;
  std::vector<Token> tokens;

  std::string_view Span(std::size_t first_token, std::size_t last_token) const {
    return std::string_view(nfc).substr(tokens[first_token].begin,
                                        tokens[last_token].end - tokens[first_token].begin);
  }
};

// NFC, lowercase, split on every maximal run of non-alphanumeric code points.
// Spans point into the NFC form so matched fragments can be cut from it.
TokenizedText Tokenize(std::string_view utf8);

// Token strings of Tokenize().
std::vector<std::string> normalize(std::string_view text);

// Whitespace split with no case or Unicode normalization.
std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace modaudit

#endif  // MODAUDIT_TEXT_H_
