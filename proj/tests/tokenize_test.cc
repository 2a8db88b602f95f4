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

#include <gtest/gtest.h>

#include <random>

#include "modaudit/text.h"
#include "oracle.h"

namespace modaudit {
namespace {

using Toks = std::vector<std::string>;

TEST(Normalize, CaseAndPunctuation) { EXPECT_EQ(normalize("Hello, WORLD"), (Toks{"hello", "world"})); }

TEST(Normalize, PunctuationSplitsTokens) { EXPECT_EQ(normalize("b.it ch"), (Toks{"b", "it", "ch"})); }

TEST(Normalize, Empty) {
  EXPECT_TRUE(normalize("").empty());
  EXPECT_TRUE(normalize(" ,.!? ").empty());
}

TEST(Normalize, ComposesToNfc) {
  // e + combining acute composes to a single alphanumeric code point.
  EXPECT_EQ(normalize("Cafe\u0301!"), (Toks{"caf\u00e9"}));
}

TEST(Normalize, DigitsAndLettersAreAlphanumeric) {
  EXPECT_EQ(normalize("l33t_sp34k"), (Toks{"l33t", "sp34k"}));
}

TEST(Normalize, FinalSigmaUsesWholeStringContext) {
  EXPECT_EQ(normalize("ΟΔΟΣ."), oracle::Tokens("ΟΔΟΣ."));
  EXPECT_EQ(normalize("ΑΣ'Α"), oracle::Tokens("ΑΣ'Α"));
}

TEST(Normalize, InvalidUtf8DoesNotCrash) {
  const std::string bad = "ab\xff\xfe" "cd";
  EXPECT_EQ(normalize(bad), (Toks{"ab", "cd"}));
}

TEST(Tokenize, SpansPointIntoNfcText) {
  const auto t = Tokenize("You are a SLUR-a, ok");
  ASSERT_EQ(t.tokens.size(), 6u);
  EXPECT_EQ(t.Span(3, 3), "SLUR");
  EXPECT_EQ(t.Span(3, 4), "SLUR-a");
}

TEST(Normalize, MatchesWholeStringOracle) {
  static const std::vector<std::string> kPieces = {
      "a", "B", "zz", " ", ",", ".", "-", "'", "É", "é", "ß", "Σ", "ΟΣ", "日本", "🙂", "​",
      "İ", "ǅ", "9", "_", "\t", "Ⅻ", "ﬁ", "Ω", "ı", "́"};
  std::mt19937 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const int n = rng() % 12;
    for (int i = 0; i < n; ++i) s += kPieces[rng() % kPieces.size()];
    EXPECT_EQ(normalize(s), oracle::Tokens(s)) << "input: " << s;
  }
}

TEST(Normalize, Deterministic) {
  const std::string s = "Some Text with ÜMLAUTS and 12 numbers";
  EXPECT_EQ(normalize(s), normalize(s));
}

TEST(SplitWhitespace, NoNormalization) {
  EXPECT_EQ(SplitWhitespace("  Foo\tbar.baz \n"), (Toks{"Foo", "bar.baz"}));
}

TEST(Utf32, RoundTrip) {
  const std::string s = "bitch ΟΣ 日本 🙂";
  EXPECT_EQ(ToUtf8(ToUtf32(s)), s);
}

}  // namespace
}  // namespace modaudit
