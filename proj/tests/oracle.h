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

// Brute-force reference implementations used only by tests. They are
// written independently of the library code paths they check: whole-string
// ICU transforms instead of the byte-span tokenizer, and naive scans
// instead of indexed lookups.

#ifndef MODAUDIT_TESTS_ORACLE_H_
#define MODAUDIT_TESTS_ORACLE_H_

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct OTok {
  std::string text;
  int32_t begin;  // UTF-16 offsets into the NFC string
  int32_t end;
};

inline icu::UnicodeString Nfc(const std::string& s) {
  UErrorCode err = U_ZERO_ERROR;
  const auto* n = icu::Normalizer2::getNFCInstance(err);
  return n->normalize(icu::UnicodeString::fromUTF8(s), err);
}

inline std::string Utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

inline std::vector<std::string> SplitAlnum(const icu::UnicodeString& s) {
  std::vector<std::string> out;
  icu::UnicodeString cur;
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    UChar32 c = s.char32At(i);
    if (u_isalnum(c)) {
      cur.append(c);
    } else if (!cur.isEmpty()) {
      out.push_back(Utf8(cur));
      cur.remove();
    }
  }
  if (!cur.isEmpty()) out.push_back(Utf8(cur));
  return out;
}

// NFC, then lowercase the whole string, then split.
inline std::vector<std::string> Tokens(const std::string& text) {
  icu::UnicodeString s = Nfc(text);
  s.toLower(icu::Locale::getRoot());
  return SplitAlnum(s);
}

// Tokens with spans. Assumes lowercasing does not change the token count,
// which holds for the inputs the tests generate.
inline std::vector<OTok> SpannedTokens(const icu::UnicodeString& nfc) {
  std::vector<OTok> out;
  int32_t start = -1;
  for (int32_t i = 0; i <= nfc.length(); i = i < nfc.length() ? nfc.moveIndex32(i, 1) : i + 1) {
    const bool word = i < nfc.length() && u_isalnum(nfc.char32At(i));
    if (word && start < 0) start = i;
    if (!word && start >= 0) {
      out.push_back({"", start, i});
      start = -1;
    }
  }
  icu::UnicodeString lower = nfc;
  lower.toLower(icu::Locale::getRoot());
  const auto texts = SplitAlnum(lower);
  for (std::size_t k = 0; k < out.size() && k < texts.size(); ++k) out[k].text = texts[k];
  return out;
}

struct Rule {
  std::string term;
  std::string category;  // empty for prefilter rules
  int min_level = 1;
  bool prefilter = false;
};

inline std::string CriterionOf(const std::string& category) {
  static const std::map<std::string, std::string> kMap = {
      {"Ableism", "Disability"}, {"Misogyny", "Misogyny"}, {"Racism", "RER"}, {"Homophobia", "SSG"}};
  return kMap.at(category);
}

struct Verdict {
  std::string kind;  // "passed", "moderated", "prefiltered"
  std::string category;
  std::vector<std::string> fragments;
  int level = 0;
  bool operator==(const Verdict&) const = default;
};

inline bool TokenMatch(const std::vector<OTok>& hay, std::size_t pos,
                       const std::vector<std::string>& needle) {
  if (needle.empty() || pos + needle.size() > hay.size()) return false;
  for (std::size_t k = 0; k < needle.size(); ++k) {
    if (hay[pos + k].text != needle[k]) return false;
  }
  return true;
}

// The simulator's rules applied literally: prefilter first, then the
// eligible rule with the earliest first match (load order on ties).
inline Verdict Moderate(const std::string& text, const std::vector<Rule>& rules,
                        const std::map<std::string, int>& active_levels) {
  const icu::UnicodeString nfc = Nfc(text);
  const auto toks = SpannedTokens(nfc);
  for (const auto& r : rules) {
    if (!r.prefilter) continue;
    const auto needle = Tokens(r.term);
    for (std::size_t p = 0; p < toks.size(); ++p) {
      if (TokenMatch(toks, p, needle)) return {"prefiltered", "", {}, 0};
    }
  }
  std::optional<std::pair<std::size_t, std::size_t>> best;  // (pos, rule index)
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (r.prefilter) continue;
    auto it = active_levels.find(CriterionOf(r.category));
    if (it == active_levels.end() || it->second < r.min_level) continue;
    const auto needle = Tokens(r.term);
    for (std::size_t p = 0; p < toks.size(); ++p) {
      if (TokenMatch(toks, p, needle)) {
        if (!best || p < best->first) best = {p, i};
        break;
      }
    }
  }
  if (!best) return {"passed", "", {}, 0};
  const Rule& r = rules[best->second];
  const auto needle = Tokens(r.term);
  Verdict v{"moderated", r.category, {}, r.min_level};
  for (std::size_t p = 0; p < toks.size();) {
    if (TokenMatch(toks, p, needle)) {
      const int32_t b = toks[p].begin;
      const int32_t e = toks[p + needle.size() - 1].end;
      v.fragments.push_back(Utf8(nfc.tempSubStringBetween(b, e)));
      p += needle.size();
    } else {
      ++p;
    }
  }
  return v;
}

struct Counts {
  long tp = 0, fp = 0, tn = 0, fn = 0, pre_hate = 0;
};

// Naive double loop: for every labelled id, find its verdict by scanning.
inline Counts Confusion(const std::vector<std::pair<std::string, bool>>& labels,
                        const std::vector<std::pair<std::string, std::string>>& verdicts) {
  Counts c;
  for (const auto& [id, hate] : labels) {
    for (const auto& [vid, kind] : verdicts) {
      if (vid != id) continue;
      const bool blocked = kind != "passed";
      if (hate && blocked) ++c.tp;
      if (hate && !blocked) ++c.fn;
      if (!hate && blocked) ++c.fp;
      if (!hate && !blocked) ++c.tn;
      if (hate && kind == "prefiltered") ++c.pre_hate;
    }
  }
  return c;
}

// Integer counts realising precision p, recall r and TNR t given in
// percent: tp/(tp+fp) = p, tp/(tp+fn) = r, tn/(tn+fp) = t.
inline Counts FromPercent(long p, long r, long t) {
  Counts c;
  c.tp = p * r * (100 - t);
  c.fp = (100 - p) * r * (100 - t);
  c.fn = p * (100 - r) * (100 - t);
  c.tn = (100 - p) * r * t;
  return c;
}

inline double Harmonic(double a, double b) { return a + b == 0 ? 0 : 2 * a * b / (a + b); }

// Counterfactual substitution by brute force: at every word-boundary
// position try the terms longest first (ASCII case-insensitive).
inline std::string Counterfactual(const std::string& text,
                                  std::vector<std::pair<std::string, std::string>> pairs) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  const std::string lt = lower(text);
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    bool done = false;
    if (i == 0 || !word(text[i - 1])) {
      for (const auto& [term, rep] : pairs) {
        const std::string t = lower(term);
        const std::size_t e = i + t.size();
        if (lt.compare(i, t.size(), t) == 0 && (e == text.size() || !word(text[e]))) {
          out += rep;
          i = e;
          done = true;
          break;
        }
      }
    }
    if (!done) out += text[i++];
  }
  return out;
}

}  // namespace oracle

#endif  // MODAUDIT_TESTS_ORACLE_H_
