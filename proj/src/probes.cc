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

#include "modaudit/probes.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "modaudit/errors.h"
#include "modaudit/text.h"

namespace modaudit {
namespace {

char32_t Fold(char32_t cp) {
  return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(cp), U_FOLD_CASE_DEFAULT));
}

struct CodePoint {
  char32_t cp;
  char32_t folded;
  std::size_t offset;  // byte offset in the source text
};

std::vector<CodePoint> Decode(std::string_view text) {
  std::vector<CodePoint> out;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto len = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < len) {
    const auto off = static_cast<std::size_t>(i);
    UChar32 c;
    U8_NEXT(bytes, i, len, c);
    const char32_t cp = c < 0 ? U'\uFFFD' : static_cast<char32_t>(c);
    out.push_back({cp, Fold(cp), off});
  }
  return out;
}

void CheckToken(const std::u32string& cps, std::size_t min_len) {
  if (cps.size() < min_len) {
    throw GenerationError("fragment needs at least " + std::to_string(min_len) + " characters");
  }
  for (char32_t c : cps) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      throw GenerationError("fragment must be a single token");
    }
  }
}

}  // namespace

SlurMap SlurMap::Parse(std::string_view json) {
  SlurMap map;
  try {
    auto j = nlohmann::json::parse(json);
    for (const auto& item : j) {
      std::string term;
      std::string replacement;
      if (item.is_array() && item.size() == 2) {
        term = item[0].get<std::string>();
        replacement = item[1].get<std::string>();
      } else {
        term = item.at("term").get<std::string>();
        replacement = item.at("replacement").get<std::string>();
      }
      if (term.empty()) throw ValidationError("slur map has an empty group term");
      map.pairs.emplace_back(std::move(term), std::move(replacement));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("slur map: ") + ex.what());
  }
  return map;
}

SlurMap SlurMap::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open slur map " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string counterfactual(std::string_view text, const SlurMap& map) {
  struct Term {
    std::u32string folded;
    const std::string* replacement;
  };
  std::vector<Term> terms;
  for (const auto& [term, replacement] : map.pairs) {
    std::u32string f;
    for (char32_t c : ToUtf32(term)) f.push_back(Fold(c));
    terms.push_back({std::move(f), &replacement});
  }
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return a.folded.size() > b.folded.size();
  });

  const auto cps = Decode(text);
  const std::size_t n = cps.size();
  auto is_word = [&](std::size_t i) { return IsAlnum(cps[i].cp); };

  std::string out;
  out.reserve(text.size());
  std::size_t copied = 0;
  std::size_t i = 0;
  while (i < n) {
    bool replaced = false;
    if (i == 0 || !is_word(i - 1)) {
      for (const auto& t : terms) {
        const std::size_t len = t.folded.size();
        if (i + len > n) continue;
        bool match = true;
        for (std::size_t k = 0; k < len && match; ++k) match = cps[i + k].folded == t.folded[k];
        if (!match || (i + len < n && is_word(i + len))) continue;
        out.append(text.substr(copied, cps[i].offset - copied));
        out.append(*t.replacement);
        i += len;
        copied = i < n ? cps[i].offset : text.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) ++i;
  }
  out.append(text.substr(copied));
  return out;
}

std::string_view ToString(PerturbMethod m) {
  switch (m) {
    case PerturbMethod::kPunctuation:
      return "Punctuation";
    case PerturbMethod::kSpaces:
      return "Spaces";
    case PerturbMethod::kPartialObfuscation:
      return "PartialObfuscation";
    case PerturbMethod::kPhoneticPlay:
      return "PhoneticPlay";
    case PerturbMethod::kReversedLetters:
      return "ReversedLetters";
    case PerturbMethod::kCombination:
      return "Combination";
  }
  return "unknown";
}

std::string perturb(std::string_view fragment, PerturbMethod method) {
  std::u32string s = ToUtf32(fragment);
  CheckToken(s, method == PerturbMethod::kReversedLetters ? 2 : 3);
  switch (method) {
    case PerturbMethod::kPunctuation: {
      std::u32string out = s.substr(0, 1) + U"." + s.substr(1, 2) + U" " + s.substr(3);
      return ToUtf8(out);
    }
    case PerturbMethod::kSpaces:
      return ToUtf8(s.substr(0, 3) + U" " + s.substr(3));
    case PerturbMethod::kPartialObfuscation:
      return ToUtf8(s.substr(0, 1) + U"***" + s.substr(3));
    case PerturbMethod::kPhoneticPlay: {
      const std::size_t at = s.size() - 3;
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), s[at]);
      return ToUtf8(s);
    }
    case PerturbMethod::kReversedLetters:
      std::reverse(s.begin(), s.end());
      return ToUtf8(s);
    case PerturbMethod::kCombination:
      return perturb(std::string(fragment) + "es", PerturbMethod::kPunctuation);
  }
  throw GenerationError("unknown perturbation method");
}

std::vector<PerturbVariant> perturbation_suite(std::string_view fragment) {
  const std::string plural = std::string(fragment) + "es";
  std::vector<PerturbVariant> out;
  // Validate once so that Unperturbed is never returned for a bad fragment.
  perturb(fragment, PerturbMethod::kSpaces);
  out.push_back({"Unperturbed", std::string(fragment)});
  out.push_back({"PhoneticPlay", perturb(fragment, PerturbMethod::kPhoneticPlay)});
  out.push_back({"Spaces", perturb(fragment, PerturbMethod::kSpaces)});
  out.push_back({"Punctuation", perturb(fragment, PerturbMethod::kPunctuation)});
  out.push_back({"Combination", perturb(fragment, PerturbMethod::kCombination)});
  out.push_back({"PartialObfuscation", perturb(fragment, PerturbMethod::kPartialObfuscation)});
  out.push_back({"ReversedLetters", perturb(plural, PerturbMethod::kReversedLetters)});
  return out;
}

std::vector<Message> LoadProbeSet(const std::filesystem::path& path, const std::string& source) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open probe set " + path.string());
  std::vector<Message> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Message m;
      m.id = source + ":" + std::to_string(lineno);
      m.text = j.at("text").get<std::string>();
      const std::string expected = j.value("expected", "pass");
      if (expected == "pass") {
        m.label = Label::kBenign;
      } else if (expected == "block") {
        m.label = Label::kHate;
      } else {
        throw ValidationError("expected must be 'pass' or 'block'");
      }
      m.source = source;
      if (m.text.empty()) throw ValidationError("empty probe text");
      out.push_back(std::move(m));
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    } catch (const ValidationError& ex) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace modaudit
