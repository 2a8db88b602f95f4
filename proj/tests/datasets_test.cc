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

#include "modaudit/datasets.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "modaudit/csv.h"
#include "modaudit/errors.h"

namespace modaudit {
namespace {

const std::filesystem::path kMappings = std::filesystem::path(MODAUDIT_DATA_DIR) / "mappings";

std::vector<Message> Load(DatasetKind kind, const std::string& csv, double threshold = 0.5) {
  DatasetSpec spec;
  spec.kind = kind;
  spec.sbic_threshold = threshold;
  std::istringstream in(csv);
  return load(spec, in);
}

std::vector<std::vector<std::string>> Rows(const std::string& csv, char delim = ',') {
  std::istringstream in(csv);
  CsvReader r(in, delim);
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  while (r.ReadRow(row)) out.push_back(row);
  return out;
}

TEST(Csv, QuotingAndLineEndings) {
  auto rows = Rows("\xEF\xBB\xBF" "a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",z\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"x, y", "say \"hi\""}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"multi\nline", "z"}));
}

TEST(Csv, TabsAndEmptyFields) {
  auto rows = Rows("a\t\tc\n", '\t');
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "", "c"}));
}

TEST(Csv, UnterminatedQuote) {
  EXPECT_THROW(Rows("a,\"oops\n"), IngestionError);
}

TEST(Load, DynaHate) {
  auto m = Load(DatasetKind::kDynaHate,
                "acl.id,text,label,target\n"
                "1,first,hate,\"bla, wom\"\n"
                "2,second,nothate,none\n"
                "3,   ,hate,bla\n");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].label, Label::kHate);
  EXPECT_EQ(m[0].targets, (std::vector<std::string>{"bla", "wom"}));
  EXPECT_EQ(m[1].label, Label::kBenign);
  EXPECT_EQ(m[0].source, "dynahate");
  EXPECT_NE(m[0].id, m[1].id);
}

TEST(Load, DynaHateBadLabel) {
  EXPECT_THROW(Load(DatasetKind::kDynaHate, "text,label,target\nx,maybe,bla\n"), IngestionError);
}

TEST(Load, SbicAggregatesAnnotations) {
  auto m = Load(DatasetKind::kSbic,
                "post,offensiveYN,targetMinority\n"
                "p1,1.0,\"[\"\"jews\"\"]\"\n"
                "p1,0.0,\"[\"\"black folks\"\"]\"\n"
                "p2,0.0,[]\n",
                0.5);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].text, "p1");
  EXPECT_EQ(m[0].label, Label::kHate);  // mean 0.5
  EXPECT_EQ(m[0].targets, (std::vector<std::string>{"jews", "black folks"}));
  EXPECT_EQ(m[1].label, Label::kBenign);
}

TEST(Load, ToxiGenBands) {
  auto m = Load(DatasetKind::kToxiGen,
                "prompt_label,generation,roberta_prediction,group\n"
                "1,keep hate,0.9,jewish\n"
                "1,middling,0.5,jewish\n"
                "0,keep benign,0.1,asian\n"
                "0,benign but scored toxic,0.9,asian\n"
                "1,edge,0.8,black\n");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].text, "keep hate");
  EXPECT_EQ(m[1].label, Label::kBenign);
  EXPECT_EQ(m[2].text, "edge");
  EXPECT_EQ(m[2].targets, std::vector<std::string>{"black"});
}

TEST(Load, IhcClasses) {
  DatasetSpec spec;
  spec.kind = DatasetKind::kIhc;
  spec.delimiter = '\t';
  std::istringstream in("post\tclass\nfoo\timplicit_hate\nbar\tnot_hate\nbaz\texplicit_hate\n");
  auto ihc = load(spec, in);
  ASSERT_EQ(ihc.size(), 3u);
  EXPECT_EQ(ihc[0].label, Label::kHate);
  EXPECT_EQ(ihc[1].label, Label::kBenign);
  EXPECT_EQ(ihc[2].label, Label::kHate);
}

TEST(Load, MissingColumnNamed) {
  try {
    Load(DatasetKind::kDynaHate, "text,label\nx,hate\n");
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("target"), std::string::npos);
  }
}

TEST(Load, EmptyInput) {
  EXPECT_TRUE(Load(DatasetKind::kDynaHate, "").empty());
  EXPECT_TRUE(Load(DatasetKind::kDynaHate, "text,label,target\n").empty());
}

TEST(Load, TextIsNfc) {
  auto m = Load(DatasetKind::kDynaHate, "text,label,target\nCafé,hate,x\n");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].text, "Café");
}

TEST(Load, MissingFile) {
  DatasetSpec spec;
  spec.path = "/nonexistent/file.csv";
  EXPECT_THROW(load(spec), IngestionError);
}

TEST(SbicLabel, Threshold) {
  EXPECT_EQ(sbic_label(0.5, 0.5), Label::kHate);
  EXPECT_EQ(sbic_label(0.49, 0.5), Label::kBenign);
  EXPECT_EQ(sbic_label(1.0, 1.0), Label::kHate);
  EXPECT_EQ(sbic_label(0.0, 0.0), Label::kHate);
  EXPECT_THROW(sbic_label(1.2, 0.5), ValidationError);
  EXPECT_THROW(sbic_label(0.5, -0.1), ValidationError);
}

TEST(ToxigenLabel, Bands) {
  EXPECT_EQ(toxigen_label(true, 0.8), Label::kHate);
  EXPECT_EQ(toxigen_label(false, 0.2), Label::kBenign);
  EXPECT_FALSE(toxigen_label(true, 0.5));
  EXPECT_FALSE(toxigen_label(false, 0.5));
  EXPECT_FALSE(toxigen_label(true, 0.1));
}

TEST(Mapping, ShippedTablesParse) {
  for (const char* name : {"sbic.json", "dynahate.json", "toxigen.json"}) {
    auto t = MappingTable::Load(kMappings / name);
    EXPECT_EQ(t.filters.size(), 4u) << name;
    for (const auto& s : t.SubsetNames()) {
      EXPECT_FALSE(SubsetMembers(s, t).empty()) << name << " " << s;
    }
  }
}

TEST(Mapping, Standardize) {
  auto t = MappingTable::Load(kMappings / "sbic.json");
  // A raw term may sit in several groups; the first is its primary group.
  const auto jews = standardize_target("jews", t).groups;
  ASSERT_FALSE(jews.empty());
  EXPECT_EQ(jews.front(), "Jewish Folks");
  EXPECT_EQ(standardize_target("  Jews ", t).groups, jews);
  EXPECT_FALSE(standardize_target("martians", t).mapped());
  // Canonical names are fixed points.
  for (const auto& g : t.canonical_groups) {
    auto s = standardize_target(g, t);
    EXPECT_NE(std::find(s.groups.begin(), s.groups.end(), g), s.groups.end()) << g;
  }
}

TEST(Mapping, RejectsUnknownMember) {
  EXPECT_THROW(MappingTable::Parse(R"({"standardization":{"A":["a"]},"filters":{"RER":["B"]}})"),
               ValidationError);
  EXPECT_THROW(MappingTable::Parse("nope"), ValidationError);
}

TEST(Subset, ExtractDynaHate) {
  auto t = MappingTable::Load(kMappings / "dynahate.json");
  std::vector<Message> msgs = {
      {"1", "a", Label::kHate, {"bla"}, "d"},
      {"2", "b", Label::kHate, {"wom"}, "d"},
      {"3", "c", Label::kHate, {"bla.man"}, "d"},
      {"4", "d", Label::kBenign, {}, "d"},
  };
  auto black = extract_subset(msgs, "Black", t);
  ASSERT_EQ(black.size(), 2u);
  EXPECT_EQ(black[0].id, "1");
  EXPECT_EQ(black[1].id, "3");
  EXPECT_THROW(extract_subset(msgs, "Martians", t), LookupError);
}

// Oracle: a message is in a subset iff one of its targets, after
// standardization, is a listed member. Checked against random messages.
TEST(Subset, MatchesNaiveOracle) {
  auto t = MappingTable::Load(kMappings / "sbic.json");
  std::vector<std::string> raws;
  for (const auto& [raw, groups] : t.standardization) raws.push_back(raw);
  raws.push_back("martians");
  std::mt19937 rng(3);
  std::vector<Message> msgs;
  for (int i = 0; i < 300; ++i) {
    Message m{std::to_string(i), "t", Label::kHate, {}, "s"};
    for (int k = rng() % 3; k > 0; --k) m.targets.push_back(raws[rng() % raws.size()]);
    msgs.push_back(m);
  }
  for (const auto& name : t.SubsetNames()) {
    std::vector<std::string> listed;
    for (const auto& [c, g] : t.filters) {
      if (c.name() == name) listed = g;
    }
    for (const auto& [c, g] : t.communities) {
      if (c == name) listed = g;
    }
    std::vector<std::string> want;
    for (const auto& m : msgs) {
      bool in = false;
      for (const auto& raw : m.targets) {
        for (const auto& g : standardize_target(raw, t).groups) {
          in |= std::find(listed.begin(), listed.end(), g) != listed.end();
        }
      }
      if (in) want.push_back(m.id);
    }
    std::vector<std::string> got;
    for (const auto& m : extract_subset(msgs, name, t)) got.push_back(m.id);
    EXPECT_EQ(got, want) << name;
  }
}

TEST(Corpus, RoundTrip) {
  std::vector<Message> msgs = {
      {"a:1", "hello \"world\"\n", Label::kHate, {"x", "y"}, "a"},
      {"a:2", "café", Label::kBenign, {}, "a"},
      {"a:3", "unlabelled", std::nullopt, {}, "a"},
  };
  std::stringstream ss;
  WriteCorpus(ss, msgs);
  auto back = ReadCorpus(ss);
  ASSERT_EQ(back.size(), msgs.size());
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    EXPECT_EQ(back[i].id, msgs[i].id);
    EXPECT_EQ(back[i].text, msgs[i].text);
    EXPECT_EQ(back[i].label, msgs[i].label);
    EXPECT_EQ(back[i].targets, msgs[i].targets);
    EXPECT_EQ(back[i].source, msgs[i].source);
  }
}

TEST(Corpus, ShippedExample) {
  auto msgs = ReadCorpus(std::filesystem::path(MODAUDIT_DATA_DIR) / "examples" / "corpus.jsonl");
  EXPECT_EQ(msgs.size(), 30u);
}

TEST(DatasetKind, Parse) {
  EXPECT_EQ(ParseDatasetKind("SBIC"), DatasetKind::kSbic);
  EXPECT_EQ(ToString(ParseDatasetKind("toxigen")), "toxigen");
  EXPECT_THROW(ParseDatasetKind("reddit"), ConfigError);
}

}  // namespace
}  // namespace modaudit
