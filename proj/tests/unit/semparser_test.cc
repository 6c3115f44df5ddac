// Copyright 2026 The oovdial Authors.
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


#include <random>
#include <sstream>

#include "doctest.h"
#include "oovdial/semparser.h"
#include "common/fixtures.h"
#include "test_util.h"

namespace oovdial {
namespace {

struct Bundle {
  CategoryLexicon lex;
  Grammar grammar;
};

const Bundle& Bundled() {
  static const Bundle b = [] {
    Bundle x;
    x.lex = LoadLexicon(testing::DataPath("replica/lexicon.tsv"));
    x.grammar = Grammar::Load(testing::DataPath("grammar.ucg"));
    return x;
  }();
  return b;
}

// "<city>" marks an OOV token of that category.
std::vector<Token> Tokens(const std::string& text) {
  std::vector<Token> out;
  for (const auto& w : Tokenize(text)) {
    if (w.size() > 2 && w.front() == '<' && w.back() == '>') {
      out.push_back(Token::Oov(w.substr(1, w.size() - 2)));
    } else {
      out.push_back(Token::Known(w));
    }
  }
  return OovTag(out, Bundled().lex);
}

ParseResult Parse(const std::string& text) {
  SemanticParser parser(Bundled().grammar, &Bundled().lex);
  auto tokens = Tokens(text);
  return parser.Parse(tokens);
}

std::string Semantics(const std::string& text) {
  auto r = Parse(text);
  std::string out;
  for (const auto& f : r.frames) out += f.semantics.ToString() + ";";
  return out;
}

TEST_CASE("categorial types") {
  CHECK(CatType::Parse("(vp\\vp)/np").ToString() == "(vp\\vp)/np");
  CHECK(CatType::Parse("s/vp").Arity() == 1);
  CHECK(CatType::Parse("a/b/c").result().ToString() == "a/b");
  CHECK_THROWS_AS(CatType::Parse("a/"), FormatError);
}

TEST_CASE("lookup of oov and known words") {
  const auto& b = Bundled();
  auto oov = b.grammar.Lookup(Token::Oov("city"), &b.lex);
  REQUIRE(oov.size() == 1);
  CHECK(oov[0].fs.AtomAt("semantics.thecity.value") == "oov_city");
  CHECK(oov[0].fs.AtomAt("morphology.form") == "oov_city");
  CHECK(b.grammar.Lookup(Token::Oov("surname"), &b.lex).empty());
  CHECK(b.grammar.Lookup(Token::Oov("garbage"), &b.lex).empty());
  auto hamburg = b.grammar.Lookup(Token::Known("hamburg"), &b.lex);
  REQUIRE(hamburg.size() == 1);
  CHECK(hamburg[0].cat.ToString() == "np");
  CHECK(hamburg[0].fs.AtomAt("semantics.thecity.value") == "hamburg");
  CHECK(b.grammar.Lookup(Token::Known("zzz"), &b.lex).empty());
}

TEST_CASE("oov city goal frame") {
  auto r = Parse("i want to go to <city>");
  REQUIRE(r.frames.size() == 1);
  CHECK(r.complete);
  CHECK(r.frames[0].semantics ==
        FeatureStructure::Parse(
            "(type: go, thegoal: (type: city, value: oov_city))"));
  CHECK(r.frames[0].ToString() ==
        "semantics: (type: go, thegoal: (type: city, value: oov_city))");
}

TEST_CASE("known city goal frame") {
  auto r = Parse("i want to go to hamburg");
  REQUIRE(r.frames.size() == 1);
  CHECK(r.frames[0].semantics.ToString() ==
        "(type: go, thegoal: (type: city, value: hamburg))");
}

TEST_CASE("fragment with a hesitation keeps the city") {
  auto r = Parse("uh hamburg");
  CHECK_FALSE(r.complete);
  REQUIRE(r.frames.size() == 1);
  CHECK(r.frames[0].semantics.AtomAt("thecity.value") == "hamburg");
}

TEST_CASE("full request") {
  CHECK(Semantics("i would like to travel from hamburg to munich on friday "
                  "at ten") ==
        "(type: go, thedate: (type: date, value: friday), thedeparture: "
        "(type: time, value: 10), thegoal: (type: city, value: munich), "
        "thesource: (type: city, value: hamburg));");
}

TEST_CASE("parse never throws") {
  const auto& b = Bundled();
  SemanticParser parser(b.grammar, &b.lex);
  CHECK(parser.Parse(std::vector<Token>{}).frames.empty());
  std::vector<Token> all_oov = {Token::Oov("city"), Token::Oov("surname"),
                                Token::Oov(), Token::Oov("rare")};
  CHECK_NOTHROW(parser.Parse(all_oov));
  std::vector<std::string> words = {"i", "want", "to", "go", "from", "on",
                                    "at", "by", "hamburg", "monday", "ten",
                                    "yes", "uh", "would"};
  std::mt19937 gen(3);
  std::uniform_int_distribution<size_t> len(0, 10), pick(0, words.size());
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Token> tokens;
    size_t n = len(gen);
    for (size_t i = 0; i < n; ++i) {
      size_t k = pick(gen);
      tokens.push_back(k == words.size() ? Token::Oov("city")
                                         : Token::Known(words[k]));
    }
    CHECK_NOTHROW(parser.Parse(OovTag(tokens, b.lex)));
  }
}

TEST_CASE("oov city propagates through every city template") {
  for (const auto& t : fixture::CityTemplates()) {
    CAPTURE(t);
    std::string known = Semantics(fixture::FillCity(t, "bremen"));
    std::string oov = Semantics(fixture::FillCity(t, "<city>"));
    CHECK_FALSE(known.empty());
    std::string expected = known;
    for (size_t p; (p = expected.find("value: bremen")) != std::string::npos;) {
      expected.replace(p, 13, "value: oov_city");
    }
    CHECK(oov == expected);
  }
}

ConceptList Concepts(const std::string& text,
                     std::optional<std::string> hint = {}) {
  return ExtractConcepts(Parse(text).frames, hint);
}

TEST_CASE("concept extraction") {
  CHECK(Concepts("i want to go to hamburg") ==
        ConceptList{{"goalcity", "hamburg"}});
  CHECK(Concepts("i want to go to <city>") ==
        ConceptList{{"goalcity", "oov_city"}});
  CHECK(Concepts("yes") == ConceptList{{"marker", "yes"}});
  CHECK(Concepts("from hamburg to munich") ==
        ConceptList{{"sourcecity", "hamburg"}, {"goalcity", "munich"}});
  CHECK(Concepts("i want to arrive by six") == ConceptList{{"goaltime", "6"}});
}

TEST_CASE("bare values take the hint") {
  CHECK(Concepts("hamburg") == ConceptList{{"goalcity", "hamburg"}});
  CHECK(Concepts("hamburg", "sourcecity") ==
        ConceptList{{"sourcecity", "hamburg"}});
  CHECK(Concepts("hamburg", "date") == ConceptList{{"goalcity", "hamburg"}});
  CHECK(Concepts("ten", "goaltime") == ConceptList{{"goaltime", "10"}});
}

TEST_CASE("concept extraction is a function of frames and hint") {
  auto frames = Parse("i want to go from hamburg on monday").frames;
  auto a = ExtractConcepts(frames, "goalcity");
  auto b = ExtractConcepts(frames, "goalcity");
  CHECK(a == b);
}

TEST_CASE("concept list text and files") {
  ConceptList c = {{"goalcity", "oov_city"}, {"date", "monday"}};
  CHECK(ToString(c) == "goalcity=oov_city date=monday");
  CHECK(ParseConceptList(ToString(c)) == c);
  std::istringstream in("u1\tgoalcity=hamburg\nu2\t\n");
  auto m = ReadConceptFile(in);
  CHECK(m.at("u1") == ConceptList{{"goalcity", "hamburg"}});
  CHECK(m.at("u2").empty());
}

TEST_CASE("grammar blocks") {
  std::istringstream in(
      "entry hallo\ncat: mk\nfs:\n  morphology: form: hallo,\n"
      "  syntax: head: (part_of_speech: particle),\n"
      "  semantics: (type: marker, value: hallo)\nend\n");
  Grammar g = Grammar::Read(in);
  CHECK(g.NumEntries() == 1);
  std::istringstream missing("entry x\ncat: mk\nfs:\n  semantics: (type: m)\nend\n");
  CHECK_THROWS_AS(Grammar::Read(missing), FormatError);
  std::istringstream unterminated("entry x\ncat: mk\n");
  CHECK_THROWS_AS(Grammar::Read(unterminated), FormatError);
}

}  // namespace
}  // namespace oovdial
