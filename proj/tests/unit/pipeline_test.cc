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


#include "doctest.h"
#include "json.hpp"
#include "oovdial/pipeline.h"
#include "test_util.h"

namespace oovdial {
namespace {

TEST_CASE("config paths resolve against the config directory") {
  PipelineConfig c = PipelineConfig::Load(testing::DataPath("oovdial.json"));
  CHECK(c.grammar == testing::DataPath("grammar.ucg"));
  CHECK(c.input_mode == InputMode::kTextExact);
  CHECK(c.noise.confusables_per_token == 3);
  CHECK_NOTHROW(c.CheckFiles());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(PipelineConfig::Parse("{\"lexicom\": \"x\"}"), FormatError);
  CHECK_THROWS_AS(PipelineConfig::Parse("{\"noise\": {\"psub\": 1}}"),
                  FormatError);
  CHECK_THROWS_AS(PipelineConfig::Parse("{\"input_mode\": \"audio\"}"),
                  FormatError);
  CHECK_THROWS_AS(PipelineConfig::Parse("[1"), FormatError);
  PipelineConfig missing =
      PipelineConfig::Parse("{\"lexicon\": \"/nonexistent/lex.tsv\"}");
  CHECK_THROWS_WITH(missing.CheckFiles(),
                    doctest::Contains("/nonexistent/lex.tsv"));
}

TEST_CASE("evaluation of an empty test set") {
  EvalInputs in;
  Corpus empty;
  in.test = &empty;
  CHECK_THROWS_WITH(RunEvaluation(in), "empty test set");
}

TEST_CASE("spelling in the spell state") {
  auto res = Resources::Load(
      PipelineConfig::Load(testing::DataPath("oovdial.json")));
  DialogueState s;
  s.node = Node::kSpell;
  s.focus = "goalcity";
  auto a = Interpret(*res, s, "B-r-u-s-s-e-l-s", "t");
  CHECK(a.concepts == ConceptList{{"goalcity", kOovCityValue}});
  auto b = Interpret(*res, s, "b r e m e n", "t");
  CHECK(b.concepts == ConceptList{{"goalcity", "bremen"}});
  // outside the spell state letters are just words
  s.node = Node::kRequestParam;
  auto c = Interpret(*res, s, "b r e m e n", "t");
  CHECK(c.tokens.size() == 6);
  for (const auto& concept_ : c.concepts) CHECK(concept_.value != "bremen");
}

TEST_CASE("text input classifies unknown words from context") {
  auto res = Resources::Load(
      PipelineConfig::Load(testing::DataPath("oovdial.json")));
  DialogueState s;
  auto r = Interpret(*res, s, "I want to go to Brussels", "t");
  CHECK(r.concepts == ConceptList{{"goalcity", kOovCityValue}});
  REQUIRE(r.tokens.size() == 6);
  CHECK(r.tokens[5] == Token::Oov("city", "brussels"));
}

}  // namespace
}  // namespace oovdial
