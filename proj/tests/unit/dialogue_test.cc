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


#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oovdial/dialogue.h"
#include "common/fixtures.h"
#include "test_util.h"

namespace oovdial {
namespace {

const TimetableDb& Db() {
  static const TimetableDb db =
      TimetableDb::Load(testing::DataPath("timetable.tsv"));
  return db;
}

DialogueManager Manager(DialoguePolicy policy = {}) {
  return DialogueManager(Db(), PromptTemplates(), policy);
}

const ConceptList kOovGoal = {{"goalcity", kOovCityValue}};
const ConceptList kYes = {{"marker", "yes"}};

TEST_CASE("oov repair transcript") {
  auto dm = Manager();
  StepResult r = dm.Start();
  CHECK(r.act.goal == Node::kGreet);

  r = dm.Step(r.state, kOovGoal);
  CHECK(r.act.goal == Node::kRepeatParam);
  CHECK(r.state.focus == "goalcity");
  CHECK(r.act.text.find("repeat the name of the city") != std::string::npos);

  r = dm.Step(r.state, kOovGoal);
  CHECK(r.act.goal == Node::kSpell);
  CHECK(r.act.text == "Could you please spell the name of this city?");

  // spelled "brussels" is unknown, so it arrives as an oov city again
  r = dm.Step(r.state, kOovGoal);
  CHECK(r.act.goal == Node::kWarn);
  CHECK(r.act.text.find("no information on train connections for the city") !=
        std::string::npos);

  r = dm.Step(r.state, kYes);
  CHECK(r.act.goal == Node::kFurtherInfo);
  CHECK(r.act.text == "What exactly would you like to know?");
}

TEST_CASE("full slots access the database and answer") {
  auto dm = Manager();
  StepResult r = dm.Start();
  r = dm.Step(r.state, {{"goalcity", "munich"},
                        {"sourcecity", "hamburg"},
                        {"date", "monday"},
                        {"goaltime", "16"}});
  CHECK(r.act.goal == Node::kAnswer);
  REQUIRE(r.state.history.size() == 1);
  CHECK(r.state.history[0] == Node::kDbAccess);
  REQUIRE(r.act.payload.size() == 1);
  CHECK(FormatClock(r.act.payload[0].departure) == "10:14");
  CHECK(FormatClock(r.act.payload[0].arrival) == "15:50");
}

TEST_CASE("missing parameters are requested in order") {
  auto dm = Manager();
  StepResult r = dm.Step(dm.Start().state, {{"goalcity", "munich"}});
  CHECK(r.act.goal == Node::kRequestParam);
  CHECK(r.state.focus == "sourcecity");
  r = dm.Step(r.state, {{"sourcecity", "hamburg"}});
  CHECK(r.state.focus == "date");
  r = dm.Step(r.state, {{"date", "monday"}});
  CHECK(r.state.focus == "sourcetime");
  r = dm.Step(r.state, {{"sourcetime", "10"}});
  CHECK(r.act.goal == Node::kAnswer);
}

TEST_CASE("step after close is an error") {
  auto dm = Manager();
  StepResult r = dm.Step(dm.Start().state, {{"marker", "thanks"}});
  REQUIRE(r.state.node == Node::kClosed);
  CHECK_THROWS_AS(dm.Step(r.state, kYes), std::logic_error);
}

TEST_CASE("spelling") {
  std::vector<std::string> l = {"b", "r", "u", "s", "s", "e", "l", "s"};
  CHECK(ParseSpelling(l) == "brussels");
  std::vector<std::string> a = {"A"};
  CHECK(ParseSpelling(a) == "a");
  std::vector<std::string> bad = {"br"};
  CHECK_THROWS_AS(ParseSpelling(bad), std::invalid_argument);
  std::vector<std::string> digit = {"4"};
  CHECK_THROWS_AS(ParseSpelling(digit), std::invalid_argument);
}

// Independent linear scan over the bundled table file.
std::vector<std::pair<std::string, std::string>> ScanTable(
    const std::string& from, const std::string& to, int minute, int window) {
  std::ifstream in(testing::DataPath("timetable.tsv"));
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<std::string, std::string>> out;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string f, t, dep, arr;
    std::getline(ls, f, '\t');
    std::getline(ls, t, '\t');
    std::getline(ls, dep, '\t');
    std::getline(ls, arr, '\t');
    int m = std::stoi(dep.substr(0, 2)) * 60 + std::stoi(dep.substr(3, 2));
    if (f == from && t == to && std::abs(m - minute) <= window) {
      out.push_back({dep, arr});
    }
  }
  return out;
}

TEST_CASE("database query against a linear scan") {
  DbQueryResult q = QueryDb(Db(), {{"goalcity", "munich"},
                                   {"sourcecity", "hamburg"},
                                   {"date", "monday"},
                                   {"sourcetime", "10"}});
  auto want = ScanTable("hamburg", "munich", 600, 120);
  REQUIRE(want.size() == 1);
  CHECK(want[0].first == "10:14");
  REQUIRE(q.connections.size() == want.size());
  CHECK(FormatClock(q.connections[0].departure) == want[0].first);
  CHECK(FormatClock(q.connections[0].arrival) == want[0].second);
}

TEST_CASE("database query edge cases") {
  TimetableDb db;
  db.Add({"bonn", "kiel", 600, 700});
  db.AddCoveredCity("ulm");
  auto q = QueryDb(db, {{"goalcity", "bonn"}, {"sourcecity", "ulm"},
                        {"date", "monday"}, {"sourcetime", "10"}});
  CHECK(q.connections.empty());
  CHECK(q.coverage_note.empty());
  auto uncovered = QueryDb(db, {{"goalcity", "paris"}, {"sourcecity", "bonn"},
                                {"date", "monday"}, {"sourcetime", "10"}});
  CHECK(uncovered.connections.empty());
  CHECK_FALSE(uncovered.coverage_note.empty());
  CHECK_THROWS_AS(QueryDb(db, {{"goalcity", kOovCityValue},
                               {"sourcecity", "bonn"},
                               {"date", "monday"},
                               {"sourcetime", "10"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(QueryDb(db, {{"goalcity", "kiel"}}), std::invalid_argument);
}

TEST_CASE("clock parsing") {
  CHECK(ParseClock("10") == 600);
  CHECK(ParseClock("10:14") == 614);
  CHECK(FormatClock(614) == "10:14");
  CHECK_THROWS_AS(ParseClock("x"), std::invalid_argument);
}

TEST_CASE("prompt templates") {
  std::istringstream in("GREET\tHallo {name}.\n");
  PromptTemplates p = PromptTemplates::Read(in);
  CHECK(p.Render("GREET", {{"name", "Ada"}}) == "Hallo Ada.");
  CHECK(p.Render("FURTHER_INFO", {}) == "What exactly would you like to know?");
  CHECK_THROWS_AS(p.Render("NOPE", {}), std::out_of_range);
  PromptTemplates file =
      PromptTemplates::Load(testing::DataPath("prompts.tsv"));
  PromptTemplates defaults;
  for (const auto& [key, text] : defaults.all()) {
    CHECK(file.all().count(key));
  }
}

TEST_CASE("no dead ends over the concept alphabet") {
  auto dm = Manager();
  auto alphabet = fixture::ConceptAlphabet();
  ModelCheckReport r = CheckNoDeadEnds(dm, alphabet);
  CHECK(r.states > 50);
  CHECK(r.dead_ends.empty());
  CHECK(r.undeclared_arcs.empty());
}

TEST_CASE("every declared arc has a known node pair") {
  std::ostringstream dot;
  WriteAtnDot(dot);
  for (const auto& arc : AtnArcs()) {
    CHECK(dot.str().find(std::string(ToString(arc.from)) + " -> " +
                         ToString(arc.to)) != std::string::npos);
  }
}

TEST_CASE("repair counts stay bounded under adversarial input") {
  for (int max : {1, 2, 3, 5}) {
    DialoguePolicy policy;
    policy.max_repairs = max;
    auto dm = Manager(policy);
    auto alphabet = fixture::ConceptAlphabet();
    std::mt19937 gen(max);
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    for (int run = 0; run < 200; ++run) {
      StepResult r = dm.Start();
      for (int turn = 0; turn < 40 && !IsTerminal(r.state.node); ++turn) {
        // mostly unhelpful input
        ConceptList in = turn % 5 == 4 ? alphabet[pick(gen)] : ConceptList{};
        r = dm.Step(r.state, in);
        for (const auto& [param, count] : r.state.repair_count) {
          CHECK(count <= max);
        }
      }
    }
  }
}

TEST_CASE("oov input never reaches the database") {
  auto dm = Manager();
  auto alphabet = fixture::ConceptAlphabet();
  std::mt19937 gen(5);
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  for (int run = 0; run < 300; ++run) {
    StepResult r = dm.Start();
    for (int turn = 0; turn < 15 && !IsTerminal(r.state.node); ++turn) {
      ConceptList in = alphabet[pick(gen)];
      bool has_oov = false;
      for (const auto& c : in) has_oov |= c.value == kOovCityValue;
      r = dm.Step(r.state, in);
      if (has_oov) {
        CHECK(r.state.history.empty());
        bool repair = r.state.node == Node::kRepeatParam ||
                      r.state.node == Node::kSpell ||
                      r.state.node == Node::kWarn;
        CHECK(repair);
      }
    }
  }
}

TEST_CASE("conflict triggers confirmation when enabled") {
  for (bool confirm : {true, false}) {
    DialoguePolicy policy;
    policy.confirm_after_conflict = confirm;
    auto dm = Manager(policy);
    StepResult r = dm.Step(dm.Start().state, {{"goalcity", "munich"},
                                              {"sourcecity", "hamburg"},
                                              {"date", "monday"}});
    // a different goal city contradicts the system belief
    r = dm.Step(r.state, {{"goalcity", "bremen"}, {"sourcetime", "10"}});
    CHECK(r.state.conflict);
    CHECK(r.act.goal == (confirm ? Node::kConfirm : Node::kAnswer));
  }
}

TEST_CASE("state key is deterministic") {
  auto dm = Manager();
  auto a = dm.Step(dm.Start().state, kOovGoal);
  auto b = dm.Step(dm.Start().state, kOovGoal);
  CHECK(a.state.Key() == b.state.Key());
  CHECK(a.act.text == b.act.text);
}

}  // namespace
}  // namespace oovdial
