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

// Transition-network dialogue manager for timetable inquiries, with the
// repair states used when a city name is out of vocabulary.

#ifndef OOVDIAL_DIALOGUE_H_
#define OOVDIAL_DIALOGUE_H_

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "oovdial/semparser.h"

namespace oovdial {

enum class Node {
  kGreet,
  kRequestParam,
  kConfirm,
  kDbAccess,
  kAnswer,
  kRepeatParam,
  kSpell,
  kWarn,
  kFurtherInfo,
  kReferHuman,
  kClosed,
};

// Upper-case goal label, e.g. "REPEAT_PARAM".
const char* ToString(Node node);
std::optional<Node> NodeFromString(const std::string& name);
const std::vector<Node>& AllNodes();
inline bool IsTerminal(Node node) {
  return node == Node::kClosed || node == Node::kReferHuman;
}

// Task parameters in request order.  The time requirement is met by either
// time parameter.
inline const std::vector<std::string>& TaskParameters() {
  static const std::vector<std::string> params = {
      "goalcity", "sourcecity", "date", "sourcetime", "goaltime"};
  return params;
}

struct DialogueState {
  Node node = Node::kGreet;
  // Parameter -> value; absent means empty, kOovCityValue means a detected
  // but unrecognised value.
  std::map<std::string, std::string> slots;
  std::string focus;
  std::map<std::string, int> repair_count;
  // Postponed goals, most recent last.
  std::vector<std::string> goal_stack;
  bool conflict = false;
  bool confirmed = false;
  // Nodes passed through without a user turn (DB_ACCESS).
  std::vector<Node> history;

  bool HasValue(const std::string& param) const;
  bool Complete() const;
  // Canonical string over every field that influences future steps.
  std::string Key() const;
};

struct Connection {
  std::string from;
  std::string to;
  int departure = 0;  // minutes after midnight
  int arrival = 0;

  bool operator==(const Connection&) const = default;
};

std::string FormatClock(int minutes);
// "10" -> 600, "10:14" -> 614.  Throws std::invalid_argument.
int ParseClock(const std::string& text);

class TimetableDb {
 public:
  TimetableDb() = default;
  // Adds the connection and both cities to the coverage set.
  void Add(Connection c);
  void AddCoveredCity(const std::string& city) { covered_.insert(city); }

  const std::vector<Connection>& connections() const { return connections_; }
  bool Covers(const std::string& city) const { return covered_.count(city); }
  const std::set<std::string>& covered() const { return covered_; }

  // `from<TAB>to<TAB>HH:MM<TAB>HH:MM`, optional header line.
  static TimetableDb Read(std::istream& in);
  static TimetableDb Load(const std::string& path);

 private:
  std::vector<Connection> connections_;
  std::set<std::string> covered_;
};

struct DbQueryResult {
  std::vector<Connection> connections;
  // Set when a requested city is outside the database coverage.
  std::string coverage_note;
};

// Connections between the slot cities whose departure (sourcetime) or
// arrival (goaltime) lies within +-window_minutes of the requested time.
// Throws std::invalid_argument when a required slot is empty or OOV.
DbQueryResult QueryDb(const TimetableDb& db,
                      const std::map<std::string, std::string>& slots,
                      int window_minutes = 120);

// Letters to word: {"b","R","u"} -> "bru".  Throws std::invalid_argument
// for a token that is not exactly one letter.
std::string ParseSpelling(std::span<const std::string> letters);

class PromptTemplates {
 public:
  // English defaults.
  PromptTemplates();
  // `key<TAB>template`; keys override the defaults.
  static PromptTemplates Read(std::istream& in);
  static PromptTemplates Load(const std::string& path);

  void Set(const std::string& key, std::string text) {
    templates_[key] = std::move(text);
  }
  // Replaces `{name}` placeholders.  Unknown keys throw std::out_of_range.
  std::string Render(const std::string& key,
                     const std::map<std::string, std::string>& vars) const;
  const std::map<std::string, std::string>& all() const { return templates_; }

 private:
  std::map<std::string, std::string> templates_;
};

struct SystemAct {
  Node goal = Node::kGreet;
  std::string text;
  std::vector<Connection> payload;
};

struct DialoguePolicy {
  // Repairs per parameter before escalating to spelling.
  int max_repairs = 3;
  // Ask for confirmation before the database access once a conflict
  // between system belief and user input has occurred.
  bool confirm_after_conflict = true;
  size_t max_goal_stack = 4;
};

struct StepResult {
  DialogueState state;
  SystemAct act;
};

class DialogueManager {
 public:
  DialogueManager(const TimetableDb& db, PromptTemplates prompts,
                  DialoguePolicy policy = {});

  // Initial state and greeting.
  StepResult Start() const;
  // One user turn.  Throws std::logic_error on a terminal state.
  StepResult Step(const DialogueState& state,
                  const ConceptList& concepts) const;

  const DialoguePolicy& policy() const { return policy_; }
  const TimetableDb& db() const { return db_; }

 private:
  StepResult Goto(DialogueState state, Node node) const;
  StepResult NextGoal(DialogueState state) const;
  StepResult EnterRepair(DialogueState state, const std::string& param) const;
  StepResult Answer(DialogueState state) const;
  StepResult Rerequest(DialogueState state) const;
  void Absorb(DialogueState& state, const ConceptList& concepts) const;
  void PushGoal(DialogueState& state, std::string goal) const;
  std::string Describe(const std::string& param) const;

  const TimetableDb& db_;
  PromptTemplates prompts_;
  DialoguePolicy policy_;
};

struct AtnArc {
  Node from;
  Node to;
  std::string label;
};

// Static description of the permitted transitions.
const std::vector<AtnArc>& AtnArcs();
void WriteAtnDot(std::ostream& out);

struct ModelCheckReport {
  size_t states = 0;
  size_t transitions = 0;
  // Reachable states from which no terminal or ANSWER state is reachable.
  std::vector<std::string> dead_ends;
  // Transitions taken by Step that are missing from AtnArcs().
  std::vector<std::string> undeclared_arcs;
};

// Exhaustive search from Start() over every input in `alphabet`.
ModelCheckReport CheckNoDeadEnds(const DialogueManager& manager,
                                 std::span<const ConceptList> alphabet,
                                 size_t max_states = 200000);

}  // namespace oovdial

#endif  // OOVDIAL_DIALOGUE_H_
