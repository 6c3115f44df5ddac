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

#include "oovdial/dialogue.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace oovdial {

namespace {

constexpr const char* kNodeNames[] = {
    "GREET",  "REQUEST_PARAM", "CONFIRM",      "DB_ACCESS",
    "ANSWER", "REPEAT_PARAM",  "SPELL",        "WARN",
    "FURTHER_INFO", "REFER_HUMAN", "CLOSED"};

bool IsTimeParam(const std::string& p) {
  return p == "sourcetime" || p == "goaltime";
}
bool IsCityParam(const std::string& p) {
  return p == "goalcity" || p == "sourcecity";
}
bool IsTaskParam(const std::string& p) {
  const auto& params = TaskParameters();
  return std::find(params.begin(), params.end(), p) != params.end();
}

bool Satisfied(const DialogueState& s, const std::string& param) {
  if (IsTimeParam(param)) {
    return s.HasValue("sourcetime") || s.HasValue("goaltime");
  }
  return s.HasValue(param);
}

bool ValidValue(const std::string& param, const std::string& value) {
  if (!IsTimeParam(param)) return true;
  try {
    ParseClock(value);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

struct TurnInfo {
  const Concept* oov = nullptr;
  bool yes = false;
  bool no = false;
  bool thanks = false;
  bool has_task = false;
};

TurnInfo Inspect(const ConceptList& concepts) {
  TurnInfo t;
  for (const auto& c : concepts) {
    if (c.name == "marker") {
      if (c.value == "yes" || c.value == "right" || c.value == "okay") {
        t.yes = true;
      } else if (c.value == "no") {
        t.no = true;
      } else if (c.value == "thanks" || c.value == "goodbye") {
        t.thanks = true;
      }
    } else if (IsTaskParam(c.name)) {
      if (c.value == kOovCityValue) {
        if (!t.oov) t.oov = &c;
      } else if (ValidValue(c.name, c.value)) {
        t.has_task = true;
      }
    }
  }
  return t;
}

const std::string* ValueFor(const ConceptList& concepts,
                            const std::string& param) {
  for (const auto& c : concepts) {
    if (c.value == kOovCityValue || !ValidValue(c.name, c.value)) continue;
    if (c.name == param || (IsTimeParam(param) && IsTimeParam(c.name))) {
      return &c.value;
    }
  }
  return nullptr;
}

void ResetQuery(DialogueState& s) {
  s.slots.clear();
  s.focus.clear();
  s.repair_count.clear();
  s.goal_stack.clear();
  s.conflict = false;
  s.confirmed = false;
}

std::string Summary(const std::map<std::string, std::string>& slots) {
  auto get = [&](const char* k) -> std::string {
    auto it = slots.find(k);
    if (it == slots.end() || it->second == kOovCityValue) return "";
    return it->second;
  };
  std::vector<std::string> parts;
  if (auto v = get("sourcecity"); !v.empty()) parts.push_back("from " + v);
  if (auto v = get("goalcity"); !v.empty()) parts.push_back("to " + v);
  if (auto v = get("date"); !v.empty()) parts.push_back("on " + v);
  if (auto v = get("sourcetime"); !v.empty()) {
    parts.push_back("leaving at " + FormatClock(ParseClock(v)));
  }
  if (auto v = get("goaltime"); !v.empty()) {
    parts.push_back("arriving at " + FormatClock(ParseClock(v)));
  }
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ' ';
    out += parts[i];
  }
  return out;
}

}  // namespace

const char* ToString(Node node) {
  return kNodeNames[static_cast<int>(node)];
}

std::optional<Node> NodeFromString(const std::string& name) {
  for (Node n : AllNodes()) {
    if (name == ToString(n)) return n;
  }
  return std::nullopt;
}

const std::vector<Node>& AllNodes() {
  static const std::vector<Node> nodes = {
      Node::kGreet,       Node::kRequestParam, Node::kConfirm,
      Node::kDbAccess,    Node::kAnswer,       Node::kRepeatParam,
      Node::kSpell,       Node::kWarn,         Node::kFurtherInfo,
      Node::kReferHuman,  Node::kClosed};
  return nodes;
}

bool DialogueState::HasValue(const std::string& param) const {
  auto it = slots.find(param);
  return it != slots.end() && !it->second.empty() &&
         it->second != kOovCityValue;
}

bool DialogueState::Complete() const {
  return HasValue("goalcity") && HasValue("sourcecity") && HasValue("date") &&
         (HasValue("sourcetime") || HasValue("goaltime"));
}

std::string DialogueState::Key() const {
  std::string k = ToString(node);
  k += "|f=" + focus + "|s=";
  for (const auto& [p, v] : slots) k += p + "=" + v + ",";
  k += "|r=";
  for (const auto& [p, n] : repair_count) {
    if (n) k += p + "=" + std::to_string(n) + ",";
  }
  k += "|g=";
  for (const auto& g : goal_stack) k += g + ",";
  k += conflict ? "|c" : "|-";
  k += confirmed ? "y" : "n";
  return k;
}

std::string FormatClock(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

int ParseClock(const std::string& text) {
  int h = 0, m = 0;
  size_t colon = text.find(':');
  auto digits = [](const std::string& s) {
    return !s.empty() && s.size() <= 2 &&
           std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c); });
  };
  std::string hs = text.substr(0, colon);
  std::string ms = colon == std::string::npos ? "0" : text.substr(colon + 1);
  if (!digits(hs) || !digits(ms)) {
    throw std::invalid_argument("malformed time '" + text + "'");
  }
  h = std::stoi(hs);
  m = std::stoi(ms);
  if (h > 23 || m > 59) {
    throw std::invalid_argument("time out of range '" + text + "'");
  }
  return h * 60 + m;
}

void TimetableDb::Add(Connection c) {
  covered_.insert(c.from);
  covered_.insert(c.to);
  connections_.push_back(std::move(c));
}

TimetableDb TimetableDb::Read(std::istream& in) {
  TimetableDb db;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (lineno == 1 && !f.empty() && f[0] == "from") continue;
    if (f.size() != 4) {
      throw FormatError("timetable line " + std::to_string(lineno) +
                        ": expected 4 fields");
    }
    try {
      db.Add({f[0], f[1], ParseClock(f[2]), ParseClock(f[3])});
    } catch (const std::invalid_argument& e) {
      throw FormatError("timetable line " + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return db;
}

TimetableDb TimetableDb::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open timetable " + path);
  try {
    return Read(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

DbQueryResult QueryDb(const TimetableDb& db,
                      const std::map<std::string, std::string>& slots,
                      int window_minutes) {
  auto require = [&](const char* p) -> const std::string& {
    auto it = slots.find(p);
    if (it == slots.end() || it->second.empty()) {
      throw std::invalid_argument(std::string("slot ") + p + " is empty");
    }
    if (it->second == kOovCityValue) {
      throw std::invalid_argument(std::string("slot ") + p + " is OOV");
    }
    return it->second;
  };
  const std::string& from = require("sourcecity");
  const std::string& to = require("goalcity");
  require("date");
  auto time_slot = [&](const char* p) -> std::optional<int> {
    auto it = slots.find(p);
    if (it == slots.end() || it->second.empty()) return std::nullopt;
    if (it->second == kOovCityValue) {
      throw std::invalid_argument(std::string("slot ") + p + " is OOV");
    }
    return ParseClock(it->second);
  };
  auto dep = time_slot("sourcetime");
  auto arr = time_slot("goaltime");
  if (!dep && !arr) throw std::invalid_argument("no time slot is filled");

  DbQueryResult result;
  for (const auto* city : {&from, &to}) {
    if (!db.Covers(*city)) {
      result.coverage_note =
          "no information on train connections for " + *city;
      return result;
    }
  }
  for (const auto& c : db.connections()) {
    if (c.from != from || c.to != to) continue;
    int t = dep ? c.departure : c.arrival;
    int want = dep ? *dep : *arr;
    if (std::abs(t - want) <= window_minutes) result.connections.push_back(c);
  }
  std::stable_sort(result.connections.begin(), result.connections.end(),
                   [](const Connection& a, const Connection& b) {
                     return a.departure < b.departure;
                   });
  return result;
}

std::string ParseSpelling(std::span<const std::string> letters) {
  std::string word;
  for (const auto& t : letters) {
    if (t.size() != 1 || !std::isalpha(static_cast<unsigned char>(t[0]))) {
      throw std::invalid_argument("not a single letter: '" + t + "'");
    }
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(t[0])));
  }
  return word;
}

PromptTemplates::PromptTemplates() {
  templates_ = {
      {"GREET",
       "Good day, this is the train timetable information. What would you "
       "like to know?"},
      {"REQUEST_PARAM", "Please tell me {parameter}."},
      {"REQUEST_PARAM_RETRY",
       "Sorry, I did not understand you. {crosscheck}Could you tell me "
       "{parameter} again?"},
      {"CROSSCHECK", "So far I have a journey {summary}. "},
      {"CONFIRM", "You want to travel {summary}. Is that right?"},
      {"ANSWER",
       "There is a train {connections}. Would you like further information?"},
      {"ANSWER_NONE",
       "I am sorry, I found no train {summary}. Would you like further "
       "information?"},
      {"REPEAT_PARAM",
       "I think the information you require is not covered by our database. "
       "Could you, please, repeat the name of {parameter}?"},
      {"SPELL", "Could you please spell {object}?"},
      {"WARN",
       "Unfortunately, there is no information on train connections for the "
       "city you want. Our database only covers German cities. Would you "
       "like to proceed with a different query?"},
      {"FURTHER_INFO", "What exactly would you like to know?"},
      {"REFER_HUMAN",
       "I am sorry, I could not understand you. Please ask one of our "
       "information officers."},
      {"CLOSED", "Thank you for calling. Goodbye."},
  };
}

PromptTemplates PromptTemplates::Read(std::istream& in) {
  PromptTemplates p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("prompt file line " + std::to_string(lineno) +
                        ": expected key<TAB>template");
    }
    p.templates_[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return p;
}

PromptTemplates PromptTemplates::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prompt file " + path);
  try {
    return Read(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string PromptTemplates::Render(
    const std::string& key,
    const std::map<std::string, std::string>& vars) const {
  auto it = templates_.find(key);
  if (it == templates_.end()) {
    throw std::out_of_range("no prompt template '" + key + "'");
  }
  const std::string& t = it->second;
  std::string out;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '{') {
      size_t close = t.find('}', i);
      if (close != std::string::npos) {
        auto v = vars.find(t.substr(i + 1, close - i - 1));
        if (v != vars.end()) {
          out += v->second;
          i = close;
          continue;
        }
      }
    }
    out += t[i];
  }
  return out;
}

DialogueManager::DialogueManager(const TimetableDb& db,
                                 PromptTemplates prompts,
                                 DialoguePolicy policy)
    : db_(db), prompts_(std::move(prompts)), policy_(policy) {
  if (policy_.max_repairs < 1) {
    throw std::invalid_argument("max_repairs must be at least 1");
  }
}

std::string DialogueManager::Describe(const std::string& param) const {
  static const std::map<std::string, std::string> kText = {
      {"goalcity", "the city you want to go to"},
      {"sourcecity", "the city you want to leave from"},
      {"date", "the day of your journey"},
      {"sourcetime", "the time you want to leave"},
      {"goaltime", "the time you want to arrive"}};
  auto it = kText.find(param);
  return it == kText.end() ? param : it->second;
}

StepResult DialogueManager::Goto(DialogueState state, Node node) const {
  state.node = node;
  std::map<std::string, std::string> vars = {
      {"parameter", Describe(state.focus)},
      {"object", IsCityParam(state.focus) ? "the name of this city"
                                          : Describe(state.focus)},
      {"summary", Summary(state.slots)}};
  SystemAct act{node, prompts_.Render(ToString(node), vars), {}};
  return {std::move(state), std::move(act)};
}

void DialogueManager::PushGoal(DialogueState& s, std::string goal) const {
  auto& st = s.goal_stack;
  st.erase(std::remove(st.begin(), st.end(), goal), st.end());
  st.push_back(std::move(goal));
  if (st.size() > policy_.max_goal_stack) st.erase(st.begin());
}

void DialogueManager::Absorb(DialogueState& s,
                             const ConceptList& concepts) const {
  for (const auto& c : concepts) {
    if (!IsTaskParam(c.name) || c.value == kOovCityValue) continue;
    if (!ValidValue(c.name, c.value)) continue;
    auto it = s.slots.find(c.name);
    if (it != s.slots.end() && !it->second.empty() &&
        it->second != kOovCityValue && it->second != c.value) {
      s.conflict = true;
      s.confirmed = false;
    }
    s.slots[c.name] = c.value;
  }
}

StepResult DialogueManager::EnterRepair(DialogueState s,
                                        const std::string& param) const {
  if (s.node == Node::kRequestParam && !s.focus.empty() && s.focus != param) {
    PushGoal(s, "REQUEST_PARAM:" + s.focus);
  } else if (s.node == Node::kConfirm || s.node == Node::kAnswer) {
    PushGoal(s, ToString(s.node));
  }
  s.slots[param] = kOovCityValue;
  s.focus = param;
  return Goto(std::move(s), Node::kRepeatParam);
}

StepResult DialogueManager::Rerequest(DialogueState s) const {
  int& count = s.repair_count[s.focus];
  ++count;
  if (count >= policy_.max_repairs) return Goto(std::move(s), Node::kSpell);
  auto r = Goto(std::move(s), Node::kRequestParam);
  std::string summary = Summary(r.state.slots);
  std::string crosscheck =
      summary.empty() ? ""
                      : prompts_.Render("CROSSCHECK", {{"summary", summary}});
  r.act.text = prompts_.Render(
      "REQUEST_PARAM_RETRY",
      {{"parameter", Describe(r.state.focus)}, {"crosscheck", crosscheck}});
  return r;
}

StepResult DialogueManager::Answer(DialogueState s) const {
  s.history.push_back(Node::kDbAccess);
  s.focus.clear();
  DbQueryResult q = QueryDb(db_, s.slots);
  s.node = Node::kAnswer;
  SystemAct act{Node::kAnswer, "", q.connections};
  if (q.connections.empty()) {
    act.text = prompts_.Render("ANSWER_NONE", {{"summary", Summary(s.slots)}});
  } else {
    std::string list;
    for (size_t i = 0; i < q.connections.size(); ++i) {
      const auto& c = q.connections[i];
      if (i) list += "; ";
      list += "from " + c.from + " to " + c.to + " at " +
              FormatClock(c.departure) + ", arriving at " +
              FormatClock(c.arrival);
    }
    act.text = prompts_.Render("ANSWER", {{"connections", list}});
  }
  return {std::move(s), std::move(act)};
}

StepResult DialogueManager::NextGoal(DialogueState s) const {
  while (!s.goal_stack.empty()) {
    std::string g = s.goal_stack.back();
    s.goal_stack.pop_back();
    const std::string prefix = "REQUEST_PARAM:";
    if (g.rfind(prefix, 0) == 0) {
      std::string p = g.substr(prefix.size());
      if (!Satisfied(s, p)) {
        s.focus = p;
        return Goto(std::move(s), Node::kRequestParam);
      }
    }
  }
  for (const char* p : {"goalcity", "sourcecity", "date", "sourcetime"}) {
    if (!Satisfied(s, p)) {
      s.focus = p;
      return Goto(std::move(s), Node::kRequestParam);
    }
  }
  s.focus.clear();
  if (s.conflict && policy_.confirm_after_conflict && !s.confirmed) {
    return Goto(std::move(s), Node::kConfirm);
  }
  return Answer(std::move(s));
}

StepResult DialogueManager::Start() const {
  return Goto(DialogueState{}, Node::kGreet);
}

StepResult DialogueManager::Step(const DialogueState& state,
                                 const ConceptList& concepts) const {
  if (IsTerminal(state.node)) {
    throw std::logic_error("dialogue is closed");
  }
  DialogueState s = state;
  s.history.clear();
  const TurnInfo t = Inspect(concepts);

  switch (s.node) {
    case Node::kRepeatParam: {
      Absorb(s, concepts);
      if (t.oov || !Satisfied(s, s.focus)) {
        return Goto(std::move(s), Node::kSpell);
      }
      return NextGoal(std::move(s));
    }
    case Node::kSpell: {
      if (t.oov) return Goto(std::move(s), Node::kWarn);
      const std::string* v = ValueFor(concepts, s.focus);
      if (!v) return Goto(std::move(s), Node::kReferHuman);
      if (IsCityParam(s.focus) && !db_.Covers(*v)) {
        return Goto(std::move(s), Node::kWarn);
      }
      Absorb(s, concepts);
      s.repair_count[s.focus] = 0;
      return NextGoal(std::move(s));
    }
    case Node::kWarn: {
      if (t.oov) return Goto(std::move(s), Node::kWarn);
      if (t.yes) {
        ResetQuery(s);
        return Goto(std::move(s), Node::kFurtherInfo);
      }
      if (t.no || t.thanks) return Goto(std::move(s), Node::kClosed);
      if (t.has_task) {
        ResetQuery(s);
        Absorb(s, concepts);
        return NextGoal(std::move(s));
      }
      return Goto(std::move(s), Node::kWarn);
    }
    case Node::kConfirm: {
      if (t.oov) {
        Absorb(s, concepts);
        return EnterRepair(std::move(s), t.oov->name);
      }
      if (t.has_task) {
        Absorb(s, concepts);
        return NextGoal(std::move(s));
      }
      if (t.yes) {
        s.confirmed = true;
        return NextGoal(std::move(s));
      }
      if (t.no) {
        ResetQuery(s);
        return NextGoal(std::move(s));
      }
      return Goto(std::move(s), Node::kConfirm);
    }
    case Node::kAnswer: {
      if (t.oov) {
        Absorb(s, concepts);
        return EnterRepair(std::move(s), t.oov->name);
      }
      if (t.has_task) {
        Absorb(s, concepts);
        return NextGoal(std::move(s));
      }
      if (t.yes) {
        ResetQuery(s);
        return Goto(std::move(s), Node::kFurtherInfo);
      }
      if (t.no || t.thanks) return Goto(std::move(s), Node::kClosed);
      return Goto(std::move(s), Node::kAnswer);
    }
    case Node::kGreet:
    case Node::kFurtherInfo:
    case Node::kRequestParam: {
      Absorb(s, concepts);
      if (t.oov) return EnterRepair(std::move(s), t.oov->name);
      if (s.node != Node::kRequestParam && !t.has_task &&
          (t.no || t.thanks)) {
        return Goto(std::move(s), Node::kClosed);
      }
      if (s.node == Node::kRequestParam && !Satisfied(s, s.focus)) {
        return Rerequest(std::move(s));
      }
      return NextGoal(std::move(s));
    }
    case Node::kDbAccess:
      return Answer(std::move(s));
    case Node::kReferHuman:
    case Node::kClosed:
      break;
  }
  throw std::logic_error("dialogue is closed");
}

const std::vector<AtnArc>& AtnArcs() {
  using N = Node;
  static const std::vector<AtnArc> arcs = [] {
    std::vector<AtnArc> a;
    auto add = [&](N from, std::initializer_list<std::pair<N, const char*>>
                               to) {
      for (const auto& [n, label] : to) a.push_back({from, n, label});
    };
    const std::initializer_list<std::pair<N, const char*>> progress = {
        {N::kRequestParam, "parameter missing"},
        {N::kConfirm, "complete after conflict"},
        {N::kDbAccess, "complete"}};
    for (N n : {N::kGreet, N::kFurtherInfo}) {
      add(n, {{N::kRepeatParam, "oov_city"}, {N::kClosed, "no / thanks"}});
      add(n, progress);
    }
    add(N::kRequestParam, {{N::kRepeatParam, "oov_city"},
                           {N::kSpell, "repairs exhausted"}});
    add(N::kRequestParam, progress);
    add(N::kRepeatParam, {{N::kSpell, "oov_city again / no value"}});
    add(N::kRepeatParam, progress);
    add(N::kSpell, {{N::kWarn, "unknown or uncovered word"},
                    {N::kReferHuman, "no interpretation"}});
    add(N::kSpell, progress);
    add(N::kWarn, {{N::kWarn, "oov_city / no answer"},
                   {N::kFurtherInfo, "yes"},
                   {N::kClosed, "no"}});
    add(N::kWarn, progress);
    add(N::kConfirm, {{N::kRepeatParam, "oov_city"},
                      {N::kConfirm, "no answer"}});
    add(N::kConfirm, progress);
    add(N::kDbAccess, {{N::kAnswer, "query"}});
    add(N::kAnswer, {{N::kRepeatParam, "oov_city"},
                     {N::kFurtherInfo, "yes"},
                     {N::kClosed, "no / thanks"},
                     {N::kAnswer, "no answer"}});
    add(N::kAnswer, progress);
    return a;
  }();
  return arcs;
}

void WriteAtnDot(std::ostream& out) {
  out << "digraph atn {\n  rankdir=LR;\n";
  for (Node n : AllNodes()) {
    out << "  " << ToString(n);
    if (IsTerminal(n)) out << " [shape=doublecircle]";
    out << ";\n";
  }
  for (const auto& a : AtnArcs()) {
    out << "  " << ToString(a.from) << " -> " << ToString(a.to)
        << " [label=\"" << a.label << "\"];\n";
  }
  out << "}\n";
}

ModelCheckReport CheckNoDeadEnds(const DialogueManager& manager,
                                 std::span<const ConceptList> alphabet,
                                 size_t max_states) {
  ModelCheckReport report;
  std::set<std::pair<Node, Node>> declared;
  for (const auto& a : AtnArcs()) declared.insert({a.from, a.to});
  std::set<std::string> undeclared;
  auto check_arc = [&](Node from, Node to) {
    if (!declared.count({from, to})) {
      undeclared.insert(std::string(ToString(from)) + " -> " + ToString(to));
    }
  };

  std::unordered_map<std::string, size_t> index;
  std::vector<DialogueState> states;
  std::vector<std::vector<size_t>> preds;
  std::deque<size_t> queue;
  auto intern = [&](const DialogueState& s) {
    auto [it, fresh] = index.emplace(s.Key(), states.size());
    if (fresh) {
      if (states.size() >= max_states) {
        throw std::runtime_error("state space exceeds the search bound");
      }
      states.push_back(s);
      preds.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };
  intern(manager.Start().state);
  while (!queue.empty()) {
    size_t i = queue.front();
    queue.pop_front();
    if (IsTerminal(states[i].node)) continue;
    for (const auto& input : alphabet) {
      StepResult r = manager.Step(states[i], input);
      Node from = states[i].node;
      if (!r.state.history.empty()) {
        check_arc(from, Node::kDbAccess);
        from = Node::kDbAccess;
      }
      check_arc(from, r.state.node);
      DialogueState next = r.state;
      next.history.clear();
      size_t j = intern(next);
      preds[j].push_back(i);
      ++report.transitions;
    }
  }
  report.states = states.size();

  std::vector<bool> good(states.size(), false);
  std::deque<size_t> back;
  for (size_t i = 0; i < states.size(); ++i) {
    Node n = states[i].node;
    if (IsTerminal(n) || n == Node::kAnswer) {
      good[i] = true;
      back.push_back(i);
    }
  }
  while (!back.empty()) {
    size_t j = back.front();
    back.pop_front();
    for (size_t i : preds[j]) {
      if (!good[i]) {
        good[i] = true;
        back.push_back(i);
      }
    }
  }
  for (size_t i = 0; i < states.size(); ++i) {
    if (!good[i]) report.dead_ends.push_back(states[i].Key());
  }
  report.undeclared_arcs.assign(undeclared.begin(), undeclared.end());
  return report;
}

}  // namespace oovdial
