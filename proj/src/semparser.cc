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

#include "oovdial/semparser.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oovdial {

namespace {

// Upper bound on analyses kept per chart cell.
constexpr size_t kMaxItemsPerCell = 48;

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string ReplaceAll(std::string s, const std::string& from,
                       const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

class CatParser {
 public:
  explicit CatParser(const std::string& text) : text_(text) {}

  CatType ParseAll() {
    CatType c = ParseExpr();
    Skip();
    if (pos_ != text_.size()) Fail();
    return c;
  }

 private:
  [[noreturn]] void Fail() {
    throw FormatError("malformed categorial type '" + text_ + "'");
  }
  void Skip() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }
  CatType ParsePrimary() {
    Skip();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      CatType c = ParseExpr();
      Skip();
      if (pos_ >= text_.size() || text_[pos_] != ')') Fail();
      ++pos_;
      return c;
    }
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) Fail();
    return CatType::Atom(text_.substr(start, pos_ - start));
  }
  // Left-associative: a/b/c == (a/b)/c.
  CatType ParseExpr() {
    CatType left = ParsePrimary();
    while (true) {
      Skip();
      if (pos_ >= text_.size() || (text_[pos_] != '/' && text_[pos_] != '\\')) {
        return left;
      }
      char dir = text_[pos_++];
      CatType right = ParsePrimary();
      left = CatType::Functor(std::move(left), dir, std::move(right));
    }
  }

  const std::string& text_;
  size_t pos_ = 0;
};

struct Item {
  CatType cat;
  FeatureStructure fs;
  int consumed = 0;
  std::vector<std::pair<size_t, std::string>> anchors;
  std::string key;
};

std::string ItemKey(const CatType& cat, const FeatureStructure& fs) {
  return cat.ToString() + "|" + fs.Canonical();
}

std::optional<Item> Apply(const Item& functor, const Item& argument) {
  const std::string arg_name = "arg" + std::to_string(functor.consumed + 1);
  FeatureStructure arg_fs =
      argument.fs.Restrict({"morphology", "syntax", "semantics"})
          .Embed(arg_name);
  auto unified = Unify(functor.fs, arg_fs);
  if (!unified) return std::nullopt;
  Item out;
  out.cat = functor.cat.result();
  out.fs = unified->Without(arg_name);
  out.consumed = functor.consumed + 1;
  out.anchors = functor.anchors;
  out.anchors.insert(out.anchors.end(), argument.anchors.begin(),
                     argument.anchors.end());
  std::sort(out.anchors.begin(), out.anchors.end());
  out.key = ItemKey(out.cat, out.fs);
  return out;
}

bool HasTypedSemantics(const Item& item) {
  return item.fs.AtomAt("semantics.type").has_value();
}

}  // namespace

CatType CatType::Atom(std::string name) {
  CatType c;
  c.atom_ = std::move(name);
  return c;
}

CatType CatType::Functor(CatType result, char direction, CatType argument) {
  if (direction != '/' && direction != '\\') {
    throw std::invalid_argument("functor direction must be / or \\");
  }
  CatType c;
  c.direction_ = direction;
  c.result_ = std::make_shared<const CatType>(std::move(result));
  c.argument_ = std::make_shared<const CatType>(std::move(argument));
  return c;
}

CatType CatType::Parse(const std::string& text) {
  return CatParser(text).ParseAll();
}

std::string CatType::ToString() const {
  if (is_atom()) return atom_;
  auto wrap = [](const CatType& c) {
    return c.is_atom() ? c.ToString() : "(" + c.ToString() + ")";
  };
  return wrap(*result_) + direction_ + wrap(*argument_);
}

void Grammar::AddEntry(LexEntry entry) {
  if (entry.cat.Arity() > 2) {
    throw FormatError("entry '" + entry.form + "' has arity above 2");
  }
  for (const char* attr : {"morphology", "syntax", "semantics"}) {
    if (!entry.fs.Get(attr)) {
      throw FormatError("entry '" + entry.form + "' lacks attribute " + attr);
    }
  }
  entries_.emplace(entry.form, std::move(entry));
}

void Grammar::AddTemplate(const std::string& category, const std::string& cat,
                          const std::string& fs_text) {
  LexEntry probe{"x", CatType::Parse(cat),
                 FeatureStructure::Parse(ReplaceAll(fs_text, "$form", "x"))};
  if (probe.cat.Arity() > 2 || !probe.fs.Get("semantics")) {
    throw FormatError("invalid template for category '" + category + "'");
  }
  templates_[category] = Template{cat, fs_text};
}

void Grammar::AddOovEntry(const std::string& category, LexEntry entry) {
  if (!entry.fs.Get("semantics")) {
    throw FormatError("oov entry for '" + category + "' lacks semantics");
  }
  oov_entries_[category].push_back(std::move(entry));
}

const std::vector<LexEntry>& Grammar::OovEntries(
    const std::string& category) const {
  static const std::vector<LexEntry> kNone;
  auto it = oov_entries_.find(category);
  return it == oov_entries_.end() ? kNone : it->second;
}

size_t Grammar::NumEntries() const {
  size_t n = entries_.size() + templates_.size();
  for (const auto& [c, v] : oov_entries_) n += v.size();
  return n;
}

std::vector<LexEntry> Grammar::Lookup(const Token& token,
                                      const CategoryLexicon* lex) const {
  std::vector<LexEntry> out;
  if (token.is_oov()) {
    if (token.category.empty()) return out;
    bool allowed = oov_allow_ ? oov_allow_->count(token.category) != 0
                              : oov_entries_.count(token.category) != 0;
    if (allowed) out = OovEntries(token.category);
    return out;
  }
  auto [lo, hi] = entries_.equal_range(token.word);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  std::string category = token.category;
  if (category.empty() && lex) {
    if (const std::string* c = lex->CategoryOf(token.word)) category = *c;
  }
  auto t = templates_.find(category);
  if (t != templates_.end()) {
    try {
      out.push_back(LexEntry{
          token.word, CatType::Parse(t->second.cat),
          FeatureStructure::Parse(
              ReplaceAll(t->second.fs_text, "$form", token.word))});
    } catch (const FormatError&) {
      // The word cannot be written as an atom; leave it unanalysed.
    }
  }
  return out;
}

Grammar Grammar::Read(std::istream& in) {
  Grammar g;
  std::string line, kind, name, cat, fs_text;
  bool in_block = false, in_fs = false;
  int lineno = 0, block_line = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (!in_block) {
      std::istringstream ls(t);
      std::string extra;
      if (!(ls >> kind >> name) || (ls >> extra) ||
          (kind != "entry" && kind != "template" && kind != "oov")) {
        throw FormatError("expected 'entry|template|oov <name>'" + where);
      }
      in_block = true;
      in_fs = false;
      block_line = lineno;
      cat.clear();
      fs_text.clear();
      continue;
    }
    if (t == "end") {
      const std::string at = " (block at line " + std::to_string(block_line) +
                             ")";
      if (cat.empty() || Trim(fs_text).empty()) {
        throw FormatError("block needs cat: and fs:" + at);
      }
      try {
        if (kind == "template") {
          g.AddTemplate(name, cat, fs_text);
        } else {
          LexEntry e{kind == "oov" ? std::string(kOovCityValue) : name,
                     CatType::Parse(cat), FeatureStructure::Parse(fs_text)};
          if (kind == "oov") {
            if (auto form = e.fs.AtomAt("morphology.form")) e.form = *form;
            g.AddOovEntry(name, std::move(e));
          } else {
            g.AddEntry(std::move(e));
          }
        }
      } catch (const FormatError& e) {
        throw FormatError(e.what() + at);
      }
      in_block = false;
      continue;
    }
    if (!in_fs && t.rfind("cat:", 0) == 0) {
      cat = Trim(t.substr(4));
    } else if (!in_fs && t.rfind("fs:", 0) == 0) {
      in_fs = true;
      fs_text = t.substr(3) + "\n";
    } else if (in_fs) {
      fs_text += line + "\n";
    } else {
      throw FormatError("unexpected line in block" + where);
    }
  }
  if (in_block) throw FormatError("unterminated grammar block at end of file");
  return g;
}

Grammar Grammar::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grammar file " + path);
  try {
    return Read(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string SemFrame::Type() const {
  return semantics.AtomAt("type").value_or("");
}

std::string SemFrame::ToString() const {
  return "semantics: " + semantics.ToString();
}

ParseResult SemanticParser::Parse(std::span<const Token> tokens) const {
  const size_t n = tokens.size();
  ParseResult result;
  if (n == 0) return result;

  // chart[i][len-1] holds the items spanning [i, i+len).
  std::vector<std::vector<std::vector<Item>>> chart(
      n, std::vector<std::vector<Item>>(n));
  auto add = [](std::vector<Item>& cell, Item item) {
    if (cell.size() >= kMaxItemsPerCell) return;
    for (const auto& other : cell) {
      if (other.key == item.key) return;
    }
    cell.push_back(std::move(item));
  };

  for (size_t i = 0; i < n; ++i) {
    for (auto& entry : grammar_.Lookup(tokens[i], lex_)) {
      Item item;
      item.cat = entry.cat;
      item.fs = entry.fs;
      if (auto sem = entry.fs.Get("semantics")) {
        for (auto& v : sem->AtomsUnder("value")) {
          item.anchors.emplace_back(i, std::move(v));
        }
      }
      item.key = ItemKey(item.cat, item.fs);
      add(chart[i][0], std::move(item));
    }
  }

  for (size_t len = 2; len <= n; ++len) {
    for (size_t i = 0; i + len <= n; ++i) {
      auto& cell = chart[i][len - 1];
      for (size_t k = 1; k < len; ++k) {
        const auto& left_cell = chart[i][k - 1];
        const auto& right_cell = chart[i + k][len - k - 1];
        for (const auto& left : left_cell) {
          for (const auto& right : right_cell) {
            if (!left.cat.is_atom() && left.cat.direction() == '/' &&
                left.cat.argument() == right.cat) {
              if (auto item = Apply(left, right)) add(cell, std::move(*item));
            }
            if (!right.cat.is_atom() && right.cat.direction() == '\\' &&
                right.cat.argument() == left.cat) {
              if (auto item = Apply(right, left)) add(cell, std::move(*item));
            }
          }
        }
      }
    }
  }

  // Best analysis of a span: saturated categories first, then chart order.
  auto best_in = [&](size_t i, size_t len) -> const Item* {
    const Item* best = nullptr;
    for (const auto& item : chart[i][len - 1]) {
      if (!HasTypedSemantics(item)) continue;
      if (!best || (item.cat.is_atom() && !best->cat.is_atom())) best = &item;
    }
    return best;
  };

  size_t i = 0;
  while (i < n) {
    const Item* found = nullptr;
    size_t len = n - i;
    for (; len >= 1; --len) {
      if ((found = best_in(i, len))) break;
    }
    if (!found) {
      ++i;
      continue;
    }
    SemFrame frame;
    frame.semantics = *found->fs.Get("semantics");
    frame.begin = i;
    frame.end = i + len;
    frame.anchors = found->anchors;
    if (i == 0 && len == n && found->cat.is_atom()) result.complete = true;
    result.frames.push_back(std::move(frame));
    i += len;
  }
  return result;
}

ConceptList ExtractConcepts(std::span<const SemFrame> frames,
                            const std::optional<std::string>& hint) {
  static const std::pair<const char*, const char*> kRoles[] = {
      {"thegoal", "goalcity"},         {"thesource", "sourcecity"},
      {"thedate", "date"},             {"thedeparture", "sourcetime"},
      {"thearrival", "goaltime"}};
  const bool city_hint =
      hint && (*hint == "goalcity" || *hint == "sourcecity");
  const bool time_hint =
      hint && (*hint == "goaltime" || *hint == "sourcetime");

  ConceptList out;
  for (const auto& frame : frames) {
    const FeatureStructure& sem = frame.semantics;
    const std::string type = frame.Type();
    ConceptList found;
    if (type == "go") {
      for (const auto& [role, name] : kRoles) {
        if (auto v = sem.AtomAt(std::string(role) + ".value")) {
          found.push_back({name, *v});
        }
      }
    } else if (type == "location" || type == "city") {
      auto v = sem.AtomAt(type == "location" ? "thecity.value" : "value");
      if (v) found.push_back({city_hint ? *hint : "goalcity", *v});
    } else if (type == "date") {
      if (auto v = sem.AtomAt("value")) found.push_back({"date", *v});
    } else if (type == "time") {
      if (auto v = sem.AtomAt("value")) {
        found.push_back({time_hint ? *hint : "sourcetime", *v});
      }
    } else if (type == "marker") {
      if (auto v = sem.AtomAt("value")) found.push_back({"marker", *v});
    }

    std::vector<bool> used(frame.anchors.size(), false);
    std::vector<std::pair<size_t, size_t>> order;  // (position, index)
    for (size_t c = 0; c < found.size(); ++c) {
      size_t pos = frame.end;
      for (size_t a = 0; a < frame.anchors.size(); ++a) {
        if (!used[a] && frame.anchors[a].second == found[c].value) {
          used[a] = true;
          pos = frame.anchors[a].first;
          break;
        }
      }
      order.emplace_back(pos, c);
    }
    std::stable_sort(order.begin(), order.end());
    for (const auto& [pos, c] : order) out.push_back(found[c]);
  }
  return out;
}

std::string ToString(const ConceptList& concepts) {
  std::string s;
  for (size_t i = 0; i < concepts.size(); ++i) {
    if (i) s += ' ';
    s += concepts[i].name + "=" + concepts[i].value;
  }
  return s;
}

ConceptList ParseConceptList(const std::string& text) {
  ConceptList out;
  std::istringstream is(text);
  std::string pair;
  while (is >> pair) {
    size_t eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
      throw FormatError("malformed concept '" + pair + "'");
    }
    Concept c{pair.substr(0, eq), pair.substr(eq + 1)};
    if (!ConceptNames().count(c.name)) {
      throw FormatError("unknown concept name '" + c.name + "'");
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::map<std::string, ConceptList> ReadConceptFile(std::istream& in) {
  std::map<std::string, ConceptList> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("missing tab in concept file at line " +
                        std::to_string(lineno));
    }
    try {
      out[line.substr(0, tab)] = ParseConceptList(line.substr(tab + 1));
    } catch (const FormatError& e) {
      throw FormatError(e.what() + (" at line " + std::to_string(lineno)));
    }
  }
  return out;
}

std::map<std::string, ConceptList> LoadConceptFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open concept file " + path);
  try {
    return ReadConceptFile(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace oovdial
