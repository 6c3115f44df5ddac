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

#include "oovdial/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "oovdial/random.h"

namespace oovdial {

namespace {

std::string Lower(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<std::string> Tokenize(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (is >> tok) tokens.push_back(Lower(tok));
  return tokens;
}

void Corpus::Add(Utterance utt) {
  if (utt.tokens.empty()) {
    throw FormatError("empty utterance '" + utt.id + "'");
  }
  if (index_.count(utt.id)) {
    throw FormatError("duplicate utterance id '" + utt.id + "'");
  }
  index_.emplace(utt.id, utterances_.size());
  utterances_.push_back(std::move(utt));
}

size_t Corpus::NumTokens() const {
  size_t n = 0;
  for (const auto& u : utterances_) n += u.tokens.size();
  return n;
}

Corpus ReadCorpus(std::istream& in, const std::string& name) {
  Corpus corpus(name);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = StripCr(line);
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("missing tab at line " + std::to_string(lineno));
    }
    Utterance utt{line.substr(0, tab), Tokenize(line.substr(tab + 1))};
    if (utt.id.empty()) {
      throw FormatError("empty utterance id at line " + std::to_string(lineno));
    }
    if (utt.tokens.empty()) {
      throw FormatError("empty utterance at line " + std::to_string(lineno));
    }
    try {
      corpus.Add(std::move(utt));
    } catch (const FormatError& e) {
      throw FormatError(std::string(e.what()) + " at line " +
                        std::to_string(lineno));
    }
  }
  return corpus;
}

Corpus LoadCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path);
  return ReadCorpus(in, path);
}

void WriteCorpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& utt : corpus) {
    out << utt.id << '\t';
    for (size_t i = 0; i < utt.tokens.size(); ++i) {
      if (i) out << ' ';
      out << utt.tokens[i];
    }
    out << '\n';
  }
}

void CategoryLexicon::DeclareCategory(const std::string& name, bool open) {
  auto it = categories_.find(name);
  if (it == categories_.end()) {
    categories_.emplace(name, CategoryInfo{name, open, std::nullopt});
    return;
  }
  if (it->second.open != open) {
    throw FormatError("inconsistent open/closed flag for category '" + name +
                      "'");
  }
}

void CategoryLexicon::AddWord(const std::string& word,
                              const std::string& category) {
  if (!categories_.count(category)) {
    throw FormatError("undeclared category '" + category + "'");
  }
  auto [it, inserted] = entries_.emplace(word, category);
  if (!inserted && it->second != category) {
    throw FormatError("duplicate word '" + word + "' in categories '" +
                      it->second + "' and '" + category + "'");
  }
}

const std::string* CategoryLexicon::CategoryOf(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

const CategoryInfo& CategoryLexicon::Info(const std::string& category) const {
  auto it = categories_.find(category);
  if (it == categories_.end()) {
    throw std::invalid_argument("unknown category '" + category + "'");
  }
  return it->second;
}

void CategoryLexicon::SetOovProbability(const std::string& category,
                                        double p) {
  auto it = categories_.find(category);
  if (it == categories_.end()) {
    throw std::invalid_argument("unknown category '" + category + "'");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("oov probability out of range for '" +
                                category + "'");
  }
  if (!it->second.open && p != 0.0) {
    throw std::invalid_argument("closed category '" + category +
                                "' must have oov probability 0");
  }
  it->second.oov_probability = p;
}

std::vector<std::string> CategoryLexicon::WordsIn(
    const std::string& category) const {
  std::vector<std::string> words;
  for (const auto& [w, c] : entries_) {
    if (c == category) words.push_back(w);
  }
  return words;
}

CategoryLexicon ReadLexicon(std::istream& in) {
  CategoryLexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = StripCr(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = SplitTabs(line);
    auto where = " at line " + std::to_string(lineno);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw FormatError("expected word<TAB>category<TAB>open|closed" + where);
    }
    bool open;
    if (fields[2] == "open") {
      open = true;
    } else if (fields[2] == "closed") {
      open = false;
    } else {
      throw FormatError("bad open/closed flag '" + fields[2] + "'" + where);
    }
    try {
      lex.DeclareCategory(fields[1], open);
      if (fields[0] != "<none>") lex.AddWord(Lower(fields[0]), fields[1]);
    } catch (const FormatError& e) {
      throw FormatError(e.what() + where);
    }
  }
  return lex;
}

CategoryLexicon LoadLexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file " + path);
  try {
    return ReadLexicon(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteLexicon(const CategoryLexicon& lex, std::ostream& out) {
  std::map<std::string, bool> used;
  for (const auto& [w, c] : lex.entries()) {
    out << w << '\t' << c << '\t'
        << (lex.Info(c).open ? "open" : "closed") << '\n';
    used[c] = true;
  }
  for (const auto& [c, info] : lex.categories()) {
    if (!used.count(c)) {
      out << "<none>\t" << c << '\t' << (info.open ? "open" : "closed")
          << '\n';
    }
  }
}

std::string ToString(const Token& token) {
  if (!token.is_oov()) return token.word;
  return token.category.empty() ? "<OOV>" : "<OOV:" + token.category + ">";
}

std::string ToString(std::span<const Token> tokens) {
  std::string s;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += ToString(tokens[i]);
  }
  return s;
}

std::vector<Token> OovTag(const Utterance& utt, const CategoryLexicon& lex,
                          std::span<const std::string> reference_categories) {
  if (!reference_categories.empty() &&
      reference_categories.size() != utt.tokens.size()) {
    throw std::invalid_argument("reference category list length mismatch");
  }
  std::vector<Token> out;
  out.reserve(utt.tokens.size());
  for (size_t i = 0; i < utt.tokens.size(); ++i) {
    const auto& w = utt.tokens[i];
    if (const std::string* c = lex.CategoryOf(w)) {
      out.push_back(Token::Known(w, *c));
    } else {
      out.push_back(Token::Oov(
          reference_categories.empty() ? "" : reference_categories[i], w));
    }
  }
  return out;
}

std::vector<Token> OovTag(std::span<const Token> tokens,
                          const CategoryLexicon& lex) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (const std::string* c = lex.CategoryOf(t.word)) {
      out.push_back(Token::Known(t.word, *c));
    } else if (t.is_oov()) {
      out.push_back(t);
    } else {
      out.push_back(Token::Oov(t.category, t.word));
    }
  }
  return out;
}

std::vector<Token> OovTagWithReference(const Utterance& utt,
                                       const CategoryLexicon& lex,
                                       const CategoryLexicon& reference) {
  std::vector<std::string> cats;
  cats.reserve(utt.tokens.size());
  for (const auto& w : utt.tokens) {
    const std::string* c = reference.CategoryOf(w);
    cats.push_back(c ? *c : std::string());
  }
  return OovTag(utt, lex, cats);
}

std::pair<Corpus, Corpus> Split(const Corpus& corpus, double test_fraction,
                                uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  const size_t n = corpus.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.Below(i)]);
  }
  const auto n_test = static_cast<size_t>(std::llround(test_fraction * n));
  std::vector<bool> is_test(n, false);
  for (size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  Corpus train(corpus.name() + ".train"), test(corpus.name() + ".test");
  for (size_t i = 0; i < n; ++i) {
    (is_test[i] ? test : train).Add(corpus.utterances()[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace oovdial
