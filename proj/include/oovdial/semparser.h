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

// Unification categorial grammar parser producing nested type/role
// semantic frames, and the mapping from frames to task concepts.

#ifndef OOVDIAL_SEMPARSER_H_
#define OOVDIAL_SEMPARSER_H_

#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "oovdial/corpus.h"
#include "oovdial/feature_structure.h"

namespace oovdial {

inline constexpr const char kOovCityValue[] = "oov_city";

// Categorial type: an atom (`np`) or a functor `result/arg` (argument to
// the right) or `result\arg` (argument to the left).
class CatType {
 public:
  static CatType Atom(std::string name);
  static CatType Functor(CatType result, char direction, CatType argument);
  // Parses `np`, `vp/ppto`, `(vp\vp)/np`.  Throws FormatError.
  static CatType Parse(const std::string& text);

  bool is_atom() const { return !result_; }
  const std::string& atom() const { return atom_; }
  char direction() const { return direction_; }
  const CatType& result() const { return *result_; }
  const CatType& argument() const { return *argument_; }
  // Number of arguments still to be consumed.
  int Arity() const { return is_atom() ? 0 : 1 + result_->Arity(); }

  std::string ToString() const;
  bool operator==(const CatType& other) const {
    return ToString() == other.ToString();
  }

 private:
  std::string atom_;
  char direction_ = 0;
  std::shared_ptr<const CatType> result_;
  std::shared_ptr<const CatType> argument_;
};

// A lexical sign.  `fs` carries morphology, syntax and semantics; functors
// additionally carry argument patterns `arg1` (consumed first) and `arg2`,
// which share variables with the semantics.
struct LexEntry {
  std::string form;
  CatType cat = CatType::Atom("x");
  FeatureStructure fs;
};

class Grammar {
 public:
  // Block format, one entry per block:
  //   entry <form> | template <category> | oov <category>
  //   cat: <categorial type>
  //   fs:
  //     <feature structure in path: value notation>
  //   end
  // Templates apply to every in-vocabulary word of a lexicon category and
  // may use `$form` for the word.  `oov` entries are retrieved for OOV
  // tokens of the category.
  static Grammar Read(std::istream& in);
  static Grammar Load(const std::string& path);

  void AddEntry(LexEntry entry);
  void AddTemplate(const std::string& category, const std::string& cat,
                   const std::string& fs_text);
  void AddOovEntry(const std::string& category, LexEntry entry);

  // Categories whose OOV tokens are kept; defaults to every category with
  // an `oov` entry.
  void SetOovAllowList(std::set<std::string> categories) {
    oov_allow_ = std::move(categories);
  }

  // Known word: explicit entries for the form plus the template of its
  // category (from the token or the lexicon).  OOV token: the category's
  // `oov` entries when allowed, otherwise nothing.
  std::vector<LexEntry> Lookup(const Token& token,
                               const CategoryLexicon* lex = nullptr) const;

  size_t NumEntries() const;
  const std::vector<LexEntry>& OovEntries(const std::string& category) const;

 private:
  struct Template {
    std::string cat;
    std::string fs_text;
  };
  std::multimap<std::string, LexEntry> entries_;
  std::map<std::string, Template> templates_;
  std::map<std::string, std::vector<LexEntry>> oov_entries_;
  std::optional<std::set<std::string>> oov_allow_;
};

// Semantics of one parsed fragment.  `anchors` pair token positions with
// the value atoms their lexical entries contributed; they fix the surface
// order of concepts.
struct SemFrame {
  FeatureStructure semantics;
  size_t begin = 0;
  size_t end = 0;
  std::vector<std::pair<size_t, std::string>> anchors;

  std::string Type() const;
  // `semantics: (...)`
  std::string ToString() const;
};

struct ParseResult {
  std::vector<SemFrame> frames;
  // True when one analysis spans the whole input.
  bool complete = false;
};

class SemanticParser {
 public:
  SemanticParser(const Grammar& grammar, const CategoryLexicon* lex)
      : grammar_(grammar), lex_(lex) {}

  // Chart parse with forward and backward application.  Falls back to the
  // longest analysable fragments, left to right; tokens without analysis
  // are dropped.  Never throws on token input.
  ParseResult Parse(std::span<const Token> tokens) const;

 private:
  const Grammar& grammar_;
  const CategoryLexicon* lex_;
};

struct Concept {
  std::string name;
  std::string value;

  bool operator==(const Concept&) const = default;
  auto operator<=>(const Concept&) const = default;
};
using ConceptList = std::vector<Concept>;

inline const std::set<std::string>& ConceptNames() {
  static const std::set<std::string> names = {
      "goalcity", "sourcecity", "date", "goaltime", "sourcetime", "marker"};
  return names;
}

// Role mapping: thegoal -> goalcity, thesource -> sourcecity, thedate ->
// date, thedeparture -> sourcetime, thearrival -> goaltime.  Bare city and
// time frames take the hinted parameter when it fits, else goalcity and
// sourcetime.
ConceptList ExtractConcepts(std::span<const SemFrame> frames,
                            const std::optional<std::string>& hint = {});

// `name=value` pairs separated by spaces.
std::string ToString(const ConceptList& concepts);
ConceptList ParseConceptList(const std::string& text);

// Gold concept file: `id<TAB>name=value name=value`.
std::map<std::string, ConceptList> LoadConceptFile(const std::string& path);
std::map<std::string, ConceptList> ReadConceptFile(std::istream& in);

}  // namespace oovdial

#endif  // OOVDIAL_SEMPARSER_H_
