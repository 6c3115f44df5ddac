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

#ifndef OOVDIAL_CORPUS_H_
#define OOVDIAL_CORPUS_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oovdial {

// Thrown for malformed corpus, lexicon and model files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Utterance {
  std::string id;
  std::vector<std::string> tokens;

  bool operator==(const Utterance&) const = default;
};

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string name) : name_(std::move(name)) {}

  // Rejects empty utterances and duplicate ids.
  void Add(Utterance utt);

  const std::string& name() const { return name_; }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  size_t size() const { return utterances_.size(); }
  bool empty() const { return utterances_.empty(); }
  size_t NumTokens() const;

  auto begin() const { return utterances_.begin(); }
  auto end() const { return utterances_.end(); }

 private:
  std::string name_;
  std::vector<Utterance> utterances_;
  std::map<std::string, size_t> index_;
};

struct CategoryInfo {
  std::string name;
  bool open = false;
  std::optional<double> oov_probability;

  bool operator==(const CategoryInfo&) const = default;
};

// Word to category map plus per-category open/closed status.  Every word
// belongs to exactly one category.
class CategoryLexicon {
 public:
  // Declares a category; re-declaring with a different open flag throws.
  void DeclareCategory(const std::string& name, bool open);
  // Adds a word to an already declared category.  Adding the same word to a
  // different category throws.
  void AddWord(const std::string& word, const std::string& category);

  bool Contains(const std::string& word) const {
    return entries_.count(word) != 0;
  }
  // Category of an in-vocabulary word, nullptr if the word is unknown.
  const std::string* CategoryOf(const std::string& word) const;
  const CategoryInfo& Info(const std::string& category) const;
  bool HasCategory(const std::string& category) const {
    return categories_.count(category) != 0;
  }
  void SetOovProbability(const std::string& category, double p);

  size_t VocabularySize() const { return entries_.size(); }
  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }
  const std::map<std::string, CategoryInfo>& categories() const {
    return categories_;
  }
  // Words of one category, in lexicographic order.
  std::vector<std::string> WordsIn(const std::string& category) const;

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, CategoryInfo> categories_;
};

// A token as seen by the language model, decoder, parser and scorer.
// Known tokens carry the surface word and its lexicon category.  OOV tokens
// carry the (hypothesized or true) category if one is available and, for
// reference data, the surface word that was out of vocabulary.
struct Token {
  enum class Kind { kKnown, kOov };

  Kind kind = Kind::kKnown;
  std::string word;
  std::string category;

  static Token Known(std::string word, std::string category = {}) {
    return Token{Kind::kKnown, std::move(word), std::move(category)};
  }
  static Token Oov(std::string category = {}, std::string surface = {}) {
    return Token{Kind::kOov, std::move(surface), std::move(category)};
  }

  bool is_oov() const { return kind == Kind::kOov; }
  bool operator==(const Token&) const = default;
};

// Renders "word" for known tokens and "<OOV:category>" for OOV tokens.
std::string ToString(const Token& token);
std::string ToString(std::span<const Token> tokens);

Corpus ReadCorpus(std::istream& in, const std::string& name);
Corpus LoadCorpus(const std::string& path);
void WriteCorpus(const Corpus& corpus, std::ostream& out);

CategoryLexicon ReadLexicon(std::istream& in);
CategoryLexicon LoadLexicon(const std::string& path);
// Categories without words are written as `<none>` rows so that a written
// lexicon reads back identically.
void WriteLexicon(const CategoryLexicon& lex, std::ostream& out);

// Tags every token as known or OOV.  `reference_categories`, when non-empty,
// must be parallel to the tokens and supplies true categories for OOV tokens.
std::vector<Token> OovTag(const Utterance& utt, const CategoryLexicon& lex,
                          std::span<const std::string> reference_categories =
                              {});
// Re-tags an already tagged stream.  Idempotent.
std::vector<Token> OovTag(std::span<const Token> tokens,
                          const CategoryLexicon& lex);
// Tags with true categories looked up in a reference lexicon that covers
// words outside the system vocabulary.  Unknown words stay uncategorized.
std::vector<Token> OovTagWithReference(const Utterance& utt,
                                       const CategoryLexicon& lex,
                                       const CategoryLexicon& reference);

// Deterministic disjoint split; both parts keep corpus order.
std::pair<Corpus, Corpus> Split(const Corpus& corpus, double test_fraction,
                                uint64_t seed);

// Lowercases and splits on whitespace.
std::vector<std::string> Tokenize(const std::string& text);

}  // namespace oovdial

#endif  // OOVDIAL_CORPUS_H_
