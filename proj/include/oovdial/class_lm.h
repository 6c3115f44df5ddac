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

#ifndef OOVDIAL_CLASS_LM_H_
#define OOVDIAL_CLASS_LM_H_

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "oovdial/corpus.h"

namespace oovdial {

// Category index 0 is the sentence boundary: transitions out of it start a
// sentence, transitions into it end one.
inline constexpr const char kBoundary[] = "<s>";

// Class bigram model.  P(w | history) = P(c(w) | c_prev) * P(w | c(w)), and
// every category reserves P(OOV | c) of its emission mass for unseen words.
class ClassBigramLM {
 public:
  struct CategoryTables {
    std::string name;
    bool open = false;
    double oov_probability = 0.0;
    // In-vocabulary emission probabilities; together with oov_probability
    // they sum to one.
    std::map<std::string, double> emission;
  };

  ClassBigramLM() = default;

  // Builds a model from explicit tables; `categories` excludes the boundary
  // and `transition` is (K+1)x(K+1) with the boundary at index 0.  Checks
  // normalization to 1e-9 and throws std::invalid_argument on violations.
  static ClassBigramLM FromTables(std::vector<CategoryTables> categories,
                                  std::vector<std::vector<double>> transition);

  // Number of categories including the boundary.
  size_t NumCategories() const { return names_.size(); }
  const std::string& CategoryName(size_t c) const { return names_[c]; }
  // Index of a category name; throws for unknown names.
  size_t CategoryIndex(const std::string& name) const;
  bool IsOpen(size_t c) const { return open_[c]; }
  double OovProbability(size_t c) const { return oov_prob_[c]; }

  double Transition(size_t from, size_t to) const {
    return transition_[from][to];
  }
  double LogTransition(size_t from, size_t to) const {
    return log_transition_[from][to];
  }

  // Category of an in-vocabulary word, or -1.
  int WordCategory(const std::string& word) const;
  // Emission P(w | c) for an in-vocabulary word, 0 if absent from c.
  double Emission(size_t c, const std::string& word) const;
  double LogEmission(size_t c, const std::string& word) const;
  double LogOovEmission(size_t c) const { return log_oov_[c]; }
  // Emission of a closed-vocabulary model: in-vocabulary mass renormalised
  // to 1, uniform over the category's words when it is all OOV mass.
  double LogClosedEmission(size_t c, const std::string& word) const;
  const std::map<std::string, double>& Emissions(size_t c) const {
    return emission_[c];
  }

  // Category and log(transition * emission) of one token following a token
  // of category `prev`.  Known words must be in vocabulary and OOV tokens
  // must name a category; violations throw std::invalid_argument.
  size_t TokenCategory(const Token& token) const;
  double LogTokenScore(size_t prev, const Token& token) const;

  // Natural-log probability of a full sentence, boundaries included.
  double ScoreSequence(std::span<const Token> tokens) const;

  struct RankedCategory {
    std::string category;
    double score = 0.0;  // P(c | left) * P(OOV | c) * P(right | c)
  };
  // Open categories with non-zero OOV mass ranked for an OOV token between
  // the given context categories.  Ties are ordered by category name.
  std::vector<RankedCategory> BestCategoryForOov(
      const std::string& left_category,
      const std::string& right_category) const;

  // Versioned JSON document.
  void Write(std::ostream& out) const;
  static ClassBigramLM Read(std::istream& in);
  static ClassBigramLM Load(const std::string& path);

 private:
  void Finalize();

  std::vector<std::string> names_;
  std::map<std::string, size_t> index_;
  std::vector<bool> open_;
  std::vector<double> oov_prob_;
  std::vector<double> log_oov_;
  std::vector<std::vector<double>> transition_;
  std::vector<std::vector<double>> log_transition_;
  std::vector<std::map<std::string, double>> emission_;
  std::map<std::string, size_t> vocab_;
};

struct LmTrainingOptions {
  // Additive constant for in-vocabulary emission counts; 0 disables
  // smoothing.
  double emission_add_k = 0.5;
};

// Trains transitions with Witten-Bell smoothing and emissions with add-k
// smoothing over each category's lexicon words.  Every category must carry
// an OOV probability (see EstimateAll) and every training token must be in
// the lexicon.
ClassBigramLM TrainLm(const Corpus& train, const CategoryLexicon& lex,
                      const LmTrainingOptions& options = {});

// exp(-mean log-probability per token, sentence ends counted as tokens).
double Perplexity(const ClassBigramLM& lm,
                  std::span<const std::vector<Token>> sentences);

}  // namespace oovdial

#endif  // OOVDIAL_CLASS_LM_H_
