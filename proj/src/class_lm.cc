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

#include "oovdial/class_lm.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace oovdial {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr int kFormatVersion = 1;
constexpr const char kFormatName[] = "oovdial-class-bigram-lm";

double SafeLog(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

ClassBigramLM ClassBigramLM::FromTables(
    std::vector<CategoryTables> categories,
    std::vector<std::vector<double>> transition) {
  ClassBigramLM lm;
  const size_t k = categories.size() + 1;
  if (transition.size() != k) {
    throw std::invalid_argument("transition table has wrong row count");
  }
  lm.names_.push_back(kBoundary);
  lm.open_.push_back(false);
  lm.oov_prob_.push_back(0.0);
  lm.emission_.emplace_back();
  for (auto& cat : categories) {
    if (cat.name.empty() || cat.name == kBoundary) {
      throw std::invalid_argument("invalid category name '" + cat.name + "'");
    }
    if (!(cat.oov_probability >= 0.0 && cat.oov_probability <= 1.0)) {
      throw std::invalid_argument("oov probability out of range for '" +
                                  cat.name + "'");
    }
    if (!cat.open && cat.oov_probability != 0.0) {
      throw std::invalid_argument("closed category '" + cat.name +
                                  "' has oov mass");
    }
    double sum = cat.oov_probability;
    for (const auto& [w, p] : cat.emission) {
      if (!(p >= 0.0)) {
        throw std::invalid_argument("negative emission in '" + cat.name + "'");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
      throw std::invalid_argument("emission of '" + cat.name +
                                  "' does not sum to 1");
    }
    lm.names_.push_back(cat.name);
    lm.open_.push_back(cat.open);
    lm.oov_prob_.push_back(cat.oov_probability);
    lm.emission_.push_back(std::move(cat.emission));
  }
  for (size_t i = 0; i < k; ++i) {
    if (transition[i].size() != k) {
      throw std::invalid_argument("transition table has wrong column count");
    }
    double sum = 0.0;
    for (double p : transition[i]) {
      if (!(p >= 0.0)) throw std::invalid_argument("negative transition");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
      throw std::invalid_argument("transition row of '" + lm.names_[i] +
                                  "' does not sum to 1");
    }
  }
  lm.transition_ = std::move(transition);
  lm.Finalize();
  return lm;
}

void ClassBigramLM::Finalize() {
  index_.clear();
  vocab_.clear();
  for (size_t c = 0; c < names_.size(); ++c) {
    if (!index_.emplace(names_[c], c).second) {
      throw std::invalid_argument("duplicate category '" + names_[c] + "'");
    }
    for (const auto& [w, p] : emission_[c]) {
      if (!vocab_.emplace(w, c).second) {
        throw std::invalid_argument("word '" + w +
                                    "' emitted by two categories");
      }
    }
  }
  log_oov_.resize(names_.size());
  for (size_t c = 0; c < names_.size(); ++c) log_oov_[c] = SafeLog(oov_prob_[c]);
  log_transition_ = transition_;
  for (auto& row : log_transition_) {
    for (double& p : row) p = SafeLog(p);
  }
}

size_t ClassBigramLM::CategoryIndex(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::invalid_argument("unknown category '" + name + "'");
  }
  return it->second;
}

int ClassBigramLM::WordCategory(const std::string& word) const {
  auto it = vocab_.find(word);
  return it == vocab_.end() ? -1 : static_cast<int>(it->second);
}

double ClassBigramLM::Emission(size_t c, const std::string& word) const {
  auto it = emission_[c].find(word);
  return it == emission_[c].end() ? 0.0 : it->second;
}

double ClassBigramLM::LogEmission(size_t c, const std::string& word) const {
  return SafeLog(Emission(c, word));
}

double ClassBigramLM::LogClosedEmission(size_t c,
                                        const std::string& word) const {
  auto it = emission_[c].find(word);
  if (it == emission_[c].end()) return SafeLog(0.0);
  const double known = 1.0 - oov_prob_[c];
  if (known > kNormTolerance) return SafeLog(it->second / known);
  return -std::log(static_cast<double>(emission_[c].size()));
}

size_t ClassBigramLM::TokenCategory(const Token& token) const {
  if (token.is_oov()) {
    if (token.category.empty()) {
      throw std::invalid_argument("OOV token without category");
    }
    return CategoryIndex(token.category);
  }
  int c = WordCategory(token.word);
  if (c < 0) {
    throw std::invalid_argument("word '" + token.word +
                                "' is not in the LM vocabulary");
  }
  return static_cast<size_t>(c);
}

double ClassBigramLM::LogTokenScore(size_t prev, const Token& token) const {
  size_t c = TokenCategory(token);
  double emit = token.is_oov() ? log_oov_[c] : LogEmission(c, token.word);
  return log_transition_[prev][c] + emit;
}

double ClassBigramLM::ScoreSequence(std::span<const Token> tokens) const {
  size_t prev = 0;
  double total = 0.0;
  for (const auto& t : tokens) {
    total += LogTokenScore(prev, t);
    prev = TokenCategory(t);
  }
  return total + log_transition_[prev][0];
}

std::vector<ClassBigramLM::RankedCategory> ClassBigramLM::BestCategoryForOov(
    const std::string& left_category,
    const std::string& right_category) const {
  const size_t left = CategoryIndex(left_category);
  const size_t right = CategoryIndex(right_category);
  std::vector<RankedCategory> ranked;
  for (size_t c = 1; c < names_.size(); ++c) {
    if (!open_[c] || oov_prob_[c] <= 0.0) continue;
    ranked.push_back({names_[c], transition_[left][c] * oov_prob_[c] *
                                     transition_[c][right]});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCategory& a, const RankedCategory& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.category < b.category;
                   });
  return ranked;
}

void ClassBigramLM::Write(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  auto cats = nlohmann::ordered_json::array();
  for (size_t c = 1; c < names_.size(); ++c) {
    nlohmann::ordered_json cat;
    cat["name"] = names_[c];
    cat["open"] = static_cast<bool>(open_[c]);
    cat["oov_probability"] = oov_prob_[c];
    nlohmann::ordered_json em = nlohmann::ordered_json::object();
    for (const auto& [w, p] : emission_[c]) em[w] = p;
    cat["emission"] = std::move(em);
    cats.push_back(std::move(cat));
  }
  doc["categories"] = std::move(cats);
  doc["transition"] = transition_;
  out << doc.dump(1) << '\n';
}

ClassBigramLM ClassBigramLM::Read(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("LM file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != kFormatName) {
      throw FormatError("not a class bigram LM document");
    }
    if (doc.at("version") != kFormatVersion) {
      throw FormatError("unsupported LM version " +
                        doc.at("version").dump());
    }
    std::vector<CategoryTables> cats;
    for (const auto& jc : doc.at("categories")) {
      CategoryTables t;
      t.name = jc.at("name").get<std::string>();
      t.open = jc.at("open").get<bool>();
      t.oov_probability = jc.at("oov_probability").get<double>();
      for (const auto& [w, p] : jc.at("emission").items()) {
        t.emission.emplace(w, p.get<double>());
      }
      cats.push_back(std::move(t));
    }
    auto transition =
        doc.at("transition").get<std::vector<std::vector<double>>>();
    return FromTables(std::move(cats), std::move(transition));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed LM document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("inconsistent LM document: ") + e.what());
  }
}

ClassBigramLM ClassBigramLM::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open LM file " + path);
  try {
    return Read(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

ClassBigramLM TrainLm(const Corpus& train, const CategoryLexicon& lex,
                      const LmTrainingOptions& options) {
  std::vector<std::string> names;
  std::map<std::string, size_t> index;
  for (const auto& [name, info] : lex.categories()) {
    if (!info.oov_probability) {
      throw std::invalid_argument("category '" + name +
                                  "' has no estimated oov probability");
    }
    index.emplace(name, names.size() + 1);
    names.push_back(name);
  }
  const size_t k = names.size() + 1;

  std::vector<std::vector<double>> bigram(k, std::vector<double>(k, 0.0));
  std::vector<std::map<std::string, double>> word_counts(k);
  std::vector<double> category_tokens(k, 0.0);
  for (const auto& utt : train) {
    size_t prev = 0;
    for (const auto& w : utt.tokens) {
      const std::string* c = lex.CategoryOf(w);
      if (!c) {
        throw std::invalid_argument("training token '" + w +
                                    "' has no category in the lexicon");
      }
      size_t ci = index.at(*c);
      bigram[prev][ci] += 1.0;
      word_counts[ci][w] += 1.0;
      category_tokens[ci] += 1.0;
      prev = ci;
    }
    bigram[prev][0] += 1.0;
  }

  // Witten-Bell: interpolate each row with a category unigram which is
  // itself Witten-Bell interpolated with the uniform distribution.
  std::vector<double> successor(k, 0.0);
  double total = 0.0;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) successor[j] += bigram[i][j];
  }
  double seen_types = 0.0;
  for (size_t j = 0; j < k; ++j) {
    total += successor[j];
    if (successor[j] > 0) seen_types += 1.0;
  }
  std::vector<double> unigram(k, 1.0 / k);
  if (total > 0) {
    for (size_t j = 0; j < k; ++j) {
      unigram[j] = (successor[j] + seen_types / k) / (total + seen_types);
    }
  }
  std::vector<std::vector<double>> transition(k, std::vector<double>(k));
  for (size_t i = 0; i < k; ++i) {
    double row = 0.0, types = 0.0;
    for (size_t j = 0; j < k; ++j) {
      row += bigram[i][j];
      if (bigram[i][j] > 0) types += 1.0;
    }
    for (size_t j = 0; j < k; ++j) {
      transition[i][j] = row > 0 ? (bigram[i][j] + types * unigram[j]) /
                                       (row + types)
                                 : unigram[j];
    }
  }

  std::vector<ClassBigramLM::CategoryTables> cats;
  for (size_t ci = 1; ci < k; ++ci) {
    const CategoryInfo& info = lex.Info(names[ci - 1]);
    ClassBigramLM::CategoryTables t;
    t.name = info.name;
    t.open = info.open;
    t.oov_probability = *info.oov_probability;
    const auto words = lex.WordsIn(info.name);
    const double in_vocab_mass = 1.0 - t.oov_probability;
    if (words.empty()) {
      if (in_vocab_mass > 0.0) {
        throw std::invalid_argument("category '" + info.name +
                                    "' has no words but in-vocabulary mass");
      }
    } else {
      const double k_add = options.emission_add_k;
      const double denom =
          category_tokens[ci] + k_add * static_cast<double>(words.size());
      for (const auto& w : words) {
        auto it = word_counts[ci].find(w);
        double n = it == word_counts[ci].end() ? 0.0 : it->second;
        double rel = denom > 0 ? (n + k_add) / denom : 1.0 / words.size();
        t.emission.emplace(w, in_vocab_mass * rel);
      }
    }
    cats.push_back(std::move(t));
  }
  return ClassBigramLM::FromTables(std::move(cats), std::move(transition));
}

double Perplexity(const ClassBigramLM& lm,
                  std::span<const std::vector<Token>> sentences) {
  double logp = 0.0;
  size_t n = 0;
  for (const auto& s : sentences) {
    logp += lm.ScoreSequence(s);
    n += s.size() + 1;
  }
  if (n == 0) throw std::invalid_argument("perplexity of an empty set");
  return std::exp(-logp / static_cast<double>(n));
}

}  // namespace oovdial
