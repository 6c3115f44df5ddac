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

#include "oovdial/lattice.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "oovdial/random.h"

namespace oovdial {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Ranges of simulated acoustic log-likelihoods.
constexpr double kTrueScoreMax = 0.5;
constexpr double kCompetitorLo = 0.8;
constexpr double kCompetitorHi = 3.0;
constexpr double kDemoteLo = 0.05;
constexpr double kDemoteHi = 0.8;
// Competitors of an OOV word score worse the further they are spelled
// from it: base + scale * normalised distance + jitter.
constexpr double kOovCompetitorBase = 0.5;
constexpr double kOovDistanceScale = 6.0;
constexpr double kOovJitter = 1.0;

double OovCompetitorScore(const std::string& spoken, const std::string& rival,
                          Rng& rng) {
  const double len = static_cast<double>(std::max(spoken.size(), rival.size()));
  const double d = len > 0 ? EditDistance(spoken, rival) / len : 0.0;
  return -(kOovCompetitorBase + kOovDistanceScale * d +
           rng.Uniform(0.0, kOovJitter));
}

// Nearest lexicon words by edit distance, ties by word.  Results are cached
// per (word, category restriction).
class ConfusableIndex {
 public:
  explicit ConfusableIndex(const CategoryLexicon& lex) : lex_(lex) {}

  const std::vector<std::string>& Nearest(const std::string& word,
                                          const std::string* category,
                                          size_t n) {
    std::string key = (category ? *category : std::string("*")) + '\t' +
                      std::to_string(n) + '\t' + word;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<std::pair<size_t, std::string>> scored;
    for (const auto& [w, c] : lex_.entries()) {
      if (w == word || (category && c != *category)) continue;
      scored.emplace_back(EditDistance(word, w), w);
    }
    const size_t take = std::min(n, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + take, scored.end());
    std::vector<std::string> out;
    for (size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
    return cache_[key] = std::move(out);
  }

 private:
  const CategoryLexicon& lex_;
  std::unordered_map<std::string, std::vector<std::string>> cache_;
};

Lattice CorruptWith(const Utterance& utt, const CategoryLexicon& lex,
                    const NoiseModel& noise, ConfusableIndex& index) {
  uint64_t h = HashString(utt.id);
  for (const auto& w : utt.tokens) h = SplitMix64(h ^ HashString(w));
  Rng rng(SplitMix64(noise.seed) ^ h);

  const size_t k = static_cast<size_t>(noise.confusables_per_token);
  std::vector<LatticeEdge> edges;
  for (size_t slot = 0; slot < utt.tokens.size(); ++slot) {
    const std::string& word = utt.tokens[slot];
    const int from = static_cast<int>(slot), to = from + 1;
    std::vector<LatticeEdge> slot_edges;
    if (const std::string* cat = lex.CategoryOf(word)) {
      std::vector<std::string> rivals = index.Nearest(word, cat, k);
      if (rivals.size() < k) {
        for (const auto& w : index.Nearest(word, nullptr, 2 * k)) {
          if (rivals.size() >= k) break;
          if (std::find(rivals.begin(), rivals.end(), w) == rivals.end()) {
            rivals.push_back(w);
          }
        }
      }
      double true_score = -rng.Uniform(0.0, kTrueScoreMax);
      std::vector<double> rival_scores;
      for (size_t i = 0; i < rivals.size(); ++i) {
        rival_scores.push_back(-rng.Uniform(kCompetitorLo, kCompetitorHi));
      }
      if (!rivals.empty() && rng.Bernoulli(noise.p_sub)) {
        size_t r = rng.Below(rivals.size());
        true_score = rival_scores[r] - rng.Uniform(kDemoteLo, kDemoteHi);
      }
      slot_edges.push_back({from, to, word, true_score});
      for (size_t i = 0; i < rivals.size(); ++i) {
        slot_edges.push_back({from, to, rivals[i], rival_scores[i]});
      }
    } else {
      slot_edges.push_back({from, to, "", noise.oov_flat_logprob});
      for (const auto& w : index.Nearest(word, nullptr, k)) {
        slot_edges.push_back({from, to, w, OovCompetitorScore(word, w, rng)});
      }
    }
    std::sort(slot_edges.begin(), slot_edges.end(),
              [](const LatticeEdge& a, const LatticeEdge& b) {
                return a.word < b.word;
              });
    for (auto& e : slot_edges) edges.push_back(std::move(e));
  }
  return Lattice(static_cast<int>(utt.tokens.size()) + 1, std::move(edges));
}

std::string FormatScore(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

size_t EditDistance(const std::string& a, const std::string& b) {
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

void Lattice::Validate() const {
  if (num_nodes_ < 1) throw std::invalid_argument("lattice has no nodes");
  std::vector<std::vector<int>> succ(num_nodes_), pred(num_nodes_);
  for (size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.from < 0 || e.to >= num_nodes_ || e.from >= e.to) {
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  " breaks topological node order");
    }
    if (!(e.acoustic_logprob <= 0.0) || std::isinf(e.acoustic_logprob)) {
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  " has an invalid acoustic score");
    }
    succ[e.from].push_back(e.to);
    pred[e.to].push_back(e.from);
  }
  std::vector<bool> fwd(num_nodes_, false), bwd(num_nodes_, false);
  fwd[0] = true;
  for (int v = 0; v < num_nodes_; ++v) {
    if (!fwd[v]) continue;
    for (int w : succ[v]) fwd[w] = true;
  }
  bwd[end_node()] = true;
  for (int v = end_node(); v >= 0; --v) {
    if (!bwd[v]) continue;
    for (int u : pred[v]) bwd[u] = true;
  }
  for (int v = 0; v < num_nodes_; ++v) {
    if (!fwd[v] || !bwd[v]) {
      throw std::invalid_argument("node " + std::to_string(v) +
                                  " is not on a start-to-end path");
    }
  }
}

void Lattice::Write(std::ostream& out) const {
  for (const auto& e : edges_) {
    out << e.from << ' ' << e.to << ' ' << (e.is_oov() ? kOovLabel : e.word)
        << ' ' << FormatScore(e.acoustic_logprob) << '\n';
  }
}

Lattice Lattice::Read(std::istream& in) {
  std::vector<LatticeEdge> edges;
  std::string line;
  int lineno = 0, max_node = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    LatticeEdge e;
    std::string label, extra;
    if (!(ls >> e.from >> e.to >> label >> e.acoustic_logprob) ||
        (ls >> extra)) {
      throw FormatError("malformed lattice line " + std::to_string(lineno));
    }
    if (label != kOovLabel) e.word = label;
    max_node = std::max({max_node, e.from, e.to});
    edges.push_back(std::move(e));
  }
  return Lattice(max_node + 1, std::move(edges));
}

void NoiseModel::Validate() const {
  if (!(p_sub >= 0.0 && p_sub <= 1.0)) {
    throw std::invalid_argument("p_sub must lie in [0, 1]");
  }
  if (confusables_per_token < 1) {
    throw std::invalid_argument("confusables_per_token must be >= 1");
  }
  if (!(oov_flat_logprob <= 0.0)) {
    throw std::invalid_argument("oov_flat_logprob must be <= 0");
  }
}

Lattice Corrupt(const Utterance& utt, const CategoryLexicon& lex,
                const NoiseModel& noise) {
  noise.Validate();
  ConfusableIndex index(lex);
  return CorruptWith(utt, lex, noise, index);
}

std::vector<Token> DecodeResult::Tokens() const {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.token);
  return out;
}

DecodeResult Decode(const Lattice& lattice, const ClassBigramLM& lm,
                    const DecodeOptions& options) {
  lattice.Validate();
  if (!(options.lm_weight > 0.0)) {
    throw std::invalid_argument("lm_weight must be positive");
  }
  const size_t k = lm.NumCategories();
  const int n = lattice.num_nodes();
  const auto& edges = lattice.edges();
  const double w = options.lm_weight;

  struct Cell {
    double score = kNegInf;
    size_t edge = 0;
    size_t prev = 0;
  };
  std::vector<std::vector<Cell>> cells(n, std::vector<Cell>(k));
  cells[0][0].score = 0.0;

  std::vector<std::vector<size_t>> out_edges(n);
  for (size_t i = 0; i < edges.size(); ++i) out_edges[edges[i].from].push_back(i);

  std::vector<size_t> oov_targets;
  if (options.allow_oov) {
    for (size_t c = 1; c < k; ++c) {
      if (lm.IsOpen(c) && lm.OovProbability(c) > 0.0) oov_targets.push_back(c);
    }
  }

  auto emission = [&](size_t c, const std::string& word) {
    return options.allow_oov ? lm.LogEmission(c, word)
                             : lm.LogClosedEmission(c, word);
  };

  auto relax = [&](Cell& cell, double score, size_t edge, size_t prev) {
    if (score == kNegInf) return;
    bool better = score > cell.score;
    if (!better && score == cell.score) {
      better = edge < cell.edge ||
               (edge == cell.edge &&
                lm.CategoryName(prev) < lm.CategoryName(cell.prev));
    }
    if (better) cell = Cell{score, edge, prev};
  };

  for (int u = 0; u < n; ++u) {
    for (size_t prev = 0; prev < k; ++prev) {
      const double base = cells[u][prev].score;
      if (base == kNegInf) continue;
      for (size_t ei : out_edges[u]) {
        const LatticeEdge& e = edges[ei];
        auto& next = cells[e.to];
        if (e.is_oov()) {
          for (size_t c : oov_targets) {
            double s = base + e.acoustic_logprob +
                       w * (lm.LogTransition(prev, c) + lm.LogOovEmission(c));
            relax(next[c], s, ei, prev);
          }
        } else {
          int c = lm.WordCategory(e.word);
          if (c < 0) {
            throw std::invalid_argument("lattice word '" + e.word +
                                        "' is not in the LM vocabulary");
          }
          double s = base + e.acoustic_logprob +
                     w * (lm.LogTransition(prev, c) + emission(c, e.word));
          relax(next[c], s, ei, prev);
        }
      }
    }
  }

  const int end = lattice.end_node();
  double best = kNegInf;
  size_t best_cat = 0;
  bool found = false;
  for (size_t c = 0; c < k; ++c) {
    if (cells[end][c].score == kNegInf) continue;
    double s = cells[end][c].score + w * lm.LogTransition(c, 0);
    if (s == kNegInf) continue;
    if (!found || s > best ||
        (s == best && lm.CategoryName(c) < lm.CategoryName(best_cat))) {
      best = s;
      best_cat = c;
      found = true;
    }
  }
  if (!found) throw std::runtime_error("lattice has no complete path");

  DecodeResult result;
  result.total_logprob = best;
  int node = end;
  size_t cat = best_cat;
  std::vector<std::pair<size_t, size_t>> path;  // (edge, category)
  while (node != 0) {
    const Cell& cell = cells[node][cat];
    path.emplace_back(cell.edge, cat);
    node = edges[cell.edge].from;
    cat = cell.prev;
  }
  std::reverse(path.begin(), path.end());
  size_t prev = 0;
  for (const auto& [ei, c] : path) {
    const LatticeEdge& e = edges[ei];
    ScoredToken st;
    double lm_score;
    if (e.is_oov()) {
      st.token = Token::Oov(lm.CategoryName(c));
      lm_score = lm.LogTransition(prev, c) + lm.LogOovEmission(c);
      result.oov_spans.push_back({result.tokens.size(), lm.CategoryName(c)});
    } else {
      st.token = Token::Known(e.word, lm.CategoryName(c));
      lm_score = lm.LogTransition(prev, c) + emission(c, e.word);
    }
    st.logprob = e.acoustic_logprob + w * lm_score;
    result.tokens.push_back(std::move(st));
    result.edge_path.push_back(ei);
    prev = c;
  }
  return result;
}

std::vector<RecognitionResult> RunRecognition(
    const Corpus& test, const CategoryLexicon& lex, const ClassBigramLM& lm,
    const NoiseModel& noise, const DecodeOptions& options,
    const CategoryLexicon* reference_lexicon) {
  noise.Validate();
  ConfusableIndex index(lex);
  std::vector<RecognitionResult> out;
  out.reserve(test.size());
  for (const auto& utt : test) {
    RecognitionResult r;
    r.utterance_id = utt.id;
    r.reference = reference_lexicon
                      ? OovTagWithReference(utt, lex, *reference_lexicon)
                      : OovTag(utt, lex);
    r.hypothesis = Decode(CorruptWith(utt, lex, noise, index), lm, options);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace oovdial
