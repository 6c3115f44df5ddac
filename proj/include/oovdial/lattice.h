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

// Simulated recognition: reference utterances are corrupted into scored
// confusion-network lattices and decoded with the class bigram model.  An
// OOV edge carries one constant acoustic score for every category, so the
// category an OOV receives is decided by the language model alone.

#ifndef OOVDIAL_LATTICE_H_
#define OOVDIAL_LATTICE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "oovdial/class_lm.h"
#include "oovdial/corpus.h"

namespace oovdial {

inline constexpr const char kOovLabel[] = "<OOV>";

struct LatticeEdge {
  int from = 0;
  int to = 0;
  // Empty word marks an OOV acoustic edge.
  std::string word;
  double acoustic_logprob = 0.0;

  bool is_oov() const { return word.empty(); }
  bool operator==(const LatticeEdge&) const = default;
};

// Acyclic word graph with edges running from lower to higher node ids.
// Node 0 is the start, node num_nodes-1 the end.
class Lattice {
 public:
  Lattice() = default;
  Lattice(int num_nodes, std::vector<LatticeEdge> edges)
      : num_nodes_(num_nodes), edges_(std::move(edges)) {}

  int num_nodes() const { return num_nodes_; }
  int end_node() const { return num_nodes_ - 1; }
  const std::vector<LatticeEdge>& edges() const { return edges_; }

  // Throws std::invalid_argument describing the first violated invariant.
  void Validate() const;

  // Text lines `from to label logprob`, label `<OOV>` for OOV edges,
  // preceded by a `nodes N` line.
  void Write(std::ostream& out) const;
  static Lattice Read(std::istream& in);

  bool operator==(const Lattice&) const = default;

 private:
  int num_nodes_ = 1;
  std::vector<LatticeEdge> edges_;
};

struct NoiseModel {
  // Probability that the true word is demoted below a competitor.
  double p_sub = 0.2;
  int confusables_per_token = 2;
  // Constant acoustic score of every OOV edge.
  double oov_flat_logprob = -4.0;
  uint64_t seed = 1;

  void Validate() const;
};

// One sausage slot per reference token.  Deterministic in (utterance id,
// tokens, lexicon, noise model).
Lattice Corrupt(const Utterance& utt, const CategoryLexicon& lex,
                const NoiseModel& noise);

// Levenshtein distance over bytes.
size_t EditDistance(const std::string& a, const std::string& b);

struct ScoredToken {
  Token token;
  // Acoustic plus weighted LM score of this token.
  double logprob = 0.0;
};

struct OovSpan {
  size_t position = 0;
  std::string category;

  bool operator==(const OovSpan&) const = default;
};

struct DecodeResult {
  std::vector<ScoredToken> tokens;
  double total_logprob = 0.0;
  std::vector<OovSpan> oov_spans;
  // Lattice edge index consumed by each token.
  std::vector<size_t> edge_path;

  std::vector<Token> Tokens() const;
};

struct DecodeOptions {
  double lm_weight = 1.0;
  // When false, OOV edges are ignored and emissions come from the
  // closed-vocabulary model (baseline recognizer).
  bool allow_oov = true;
};

// Viterbi search over (node, category of last token).  An OOV edge may be
// read as an OOV token of any open category with non-zero OOV mass.  Equal
// scores prefer the smaller category name, then the earlier edge, then the
// smaller predecessor category name.
DecodeResult Decode(const Lattice& lattice, const ClassBigramLM& lm,
                    const DecodeOptions& options = {});

struct RecognitionResult {
  std::string utterance_id;
  std::vector<Token> reference;
  DecodeResult hypothesis;
};

// Corrupts and decodes every utterance.  `reference_lexicon`, when given,
// supplies true categories of OOV reference tokens.
std::vector<RecognitionResult> RunRecognition(
    const Corpus& test, const CategoryLexicon& lex, const ClassBigramLM& lm,
    const NoiseModel& noise, const DecodeOptions& options = {},
    const CategoryLexicon* reference_lexicon = nullptr);

}  // namespace oovdial

#endif  // OOVDIAL_LATTICE_H_
