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

// Synthetic timetable-inquiry corpora.

#ifndef OOVDIAL_SYNTH_H_
#define OOVDIAL_SYNTH_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oovdial/corpus.h"
#include "oovdial/random.h"
#include "oovdial/semparser.h"

namespace oovdial {

// Draws tokens of one category: a fresh type with probability `rate`,
// otherwise a uniformly chosen type among those drawn before.  Fresh types
// are taken from `pool` in order.
class NoveltyStream {
 public:
  NoveltyStream(double rate, std::vector<std::string> pool);

  std::string Next(Rng& rng);
  size_t NumTypes() const { return seen_.size(); }
  double rate() const { return rate_; }

 private:
  double rate_;
  std::vector<std::string> pool_;
  std::vector<std::string> seen_;
};

// `m` tokens from a stream over the types w0, w1, ...
std::vector<std::string> FixedNoveltySample(double rate, size_t m,
                                            uint64_t seed);

struct SynthOptions {
  uint64_t seed = 1;
  // System vocabulary: closed words plus the open types of the training
  // part.
  size_t vocabulary_size = 1110;
  size_t test_utterances = 2383;
  // Probability of a hesitation fragment per utterance.
  double fragment_rate = 0.04;
  // Fresh-type rate per open category.
  std::map<std::string, double> novelty = {
      {"city", 0.05},     {"region", 0.25}, {"surname", 0.5},
      {"firstname", 0.25}, {"station", 0.25}, {"rare", 0.73},
      {"garbage", 1.0}};
};

struct SynthCorpus {
  Corpus train;
  Corpus test;
  // Closed words plus training types.
  CategoryLexicon lexicon;
  // Every generated word with its true category.
  CategoryLexicon full_lexicon;
  // Intended concepts per test utterance; city names outside the system
  // vocabulary appear as oov_city.
  std::map<std::string, ConceptList> test_concepts;
  uint64_t seed = 0;
  double test_oov_rate = 0.0;
};

// Throws std::runtime_error if the vocabulary target cannot be met.
SynthCorpus GenerateReplica(const SynthOptions& options);

// Tries seeds options.seed, options.seed + 1, ... until the test OOV rate
// is within `tolerance` of `target`.
SynthCorpus SearchReplica(SynthOptions options, double target,
                          double tolerance, int max_tries = 200);

// train.txt, test.txt, lexicon.tsv, full_lexicon.tsv, test.concepts and
// stats.tsv under `dir`.
void WriteReplica(const SynthCorpus& corpus, const std::string& dir);

}  // namespace oovdial

#endif  // OOVDIAL_SYNTH_H_
