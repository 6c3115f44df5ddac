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

#ifndef OOVDIAL_EVAL_METRICS_H_
#define OOVDIAL_EVAL_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oovdial/corpus.h"
#include "oovdial/semparser.h"

namespace oovdial {

enum class EditOp { kMatch, kSubstitution, kDeletion, kInsertion };
const char* ToString(EditOp op);

struct AlignedPair {
  EditOp op;
  std::optional<size_t> ref;  // index into the reference, none on insertion
  std::optional<size_t> hyp;  // index into the hypothesis, none on deletion
};

struct Alignment {
  std::vector<AlignedPair> ops;

  size_t Count(EditOp op) const;
  size_t Cost() const { return ops.size() - Count(EditOp::kMatch); }
};

// Minimal unit-cost alignment.  Among optimal alignments, each step prefers
// match, then substitution, then deletion, then insertion.
Alignment Align(std::span<const std::string> ref,
                std::span<const std::string> hyp);

// Pooled error counts.  Percentages are nullopt when N is zero.
struct ErrorCounts {
  size_t n = 0;
  size_t matches = 0;
  size_t substitutions = 0;
  size_t insertions = 0;
  size_t deletions = 0;

  void Add(const Alignment& a, size_t ref_length);
  std::optional<double> Accuracy() const;
};

using WaReport = ErrorCounts;

// Single symbol every OOV token collapses to before alignment.
inline constexpr const char kOovSymbol[] = "<OOV>";
std::vector<std::string> CollapseOov(std::span<const Token> tokens);

// refs[k] must be tagged against the system lexicon.  Throws
// std::invalid_argument when the lists differ in length.
WaReport WordAccuracy(std::span<const std::vector<Token>> refs,
                      std::span<const std::vector<Token>> hyps);

struct OovDetectionReport {
  size_t true_positives = 0;
  size_t false_positives = 0;
  size_t false_negatives = 0;
  size_t category_correct = 0;
  size_t two_class_correct = 0;

  std::optional<double> Precision() const;
  std::optional<double> Recall() const;
  std::optional<double> CategoryAccuracy() const;
  std::optional<double> TwoClassAccuracy() const;
};

// A hypothesised OOV detects a reference OOV only when the two are aligned
// to each other.  Two-class accuracy compares city against any other
// category.
OovDetectionReport OovDetection(std::span<const std::vector<Token>> refs,
                                std::span<const std::vector<Token>> hyps,
                                const std::string& city_category = "city");

struct CaReport {
  ErrorCounts counts;
  // City substitutions whose only difference is an in-vocabulary name
  // against oov_city under the same concept name.
  size_t half_errors = 0;

  std::optional<double> Ca() const { return counts.Accuracy(); }
  // Same as Ca with each half error counted as 0.5.
  std::optional<double> CaHalf() const;
};

CaReport ConceptAccuracy(std::span<const ConceptList> refs,
                         std::span<const ConceptList> hyps);

// "%.1f" or "n/a".
std::string FormatPercent(const std::optional<double>& value);

}  // namespace oovdial

#endif  // OOVDIAL_EVAL_METRICS_H_
