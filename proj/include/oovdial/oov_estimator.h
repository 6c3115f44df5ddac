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

// Per-category OOV probability from the vocabulary growth curve.
//
// g(i) counts the distinct types among the first i tokens of a category.
// Had the vocabulary been redefined after every token, g(i) is also the
// number of those tokens that would have been out of vocabulary, so the
// slope of g over the late part of the sample estimates the probability
// that the next token of the category is a new type.

#ifndef OOVDIAL_OOV_ESTIMATOR_H_
#define OOVDIAL_OOV_ESTIMATOR_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "oovdial/corpus.h"

namespace oovdial {

struct GrowthPoint {
  size_t i = 0;
  size_t g = 0;

  bool operator==(const GrowthPoint&) const = default;
};

struct GrowthCurve {
  std::string category;
  std::vector<GrowthPoint> points;
  // Types seen exactly once; feeds the small-sample fallback.
  size_t hapaxes = 0;

  size_t tokens() const { return points.size(); }
  size_t types() const { return points.empty() ? 0 : points.back().g; }
};

enum class EstimateMethod { kOlsFit, kHapaxFallback, kClosedZero };

const char* ToString(EstimateMethod m);

struct OovEstimate {
  std::string category;
  double probability = 0.0;
  EstimateMethod method = EstimateMethod::kClosedZero;
  size_t sample_size = 0;
};

// Samples with fewer category tokens use the hapax ratio instead of a fit.
inline constexpr size_t kMinTokensForFit = 20;

GrowthCurve GrowthCurveFromTokens(const std::string& category,
                                  std::span<const std::string> tokens);

// Tokens of `category` in corpus order.  Throws std::invalid_argument for an
// unknown category.
GrowthCurve ComputeGrowthCurve(const Corpus& train, const CategoryLexicon& lex,
                               const std::string& category);

// Unclamped least-squares slope of g against i over the points with
// i > ceil(M/2).  Needs at least two such points.
double TailSlope(const GrowthCurve& curve);

OovEstimate EstimateOovProbability(const GrowthCurve& curve,
                                   const CategoryInfo& info);

// Returns a copy of `lex` with every category's OOV probability set, plus
// the per-category estimates.
struct EstimationResult {
  CategoryLexicon lexicon;
  std::map<std::string, OovEstimate> estimates;
  std::map<std::string, GrowthCurve> curves;
};
EstimationResult EstimateAll(const Corpus& train, const CategoryLexicon& lex);

// TSV: category, tokens, types, probability, method.
void WriteEstimateReport(const EstimationResult& result, std::ostream& out);
// CSV `i,g`.
void WriteGrowthCurveCsv(const GrowthCurve& curve, std::ostream& out);

}  // namespace oovdial

#endif  // OOVDIAL_OOV_ESTIMATOR_H_
