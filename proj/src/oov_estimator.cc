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

#include "oovdial/oov_estimator.h"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace oovdial {

const char* ToString(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::kOlsFit:
      return "ols-fit";
    case EstimateMethod::kHapaxFallback:
      return "hapax-fallback";
    case EstimateMethod::kClosedZero:
      return "closed-zero";
  }
  return "?";
}

GrowthCurve GrowthCurveFromTokens(const std::string& category,
                                  std::span<const std::string> tokens) {
  GrowthCurve curve;
  curve.category = category;
  curve.points.reserve(tokens.size());
  std::unordered_map<std::string, size_t> counts;
  for (size_t i = 0; i < tokens.size(); ++i) {
    ++counts[tokens[i]];
    curve.points.push_back({i + 1, counts.size()});
  }
  for (const auto& [w, n] : counts) {
    if (n == 1) ++curve.hapaxes;
  }
  return curve;
}

GrowthCurve ComputeGrowthCurve(const Corpus& train, const CategoryLexicon& lex,
                               const std::string& category) {
  if (!lex.HasCategory(category)) {
    throw std::invalid_argument("unknown category '" + category + "'");
  }
  std::vector<std::string> tokens;
  for (const auto& utt : train) {
    for (const auto& w : utt.tokens) {
      const std::string* c = lex.CategoryOf(w);
      if (c && *c == category) tokens.push_back(w);
    }
  }
  return GrowthCurveFromTokens(category, tokens);
}

double TailSlope(const GrowthCurve& curve) {
  const size_t m = curve.points.size();
  const size_t cut = (m + 1) / 2;  // ceil(M/2)
  double sx = 0, sy = 0;
  size_t n = 0;
  for (const auto& p : curve.points) {
    if (p.i <= cut) continue;
    sx += static_cast<double>(p.i);
    sy += static_cast<double>(p.g);
    ++n;
  }
  if (n < 2) throw std::invalid_argument("tail has fewer than two points");
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (const auto& p : curve.points) {
    if (p.i <= cut) continue;
    const double dx = static_cast<double>(p.i) - mx;
    sxy += dx * (static_cast<double>(p.g) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

OovEstimate EstimateOovProbability(const GrowthCurve& curve,
                                   const CategoryInfo& info) {
  OovEstimate est;
  est.category = info.name;
  est.sample_size = curve.tokens();
  if (!info.open) {
    est.method = EstimateMethod::kClosedZero;
    est.probability = 0.0;
    return est;
  }
  if (curve.points.empty()) {
    throw std::invalid_argument("insufficient data for category '" +
                                info.name + "'");
  }
  double p;
  if (curve.tokens() >= kMinTokensForFit) {
    est.method = EstimateMethod::kOlsFit;
    p = TailSlope(curve);
  } else {
    est.method = EstimateMethod::kHapaxFallback;
    p = static_cast<double>(curve.hapaxes) / curve.tokens();
  }
  est.probability = std::clamp(p, 0.0, 1.0);
  return est;
}

EstimationResult EstimateAll(const Corpus& train, const CategoryLexicon& lex) {
  EstimationResult result{lex, {}, {}};
  for (const auto& [name, info] : lex.categories()) {
    GrowthCurve curve = ComputeGrowthCurve(train, lex, name);
    OovEstimate est = EstimateOovProbability(curve, info);
    result.lexicon.SetOovProbability(name, est.probability);
    result.estimates.emplace(name, est);
    result.curves.emplace(name, std::move(curve));
  }
  return result;
}

void WriteEstimateReport(const EstimationResult& result, std::ostream& out) {
  out << "category\ttokens\ttypes\tprobability\tmethod\n";
  for (const auto& [name, est] : result.estimates) {
    const GrowthCurve& curve = result.curves.at(name);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", est.probability);
    out << name << '\t' << curve.tokens() << '\t' << curve.types() << '\t'
        << buf << '\t' << ToString(est.method) << '\n';
  }
}

void WriteGrowthCurveCsv(const GrowthCurve& curve, std::ostream& out) {
  out << "i,g\n";
  for (const auto& p : curve.points) out << p.i << ',' << p.g << '\n';
}

}  // namespace oovdial
