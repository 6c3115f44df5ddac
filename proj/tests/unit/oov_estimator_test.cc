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


#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oovdial/oov_estimator.h"
#include "oovdial/synth.h"
#include "test_util.h"

namespace oovdial {
namespace {

const CategoryInfo kOpen{"c", true, std::nullopt};
const CategoryInfo kClosed{"c", false, std::nullopt};

std::vector<std::string> Repeat(const std::string& w, size_t n) {
  return std::vector<std::string>(n, w);
}

std::vector<std::string> Distinct(size_t n, const std::string& prefix = "t") {
  std::vector<std::string> v;
  for (size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}

// Independent of the library generator: std::mt19937 plus
// std::uniform_real_distribution.  Returns (sample, held-out novelty rate of
// a continuation of the same process).
std::pair<std::vector<std::string>, double> NoveltyDraw(double rate, size_t m,
                                                        size_t held_out,
                                                        unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> seen;
  std::vector<std::string> out;
  size_t fresh = 0, novel_later = 0;
  for (size_t i = 0; i < m + held_out; ++i) {
    std::string w;
    bool is_new = seen.empty() || u(gen) < rate;
    if (is_new) {
      w = "n" + std::to_string(fresh++);
      seen.push_back(w);
    } else {
      std::uniform_int_distribution<size_t> pick(0, seen.size() - 1);
      w = seen[pick(gen)];
    }
    if (i < m) {
      out.push_back(w);
    } else {
      novel_later += is_new;
    }
  }
  return {out, static_cast<double>(novel_later) / held_out};
}

TEST_CASE("growth curve of a small stream") {
  std::vector<std::string> s = {"a", "b", "a", "c"};
  GrowthCurve g = GrowthCurveFromTokens("c", s);
  CHECK(g.points == std::vector<GrowthPoint>{{1, 1}, {2, 2}, {3, 2}, {4, 3}});
  CHECK(g.hapaxes == 2);
}

TEST_CASE("growth curve extremes") {
  auto one = Repeat("a", 10);
  for (const auto& p : GrowthCurveFromTokens("c", one).points) CHECK(p.g == 1);
  auto all = Distinct(10);
  for (const auto& p : GrowthCurveFromTokens("c", all).points) CHECK(p.g == p.i);
}

TEST_CASE("growth curve from a corpus counts only the category") {
  auto lex = testing::LexiconFromText(
      "hamburg\tcity\topen\nmunich\tcity\topen\nto\tprep\tclosed\n");
  auto c = testing::CorpusFromText(
      "1\tto hamburg\n2\tto munich\n3\tto hamburg\n");
  GrowthCurve g = ComputeGrowthCurve(c, lex, "city");
  CHECK(g.points == std::vector<GrowthPoint>{{1, 1}, {2, 2}, {3, 2}});
  CHECK_THROWS_AS(ComputeGrowthCurve(c, lex, "region"), std::invalid_argument);
}

TEST_CASE("fit on all-distinct and single-type streams") {
  auto all = Distinct(40);
  OovEstimate e = EstimateOovProbability(GrowthCurveFromTokens("c", all), kOpen);
  CHECK(e.probability == doctest::Approx(1.0));
  CHECK(e.method == EstimateMethod::kOlsFit);
  auto one = Repeat("a", 40);
  CHECK(EstimateOovProbability(GrowthCurveFromTokens("c", one), kOpen)
            .probability == doctest::Approx(0.0));
}

TEST_CASE("small samples use the hapax ratio") {
  std::vector<std::string> s = {"a", "b", "a", "c", "d"};
  OovEstimate e = EstimateOovProbability(GrowthCurveFromTokens("c", s), kOpen);
  CHECK(e.method == EstimateMethod::kHapaxFallback);
  CHECK(e.probability == doctest::Approx(3.0 / 5.0));
  CHECK(e.sample_size == 5);
}

TEST_CASE("closed categories are zero and empty open curves fail") {
  auto all = Distinct(40);
  OovEstimate e =
      EstimateOovProbability(GrowthCurveFromTokens("c", all), kClosed);
  CHECK(e.probability == 0.0);
  CHECK(e.method == EstimateMethod::kClosedZero);
  CHECK_THROWS_WITH(EstimateOovProbability(GrowthCurve{"c", {}, 0}, kOpen),
                    doctest::Contains("insufficient data"));
}

TEST_CASE("fixed-novelty stream at rate 0.25 against a held-out oracle") {
  auto [sample, held_out_rate] = NoveltyDraw(0.25, 10000, 20000, 11);
  OovEstimate e =
      EstimateOovProbability(GrowthCurveFromTokens("c", sample), kOpen);
  CHECK(std::abs(held_out_rate - 0.25) < 0.02);
  CHECK(std::abs(e.probability - held_out_rate) <= 0.03);
}

TEST_CASE("estimate_all on closed-only lexicon") {
  auto lex = testing::LexiconFromText("to\tprep\tclosed\nfrom\tprep\tclosed\n");
  auto c = testing::CorpusFromText("1\tto from\n");
  EstimationResult r = EstimateAll(c, lex);
  for (const auto& [name, est] : r.estimates) CHECK(est.probability == 0.0);
  CHECK(*r.lexicon.Info("prep").oov_probability == 0.0);
}

TEST_CASE("bundled replica estimates for rare and garbage") {
  auto lex = LoadLexicon(testing::DataPath("replica/lexicon.tsv"));
  auto train = LoadCorpus(testing::DataPath("replica/train.txt"));
  EstimationResult r = EstimateAll(train, lex);
  CHECK(std::abs(r.estimates.at("rare").probability - 0.73) <= 0.05);
  CHECK(r.estimates.at("garbage").probability >= 0.95);
  CHECK(r.estimates.at("garbage").probability <= 1.0);
}

// Discrete slopes g(i) - g(i-1) over the tail window.
std::pair<double, double> TailSlopeRange(const GrowthCurve& c) {
  const size_t m = c.points.size();
  const size_t first = (m + 1) / 2;  // index of i = ceil(M/2) + 1 minus one
  double lo = 1, hi = 0;
  for (size_t k = first + 1; k < m; ++k) {
    double d = static_cast<double>(c.points[k].g) - c.points[k - 1].g;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

TEST_CASE("tail slope stays within the discrete slope range") {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<size_t> len(20, 120);
    std::uniform_int_distribution<int> alphabet(1, 30);
    const size_t m = len(gen);
    std::uniform_int_distribution<int> pick(0, alphabet(gen));
    std::vector<std::string> s;
    for (size_t i = 0; i < m; ++i) s.push_back("w" + std::to_string(pick(gen)));
    GrowthCurve c = GrowthCurveFromTokens("c", s);
    auto [lo, hi] = TailSlopeRange(c);
    double slope = TailSlope(c);
    CHECK(slope >= lo - 1e-12);
    CHECK(slope <= hi + 1e-12);
    double p = EstimateOovProbability(c, kOpen).probability;
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("appending fresh types raises and repetitions lower the estimate") {
  auto [sample, rate] = NoveltyDraw(0.3, 400, 1, 3);
  (void)rate;
  double base = EstimateOovProbability(GrowthCurveFromTokens("c", sample), kOpen)
                    .probability;
  auto more_new = sample;
  for (const auto& w : sample) more_new.push_back("fresh_" + w);
  CHECK(EstimateOovProbability(GrowthCurveFromTokens("c", more_new), kOpen)
            .probability > base);
  auto repeated = sample;
  for (int i = 0; i < 50; ++i) repeated.push_back(sample.front());
  CHECK(EstimateOovProbability(GrowthCurveFromTokens("c", repeated), kOpen)
            .probability < base);
}

TEST_CASE("absolute error shrinks as the sample grows") {
  double err_small = 0, err_large = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    auto [small, r1] = NoveltyDraw(0.25, 100, 1, 100 + seed);
    auto [large, r2] = NoveltyDraw(0.25, 10000, 1, 100 + seed);
    err_small += std::abs(
        EstimateOovProbability(GrowthCurveFromTokens("c", small), kOpen)
            .probability - 0.25);
    err_large += std::abs(
        EstimateOovProbability(GrowthCurveFromTokens("c", large), kOpen)
            .probability - 0.25);
  }
  CHECK(err_large < err_small);
}

TEST_CASE("library novelty stream matches its configured rate") {
  auto s = FixedNoveltySample(0.25, 10000, 3);
  std::set<std::string> types(s.begin(), s.end());
  CHECK(std::abs(static_cast<double>(types.size()) / s.size() - 0.25) < 0.02);
}

}  // namespace
}  // namespace oovdial
