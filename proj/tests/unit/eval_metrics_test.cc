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


#include <random>

#include "../common/oracles.h"
#include "doctest.h"
#include "oovdial/eval_metrics.h"

namespace oovdial {
namespace {

std::vector<std::string> S(const std::string& text) { return Tokenize(text); }

// Known words unless written `<cat>` (OOV of that category) or `<>`.
std::vector<Token> T(const std::string& text) {
  std::vector<Token> out;
  for (const auto& w : Tokenize(text)) {
    if (w.size() >= 2 && w.front() == '<' && w.back() == '>') {
      out.push_back(Token::Oov(w.substr(1, w.size() - 2)));
    } else {
      out.push_back(Token::Known(w));
    }
  }
  return out;
}

TEST_CASE("alignment of identical and shortened sequences") {
  auto same = Align(S("a b c"), S("a b c"));
  CHECK(same.Count(EditOp::kMatch) == 3);
  CHECK(same.Cost() == 0);
  auto del = Align(S("a b c"), S("a c"));
  REQUIRE(del.ops.size() == 3);
  CHECK(del.ops[0].op == EditOp::kMatch);
  CHECK(del.ops[1].op == EditOp::kDeletion);
  CHECK(*del.ops[1].ref == 1);
  CHECK(del.ops[2].op == EditOp::kMatch);
}

// Checks that the alignment is a valid edit script for (ref, hyp).
void CheckScript(const Alignment& a, const std::vector<std::string>& ref,
                 const std::vector<std::string>& hyp) {
  size_t i = 0, j = 0;
  for (const auto& p : a.ops) {
    switch (p.op) {
      case EditOp::kMatch:
      case EditOp::kSubstitution:
        REQUIRE(*p.ref == i);
        REQUIRE(*p.hyp == j);
        REQUIRE((ref[i] == hyp[j]) == (p.op == EditOp::kMatch));
        ++i, ++j;
        break;
      case EditOp::kDeletion:
        REQUIRE(*p.ref == i++);
        break;
      case EditOp::kInsertion:
        REQUIRE(*p.hyp == j++);
        break;
    }
  }
  REQUIRE(i == ref.size());
  REQUIRE(j == hyp.size());
}

TEST_CASE("alignment cost equals exhaustive edit distance (length <= 4)") {
  // The full length-6 sweep runs in the acceptance binary.
  auto all = oracle::AllStrings({"a", "b", "c"}, 4);
  for (const auto& r : all) {
    for (const auto& h : all) {
      Alignment a = Align(r, h);
      CheckScript(a, r, h);
      REQUIRE(a.Cost() == oracle::EditDistance(r, h));
    }
  }
}

TEST_CASE("word accuracy collapses oov tokens") {
  std::vector<std::vector<Token>> refs = {T("to <>")};
  std::vector<std::vector<Token>> hyps = {T("to <city>")};
  WaReport wa = WordAccuracy(refs, hyps);
  CHECK(wa.n == 2);
  CHECK(wa.matches == 2);
  CHECK(*wa.Accuracy() == doctest::Approx(100.0));

  refs = {T("to hamburg")};
  wa = WordAccuracy(refs, hyps);
  CHECK(wa.substitutions == 1);
  CHECK(*wa.Accuracy() == doctest::Approx(50.0));

  refs = {T("a b c")};
  hyps = {{}};
  wa = WordAccuracy(refs, hyps);
  CHECK(wa.deletions == 3);
  CHECK(*wa.Accuracy() == doctest::Approx(0.0));

  hyps = {};
  CHECK_THROWS_AS(WordAccuracy(refs, hyps), std::invalid_argument);
}

TEST_CASE("oov detection on a hand-counted fixture") {
  // ref OOVs: u1, u3, u5, u8 (4).  hyp OOVs: u1 (aligned), u5 (aligned),
  // u6 (false alarm on a known word).  TP 2, FP 1, FN 2.
  std::vector<std::vector<Token>> refs = {
      T("to <city>"),        T("i want to go"),   T("from <surname> please"),
      T("on monday"),        T("to <city> now"),  T("from hamburg"),
      T("yes"),              T("<rare> thanks"),  T("at ten"),
      T("no")};
  std::vector<std::vector<Token>> hyps = {
      T("to <city>"),        T("i want to go"),   T("from meier please"),
      T("on monday"),        T("to <region> now"), T("from <city>"),
      T("yes"),              T("a thanks"),        T("at ten"),
      T("no")};
  OovDetectionReport d = OovDetection(refs, hyps);
  CHECK(d.true_positives == 2);
  CHECK(d.false_positives == 1);
  CHECK(d.false_negatives == 2);
  CHECK(FormatPercent(d.Precision()) == "66.7");
  CHECK(FormatPercent(d.Recall()) == "50.0");
  // u1 city/city correct, u5 city/region wrong; two-class: u5 city vs
  // not-city is also wrong
  CHECK(d.category_correct == 1);
  CHECK(d.two_class_correct == 1);
  CHECK(*d.CategoryAccuracy() == doctest::Approx(50.0));
}

TEST_CASE("two-class accuracy counts non-city confusions as correct") {
  std::vector<std::vector<Token>> refs = {T("<surname> <city>")};
  std::vector<std::vector<Token>> hyps = {T("<region> <city>")};
  OovDetectionReport d = OovDetection(refs, hyps);
  CHECK(d.category_correct == 1);
  CHECK(d.two_class_correct == 2);
}

TEST_CASE("perfect and oov-free hypotheses") {
  std::vector<std::vector<Token>> refs = {T("to <city>"), T("<rare>")};
  OovDetectionReport perfect = OovDetection(refs, refs);
  CHECK(*perfect.Precision() == doctest::Approx(100.0));
  CHECK(*perfect.Recall() == doctest::Approx(100.0));
  std::vector<std::vector<Token>> none = {T("to bonn"), T("a")};
  OovDetectionReport d = OovDetection(refs, none);
  CHECK_FALSE(d.Precision().has_value());
  CHECK(FormatPercent(d.Precision()) == "n/a");
  CHECK(*d.Recall() == doctest::Approx(0.0));
}

TEST_CASE("concept accuracy and the half-error variant") {
  std::vector<ConceptList> ref = {{{"goalcity", "hamburg"}}};
  CaReport same = ConceptAccuracy(ref, ref);
  CHECK(*same.Ca() == doctest::Approx(100.0));
  std::vector<ConceptList> hyp = {{{"goalcity", kOovCityValue}}};
  CaReport half = ConceptAccuracy(ref, hyp);
  CHECK(*half.Ca() == doctest::Approx(0.0));
  CHECK(*half.CaHalf() == doctest::Approx(50.0));
  CHECK(half.half_errors == 1);
  // a different concept name is a full error under both
  std::vector<ConceptList> other = {{{"sourcecity", kOovCityValue}}};
  CHECK(*ConceptAccuracy(ref, other).CaHalf() == doctest::Approx(0.0));
}

ConceptList RandomConcepts(std::mt19937& gen) {
  static const std::vector<Concept> pool = {
      {"goalcity", "hamburg"}, {"goalcity", kOovCityValue},
      {"sourcecity", "bonn"},  {"sourcecity", kOovCityValue},
      {"date", "monday"},      {"marker", "yes"}};
  std::uniform_int_distribution<size_t> len(0, 4), pick(0, pool.size() - 1);
  ConceptList out;
  for (size_t i = len(gen); i > 0; --i) out.push_back(pool[pick(gen)]);
  return out;
}

TEST_CASE("half-credit ca never falls below ca") {
  std::mt19937 gen(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ConceptList> ref, hyp;
    for (int i = 0; i < 3; ++i) {
      ref.push_back(RandomConcepts(gen));
      hyp.push_back(RandomConcepts(gen));
    }
    CaReport r = ConceptAccuracy(ref, hyp);
    if (!r.Ca()) continue;
    CHECK(*r.CaHalf() >= *r.Ca());
    CHECK((*r.CaHalf() == *r.Ca()) == (r.half_errors == 0));
  }
}

TEST_CASE("pooled accuracy is invariant under appending perfect utterances") {
  std::vector<std::vector<Token>> refs = {T("a b c d")};
  std::vector<std::vector<Token>> hyps = {T("a x c")};
  double base = *WordAccuracy(refs, hyps).Accuracy();
  CHECK(base <= 100.0);
  // doubling the corpus with an identical pair keeps the pooled figure
  refs.push_back(refs[0]);
  hyps.push_back(hyps[0]);
  CHECK(*WordAccuracy(refs, hyps).Accuracy() == doctest::Approx(base));
}

TEST_CASE("an extra substitution never raises word accuracy") {
  std::mt19937 gen(4);
  std::uniform_int_distribution<int> sym(0, 2), len(1, 6);
  const char* a[] = {"a", "b", "c"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Token> ref, hyp;
    for (int i = len(gen); i > 0; --i) ref.push_back(Token::Known(a[sym(gen)]));
    for (int i = len(gen); i > 0; --i) hyp.push_back(Token::Known(a[sym(gen)]));
    std::vector<std::vector<Token>> r = {ref}, h = {hyp};
    double before = *WordAccuracy(r, h).Accuracy();
    std::uniform_int_distribution<size_t> pos(0, hyp.size() - 1);
    h[0][pos(gen)] = Token::Known("z");
    CHECK(*WordAccuracy(r, h).Accuracy() <= before + 1e-12);
  }
}

}  // namespace
}  // namespace oovdial
