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


#include "oovdial/eval_metrics.h"

#include <cstdio>
#include <stdexcept>

namespace oovdial {

const char* ToString(EditOp op) {
  switch (op) {
    case EditOp::kMatch:
      return "match";
    case EditOp::kSubstitution:
      return "substitution";
    case EditOp::kDeletion:
      return "deletion";
    case EditOp::kInsertion:
      return "insertion";
  }
  return "?";
}

size_t Alignment::Count(EditOp op) const {
  size_t n = 0;
  for (const auto& p : ops) n += p.op == op;
  return n;
}

Alignment Align(std::span<const std::string> ref,
                std::span<const std::string> hyp) {
  const size_t n = ref.size(), m = hyp.size();
  // togo[i][j]: edit distance between ref[i..] and hyp[j..].
  std::vector<std::vector<size_t>> togo(n + 1, std::vector<size_t>(m + 1));
  for (size_t i = n + 1; i-- > 0;) {
    for (size_t j = m + 1; j-- > 0;) {
      if (i == n) {
        togo[i][j] = m - j;
      } else if (j == m) {
        togo[i][j] = n - i;
      } else {
        togo[i][j] = std::min({togo[i + 1][j + 1] + (ref[i] != hyp[j]),
                               togo[i + 1][j] + 1, togo[i][j + 1] + 1});
      }
    }
  }
  Alignment a;
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && togo[i][j] == togo[i + 1][j + 1] + (ref[i] != hyp[j])) {
      a.ops.push_back({ref[i] == hyp[j] ? EditOp::kMatch : EditOp::kSubstitution,
                       i, j});
      ++i;
      ++j;
    } else if (i < n && togo[i][j] == togo[i + 1][j] + 1) {
      a.ops.push_back({EditOp::kDeletion, i, std::nullopt});
      ++i;
    } else {
      a.ops.push_back({EditOp::kInsertion, std::nullopt, j});
      ++j;
    }
  }
  return a;
}

void ErrorCounts::Add(const Alignment& a, size_t ref_length) {
  n += ref_length;
  matches += a.Count(EditOp::kMatch);
  substitutions += a.Count(EditOp::kSubstitution);
  insertions += a.Count(EditOp::kInsertion);
  deletions += a.Count(EditOp::kDeletion);
}

std::optional<double> ErrorCounts::Accuracy() const {
  if (n == 0) return std::nullopt;
  return 100.0 *
         (static_cast<double>(n) - static_cast<double>(substitutions) -
          static_cast<double>(insertions) - static_cast<double>(deletions)) /
         static_cast<double>(n);
}

std::vector<std::string> CollapseOov(std::span<const Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.is_oov() ? kOovSymbol : t.word);
  return out;
}

namespace {

void CheckParallel(size_t a, size_t b) {
  if (a != b) {
    throw std::invalid_argument("reference and hypothesis lists differ in length");
  }
}

}  // namespace

WaReport WordAccuracy(std::span<const std::vector<Token>> refs,
                      std::span<const std::vector<Token>> hyps) {
  CheckParallel(refs.size(), hyps.size());
  WaReport report;
  for (size_t k = 0; k < refs.size(); ++k) {
    auto r = CollapseOov(refs[k]);
    auto h = CollapseOov(hyps[k]);
    report.Add(Align(r, h), r.size());
  }
  return report;
}

namespace {

std::optional<double> Ratio(size_t num, size_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> OovDetectionReport::Precision() const {
  return Ratio(true_positives, true_positives + false_positives);
}
std::optional<double> OovDetectionReport::Recall() const {
  return Ratio(true_positives, true_positives + false_negatives);
}
std::optional<double> OovDetectionReport::CategoryAccuracy() const {
  return Ratio(category_correct, true_positives);
}
std::optional<double> OovDetectionReport::TwoClassAccuracy() const {
  return Ratio(two_class_correct, true_positives);
}

OovDetectionReport OovDetection(std::span<const std::vector<Token>> refs,
                                std::span<const std::vector<Token>> hyps,
                                const std::string& city_category) {
  CheckParallel(refs.size(), hyps.size());
  OovDetectionReport report;
  for (size_t k = 0; k < refs.size(); ++k) {
    const auto& ref = refs[k];
    const auto& hyp = hyps[k];
    size_t ref_oov = 0, hyp_oov = 0, tp = 0;
    for (const auto& t : ref) ref_oov += t.is_oov();
    for (const auto& t : hyp) hyp_oov += t.is_oov();
    Alignment a = Align(CollapseOov(ref), CollapseOov(hyp));
    for (const auto& p : a.ops) {
      if (p.op != EditOp::kMatch || !ref[*p.ref].is_oov()) continue;
      ++tp;
      const std::string& rc = ref[*p.ref].category;
      const std::string& hc = hyp[*p.hyp].category;
      report.category_correct += rc == hc;
      report.two_class_correct += (rc == city_category) == (hc == city_category);
    }
    report.true_positives += tp;
    report.false_positives += hyp_oov - tp;
    report.false_negatives += ref_oov - tp;
  }
  return report;
}

std::optional<double> CaReport::CaHalf() const {
  if (counts.n == 0) return std::nullopt;
  double errors = static_cast<double>(counts.substitutions + counts.insertions +
                                      counts.deletions) -
                  0.5 * static_cast<double>(half_errors);
  return 100.0 * (static_cast<double>(counts.n) - errors) /
         static_cast<double>(counts.n);
}

CaReport ConceptAccuracy(std::span<const ConceptList> refs,
                         std::span<const ConceptList> hyps) {
  CheckParallel(refs.size(), hyps.size());
  auto symbols = [](const ConceptList& cs) {
    std::vector<std::string> out;
    for (const auto& c : cs) out.push_back(c.name + "=" + c.value);
    return out;
  };
  CaReport report;
  for (size_t k = 0; k < refs.size(); ++k) {
    Alignment a = Align(symbols(refs[k]), symbols(hyps[k]));
    report.counts.Add(a, refs[k].size());
    for (const auto& p : a.ops) {
      if (p.op != EditOp::kSubstitution) continue;
      const Concept& r = refs[k][*p.ref];
      const Concept& h = hyps[k][*p.hyp];
      bool city = r.name == "goalcity" || r.name == "sourcecity";
      bool one_oov = (r.value == kOovCityValue) != (h.value == kOovCityValue);
      if (city && r.name == h.name && one_oov) ++report.half_errors;
    }
  }
  return report;
}

std::string FormatPercent(const std::optional<double>& value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *value);
  return buf;
}

}  // namespace oovdial
