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


// Fixtures shared by the unit tests and the acceptance suite.

#ifndef OOVDIAL_TESTS_COMMON_FIXTURES_H_
#define OOVDIAL_TESTS_COMMON_FIXTURES_H_

#include <string>
#include <vector>

#include "oovdial/semparser.h"

namespace oovdial::fixture {

// Sentence templates with one city slot `@`.
inline const std::vector<std::string>& CityTemplates() {
  static const std::vector<std::string> t = {
      "i want to go to @",
      "i want to go from @",
      "i would like to travel to @ on monday",
      "i need to leave from @ at ten",
      "i want to go from hamburg to @",
      "i want to go from @ to munich",
      "to @",
      "from @",
      "@",
      "i want to arrive in @ by six",
      "i would like to go to @ on friday at eight",
  };
  return t;
}

inline std::string FillCity(const std::string& t, const std::string& city) {
  std::string out = t;
  out.replace(out.find('@'), 1, city);
  return out;
}

// User inputs for exploring the dialogue state space.
inline std::vector<ConceptList> ConceptAlphabet() {
  return {
      {},
      {{"marker", "yes"}},
      {{"marker", "no"}},
      {{"marker", "thanks"}},
      {{"goalcity", "munich"}},
      {{"goalcity", kOovCityValue}},
      {{"goalcity", "paris"}},
      {{"sourcecity", "hamburg"}},
      {{"sourcecity", kOovCityValue}},
      {{"date", "monday"}},
      {{"sourcetime", "10"}},
      {{"goaltime", "16"}},
      {{"goalcity", "bremen"}, {"sourcecity", "hamburg"}},
  };
}

}  // namespace oovdial::fixture

#endif  // OOVDIAL_TESTS_COMMON_FIXTURES_H_
