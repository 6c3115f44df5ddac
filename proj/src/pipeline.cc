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


#include "oovdial/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace oovdial {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* ToString(InputMode mode) {
  return mode == InputMode::kTextExact ? "text-exact" : "simulate-recognition";
}

PipelineConfig PipelineConfig::Parse(const std::string& json_text,
                                     const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config: expected a JSON object");

  PipelineConfig c;
  const std::map<std::string, std::string*> paths = {
      {"lexicon", &c.lexicon},
      {"reference_lexicon", &c.reference_lexicon},
      {"grammar", &c.grammar},
      {"lm", &c.lm},
      {"timetable", &c.timetable},
      {"prompts", &c.prompts},
      {"train", &c.train},
      {"test", &c.test},
      {"test_concepts", &c.test_concepts}};
  try {
    for (const auto& [key, value] : j.items()) {
      if (auto it = paths.find(key); it != paths.end()) {
        fs::path p = value.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        *it->second = p.lexically_normal().string();
      } else if (key == "noise") {
        for (const auto& [nk, nv] : value.items()) {
          if (nk == "p_sub") {
            c.noise.p_sub = nv.get<double>();
          } else if (nk == "confusables_per_token") {
            c.noise.confusables_per_token = nv.get<int>();
          } else if (nk == "oov_flat_logprob") {
            c.noise.oov_flat_logprob = nv.get<double>();
          } else if (nk == "seed") {
            c.noise.seed = nv.get<uint64_t>();
          } else {
            throw FormatError("config: unknown noise key '" + nk + "'");
          }
        }
      } else if (key == "lm_weight") {
        c.lm_weight = value.get<double>();
      } else if (key == "input_mode") {
        std::string m = value.get<std::string>();
        if (m == "text-exact") {
          c.input_mode = InputMode::kTextExact;
        } else if (m == "simulate-recognition") {
          c.input_mode = InputMode::kSimulateRecognition;
        } else {
          throw FormatError("config: unknown input_mode '" + m + "'");
        }
      } else if (key == "policy") {
        for (const auto& [pk, pv] : value.items()) {
          if (pk == "max_repairs") {
            c.policy.max_repairs = pv.get<int>();
          } else if (pk == "confirm_after_conflict") {
            c.policy.confirm_after_conflict = pv.get<bool>();
          } else {
            throw FormatError("config: unknown policy key '" + pk + "'");
          }
        }
      } else {
        throw FormatError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  c.noise.Validate();
  if (!(c.lm_weight > 0.0)) throw FormatError("config: lm_weight must be > 0");
  return c;
}

PipelineConfig PipelineConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str(), fs::path(path).parent_path().string());
}

void PipelineConfig::CheckFiles() const {
  for (const std::string* p :
       {&lexicon, &reference_lexicon, &grammar, &lm, &timetable, &prompts,
        &train, &test, &test_concepts}) {
    if (!p->empty() && !fs::exists(*p)) {
      throw std::runtime_error("configured file does not exist: " + *p);
    }
  }
}

ConceptList Understand(const SemanticParser& parser,
                       std::span<const Token> tokens,
                       const std::optional<std::string>& hint) {
  ParseResult r = parser.Parse(tokens);
  return ExtractConcepts(r.frames, hint);
}

EvalReport RunEvaluation(const EvalInputs& in) {
  if (in.test && in.test->empty()) {
    throw std::invalid_argument("empty test set");
  }
  if (!in.test || !in.lexicon || !in.lm || !in.grammar) {
    throw std::invalid_argument("evaluation inputs are incomplete");
  }
  SemanticParser parser(*in.grammar, in.lexicon);

  std::vector<std::vector<Token>> refs;
  std::vector<ConceptList> translit;
  for (const auto& utt : *in.test) {
    refs.push_back(in.reference_lexicon
                       ? OovTagWithReference(utt, *in.lexicon,
                                             *in.reference_lexicon)
                       : OovTag(utt, *in.lexicon));
    translit.push_back(Understand(parser, refs.back()));
  }
  std::vector<ConceptList> gold;
  if (in.gold) {
    for (const auto& utt : *in.test) {
      auto it = in.gold->find(utt.id);
      if (it == in.gold->end()) {
        throw std::invalid_argument("no reference concepts for " + utt.id);
      }
      gold.push_back(it->second);
    }
  } else {
    gold = translit;
  }

  EvalReport report;
  report.utterances = in.test->size();
  report.rows.push_back({"transliterations", std::nullopt,
                         ConceptAccuracy(gold, translit), std::nullopt});
  for (bool allow_oov : {true, false}) {
    DecodeOptions opts{in.lm_weight, allow_oov};
    auto results = RunRecognition(*in.test, *in.lexicon, *in.lm, in.noise,
                                  opts, in.reference_lexicon);
    std::vector<std::vector<Token>> hyps;
    std::vector<ConceptList> concepts;
    for (const auto& r : results) {
      hyps.push_back(r.hypothesis.Tokens());
      concepts.push_back(Understand(parser, hyps.back()));
    }
    ConditionResult row;
    row.name = allow_oov ? "with OOV" : "without OOV";
    row.wa = WordAccuracy(refs, hyps);
    row.ca = ConceptAccuracy(gold, concepts);
    if (allow_oov) row.detection = OovDetection(refs, hyps);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void WriteEvalTsv(const EvalReport& report, std::ostream& out) {
  out << "input\tWA\tCA\tCA_half\n";
  for (const auto& row : report.rows) {
    out << row.name << '\t'
        << (row.wa ? FormatPercent(row.wa->Accuracy()) : std::string("---"))
        << '\t' << FormatPercent(row.ca.Ca()) << '\t'
        << FormatPercent(row.ca.CaHalf()) << '\n';
  }
  for (const auto& row : report.rows) {
    if (!row.detection) continue;
    const auto& d = *row.detection;
    out << "\nOOV detection (" << row.name << ")\n"
        << "true_positives\t" << d.true_positives << '\n'
        << "false_positives\t" << d.false_positives << '\n'
        << "false_negatives\t" << d.false_negatives << '\n'
        << "precision\t" << FormatPercent(d.Precision()) << '\n'
        << "recall\t" << FormatPercent(d.Recall()) << '\n'
        << "category_accuracy\t" << FormatPercent(d.CategoryAccuracy()) << '\n'
        << "two_class_accuracy\t" << FormatPercent(d.TwoClassAccuracy())
        << '\n';
  }
}

namespace {

ordered_json Percent(const std::optional<double>& v) {
  if (!v) return nullptr;
  return std::round(*v * 1000.0) / 1000.0;
}

ordered_json CountsJson(const ErrorCounts& c) {
  return {{"n", c.n},
          {"matches", c.matches},
          {"substitutions", c.substitutions},
          {"insertions", c.insertions},
          {"deletions", c.deletions}};
}

}  // namespace

void WriteEvalJson(const EvalReport& report, std::ostream& out) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["input"] = row.name;
    if (row.wa) {
      r["wa"] = Percent(row.wa->Accuracy());
      r["wa_counts"] = CountsJson(*row.wa);
    } else {
      r["wa"] = nullptr;
    }
    r["ca"] = Percent(row.ca.Ca());
    r["ca_half"] = Percent(row.ca.CaHalf());
    r["ca_counts"] = CountsJson(row.ca.counts);
    r["ca_half_errors"] = row.ca.half_errors;
    if (row.detection) {
      const auto& d = *row.detection;
      r["oov_detection"] = {
          {"true_positives", d.true_positives},
          {"false_positives", d.false_positives},
          {"false_negatives", d.false_negatives},
          {"precision", Percent(d.Precision())},
          {"recall", Percent(d.Recall())},
          {"category_accuracy", Percent(d.CategoryAccuracy())},
          {"two_class_accuracy", Percent(d.TwoClassAccuracy())}};
    }
    rows.push_back(std::move(r));
  }
  ordered_json doc = {{"utterances", report.utterances}, {"rows", rows}};
  out << doc.dump(2) << '\n';
}

std::shared_ptr<const Resources> Resources::Load(const PipelineConfig& c) {
  c.CheckFiles();
  auto r = std::make_shared<Resources>();
  if (c.lexicon.empty() || c.grammar.empty() || c.timetable.empty()) {
    throw std::runtime_error(
        "config must name a lexicon, a grammar and a timetable");
  }
  r->lexicon = LoadLexicon(c.lexicon);
  r->grammar = Grammar::Load(c.grammar);
  if (!c.lm.empty()) r->lm = ClassBigramLM::Load(c.lm);
  r->db = TimetableDb::Load(c.timetable);
  if (!c.prompts.empty()) r->prompts = PromptTemplates::Load(c.prompts);
  r->noise = c.noise;
  r->lm_weight = c.lm_weight;
  r->input_mode = c.input_mode;
  r->policy = c.policy;
  if (r->input_mode == InputMode::kSimulateRecognition && !r->lm) {
    throw std::runtime_error("simulate-recognition mode needs an LM");
  }
  return r;
}

namespace {

// Letters typed as "b r u" or "b-r-u".
std::optional<std::string> SpelledWord(const std::string& text) {
  std::vector<std::string> letters;
  for (const auto& t : Tokenize(text)) {
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, '-')) {
      if (!part.empty()) letters.push_back(part);
    }
  }
  if (letters.size() < 2) return std::nullopt;
  try {
    return ParseSpelling(letters);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::string ContextCategory(const ClassBigramLM& lm, const Token& t) {
  if (t.is_oov()) return t.category.empty() ? kBoundary : t.category;
  int c = lm.WordCategory(t.word);
  return c < 0 ? std::string(kBoundary) : lm.CategoryName(c);
}

}  // namespace

Interpretation Interpret(const Resources& res, const DialogueState& state,
                         const std::string& text,
                         const std::string& utterance_id) {
  Interpretation out;
  const std::optional<std::string> hint =
      state.focus.empty() ? std::nullopt : std::optional(state.focus);

  if (state.node == Node::kSpell && !state.focus.empty()) {
    if (auto word = SpelledWord(text)) {
      out.tokens.push_back(res.lexicon.Contains(*word)
                               ? Token::Known(*word)
                               : Token::Oov("", *word));
      if (res.lexicon.Contains(*word)) {
        out.concepts.push_back({state.focus, *word});
      } else if (state.focus == "goalcity" || state.focus == "sourcecity") {
        out.concepts.push_back({state.focus, kOovCityValue});
      }
      return out;
    }
  }

  Utterance utt{utterance_id, Tokenize(text)};
  if (utt.tokens.empty()) return out;
  if (res.input_mode == InputMode::kSimulateRecognition) {
    Lattice lat = Corrupt(utt, res.lexicon, res.noise);
    DecodeResult d = Decode(lat, *res.lm, {res.lm_weight, true});
    out.tokens = d.Tokens();
  } else {
    out.tokens = OovTag(utt, res.lexicon);
    if (res.lm) {
      for (size_t i = 0; i < out.tokens.size(); ++i) {
        Token& t = out.tokens[i];
        if (!t.is_oov() || !t.category.empty()) continue;
        std::string left = i ? ContextCategory(*res.lm, out.tokens[i - 1])
                             : std::string(kBoundary);
        std::string right = i + 1 < out.tokens.size()
                                ? ContextCategory(*res.lm, out.tokens[i + 1])
                                : std::string(kBoundary);
        auto ranked = res.lm->BestCategoryForOov(left, right);
        if (!ranked.empty()) t.category = ranked.front().category;
      }
    }
  }
  SemanticParser parser(res.grammar, &res.lexicon);
  out.concepts = Understand(parser, out.tokens, hint);

  // The system asked for a city: an OOV word that yielded nothing is read
  // as the expected city.
  const bool city_focus = state.focus == "goalcity" || state.focus == "sourcecity";
  auto mentions_focus = [&] {
    for (const auto& c : out.concepts) {
      if (c.name == state.focus) return true;
    }
    return false;
  };
  if (city_focus && !mentions_focus()) {
    std::vector<Token> retry = out.tokens;
    bool changed = false;
    for (auto& t : retry) {
      if (t.is_oov() && t.category != "city") {
        t.category = "city";
        changed = true;
      }
    }
    if (changed) {
      ConceptList again = Understand(parser, retry, hint);
      if (std::any_of(again.begin(), again.end(), [&](const Concept& c) {
            return c.name == state.focus;
          })) {
        out.tokens = std::move(retry);
        out.concepts = std::move(again);
      }
    }
  }
  return out;
}

}  // namespace oovdial
