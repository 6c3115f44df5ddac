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

// Configuration, the three-condition evaluation and the text-to-concepts
// front end shared by the CLI and the session service.

#ifndef OOVDIAL_PIPELINE_H_
#define OOVDIAL_PIPELINE_H_

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "oovdial/class_lm.h"
#include "oovdial/corpus.h"
#include "oovdial/dialogue.h"
#include "oovdial/eval_metrics.h"
#include "oovdial/lattice.h"
#include "oovdial/semparser.h"

namespace oovdial {

// Environment variable naming the default configuration file.
inline constexpr const char kConfigEnvVar[] = "OOVDIAL_CONFIG";

enum class InputMode { kTextExact, kSimulateRecognition };
const char* ToString(InputMode mode);

struct PipelineConfig {
  // Absolute or relative to the configuration file.  Empty means unset.
  std::string lexicon;
  std::string reference_lexicon;
  std::string grammar;
  std::string lm;
  std::string timetable;
  std::string prompts;
  std::string train;
  std::string test;
  std::string test_concepts;
  NoiseModel noise;
  double lm_weight = 1.0;
  InputMode input_mode = InputMode::kTextExact;
  DialoguePolicy policy;

  // JSON object; unknown keys are rejected.  Throws FormatError.
  static PipelineConfig Parse(const std::string& json_text,
                              const std::string& base_dir = "");
  static PipelineConfig Load(const std::string& path);
  // Throws std::runtime_error naming the first configured path that does
  // not exist.
  void CheckFiles() const;
};

struct ConditionResult {
  std::string name;
  std::optional<WaReport> wa;
  CaReport ca;
  std::optional<OovDetectionReport> detection;
};

struct EvalReport {
  // transliterations, with OOV, without OOV.
  std::vector<ConditionResult> rows;
  size_t utterances = 0;
};

struct EvalInputs {
  const Corpus* test = nullptr;
  const CategoryLexicon* lexicon = nullptr;
  // True categories for words outside `lexicon`; optional.
  const CategoryLexicon* reference_lexicon = nullptr;
  const ClassBigramLM* lm = nullptr;
  const Grammar* grammar = nullptr;
  // Intended concepts; when null the transliteration parse is the
  // reference.
  const std::map<std::string, ConceptList>* gold = nullptr;
  NoiseModel noise;
  double lm_weight = 1.0;
};

// Throws std::invalid_argument("empty test set") on an empty corpus.
EvalReport RunEvaluation(const EvalInputs& inputs);
void WriteEvalTsv(const EvalReport& report, std::ostream& out);
void WriteEvalJson(const EvalReport& report, std::ostream& out);

// Parse plus concept extraction.
ConceptList Understand(const SemanticParser& parser,
                       std::span<const Token> tokens,
                       const std::optional<std::string>& hint = {});

// Everything a live dialogue needs, loaded once and shared read-only.
struct Resources {
  CategoryLexicon lexicon;
  Grammar grammar;
  std::optional<ClassBigramLM> lm;
  TimetableDb db;
  PromptTemplates prompts;
  NoiseModel noise;
  double lm_weight = 1.0;
  InputMode input_mode = InputMode::kTextExact;
  DialoguePolicy policy;

  static std::shared_ptr<const Resources> Load(const PipelineConfig& config);
};

struct Interpretation {
  std::vector<Token> tokens;
  ConceptList concepts;
};

// Turns typed text into concepts for the given dialogue state.  In SPELL
// a sequence of single letters is read as a spelled word for the focus.
// Unknown words become OOV tokens, classified by the decoder in
// simulate-recognition mode and by their neighbours otherwise.
// `utterance_id` seeds the simulated recognizer.
Interpretation Interpret(const Resources& resources,
                         const DialogueState& state, const std::string& text,
                         const std::string& utterance_id);

}  // namespace oovdial

#endif  // OOVDIAL_PIPELINE_H_
