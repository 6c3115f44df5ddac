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


// Command-line front end: corpus synthesis, training, recognition,
// parsing, evaluation and dialogue.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "oovdial/class_lm.h"
#include "oovdial/corpus.h"
#include "oovdial/dialogue.h"
#include "oovdial/eval_metrics.h"
#include "oovdial/lattice.h"
#include "oovdial/oov_estimator.h"
#include "oovdial/pipeline.h"
#include "oovdial/semparser.h"
#include "oovdial/service.h"
#include "oovdial/synth.h"

namespace {

using namespace oovdial;

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// --config, else the environment variable.
PipelineConfig LoadConfig(const std::string& path) {
  std::string p = path;
  if (p.empty()) {
    const char* env = std::getenv(kConfigEnvVar);
    if (!env || !*env) {
      throw std::runtime_error(std::string("no --config given and ") +
                               kConfigEnvVar + " is not set");
    }
    p = env;
  }
  return PipelineConfig::Load(p);
}

void RequireFile(const std::string& what, const std::string& path) {
  if (path.empty()) throw std::runtime_error(what + " is not configured");
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error(what + " not found: " + path);
  }
}

struct SynthArgs {
  std::string out = "data/replica";
  uint64_t seed = 1;
  size_t vocabulary = 1110;
  size_t test_utterances = 2383;
  double target = 0.053;
  double tolerance = 0.001;
};

int RunSynth(const SynthArgs& a) {
  SynthOptions o;
  o.seed = a.seed;
  o.vocabulary_size = a.vocabulary;
  o.test_utterances = a.test_utterances;
  SynthCorpus c = a.tolerance > 0 ? SearchReplica(o, a.target, a.tolerance)
                                  : GenerateReplica(o);
  WriteReplica(c, a.out);
  std::printf("seed %llu: %zu train, %zu test utterances, vocabulary %zu, "
              "test OOV rate %.4f\n",
              static_cast<unsigned long long>(c.seed), c.train.size(),
              c.test.size(), c.lexicon.VocabularySize(), c.test_oov_rate);
  return 0;
}

struct TrainArgs {
  std::string corpus, lexicon, out, report;
};

int RunTrain(const TrainArgs& a) {
  RequireFile("lexicon", a.lexicon);
  RequireFile("corpus", a.corpus);
  CategoryLexicon lex = LoadLexicon(a.lexicon);
  Corpus train = LoadCorpus(a.corpus);
  EstimationResult est = EstimateAll(train, lex);
  ClassBigramLM lm = TrainLm(train, est.lexicon);
  auto out = OpenOut(a.out);
  lm.Write(out);
  if (!a.report.empty()) {
    auto rep = OpenOut(a.report);
    WriteEstimateReport(est, rep);
  }
  return 0;
}

struct EstimateArgs {
  std::string corpus, lexicon, out, curves_dir;
};

int RunEstimate(const EstimateArgs& a) {
  RequireFile("lexicon", a.lexicon);
  RequireFile("corpus", a.corpus);
  EstimationResult est = EstimateAll(LoadCorpus(a.corpus), LoadLexicon(a.lexicon));
  if (a.out.empty()) {
    WriteEstimateReport(est, std::cout);
  } else {
    auto out = OpenOut(a.out);
    WriteEstimateReport(est, out);
  }
  if (!a.curves_dir.empty()) {
    std::filesystem::create_directories(a.curves_dir);
    for (const auto& [cat, curve] : est.curves) {
      auto out = OpenOut(a.curves_dir + "/" + cat + ".csv");
      WriteGrowthCurveCsv(curve, out);
    }
  }
  return 0;
}

struct DecodeArgs {
  std::string lm, lexicon, corpus, out, lattice_dir, reference_lexicon;
  NoiseModel noise;
  double lm_weight = 1.0;
  bool no_oov = false;
};

int RunDecode(const DecodeArgs& a) {
  RequireFile("lm", a.lm);
  RequireFile("lexicon", a.lexicon);
  RequireFile("corpus", a.corpus);
  ClassBigramLM lm = ClassBigramLM::Load(a.lm);
  CategoryLexicon lex = LoadLexicon(a.lexicon);
  Corpus corpus = LoadCorpus(a.corpus);
  std::optional<CategoryLexicon> ref;
  if (!a.reference_lexicon.empty()) ref = LoadLexicon(a.reference_lexicon);
  if (!a.lattice_dir.empty()) {
    std::filesystem::create_directories(a.lattice_dir);
    for (const auto& utt : corpus) {
      auto out = OpenOut(a.lattice_dir + "/" + utt.id + ".lat");
      Corrupt(utt, lex, a.noise).Write(out);
    }
  }
  auto results = RunRecognition(corpus, lex, lm, a.noise,
                                {a.lm_weight, !a.no_oov}, ref ? &*ref : nullptr);
  std::ofstream file;
  if (!a.out.empty()) file = OpenOut(a.out);
  std::ostream& out = a.out.empty() ? std::cout : file;
  std::vector<std::vector<Token>> refs, hyps;
  for (const auto& r : results) {
    char score[40];
    std::snprintf(score, sizeof(score), "%.6f", r.hypothesis.total_logprob);
    out << r.utterance_id << '\t' << ToString(std::span<const Token>(r.hypothesis.Tokens()))
        << '\t' << score << '\n';
    refs.push_back(r.reference);
    hyps.push_back(r.hypothesis.Tokens());
  }
  WaReport wa = WordAccuracy(refs, hyps);
  std::fprintf(stderr, "WA %s (N=%zu S=%zu I=%zu D=%zu)\n",
               FormatPercent(wa.Accuracy()).c_str(), wa.n, wa.substitutions,
               wa.insertions, wa.deletions);
  return 0;
}

struct ParseArgs {
  std::string grammar, lexicon, text, corpus, hint;
};

int RunParse(const ParseArgs& a) {
  RequireFile("grammar", a.grammar);
  RequireFile("lexicon", a.lexicon);
  Grammar g = Grammar::Load(a.grammar);
  CategoryLexicon lex = LoadLexicon(a.lexicon);
  SemanticParser parser(g, &lex);
  std::optional<std::string> hint;
  if (!a.hint.empty()) hint = a.hint;
  auto show = [&](const std::string& id, const std::vector<std::string>& words) {
    Utterance u{id, words};
    std::vector<Token> tokens = OovTag(u, lex);
    // `<city>` style input marks an OOV word of that category.
    for (size_t i = 0; i < words.size(); ++i) {
      const auto& w = words[i];
      if (w.size() > 2 && w.front() == '<' && w.back() == '>') {
        tokens[i] = Token::Oov(w.substr(1, w.size() - 2));
      }
    }
    ParseResult r = parser.Parse(tokens);
    std::cout << id << '\t' << ToString(ExtractConcepts(r.frames, hint)) << '\n';
    for (const auto& f : r.frames) std::cout << "  " << f.ToString() << '\n';
  };
  if (!a.text.empty()) show("input", Tokenize(a.text));
  if (!a.corpus.empty()) {
    for (const auto& utt : LoadCorpus(a.corpus)) show(utt.id, utt.tokens);
  }
  return 0;
}

struct EvalArgs {
  std::string config, test, out, format = "tsv";
};

int RunEval(const EvalArgs& a) {
  PipelineConfig c = LoadConfig(a.config);
  if (!a.test.empty()) c.test = a.test;
  RequireFile("lm", c.lm);
  RequireFile("lexicon", c.lexicon);
  RequireFile("grammar", c.grammar);
  RequireFile("test corpus", c.test);
  c.CheckFiles();
  CategoryLexicon lex = LoadLexicon(c.lexicon);
  std::optional<CategoryLexicon> ref;
  if (!c.reference_lexicon.empty()) ref = LoadLexicon(c.reference_lexicon);
  ClassBigramLM lm = ClassBigramLM::Load(c.lm);
  Grammar g = Grammar::Load(c.grammar);
  Corpus test = LoadCorpus(c.test);
  std::map<std::string, ConceptList> gold;
  if (!c.test_concepts.empty()) gold = LoadConceptFile(c.test_concepts);

  EvalInputs in;
  in.test = &test;
  in.lexicon = &lex;
  in.reference_lexicon = ref ? &*ref : nullptr;
  in.lm = &lm;
  in.grammar = &g;
  in.gold = c.test_concepts.empty() ? nullptr : &gold;
  in.noise = c.noise;
  in.lm_weight = c.lm_weight;
  EvalReport report = RunEvaluation(in);

  std::ofstream file;
  if (!a.out.empty()) file = OpenOut(a.out);
  std::ostream& out = a.out.empty() ? std::cout : file;
  if (a.format == "json") {
    WriteEvalJson(report, out);
  } else {
    WriteEvalTsv(report, out);
  }
  return 0;
}

int RunDialog(const std::string& config) {
  auto res = Resources::Load(LoadConfig(config));
  DialogueManager dm(res->db, res->prompts, res->policy);
  StepResult r = dm.Start();
  std::cout << "System: " << r.act.text << "\n  [system goal: "
            << ToString(r.act.goal) << "]\n";
  std::string line;
  int turn = 0;
  while (!IsTerminal(r.state.node) && std::cout << "User: " &&
         std::getline(std::cin, line)) {
    Interpretation in = Interpret(*res, r.state, line, "dialog#" + std::to_string(++turn));
    std::cout << "  [" << ToString(in.concepts) << "]\n";
    r = dm.Step(r.state, in.concepts);
    std::cout << "System: " << r.act.text << "\n  [system goal: "
              << ToString(r.act.goal) << "]\n";
  }
  return 0;
}

int RunServe(const std::string& config, const std::string& host, int port,
             const std::string& journal) {
  auto res = Resources::Load(LoadConfig(config));
  SessionStore store(res, journal);
  HttpService http(store);
  int bound = http.Bind(host, port);
  std::fprintf(stderr, "listening on %s:%d\n", host.c_str(), bound);
  http.Run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OOV-aware spoken dialogue toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate the synthetic replica corpus");
  s->add_option("--out", synth.out, "Output directory");
  s->add_option("--seed", synth.seed, "First seed to try");
  s->add_option("--vocabulary", synth.vocabulary, "System vocabulary size");
  s->add_option("--test-utterances", synth.test_utterances);
  s->add_option("--target-oov-rate", synth.target);
  s->add_option("--tolerance", synth.tolerance,
                "Accepted deviation from the target; 0 disables the search");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Estimate OOV probabilities and train the LM");
  t->add_option("--corpus", train.corpus)->required();
  t->add_option("--lexicon", train.lexicon)->required();
  t->add_option("--out", train.out)->required();
  t->add_option("--report", train.report, "Write the OOV estimate table");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Estimate per-category OOV probabilities");
  e->add_option("--corpus", est.corpus)->required();
  e->add_option("--lexicon", est.lexicon)->required();
  e->add_option("--out", est.out);
  e->add_option("--curves-dir", est.curves_dir, "Write growth curves as CSV");

  DecodeArgs dec;
  auto* d = app.add_subcommand("decode", "Simulate recognition of a corpus");
  d->add_option("--lm", dec.lm)->required();
  d->add_option("--lexicon", dec.lexicon)->required();
  d->add_option("--corpus", dec.corpus)->required();
  d->add_option("--reference-lexicon", dec.reference_lexicon);
  d->add_option("--out", dec.out);
  d->add_option("--lattice-dir", dec.lattice_dir);
  d->add_option("--noise-seed", dec.noise.seed);
  d->add_option("--p-sub", dec.noise.p_sub);
  d->add_option("--confusables", dec.noise.confusables_per_token);
  d->add_option("--oov-logprob", dec.noise.oov_flat_logprob);
  d->add_option("--lm-weight", dec.lm_weight);
  d->add_flag("--no-oov", dec.no_oov, "Ignore OOV edges");

  ParseArgs parse;
  auto* p = app.add_subcommand("parse", "Parse text into frames and concepts");
  p->add_option("--grammar", parse.grammar)->required();
  p->add_option("--lexicon", parse.lexicon)->required();
  p->add_option("--text", parse.text);
  p->add_option("--corpus", parse.corpus);
  p->add_option("--hint", parse.hint, "Expected parameter");

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "Score transliterations and both recognizers");
  v->add_option("--config", ev.config);
  v->add_option("--test", ev.test, "Override the configured test corpus");
  v->add_option("--out", ev.out);
  v->add_option("--format", ev.format)->check(CLI::IsMember({"tsv", "json"}));

  std::string config;
  auto* dl = app.add_subcommand("dialog", "Interactive dialogue on the terminal");
  dl->add_option("--config", config);

  std::string host = "127.0.0.1", journal;
  int port = 8080;
  auto* sv = app.add_subcommand("serve", "HTTP session service");
  sv->add_option("--config", config);
  sv->add_option("--host", host);
  sv->add_option("--port", port);
  sv->add_option("--journal", journal, "Append-only session journal");

  std::string dot_out;
  auto* dot = app.add_subcommand("atn-dot", "Write the transition network as DOT");
  dot->add_option("--out", dot_out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*s) return RunSynth(synth);
    if (*t) return RunTrain(train);
    if (*e) return RunEstimate(est);
    if (*d) return RunDecode(dec);
    if (*p) return RunParse(parse);
    if (*v) return RunEval(ev);
    if (*dl) return RunDialog(config);
    if (*sv) return RunServe(config, host, port, journal);
    if (*dot) {
      if (dot_out.empty()) {
        WriteAtnDot(std::cout);
      } else {
        auto out = OpenOut(dot_out);
        WriteAtnDot(out);
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
