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


#include "oovdial/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oovdial {

NoveltyStream::NoveltyStream(double rate, std::vector<std::string> pool)
    : rate_(rate), pool_(std::move(pool)) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("novelty rate must lie in [0,1]");
  }
}

std::string NoveltyStream::Next(Rng& rng) {
  if (seen_.empty() || rng.Bernoulli(rate_)) {
    if (seen_.size() >= pool_.size()) {
      throw std::runtime_error("name pool exhausted");
    }
    seen_.push_back(pool_[seen_.size()]);
    return seen_.back();
  }
  return seen_[rng.Below(seen_.size())];
}

std::vector<std::string> FixedNoveltySample(double rate, size_t m,
                                            uint64_t seed) {
  std::vector<std::string> pool;
  pool.reserve(m);
  for (size_t i = 0; i < m; ++i) pool.push_back("w" + std::to_string(i));
  NoveltyStream stream(rate, std::move(pool));
  Rng rng(seed);
  std::vector<std::string> out;
  out.reserve(m);
  for (size_t i = 0; i < m; ++i) out.push_back(stream.Next(rng));
  return out;
}

namespace {

const std::vector<std::pair<std::string, std::vector<std::string>>>&
ClosedWords() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>>
      words = {
          {"pron", {"i", "me"}},
          {"modal", {"want", "need", "would", "like", "can", "have"}},
          {"verb", {"go", "travel", "leave", "arrive", "take", "be"}},
          {"aux", {"am", "is", "are"}},
          {"prep_to", {"to"}},
          {"prep_from", {"from"}},
          {"prep_on", {"on"}},
          {"prep_at", {"at"}},
          {"prep_by", {"by"}},
          {"prep_in", {"in"}},
          {"prep_of", {"of"}},
          {"prep_about", {"about"}},
          {"det", {"a", "the", "my"}},
          {"noun", {"train", "connection", "station", "name", "region"}},
          {"weekday",
           {"monday", "tuesday", "wednesday", "thursday", "friday",
            "saturday", "sunday", "today", "tomorrow"}},
          {"number",
           {"one", "two", "three", "four", "five", "six", "seven", "eight",
            "nine", "ten", "eleven", "twelve", "thirteen", "fourteen",
            "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
            "twenty", "twentyone", "twentytwo", "twentythree"}},
          {"timeword", {"half", "past", "oclock"}},
          {"marker", {"yes", "no", "okay", "thanks", "goodbye"}},
          {"conj", {"and", "but", "not"}},
          {"filler", {"please", "what", "there", "this", "mrs", "mr"}},
      };
  return words;
}

const std::vector<std::string>& OpenCategories() {
  static const std::vector<std::string> cats = {
      "city", "region", "surname", "firstname", "station", "rare", "garbage"};
  return cats;
}

const std::vector<std::string>& HourWords() {
  return ClosedWords()[15].second;
}

// Pools are fixed across seeds so the first city types are always the
// covered ones.
std::map<std::string, std::vector<std::string>> BuildPools() {
  std::set<std::string> taken;
  for (const auto& [cat, ws] : ClosedWords()) taken.insert(ws.begin(), ws.end());
  taken.insert("brussels");  // kept out of every vocabulary
  Rng rng(0x6f6f7664ULL);
  std::map<std::string, std::vector<std::string>> pools;
  auto add = [&](const std::string& cat, const std::string& w) {
    if (taken.insert(w).second) pools[cat].push_back(w);
  };
  auto combos = [&](const std::string& cat, const std::vector<std::string>& a,
                    const std::vector<std::string>& b,
                    const std::vector<std::string>& glue) {
    std::vector<std::string> all;
    for (const auto& g : glue) {
      for (const auto& x : a) {
        for (const auto& y : b) all.push_back(x + g + y);
      }
    }
    for (size_t i = all.size(); i > 1; --i) {
      std::swap(all[i - 1], all[rng.Below(i)]);
    }
    for (const auto& w : all) add(cat, w);
  };

  for (const char* c :
       {"hamburg", "munich", "berlin", "cologne", "frankfurt", "stuttgart",
        "dusseldorf", "dortmund", "essen", "bremen", "hanover", "leipzig",
        "dresden", "nuremberg", "bonn", "augsburg", "wurzburg", "regensburg",
        "ulm", "kassel", "erfurt", "rostock", "kiel", "lubeck", "mainz",
        "wiesbaden", "karlsruhe", "mannheim", "heidelberg", "freiburg",
        "passau", "bamberg", "bayreuth", "gottingen", "osnabruck", "munster",
        "aachen", "trier", "koblenz", "saarbrucken", "magdeburg", "halle",
        "jena", "weimar", "potsdam", "schwerin", "paris", "vienna", "zurich",
        "amsterdam", "prague", "london", "rome", "milan", "basel", "salzburg",
        "innsbruck", "copenhagen", "warsaw", "budapest", "strasbourg", "lyon",
        "luxembourg", "antwerp"}) {
    add("city", c);
  }
  combos("city",
         {"alt", "neu", "ober", "unter", "gross", "klein", "bad", "hohen",
          "nieder", "wald", "stein", "rot", "schwarz", "weiss", "blau",
          "gruen", "lind", "eich", "buch", "birk", "ros", "hart", "kirch",
          "muehl", "wolf", "fal", "reich", "len", "mar", "hil"},
         {"dorf", "heim", "burg", "berg", "hausen", "feld", "stadt", "bach",
          "au", "ingen", "kirchen", "brueck", "hof", "stedt", "tal", "rode",
          "beck", "furt"},
         {"", "en"});
  combos("region",
         {"bav", "sax", "thur", "fran", "swab", "hess", "west", "east",
          "pomer", "siles", "lusat", "aleman", "rhen", "mosel", "eif",
          "harz", "weser", "elb", "isar", "spree"},
         {"ia", "land", "gau", "mark"}, {""});
  combos("surname",
         {"mul", "schmi", "schnei", "fi", "we", "mey", "wag", "be", "schul",
          "ho", "kel", "ri", "klei", "wol", "schro", "zim", "brau", "kru",
          "har", "lan", "wer", "krau", "leh", "ko", "hu", "ma", "ber", "fuch",
          "vo", "sei"},
         {"ler", "mann", "dt", "ner", "ke", "ert", "sch", "el", "berger",
          "tz", "ger", "ter", "bach", "stein", "hardt", "dl"},
         {""});
  combos("firstname",
         {"an", "ma", "li", "jo", "ka", "pe", "ste", "mi", "sa", "ju", "le",
          "hel", "ger", "wer", "ur", "bri", "chri", "da", "e", "fe"},
         {"na", "ria", "nas", "ter", "fan", "chael", "bine", "lia", "ne",
          "ga", "ko", "ke", "mut", "hard", "ner", "sula", "git", "stine",
          "niel", "va", "lix"},
         {""});
  combos("station",
         {"haupt", "ost", "west", "nord", "sued", "alt", "neu", "zoo",
          "markt", "park", "dom", "hafen", "ring", "linden", "eichen"},
         {"platz", "tor", "brunnen", "allee", "strasse", "garten", "ufer",
          "damm", "kreuz", "bogen"},
         {""});

  const std::string consonants = "bdfgklmnprstvz";
  const std::string vowels = "aeiou";
  auto syllables = [&](size_t n) {
    std::string w;
    for (size_t s = 0; s < n; ++s) {
      w += consonants[rng.Below(consonants.size())];
      w += vowels[rng.Below(vowels.size())];
    }
    return w;
  };
  // Extend the combination pools with generated names of the same shape.
  const std::map<std::string, std::vector<std::string>> endings = {
      {"city", {"dorf", "heim", "burg", "hausen", "stadt"}},
      {"region", {"ia", "land", "gau"}},
      {"surname", {"mann", "ler", "berger"}},
      {"firstname", {"na", "ria", "bert"}},
      {"station", {"platz", "tor", "allee"}}};
  for (const auto& [cat, ends] : endings) {
    while (pools[cat].size() < 3000) {
      add(cat, syllables(1 + rng.Below(2)) + ends[rng.Below(ends.size())]);
    }
  }
  while (pools["rare"].size() < 3000) {
    add("rare", syllables(2 + rng.Below(2)));
  }
  const std::string letters = "ahmnesrtu";
  while (pools["garbage"].size() < 3000) {
    std::string w;
    size_t len = 1 + rng.Below(4);
    for (size_t i = 0; i < len; ++i) w += letters[rng.Below(letters.size())];
    add("garbage", w + "-");
  }
  return pools;
}

const std::map<std::string, std::vector<std::string>>& Pools() {
  static const auto pools = BuildPools();
  return pools;
}

// Weighted utterance patterns.  `{x}` draws a slot filler, `!w` is the
// dialogue marker w.
const std::vector<std::pair<double, std::string>>& Patterns() {
  static const std::vector<std::pair<double, std::string>> p = {
      {4, "i want to go to {gc}"},
      {3, "i want to go from {sc} to {gc}"},
      {2, "i would like to travel from {sc} to {gc} on {d}"},
      {2, "i need a connection from {sc} to {gc} on {d} at {dt}"},
      {2, "i need a train to {gc} on {d}"},
      {3, "to {gc}"},
      {2, "to {gc} please"},
      {2, "from {sc}"},
      {3, "from {sc} to {gc}"},
      {2, "{gc}"},
      {2, "on {d}"},
      {2, "on {d} at {dt}"},
      {2, "at {dt}"},
      {1, "at {dt} oclock"},
      {1, "i want to leave at {dt}"},
      {1, "i want to arrive by {at}"},
      {1, "i have to be in {gc} by {at}"},
      {3, "!yes"},
      {1, "!yes please"},
      {2, "!no"},
      {1, "!no !thanks"},
      {1, "!thanks !goodbye"},
      {1, "!okay"},
      {1, "not to {gc2} but to {gc}"},
      {1, "i am in {sc} and want to go to {gc}"},
      {1, "at half past {ht}"},
      {1, "my name is {fn} {sn}"},
      {1, "this is mrs {sn}"},
      {1, "i want to go to the {st} station in {gc}"},
      {1, "is there a train to the region of {reg}"},
      {1, "what about {reg}"},
      {0.5, "can i take my {rare} on the train"},
      {0.5, "i have a {rare}"},
  };
  return p;
}

struct GenState {
  Rng rng;
  std::map<std::string, NoveltyStream> streams;

  size_t OpenTypes() const {
    size_t n = 0;
    for (const auto& [c, s] : streams) n += s.NumTypes();
    return n;
  }
};

struct GenUtterance {
  std::vector<std::string> tokens;
  ConceptList concepts;
};

GenUtterance Generate(GenState& st, double fragment_rate) {
  const auto& patterns = Patterns();
  double total = 0.0;
  for (const auto& [w, p] : patterns) total += w;
  double x = st.rng.Uniform() * total;
  size_t pick = 0;
  while (pick + 1 < patterns.size() && x >= patterns[pick].first) {
    x -= patterns[pick].first;
    ++pick;
  }
  GenUtterance out;
  std::istringstream in(patterns[pick].second);
  std::string item;
  auto hour = [&]() { return 5 + st.rng.Below(18); };
  while (in >> item) {
    if (item[0] == '!') {
      out.tokens.push_back(item.substr(1));
      out.concepts.push_back({"marker", item.substr(1)});
    } else if (item == "{gc}" || item == "{sc}" || item == "{gc2}") {
      std::string city = st.streams.at("city").Next(st.rng);
      out.tokens.push_back(city);
      if (item == "{gc}") out.concepts.push_back({"goalcity", city});
      if (item == "{sc}") out.concepts.push_back({"sourcecity", city});
    } else if (item == "{d}") {
      const auto& days = ClosedWords()[14].second;
      std::string d = days[st.rng.Below(days.size())];
      out.tokens.push_back(d);
      out.concepts.push_back({"date", d});
    } else if (item == "{dt}" || item == "{at}" || item == "{ht}") {
      uint64_t h = hour();
      out.tokens.push_back(HourWords()[h - 1]);
      std::string v = std::to_string(h);
      if (item == "{ht}") v += ":30";
      out.concepts.push_back({item == "{at}" ? "goaltime" : "sourcetime", v});
    } else if (item.front() == '{') {
      static const std::map<std::string, std::string> kSlot = {
          {"{reg}", "region"}, {"{fn}", "firstname"}, {"{sn}", "surname"},
          {"{st}", "station"}, {"{rare}", "rare"}};
      out.tokens.push_back(st.streams.at(kSlot.at(item)).Next(st.rng));
    } else {
      out.tokens.push_back(item);
    }
  }
  if (st.rng.Bernoulli(fragment_rate)) {
    size_t pos = st.rng.Below(out.tokens.size() + 1);
    out.tokens.insert(out.tokens.begin() + static_cast<long>(pos),
                      st.streams.at("garbage").Next(st.rng));
  }
  return out;
}

std::string MakeId(const char* prefix, size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%05zu", prefix, i);
  return buf;
}

}  // namespace

SynthCorpus GenerateReplica(const SynthOptions& options) {
  size_t closed = 0;
  for (const auto& [c, ws] : ClosedWords()) closed += ws.size();
  if (options.vocabulary_size <= closed) {
    throw std::invalid_argument("vocabulary size must exceed the " +
                                std::to_string(closed) + " closed words");
  }
  const size_t target_open = options.vocabulary_size - closed;

  GenState st{Rng(SplitMix64(options.seed)), {}};
  for (const auto& cat : OpenCategories()) {
    auto it = options.novelty.find(cat);
    if (it == options.novelty.end()) {
      throw std::invalid_argument("no novelty rate for category " + cat);
    }
    st.streams.emplace(cat, NoveltyStream(it->second, Pools().at(cat)));
  }

  SynthCorpus out;
  out.seed = options.seed;
  out.train = Corpus("train");
  out.test = Corpus("test");
  size_t skipped = 0;
  while (st.OpenTypes() < target_open) {
    if (target_open - st.OpenTypes() <= 8) {
      GenState snapshot = st;
      GenUtterance u = Generate(st, options.fragment_rate);
      if (st.OpenTypes() > target_open) {
        st = std::move(snapshot);
        st.rng.Next();
        if (++skipped > 100000) {
          throw std::runtime_error("cannot meet the vocabulary size exactly");
        }
        continue;
      }
      out.train.Add({MakeId("train", out.train.size() + 1), u.tokens});
    } else {
      GenUtterance u = Generate(st, options.fragment_rate);
      out.train.Add({MakeId("train", out.train.size() + 1), u.tokens});
    }
  }

  for (const auto& [cat, ws] : ClosedWords()) {
    out.lexicon.DeclareCategory(cat, false);
    out.full_lexicon.DeclareCategory(cat, false);
    for (const auto& w : ws) {
      out.lexicon.AddWord(w, cat);
      out.full_lexicon.AddWord(w, cat);
    }
  }
  for (const auto& cat : OpenCategories()) {
    out.lexicon.DeclareCategory(cat, true);
    out.full_lexicon.DeclareCategory(cat, true);
    for (size_t i = 0; i < st.streams.at(cat).NumTypes(); ++i) {
      out.lexicon.AddWord(Pools().at(cat)[i], cat);
    }
  }

  size_t tokens = 0, oov = 0;
  for (size_t i = 0; i < options.test_utterances; ++i) {
    GenUtterance u = Generate(st, options.fragment_rate);
    std::string id = MakeId("test", i + 1);
    for (const auto& w : u.tokens) {
      ++tokens;
      oov += !out.lexicon.Contains(w);
    }
    for (auto& c : u.concepts) {
      if ((c.name == "goalcity" || c.name == "sourcecity") &&
          !out.lexicon.Contains(c.value)) {
        c.value = kOovCityValue;
      }
    }
    out.test_concepts[id] = std::move(u.concepts);
    out.test.Add({id, std::move(u.tokens)});
  }
  for (const auto& cat : OpenCategories()) {
    for (size_t i = 0; i < st.streams.at(cat).NumTypes(); ++i) {
      out.full_lexicon.AddWord(Pools().at(cat)[i], cat);
    }
  }
  out.test_oov_rate =
      tokens ? static_cast<double>(oov) / static_cast<double>(tokens) : 0.0;
  return out;
}

SynthCorpus SearchReplica(SynthOptions options, double target,
                          double tolerance, int max_tries) {
  for (int i = 0; i < max_tries; ++i) {
    SynthCorpus c = GenerateReplica(options);
    if (std::abs(c.test_oov_rate - target) <= tolerance) return c;
    ++options.seed;
  }
  throw std::runtime_error("no seed reached the requested OOV rate");
}

void WriteReplica(const SynthCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  {
    auto out = open("train.txt");
    WriteCorpus(corpus.train, out);
  }
  {
    auto out = open("test.txt");
    WriteCorpus(corpus.test, out);
  }
  {
    auto out = open("lexicon.tsv");
    WriteLexicon(corpus.lexicon, out);
  }
  {
    auto out = open("full_lexicon.tsv");
    WriteLexicon(corpus.full_lexicon, out);
  }
  {
    auto out = open("test.concepts");
    for (const auto& utt : corpus.test) {
      out << utt.id << '\t' << ToString(corpus.test_concepts.at(utt.id))
          << '\n';
    }
  }
  {
    auto out = open("stats.tsv");
    char rate[32];
    std::snprintf(rate, sizeof(rate), "%.6f", corpus.test_oov_rate);
    out << "seed\t" << corpus.seed << '\n'
        << "vocabulary\t" << corpus.lexicon.VocabularySize() << '\n'
        << "train_utterances\t" << corpus.train.size() << '\n'
        << "train_tokens\t" << corpus.train.NumTokens() << '\n'
        << "test_utterances\t" << corpus.test.size() << '\n'
        << "test_tokens\t" << corpus.test.NumTokens() << '\n'
        << "test_oov_rate\t" << rate << '\n';
  }
}

}  // namespace oovdial
