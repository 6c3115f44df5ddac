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


#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "oovdial/pipeline.h"
#include "oovdial/service.h"
#include "test_util.h"

namespace oovdial {
namespace {

using nlohmann::json;

std::shared_ptr<const Resources> LoadResources(InputMode mode) {
  PipelineConfig c = PipelineConfig::Load(testing::DataPath("oovdial.json"));
  c.input_mode = mode;
  return Resources::Load(c);
}

const std::shared_ptr<const Resources>& TextResources() {
  static auto r = LoadResources(InputMode::kTextExact);
  return r;
}

const std::shared_ptr<const Resources>& SimResources() {
  static auto r = LoadResources(InputMode::kSimulateRecognition);
  return r;
}

// Service on an ephemeral port, served from a background thread.
class Server {
 public:
  explicit Server(SessionStore& store) : http_(store) {
    port_ = http_.Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { http_.Run(); });
  }
  ~Server() {
    http_.Stop();
    thread_.join();
  }
  httplib::Client Client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }

 private:
  HttpService http_;
  int port_ = 0;
  std::thread thread_;
};

std::string Utter(const std::string& text) {
  return json{{"text", text}}.dump();
}

TEST_CASE("example dialogue over http in simulate mode") {
  SessionStore store(SimResources());
  Server server(store);
  auto cli = server.Client();

  auto created = cli.Post("/sessions", "", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  json c = json::parse(created->body);
  CHECK(c["system_goal"] == "GREET");
  CHECK(c["system_text"].get<std::string>().find("What would you like to know") !=
        std::string::npos);
  std::string id = c["session_id"];
  std::string path = "/sessions/" + id + "/utterances";

  std::vector<std::pair<std::string, std::string>> turns = {
      {"I want to go to brussels", "REPEAT_PARAM"},
      {"brussels", "SPELL"},
      {"B-r-u-s-s-e-l-s", "WARN"},
      {"yes", "FURTHER_INFO"}};
  for (const auto& [text, goal] : turns) {
    CAPTURE(text);
    auto r = cli.Post(path, Utter(text), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    json j = json::parse(r->body);
    CHECK(j["system_goal"] == goal);
    CHECK(j["transcript_delta"].size() == 2);
  }
  json first = json::parse(cli.Get("/sessions/" + id)->body);
  CHECK(first["transcript"].size() == 9);
  CHECK(first["transcript"][1]["concepts"][0]["value"] == "oov_city");
}

TEST_CASE("http errors") {
  SessionStore store(TextResources());
  Server server(store);
  auto cli = server.Client();
  CHECK(cli.Get("/sessions/nope")->status == 404);
  CHECK(cli.Post("/sessions/nope/utterances", Utter("hi"), "application/json")
            ->status == 404);
  std::string id = json::parse(cli.Post("/sessions", "", "application/json")
                                   ->body)["session_id"];
  std::string path = "/sessions/" + id + "/utterances";
  CHECK(cli.Post(path, "not json", "application/json")->status == 400);
  CHECK(cli.Post(path, "{\"txt\": 1}", "application/json")->status == 400);
  auto bye = cli.Post(path, Utter("no thanks"), "application/json");
  CHECK(json::parse(bye->body)["closed"] == true);
  auto after = cli.Post(path, Utter("hello"), "application/json");
  CHECK(after->status == 409);
}

TEST_CASE("replaying user turns reproduces system turns") {
  std::vector<std::string> user = {"i want to go from hamburg to munich",
                                   "on monday", "at ten", "no thanks"};
  auto run = [&] {
    SessionStore store(SimResources());
    std::string id = store.Create().id;
    for (const auto& u : user) store.Post(id, u);
    std::vector<std::string> system;
    for (const auto& e : store.Get(id).transcript) {
      if (e.speaker == "system") system.push_back(e.text);
    }
    return system;
  };
  auto a = run();
  CHECK(a.size() == user.size() + 1);
  CHECK(run() == a);
}

TEST_CASE("journal restores sessions after restart") {
  testing::TempDir dir;
  std::string journal = dir.File("sessions.jsonl");
  std::string id, before;
  {
    SessionStore store(TextResources(), journal);
    id = store.Create().id;
    store.Post(id, "i want to go to munich");
    store.Post(id, "from hamburg");
    before = SessionJson(store.Get(id));
  }
  SessionStore restored(TextResources(), journal);
  CHECK(SessionJson(restored.Get(id)) == before);
  // new ids continue after the replayed ones
  CHECK(restored.Create().id != id);
  CHECK(restored.size() == 2);
}

TEST_CASE("concurrent posts to one session are serialized") {
  SessionStore store(TextResources());
  std::string id = store.Create().id;
  const int kThreads = 8;
  std::vector<std::thread> threads;
  for (int i = 0; i < kThreads; ++i) {
    threads.emplace_back([&, i] {
      try {
        store.Post(id, i % 2 ? "hamburg" : "on monday");
      } catch (const SessionClosed&) {
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto& tr = store.Get(id).transcript;
  REQUIRE(tr.size() % 2 == 1);
  CHECK(tr[0].speaker == "system");
  for (size_t i = 1; i < tr.size(); i += 2) {
    CHECK(tr[i].speaker == "user");
    CHECK(tr[i + 1].speaker == "system");
  }
}

TEST_CASE("concurrent sessions over http") {
  SessionStore store(TextResources());
  Server server(store);
  std::vector<std::thread> threads;
  std::vector<std::string> goals(6);
  for (size_t i = 0; i < goals.size(); ++i) {
    threads.emplace_back([&, i] {
      auto cli = server.Client();
      auto c = cli.Post("/sessions", "", "application/json");
      std::string id = json::parse(c->body)["session_id"];
      auto r = cli.Post("/sessions/" + id + "/utterances",
                        Utter("i want to go to brussels"), "application/json");
      goals[i] = json::parse(r->body)["system_goal"];
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& g : goals) CHECK(g == "REPEAT_PARAM");
  CHECK(store.size() == goals.size());
}

}  // namespace
}  // namespace oovdial
