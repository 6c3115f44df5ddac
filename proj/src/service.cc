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


#include "oovdial/service.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <regex>

#include "httplib.h"
#include "json.hpp"

namespace oovdial {

using nlohmann::ordered_json;

namespace {

std::string NowIso() {
  std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json ConceptsJson(const ConceptList& concepts) {
  ordered_json a = ordered_json::array();
  for (const auto& c : concepts) a.push_back({{"name", c.name}, {"value", c.value}});
  return a;
}

ordered_json StateJson(const DialogueState& s) {
  ordered_json slots = ordered_json::object();
  for (const auto& [k, v] : s.slots) slots[k] = v;
  ordered_json repairs = ordered_json::object();
  for (const auto& [k, v] : s.repair_count) repairs[k] = v;
  return {{"node", ToString(s.node)},
          {"focus", s.focus.empty() ? ordered_json(nullptr) : ordered_json(s.focus)},
          {"slots", slots},
          {"repair_count", repairs},
          {"goal_stack", s.goal_stack},
          {"conflict", s.conflict}};
}

ordered_json EntryJson(const TranscriptEntry& e) {
  ordered_json j = {{"speaker", e.speaker}, {"text", e.text}};
  if (e.goal) j["goal"] = ToString(*e.goal);
  if (e.concepts) j["concepts"] = ConceptsJson(*e.concepts);
  return j;
}

ordered_json RecordJson(const SessionRecord& r) {
  ordered_json t = ordered_json::array();
  for (const auto& e : r.transcript) t.push_back(EntryJson(e));
  return {{"session_id", r.id},
          {"created", r.created},
          {"updated", r.updated},
          {"closed", IsTerminal(r.state.node)},
          {"state", StateJson(r.state)},
          {"transcript", t}};
}

}  // namespace

SessionStore::SessionStore(std::shared_ptr<const Resources> resources,
                           const std::string& journal_path)
    : resources_(std::move(resources)),
      manager_(resources_->db, resources_->prompts, resources_->policy) {
  if (journal_path.empty()) return;
  if (std::filesystem::exists(journal_path)) Replay(journal_path);
  journal_.open(journal_path, std::ios::app);
  if (!journal_) throw std::runtime_error("cannot open journal " + journal_path);
}

void SessionStore::Replay(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      const std::string op = j.at("op");
      const std::string id = j.at("id");
      const std::string time = j.at("time");
      if (op == "create") {
        CreateAt(id, time, false);
      } else if (op == "post") {
        PostAt(id, j.at("text").get<std::string>(), time, false);
      } else {
        throw FormatError("unknown op " + op);
      }
    } catch (const std::exception& e) {
      throw FormatError("journal line " + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
}

void SessionStore::Journal(const std::string& line) {
  std::lock_guard<std::mutex> lock(journal_mu_);
  if (!journal_.is_open()) return;
  journal_ << line << '\n';
  journal_.flush();
}

SessionRecord SessionStore::CreateAt(const std::string& id,
                                     const std::string& time, bool journal) {
  auto entry = std::make_shared<Entry>();
  StepResult start = manager_.Start();
  entry->record.id = id;
  entry->record.state = start.state;
  entry->record.created = entry->record.updated = time;
  entry->record.transcript.push_back(
      {"system", start.act.text, start.act.goal, std::nullopt});
  std::lock_guard<std::mutex> lock(mu_);
  if (sessions_.count(id)) throw std::runtime_error("duplicate session id " + id);
  // Logged before the session becomes visible, so no post can precede it.
  if (journal) {
    Journal(nlohmann::json{{"op", "create"}, {"id", id}, {"time", time}}.dump());
  }
  sessions_.emplace(id, entry);
  // Ids look like s<number>; keep the counter ahead of replayed ones.
  if (id.size() > 1 && id[0] == 's') {
    try {
      next_id_ = std::max<uint64_t>(next_id_, std::stoull(id.substr(1)) + 1);
    } catch (const std::exception&) {
    }
  }
  return entry->record;
}

SessionRecord SessionStore::Create() {
  std::string id;
  {
    std::lock_guard<std::mutex> lock(mu_);
    id = "s" + std::to_string(next_id_++);
  }
  return CreateAt(id, NowIso(), true);
}

std::shared_ptr<SessionStore::Entry> SessionStore::Find(
    const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("no session " + id);
  return it->second;
}

TurnResult SessionStore::PostAt(const std::string& id, const std::string& text,
                                const std::string& time, bool journal) {
  auto entry = Find(id);
  std::lock_guard<std::mutex> lock(entry->mu);
  SessionRecord& r = entry->record;
  if (IsTerminal(r.state.node)) throw SessionClosed("session " + id + " is closed");
  const size_t turn = r.transcript.size();
  Interpretation interp = Interpret(*resources_, r.state, text,
                                    id + "#" + std::to_string(turn));
  StepResult step = manager_.Step(r.state, interp.concepts);
  r.state = step.state;
  r.updated = time;
  r.transcript.push_back({"user", text, std::nullopt, interp.concepts});
  r.transcript.push_back({"system", step.act.text, step.act.goal, std::nullopt});
  // Under the session lock so the journal keeps the applied order.
  if (journal) {
    Journal(nlohmann::json{
        {"op", "post"}, {"id", id}, {"text", text}, {"time", time}}.dump());
  }
  return {r, step.act, std::move(interp)};
}

TurnResult SessionStore::Post(const std::string& id, const std::string& text) {
  return PostAt(id, text, NowIso(), true);
}

SessionRecord SessionStore::Get(const std::string& id) const {
  auto entry = Find(id);
  std::lock_guard<std::mutex> lock(entry->mu);
  return entry->record;
}

size_t SessionStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

std::string SessionJson(const SessionRecord& record) {
  return RecordJson(record).dump();
}

std::string CreateJson(const SessionRecord& record) {
  ordered_json j = RecordJson(record);
  const auto& greeting = record.transcript.front();
  j["system_goal"] = ToString(*greeting.goal);
  j["system_text"] = greeting.text;
  return j.dump();
}

std::string TurnJson(const TurnResult& turn) {
  ordered_json payload = ordered_json::array();
  for (const auto& c : turn.act.payload) {
    payload.push_back({{"from", c.from},
                       {"to", c.to},
                       {"departure", FormatClock(c.departure)},
                       {"arrival", FormatClock(c.arrival)}});
  }
  const auto& t = turn.record.transcript;
  ordered_json delta = ordered_json::array();
  delta.push_back(EntryJson(t[t.size() - 2]));
  delta.push_back(EntryJson(t.back()));
  ordered_json j = {{"session_id", turn.record.id},
                    {"system_goal", ToString(turn.act.goal)},
                    {"system_text", turn.act.text},
                    {"recognized", ToString(std::span<const Token>(
                                       turn.interpretation.tokens))},
                    {"concepts", ConceptsJson(turn.interpretation.concepts)},
                    {"payload", payload},
                    {"closed", IsTerminal(turn.record.state.node)},
                    {"state", StateJson(turn.record.state)},
                    {"transcript_delta", delta}};
  return j.dump();
}

struct HttpService::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) {
    auto error = [](httplib::Response& res, int status, const std::string& msg) {
      res.status = status;
      res.set_content(nlohmann::json{{"error", msg}}.dump(), "application/json");
    };
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.Post("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      SessionRecord r = store.Create();
      res.status = 201;
      res.set_content(CreateJson(r), "application/json");
    });
    server.Post(R"(/sessions/([^/]+)/utterances)",
                [this, error](const httplib::Request& req, httplib::Response& res) {
                  std::string text;
                  try {
                    auto body = nlohmann::json::parse(req.body);
                    text = body.at("text").get<std::string>();
                  } catch (const std::exception&) {
                    return error(res, 400, "body must be {\"text\": string}");
                  }
                  try {
                    TurnResult t = store.Post(req.matches[1], text);
                    res.set_content(TurnJson(t), "application/json");
                  } catch (const SessionNotFound& e) {
                    error(res, 404, e.what());
                  } catch (const SessionClosed& e) {
                    error(res, 409, e.what());
                  }
                });
    server.Get(R"(/sessions/([^/]+))",
               [this, error](const httplib::Request& req, httplib::Response& res) {
                 try {
                   res.set_content(SessionJson(store.Get(req.matches[1])),
                                   "application/json");
                 } catch (const SessionNotFound& e) {
                   error(res, 404, e.what());
                 }
               });
    server.set_exception_handler(
        [error](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            error(res, 500, e.what());
          } catch (...) {
            error(res, 500, "unknown error");
          }
        });
  }
};

HttpService::HttpService(SessionStore& store)
    : impl_(std::make_unique<Impl>(store)) {}

HttpService::~HttpService() { Stop(); }

int HttpService::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpService::Run() { impl_->server.listen_after_bind(); }

void HttpService::Stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace oovdial
