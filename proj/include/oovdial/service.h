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

// Dialogue sessions and their HTTP front end.

#ifndef OOVDIAL_SERVICE_H_
#define OOVDIAL_SERVICE_H_

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oovdial/dialogue.h"
#include "oovdial/pipeline.h"

namespace oovdial {

class SessionNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SessionClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TranscriptEntry {
  std::string speaker;  // "user" or "system"
  std::string text;
  std::optional<Node> goal;
  std::optional<ConceptList> concepts;
};

struct SessionRecord {
  std::string id;
  DialogueState state;
  std::vector<TranscriptEntry> transcript;
  std::string created;
  std::string updated;
};

struct TurnResult {
  SessionRecord record;
  SystemAct act;
  Interpretation interpretation;
};

// In-memory sessions with an optional append-only journal.  Posts to one
// session are serialized; different sessions proceed in parallel.
class SessionStore {
 public:
  // Replays `journal_path` when it exists, then appends to it.
  explicit SessionStore(std::shared_ptr<const Resources> resources,
                        const std::string& journal_path = "");

  SessionRecord Create();
  // Throws SessionNotFound or SessionClosed.
  TurnResult Post(const std::string& id, const std::string& text);
  SessionRecord Get(const std::string& id) const;
  size_t size() const;

 private:
  struct Entry {
    std::mutex mu;
    SessionRecord record;
  };

  SessionRecord CreateAt(const std::string& id, const std::string& time,
                         bool journal);
  TurnResult PostAt(const std::string& id, const std::string& text,
                    const std::string& time, bool journal);
  std::shared_ptr<Entry> Find(const std::string& id) const;
  void Journal(const std::string& line);
  void Replay(const std::string& path);

  std::shared_ptr<const Resources> resources_;
  DialogueManager manager_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  uint64_t next_id_ = 1;
  std::mutex journal_mu_;
  std::ofstream journal_;
};

std::string SessionJson(const SessionRecord& record);
std::string CreateJson(const SessionRecord& record);
std::string TurnJson(const TurnResult& turn);

// Routes:
//   POST /sessions                      -> 201, session plus greeting
//   POST /sessions/{id}/utterances      -> 200, {"text": "..."} in the body
//   GET  /sessions/{id}                 -> 200
// Errors: 400 malformed body, 404 unknown session, 409 closed session.
class HttpService {
 public:
  explicit HttpService(SessionStore& store);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds and returns the port (an ephemeral one when `port` is 0).
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace oovdial

#endif  // OOVDIAL_SERVICE_H_
