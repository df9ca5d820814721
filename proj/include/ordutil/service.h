/*
 * Copyright 2026 The ordutil Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef ORDUTIL_SERVICE_H_
#define ORDUTIL_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ordutil/compile.h"
#include "ordutil/errors.h"
#include "ordutil/kernel.h"
#include "ordutil/schema.h"
#include "ordutil/solver.h"
#include "ordutil/utility.h"

namespace httplib {
class Server;
}

namespace ordutil {

// Unknown session, statement or item.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Ranking or explanation requested while statements changed since the last
// solve.
class StaleModelError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kDefaultDegree = 2;

// Kernel and solver choices of a session. Persisted with the session and
// updated by solve overrides.
struct SessionConfig {
  int degree = kDefaultDegree;  // clamped to the attribute count
  bool unweighted = false;      // 0/1 monomial map instead of degree weights
  SolverConfig solver;
  std::size_t model_cap = kDefaultModelCap;

  KernelParams Params(int attribute_count) const;
};

// Reads `{"degree", "kernel": "degree"|"unweighted", "margin":
// "hard"|"soft", "soft_c", "kkt_tolerance", "max_epochs", "seed",
// "model_cap"}` on top of `base`. Throws ValidationError.
SessionConfig ParseSessionConfig(const std::string& json,
                                 const SessionConfig& base = {});
std::string SessionConfigToJson(const SessionConfig& config);

struct StoredStatement {
  std::uint64_t id = 0;
  Statement statement;
  std::string text;  // canonical form
  std::size_t constraints = 0;
};

// Immutable snapshot of one session. Writers build a new snapshot and swap
// it in; readers keep whichever snapshot they fetched.
struct SessionState {
  std::string id;
  Schema schema;
  Catalog catalog;
  SessionConfig config;
  std::vector<StoredStatement> statements;
  std::uint64_t next_statement_id = 1;
  std::uint64_t revision = 0;
  std::uint64_t solved_revision = 0;
  std::shared_ptr<const UtilityModel> model;  // never null
  std::shared_ptr<const KktReport> report;    // never null

  bool stale() const { return solved_revision != revision; }
};

// Sessions keyed by id with an optional append-only JSON-lines event log
// (create, add, delete, solve) replayed on construction. Thread-safe:
// writes to one session are serialized, reads never block on solves.
class SessionStore {
 public:
  SessionStore() = default;
  explicit SessionStore(std::filesystem::path log_path);

  // `schema_json` as accepted by LoadSchema, `catalog_csv` as by
  // LoadCatalog. Returns the new session id.
  std::string Create(const std::string& schema_json,
                     const std::string& catalog_csv,
                     const std::string& config_json = "{}");

  // Parses and compiles every statement before appending any of them.
  // Whitespace or comments only: no change. Returns the summary JSON.
  std::string AddStatements(const std::string& session, const std::string& text);
  // Returns the new revision.
  std::uint64_t DeleteStatement(const std::string& session, std::uint64_t statement);
  // Returns the diagnostics JSON. `overrides_json` updates the session
  // config first.
  std::string Solve(const std::string& session,
                    const std::string& overrides_json = "{}");

  // Reads. Ranking, utility and explain throw StaleModelError when stale.
  std::shared_ptr<const SessionState> Get(const std::string& session) const;
  std::string SummaryJson(const std::string& session) const;
  std::string RankingJson(const std::string& session,
                          std::optional<std::size_t> top) const;
  std::string UtilityJson(const std::string& session, const std::string& item) const;
  std::string ExplainJson(const std::string& session, std::size_t top) const;
  std::string DiagnosticsJson(const std::string& session) const;

  std::size_t size() const;

 private:
  struct Entry {
    std::mutex write;
    mutable std::mutex swap;
    std::shared_ptr<const SessionState> state;

    std::shared_ptr<const SessionState> Load() const;
    void Store(std::shared_ptr<const SessionState> next);
  };

  std::shared_ptr<Entry> Find(const std::string& session) const;
  void Append(const std::string& line);
  void Replay();

  std::string CreateWithId(const std::string& id, const std::string& schema_json,
                           const std::string& catalog_csv,
                           const std::string& config_json);
  std::string AddInternal(const std::string& session, const std::string& text,
                          bool log);
  std::uint64_t DeleteInternal(const std::string& session,
                               std::uint64_t statement, bool log);
  std::string SolveInternal(const std::string& session,
                            const std::string& overrides_json, bool log);

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_session_ = 1;

  std::mutex log_mutex_;
  std::optional<std::filesystem::path> log_path_;
  std::ofstream log_;
};

// Installs the JSON HTTP API on `server`:
//   POST   /sessions
//   GET    /sessions/{id}
//   POST   /sessions/{id}/statements
//   DELETE /sessions/{id}/statements/{sid}
//   POST   /sessions/{id}/solve
//   GET    /sessions/{id}/ranking?top=k
//   GET    /sessions/{id}/utility/{item}
//   GET    /sessions/{id}/explain?top=k
//   GET    /sessions/{id}/diagnostics
// Errors map to 400 (validation), 404 (unknown), 409 (stale model),
// 422 (explicit map too large) and 500 (solver failure).
void RegisterRoutes(httplib::Server& server, SessionStore& store);

}  // namespace ordutil

#endif  // ORDUTIL_SERVICE_H_
