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


#include "ordutil/service.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "ordutil/formula.h"

namespace ordutil {

using nlohmann::json;

namespace {

json ParseObject(const std::string& text, const std::string& what) {
  if (text.empty()) return json::object();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(what + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ValidationError(what + ": expected a JSON object");
  return doc;
}

// Rebuilds a statement list as an expression, keeping source lines.
PreferenceExpression ExpressionOf(const std::vector<StoredStatement>& statements) {
  PreferenceExpression e;
  for (const auto& s : statements) e.statements.push_back(s.statement);
  return e;
}

std::shared_ptr<const KktReport> EmptyReport() {
  return std::make_shared<const KktReport>();
}

}  // namespace

KernelParams SessionConfig::Params(int attribute_count) const {
  if (unweighted) return UnweightedParams(attribute_count);
  return DegreeParams(std::min(degree, attribute_count), attribute_count);
}

SessionConfig ParseSessionConfig(const std::string& text, const SessionConfig& base) {
  const json doc = ParseObject(text, "config");
  SessionConfig config = base;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "degree") {
        config.degree = value.get<int>();
        if (config.degree < 1) throw ValidationError("config: degree must be positive");
        config.unweighted = false;
      } else if (key == "kernel") {
        const auto name = value.get<std::string>();
        if (name != "degree" && name != "unweighted") {
          throw ValidationError("config: kernel must be 'degree' or 'unweighted'");
        }
        config.unweighted = name == "unweighted";
      } else if (key == "margin") {
        const auto name = value.get<std::string>();
        if (name != "hard" && name != "soft") {
          throw ValidationError("config: margin must be 'hard' or 'soft'");
        }
        config.solver.mode = name == "soft" ? MarginMode::kSoft : MarginMode::kHard;
      } else if (key == "soft_c") {
        config.solver.soft_c = value.get<double>();
        // A bound alone implies soft margins; an explicit margin wins.
        if (!doc.contains("margin")) config.solver.mode = MarginMode::kSoft;
      } else if (key == "kkt_tolerance") {
        config.solver.kkt_tolerance = value.get<double>();
      } else if (key == "max_epochs") {
        config.solver.max_epochs = value.get<int>();
      } else if (key == "seed") {
        config.solver.seed = value.get<std::uint64_t>();
      } else if (key == "model_cap") {
        config.model_cap = value.get<std::size_t>();
      } else {
        throw ValidationError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  config.solver.Validate();
  return config;
}

std::string SessionConfigToJson(const SessionConfig& config) {
  json doc = {
      {"degree", config.degree},
      {"kernel", config.unweighted ? "unweighted" : "degree"},
      {"margin", config.solver.mode == MarginMode::kSoft ? "soft" : "hard"},
      {"soft_c", config.solver.soft_c},
      {"kkt_tolerance", config.solver.kkt_tolerance},
      {"max_epochs", config.solver.max_epochs},
      {"seed", config.solver.seed},
      {"model_cap", config.model_cap},
  };
  return doc.dump();
}

std::shared_ptr<const SessionState> SessionStore::Entry::Load() const {
  std::lock_guard lock(swap);
  return state;
}

void SessionStore::Entry::Store(std::shared_ptr<const SessionState> next) {
  std::lock_guard lock(swap);
  state = std::move(next);
}

SessionStore::SessionStore(std::filesystem::path log_path) : log_path_(std::move(log_path)) {
  Replay();
  log_.open(*log_path_, std::ios::app);
  if (!log_) throw Error("cannot open event log " + log_path_->string());
}

void SessionStore::Append(const std::string& line) {
  if (!log_path_) return;
  std::lock_guard lock(log_mutex_);
  log_ << line << '\n';
  log_.flush();
}

void SessionStore::Replay() {
  std::ifstream in(*log_path_);
  if (!in) return;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json event = json::parse(line);
      const std::string type = event.at("type").get<std::string>();
      if (type == "create") {
        CreateWithId(event.at("id").get<std::string>(),
                     event.at("schema").get<std::string>(),
                     event.at("catalog").get<std::string>(),
                     event.at("config").get<std::string>());
      } else if (type == "add") {
        AddInternal(event.at("session").get<std::string>(),
                    event.at("text").get<std::string>(), false);
      } else if (type == "delete") {
        DeleteInternal(event.at("session").get<std::string>(),
                       event.at("statement").get<std::uint64_t>(), false);
      } else if (type == "solve") {
        SolveInternal(event.at("session").get<std::string>(),
                      event.at("overrides").get<std::string>(), false);
      } else {
        throw ValidationError("unknown event type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ValidationError("event log line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw ValidationError("event log line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::shared_ptr<SessionStore::Entry> SessionStore::Find(const std::string& session) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) throw NotFoundError("no session '" + session + "'");
  return it->second;
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

std::shared_ptr<const SessionState> SessionStore::Get(const std::string& session) const {
  return Find(session)->Load();
}

std::string SessionStore::Create(const std::string& schema_json,
                                 const std::string& catalog_csv,
                                 const std::string& config_json) {
  std::string id;
  {
    std::unique_lock lock(sessions_mutex_);
    id = "s" + std::to_string(next_session_++);
  }
  CreateWithId(id, schema_json, catalog_csv, config_json);
  Append(json{{"type", "create"},
              {"id", id},
              {"schema", schema_json},
              {"catalog", catalog_csv},
              {"config", config_json}}
             .dump());
  return id;
}

std::string SessionStore::CreateWithId(const std::string& id,
                                       const std::string& schema_json,
                                       const std::string& catalog_csv,
                                       const std::string& config_json) {
  auto state = std::make_shared<SessionState>();
  state->id = id;
  state->schema = LoadSchema(schema_json);
  state->catalog = LoadCatalog(catalog_csv, state->schema);
  state->config = ParseSessionConfig(config_json);
  const KernelParams params = state->config.Params(static_cast<int>(state->schema.size()));
  state->model = std::make_shared<const UtilityModel>(UtilityModel::Empty(state->schema, params));
  state->report = EmptyReport();

  auto entry = std::make_shared<Entry>();
  entry->state = std::move(state);
  std::unique_lock lock(sessions_mutex_);
  if (sessions_.count(id)) throw ValidationError("duplicate session id '" + id + "'");
  sessions_[id] = std::move(entry);
  // Keep generated ids ahead of replayed ones.
  if (id.size() > 1 && id[0] == 's') {
    try {
      next_session_ = std::max<std::uint64_t>(next_session_, std::stoull(id.substr(1)) + 1);
    } catch (const std::exception&) {
    }
  }
  return id;
}

std::string SessionStore::AddStatements(const std::string& session, const std::string& text) {
  return AddInternal(session, text, true);
}

std::string SessionStore::AddInternal(const std::string& session, const std::string& text,
                                      bool log) {
  auto entry = Find(session);
  std::lock_guard write(entry->write);
  const auto current = entry->Load();
  const PreferenceExpression parsed = ParseExpression(text);
  auto next = std::make_shared<SessionState>(*current);
  json added = json::array();
  if (!parsed.statements.empty()) {
    // Compile everything first so a bad statement leaves the session as is.
    const ConstraintSet cs =
        CompileExpression(parsed, current->schema, current->config.model_cap);
    for (std::size_t i = 0; i < parsed.statements.size(); ++i) {
      StoredStatement stored{next->next_statement_id++, parsed.statements[i],
                             ToString(parsed.statements[i]), cs.per_statement()[i]};
      added.push_back({{"id", stored.id},
                       {"line", parsed.statements[i].line},
                       {"text", stored.text},
                       {"constraints", stored.constraints}});
      next->statements.push_back(std::move(stored));
    }
    ++next->revision;
  }
  std::size_t total = 0;
  for (const auto& s : next->statements) total += s.constraints;
  json summary = {{"revision", next->revision},
                  {"stale", next->stale()},
                  {"added", added},
                  {"statements", next->statements.size()},
                  {"constraints", total}};
  const bool changed = !parsed.statements.empty();
  entry->Store(std::move(next));
  if (log && changed) {
    Append(json{{"type", "add"}, {"session", session}, {"text", text}}.dump());
  }
  return summary.dump();
}

std::uint64_t SessionStore::DeleteStatement(const std::string& session,
                                            std::uint64_t statement) {
  return DeleteInternal(session, statement, true);
}

std::uint64_t SessionStore::DeleteInternal(const std::string& session,
                                           std::uint64_t statement, bool log) {
  auto entry = Find(session);
  std::lock_guard write(entry->write);
  auto next = std::make_shared<SessionState>(*entry->Load());
  auto it = std::find_if(next->statements.begin(), next->statements.end(),
                         [&](const StoredStatement& s) { return s.id == statement; });
  if (it == next->statements.end()) {
    throw NotFoundError("session '" + session + "' has no statement " +
                        std::to_string(statement));
  }
  next->statements.erase(it);
  const std::uint64_t revision = ++next->revision;
  entry->Store(std::move(next));
  if (log) {
    Append(json{{"type", "delete"}, {"session", session}, {"statement", statement}}.dump());
  }
  return revision;
}

std::string SessionStore::Solve(const std::string& session, const std::string& overrides_json) {
  return SolveInternal(session, overrides_json, true);
}

std::string SessionStore::SolveInternal(const std::string& session,
                                        const std::string& overrides_json, bool log) {
  auto entry = Find(session);
  std::lock_guard write(entry->write);
  auto next = std::make_shared<SessionState>(*entry->Load());
  next->config = ParseSessionConfig(overrides_json, next->config);
  const KernelParams params = next->config.Params(static_cast<int>(next->schema.size()));
  const ConstraintSet cs =
      CompileExpression(ExpressionOf(next->statements), next->schema, next->config.model_cap);
  auto model = std::make_shared<const UtilityModel>(SolveDual(cs, params, next->config.solver));
  next->report = std::make_shared<const KktReport>(CheckKkt(*model));
  next->model = std::move(model);
  next->solved_revision = next->revision;
  entry->Store(next);
  if (log) {
    Append(json{{"type", "solve"}, {"session", session}, {"overrides", overrides_json}}.dump());
  }
  return DiagnosticsJson(session);
}

std::string SessionStore::SummaryJson(const std::string& session) const {
  const auto state = Get(session);
  json statements = json::array();
  for (const auto& s : state->statements) {
    statements.push_back({{"id", s.id}, {"text", s.text}, {"constraints", s.constraints}});
  }
  json out = {{"id", state->id},
              {"revision", state->revision},
              {"solved_revision", state->solved_revision},
              {"stale", state->stale()},
              {"items", state->catalog.size()},
              {"schema", json::parse(SchemaToJson(state->schema))},
              {"config", json::parse(SessionConfigToJson(state->config))},
              {"statements", statements}};
  return out.dump();
}

namespace {

void RequireFresh(const SessionState& state) {
  if (state.stale()) {
    throw StaleModelError("session '" + state.id + "' changed at revision " +
                          std::to_string(state.revision) + " after the last solve (revision " +
                          std::to_string(state.solved_revision) + "); solve again");
  }
}

}  // namespace

std::string SessionStore::RankingJson(const std::string& session,
                                      std::optional<std::size_t> top) const {
  const auto state = Get(session);
  RequireFresh(*state);
  const Ranking ranking = RankCatalog(*state->model, state->catalog, top);
  json out = {{"revision", state->solved_revision},
              {"items", json::parse(RankingToJson(ranking))}};
  return out.dump();
}

std::string SessionStore::UtilityJson(const std::string& session, const std::string& item) const {
  const auto state = Get(session);
  RequireFresh(*state);
  const Alternative* alt = state->catalog.Find(item);
  if (alt == nullptr) throw NotFoundError("no item '" + item + "' in session '" + session + "'");
  json out = {{"revision", state->solved_revision},
              {"id", item},
              {"utility", EvaluateUtility(*state->model, alt->assignment)}};
  return out.dump();
}

std::string SessionStore::ExplainJson(const std::string& session, std::size_t top) const {
  const auto state = Get(session);
  RequireFresh(*state);
  const WeightMap weights = ReconstructWeights(*state->model);
  std::vector<std::pair<PartialAssignment, double>> sorted(weights.begin(), weights.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  if (sorted.size() > top) sorted.resize(top);
  json list = json::array();
  for (const auto& [m, w] : sorted) {
    list.push_back({{"monomial", state->schema.Format(m)}, {"weight", w}});
  }
  json out = {{"revision", state->solved_revision},
              {"nonzero", weights.size()},
              {"weights", list}};
  return out.dump();
}

std::string SessionStore::DiagnosticsJson(const std::string& session) const {
  const auto state = Get(session);
  json out = json::parse(DiagnosticsToJson(*state->model, *state->report));
  // Per-statement support counts, for "active" badges.
  const auto& model = *state->model;
  json statements = json::array();
  if (state->solved_revision == state->revision) {
    std::vector<std::size_t> active(state->statements.size(), 0);
    for (std::size_t i : model.SupportIndices()) active[model.constraints[i].source]++;
    for (std::size_t i = 0; i < state->statements.size(); ++i) {
      statements.push_back({{"id", state->statements[i].id},
                            {"constraints", state->statements[i].constraints},
                            {"active", active[i]}});
    }
  }
  out["statements"] = statements;
  out["revision"] = state->solved_revision;
  out["stale"] = state->stale();
  return out.dump();
}

// HTTP ----------------------------------------------------------------------

namespace {

void Reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& kind,
                const std::string& message) {
  Reply(res, status, json{{"error", message}, {"kind", kind}}.dump());
}

template <typename F>
httplib::Server::Handler Guard(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const NotFoundError& e) {
      ReplyError(res, 404, "not_found", e.what());
    } catch (const StaleModelError& e) {
      ReplyError(res, 409, "stale", e.what());
    } catch (const OracleLimitError& e) {
      ReplyError(res, 422, "oracle_limit", e.what());
    } catch (const ValidationError& e) {
      ReplyError(res, 400, "validation", e.what());
    } catch (const json::exception& e) {
      ReplyError(res, 400, "validation", e.what());
    } catch (const std::exception& e) {
      ReplyError(res, 500, "internal", e.what());
    }
  };
}

std::optional<std::size_t> TopParam(const httplib::Request& req) {
  if (!req.has_param("top")) return std::nullopt;
  const std::string text = req.get_param_value("top");
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text[0] == '-') {
    throw ValidationError("top must be a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

// Statement text from `{"text": ...}` or a plain-text body.
std::string StatementText(const httplib::Request& req) {
  const auto type = req.get_header_value("Content-Type");
  if (type.rfind("application/json", 0) == 0) {
    const json doc = ParseObject(req.body, "statements");
    return doc.at("text").get<std::string>();
  }
  return req.body;
}

}  // namespace

void RegisterRoutes(httplib::Server& server, SessionStore& store) {
  server.Post("/sessions", Guard([&store](const httplib::Request& req, httplib::Response& res) {
    const json doc = ParseObject(req.body, "session");
    const json& schema = doc.at("schema");
    const std::string schema_text = schema.is_string() ? schema.get<std::string>() : schema.dump();
    const std::string config = doc.contains("config") ? doc.at("config").dump() : "{}";
    const std::string id = store.Create(schema_text, doc.at("catalog").get<std::string>(), config);
    const auto state = store.Get(id);
    Reply(res, 201,
          json{{"id", id}, {"revision", state->revision}, {"items", state->catalog.size()}}.dump());
  }));

  server.Get("/sessions/:id", Guard([&store](const httplib::Request& req, httplib::Response& res) {
    Reply(res, 200, store.SummaryJson(req.path_params.at("id")));
  }));

  server.Post("/sessions/:id/statements",
              Guard([&store](const httplib::Request& req, httplib::Response& res) {
                Reply(res, 200, store.AddStatements(req.path_params.at("id"), StatementText(req)));
              }));

  server.Delete("/sessions/:id/statements/:sid",
                Guard([&store](const httplib::Request& req, httplib::Response& res) {
                  const std::string sid = req.path_params.at("sid");
                  std::uint64_t statement = 0;
                  try {
                    std::size_t used = 0;
                    statement = std::stoull(sid, &used);
                    if (used != sid.size()) throw std::invalid_argument(sid);
                  } catch (const std::exception&) {
                    throw NotFoundError("no statement '" + sid + "'");
                  }
                  const auto revision = store.DeleteStatement(req.path_params.at("id"), statement);
                  Reply(res, 200, json{{"revision", revision}, {"stale", true}}.dump());
                }));

  server.Post("/sessions/:id/solve",
              Guard([&store](const httplib::Request& req, httplib::Response& res) {
                Reply(res, 200, store.Solve(req.path_params.at("id"), req.body));
              }));

  server.Get("/sessions/:id/ranking",
             Guard([&store](const httplib::Request& req, httplib::Response& res) {
               Reply(res, 200, store.RankingJson(req.path_params.at("id"), TopParam(req)));
             }));

  server.Get("/sessions/:id/utility/:item",
             Guard([&store](const httplib::Request& req, httplib::Response& res) {
               Reply(res, 200,
                     store.UtilityJson(req.path_params.at("id"), req.path_params.at("item")));
             }));

  server.Get("/sessions/:id/explain",
             Guard([&store](const httplib::Request& req, httplib::Response& res) {
               Reply(res, 200,
                     store.ExplainJson(req.path_params.at("id"), TopParam(req).value_or(20)));
             }));

  server.Get("/sessions/:id/diagnostics",
             Guard([&store](const httplib::Request& req, httplib::Response& res) {
               Reply(res, 200, store.DiagnosticsJson(req.path_params.at("id")));
             }));
}

}  // namespace ordutil
