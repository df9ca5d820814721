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

#include <gtest/gtest.h>

#include <filesystem>
#include <atomic>
#include <thread>

#include <unistd.h>

#include "httplib.h"
#include "json.hpp"
#include "test_util.h"

namespace ordutil {
namespace {

using nlohmann::json;

constexpr const char* kCarSchema =
    R"({"attributes": [{"name": "X1", "type": "boolean"}, {"name": "X2", "type": "boolean"},
                       {"name": "X3", "type": "boolean"}, {"name": "X4", "type": "boolean"}]})";

constexpr const char* kCarCatalog =
    "id,X1,X2,X3,X4\n"
    "e,true,true,false,false\n"
    "g,false,false,false,true\n"
    "a,true,false,true,false\n"
    "d,true,true,true,true\n"
    "f,true,true,false,true\n"
    "c,false,false,true,false\n"
    "b,true,true,true,false\n";

std::vector<std::string> RankedIds(const std::string& ranking_json) {
  std::vector<std::string> ids;
  const json doc = json::parse(ranking_json);
  for (const auto& item : doc.at("items")) ids.push_back(item.at("id"));
  return ids;
}

TEST(SessionStore, WorkedExampleSession) {
  SessionStore store;
  const auto id = store.Create(kCarSchema, kCarCatalog, R"({"kernel": "unweighted"})");
  EXPECT_EQ(store.Get(id)->revision, 0u);
  EXPECT_FALSE(store.Get(id)->stale());

  const json summary = json::parse(store.AddStatements(id, testing::kWorkedExample));
  EXPECT_EQ(summary.at("statements"), 3);
  EXPECT_EQ(summary.at("constraints"), 5);
  EXPECT_EQ(summary.at("revision"), 1);
  EXPECT_TRUE(summary.at("stale"));
  EXPECT_EQ(summary.at("added")[0].at("constraints"), 3);
  EXPECT_THROW(store.RankingJson(id, std::nullopt), StaleModelError);

  const json diag = json::parse(store.Solve(id));
  EXPECT_EQ(diag.at("verdict"), "optimal");
  EXPECT_FALSE(diag.at("stale"));
  EXPECT_EQ(diag.at("statements").size(), 3u);
  EXPECT_EQ(RankedIds(store.RankingJson(id, std::nullopt)),
            (std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g"}));
  EXPECT_NEAR(json::parse(store.UtilityJson(id, "a")).at("utility").get<double>(), 1.25, 1e-6);

  const json explain = json::parse(store.ExplainJson(id, 20));
  bool found = false;
  for (const auto& w : explain.at("weights")) {
    if (w.at("monomial") == "X1=false X2=true") {
      found = true;
      EXPECT_NEAR(w.at("weight").get<double>(), 0.4, 1e-6);
    }
  }
  EXPECT_TRUE(found) << explain.dump();
  EXPECT_EQ(explain.at("nonzero"), 8);
  EXPECT_EQ(json::parse(store.ExplainJson(id, 2)).at("weights").size(), 2u);
}

TEST(SessionStore, EmptyAddIsANoOp) {
  SessionStore store;
  const auto id = store.Create(kCarSchema, kCarCatalog);
  const json summary = json::parse(store.AddStatements(id, "  \n# only a comment\n"));
  EXPECT_EQ(summary.at("revision"), 0);
  EXPECT_FALSE(store.Get(id)->stale());
}

TEST(SessionStore, BadStatementLeavesSessionUntouched) {
  SessionStore store;
  const auto id = store.Create(kCarSchema, kCarCatalog);
  try {
    store.AddStatements(id, "prefer X1 over X2\nprefer X1 X2");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_EQ(store.Get(id)->statements.size(), 0u);
  EXPECT_EQ(store.Get(id)->revision, 0u);
  EXPECT_THROW(store.AddStatements(id, "good: X9"), ValidationError);
}

TEST(SessionStore, CreateErrors) {
  SessionStore store;
  const auto a = store.Create(kCarSchema, kCarCatalog);
  const auto b = store.Create(kCarSchema, kCarCatalog);
  EXPECT_NE(a, b);
  try {
    store.Create(kCarSchema, "id,X1,X2,X3,X4\nz,true,maybe,true,true\n");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 2"), std::string::npos) << what;
    EXPECT_NE(what.find("X2"), std::string::npos) << what;
  }
  EXPECT_THROW(store.Create(kCarSchema, kCarCatalog, R"({"degre": 2})"), ValidationError);
  EXPECT_THROW(store.Get("nope"), NotFoundError);
}

TEST(SessionStore, DeleteAndStaleness) {
  SessionStore store;
  const auto id = store.Create(kCarSchema, kCarCatalog);
  store.AddStatements(id, "prefer X1 over X2\nprefer X3 over X4");
  store.Solve(id);
  const auto first = store.Get(id)->statements.front().id;
  EXPECT_EQ(store.DeleteStatement(id, first), 2u);
  EXPECT_TRUE(store.Get(id)->stale());
  EXPECT_THROW(store.DeleteStatement(id, first), NotFoundError);
  store.Solve(id);
  EXPECT_FALSE(store.Get(id)->stale());
  EXPECT_EQ(store.Get(id)->model->constraints.size(), 1u);
}

TEST(SessionStore, VerdictsAreSurfaced) {
  SessionStore store;
  const auto id = store.Create(kCarSchema, kCarCatalog, R"({"max_epochs": 500})");
  store.AddStatements(id, "prefer X1 over X2\nprefer X2 over X1");
  const json hard = json::parse(store.Solve(id));
  EXPECT_EQ(hard.at("verdict"), "likely inconsistent");
  const json soft = json::parse(store.Solve(id, R"({"margin": "soft", "soft_c": 0.5})"));
  EXPECT_EQ(soft.at("verdict"), "optimal");
  EXPECT_GT(soft.at("census").at("violated").get<int>(), 0);
  EXPECT_EQ(soft.at("mode"), "soft");
  // An explicit hard margin beats the implied soft one.
  const auto cfg = ParseSessionConfig(R"({"margin": "hard", "soft_c": 3})");
  EXPECT_EQ(cfg.solver.mode, MarginMode::kHard);
  EXPECT_EQ(cfg.solver.soft_c, 3.0);
}

TEST(SessionStore, ReplaysEventLog) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("ordutil_events_" + std::to_string(::getpid()) + ".jsonl");
  std::filesystem::remove(path);
  std::string id;
  std::string ranking;
  {
    SessionStore store(path);
    id = store.Create(kCarSchema, kCarCatalog, R"({"degree": 3})");
    store.AddStatements(id, testing::kWorkedExample);
    store.AddStatements(id, "prefer X2 over X4");
    store.DeleteStatement(id, 4);
    store.Solve(id, R"({"soft_c": 2})");
    ranking = store.RankingJson(id, std::nullopt);
  }
  {
    SessionStore replayed(path);
    EXPECT_EQ(replayed.size(), 1u);
    EXPECT_EQ(replayed.RankingJson(id, std::nullopt), ranking);
    EXPECT_EQ(replayed.Get(id)->revision, 3u);
    EXPECT_EQ(replayed.Get(id)->config.solver.mode, MarginMode::kSoft);
    // New ids continue after the replayed ones.
    EXPECT_NE(replayed.Create(kCarSchema, kCarCatalog), id);
  }
  std::filesystem::remove(path);
}

// HTTP ----------------------------------------------------------------------

class HttpApi : public ::testing::Test {
 protected:
  void SetUp() override {
    RegisterRoutes(server_, store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  std::string CreateSession(const std::string& config = "{}") {
    json body = {{"schema", json::parse(kCarSchema)},
                 {"catalog", kCarCatalog},
                 {"config", json::parse(config)}};
    auto res = client_->Post("/sessions", body.dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201) << res->body;
    return json::parse(res->body).at("id");
  }

  SessionStore store_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpApi, ElicitationLoop) {
  const auto id = CreateSession();
  const std::string base = "/sessions/" + id;

  // Empty session: flat ranking at utility zero.
  auto res = client_->Get(base + "/ranking");
  ASSERT_EQ(res->status, 200) << res->body;
  const json flat = json::parse(res->body);
  for (const auto& item : flat.at("items")) {
    EXPECT_EQ(item.at("utility"), 0.0);
  }

  // One comparison between two complete items, then re-solve.
  res = client_->Post(base + "/statements",
                      json{{"text", "prefer (X1=false and X2=false and X3=false and X4=true) "
                                    "over (X1=true and X2=false and X3=true and X4=false)"}}
                          .dump(),
                      "application/json");
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_TRUE(json::parse(res->body).at("stale"));
  EXPECT_TRUE(json::parse(client_->Get(base)->body).at("stale"));
  EXPECT_EQ(client_->Get(base + "/ranking")->status, 409);

  res = client_->Post(base + "/solve", "", "application/json");
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(json::parse(res->body).at("verdict"), "optimal");
  EXPECT_FALSE(json::parse(client_->Get(base)->body).at("stale"));

  const auto ranking = client_->Get(base + "/ranking")->body;
  const auto ids = RankedIds(ranking);
  const auto pos = [&](const std::string& x) { return std::find(ids.begin(), ids.end(), x) - ids.begin(); };
  EXPECT_LT(pos("g"), pos("a"));
  const double ug = json::parse(client_->Get(base + "/utility/g")->body).at("utility");
  const double ua = json::parse(client_->Get(base + "/utility/a")->body).at("utility");
  EXPECT_GE(ug - ua, 1.0 - 1e-6);

  // Idempotent reads.
  EXPECT_EQ(client_->Get(base + "/ranking")->body, ranking);
  EXPECT_EQ(json::parse(client_->Get(base + "/ranking?top=2")->body).at("items").size(), 2u);
}

TEST_F(HttpApi, PlainTextStatementsAndDelete) {
  const auto id = CreateSession();
  const std::string base = "/sessions/" + id;
  auto res = client_->Post(base + "/statements", "good: X1\nbad: X4", "text/plain");
  ASSERT_EQ(res->status, 200) << res->body;
  const auto added = json::parse(res->body).at("added");
  ASSERT_EQ(added.size(), 2u);
  const std::string sid = std::to_string(added[1].at("id").get<int>());
  res = client_->Delete(base + "/statements/" + sid);
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(client_->Delete(base + "/statements/" + sid)->status, 404);
  EXPECT_EQ(client_->Delete(base + "/statements/abc")->status, 404);
  EXPECT_EQ(json::parse(client_->Get(base)->body).at("statements").size(), 1u);
}

TEST_F(HttpApi, ErrorStatuses) {
  EXPECT_EQ(client_->Get("/sessions/missing/ranking")->status, 404);
  EXPECT_EQ(client_->Post("/sessions", "{", "application/json")->status, 400);
  auto res = client_->Post("/sessions",
                           json{{"schema", json::parse(kCarSchema)},
                                {"catalog", "id,X1\nq,true\n"}}
                               .dump(),
                           "application/json");
  EXPECT_EQ(res->status, 400) << res->body;
  EXPECT_EQ(json::parse(res->body).at("kind"), "validation");

  const auto id = CreateSession();
  const std::string base = "/sessions/" + id;
  res = client_->Post(base + "/statements", "prefer X1 over", "text/plain");
  EXPECT_EQ(res->status, 400);
  EXPECT_NE(json::parse(res->body).at("error").get<std::string>().find("line 1"),
            std::string::npos)
      << res->body;
  EXPECT_EQ(client_->Get(base + "/utility/zzz")->status, 404);
  EXPECT_EQ(client_->Get(base + "/ranking?top=-1")->status, 400);
  EXPECT_EQ(client_->Post(base + "/solve", R"({"degree": 0})", "application/json")->status, 400);

  client_->Post(base + "/statements", "good: X1", "text/plain");
  EXPECT_EQ(client_->Get(base + "/explain")->status, 409);
  EXPECT_EQ(client_->Get(base + "/utility/a")->status, 409);
  // Diagnostics stay readable while stale.
  res = client_->Get(base + "/diagnostics");
  EXPECT_EQ(res->status, 200);
  EXPECT_TRUE(json::parse(res->body).at("stale"));
}

TEST_F(HttpApi, ExplainBeyondOracleLimitIs422) {
  json attributes = json::array();
  std::string header = "id";
  std::string row = "only";
  for (int i = 1; i <= 13; ++i) {
    attributes.push_back({{"name", "Y" + std::to_string(i)}, {"type", "boolean"}});
    header += ",Y" + std::to_string(i);
    row += ",true";
  }
  auto res = client_->Post("/sessions",
                           json{{"schema", {{"attributes", attributes}}},
                                {"catalog", header + "\n" + row + "\n"}}
                               .dump(),
                           "application/json");
  ASSERT_EQ(res->status, 201) << res->body;
  const std::string base = "/sessions/" + json::parse(res->body).at("id").get<std::string>();
  client_->Post(base + "/statements", "good: Y1", "text/plain");
  client_->Post(base + "/solve", "", "application/json");
  res = client_->Get(base + "/explain");
  EXPECT_EQ(res->status, 422) << res->body;
  EXPECT_EQ(json::parse(res->body).at("kind"), "oracle_limit");
  EXPECT_EQ(client_->Get(base + "/ranking")->status, 200);
}

TEST_F(HttpApi, ConcurrentReadersDuringSolves) {
  const auto id = CreateSession(R"({"degree": 4})");
  const std::string base = "/sessions/" + id;
  client_->Post(base + "/statements", testing::kWorkedExample, "text/plain");
  client_->Post(base + "/solve", "", "application/json");
  std::vector<std::thread> readers;
  std::atomic<int> ok{0};
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      httplib::Client c("127.0.0.1", port_);
      for (int i = 0; i < 20; ++i) {
        auto r = c.Get(base + "/ranking");
        if (r && (r->status == 200 || r->status == 409)) ++ok;
      }
    });
  }
  for (int i = 0; i < 5; ++i) {
    client_->Post(base + "/solve", R"({"seed": )" + std::to_string(i) + "}", "application/json");
  }
  for (auto& r : readers) r.join();
  EXPECT_EQ(ok.load(), 80);
}

}  // namespace
}  // namespace ordutil
