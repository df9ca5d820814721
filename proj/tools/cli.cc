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


#include "cli.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "ordutil/compile.h"
#include "ordutil/errors.h"
#include "ordutil/experiment.h"
#include "ordutil/formula.h"
#include "ordutil/service.h"
#include "ordutil/solver.h"
#include "ordutil/utility.h"

namespace ordutil::cli {

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

struct SolveOptions {
  std::string schema;
  std::string catalog;
  std::string statements;
  int degree = kDefaultDegree;
  bool unweighted = false;
  double soft_c = 0.0;  // 0 keeps hard margins
  std::size_t top = 0;  // 0 lists every item
  bool explain = false;
  bool json = false;
  std::uint64_t seed = 0;
};

int RunSolve(const SolveOptions& o, std::ostream& out) {
  const Schema schema = LoadSchema(ReadFile(o.schema));
  const Catalog catalog = LoadCatalog(ReadFile(o.catalog), schema);
  const PreferenceExpression expr = ParseExpression(ReadFile(o.statements));
  const ConstraintSet cs = CompileExpression(expr, schema);
  const int n = static_cast<int>(schema.size());
  const KernelParams params =
      o.unweighted ? UnweightedParams(n) : DegreeParams(std::min(o.degree, n), n);
  SolverConfig cfg;
  cfg.seed = o.seed;
  if (o.soft_c > 0.0) {
    cfg.mode = MarginMode::kSoft;
    cfg.soft_c = o.soft_c;
  }
  const UtilityModel model = SolveDual(cs, params, cfg);
  const KktReport report = CheckKkt(model);
  const auto top = o.top > 0 ? std::optional<std::size_t>(o.top) : std::nullopt;
  const Ranking ranking = RankCatalog(model, catalog, top);
  std::optional<WeightMap> weights;
  if (o.explain) weights = ReconstructWeights(model);

  const auto& d = model.diagnostics;
  if (o.json) {
    nlohmann::json doc = {
        {"diagnostics", nlohmann::json::parse(DiagnosticsToJson(model, report))},
        {"ranking", nlohmann::json::parse(RankingToJson(ranking))}};
    if (weights) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& [m, w] : *weights) {
        list.push_back({{"monomial", schema.Format(m)}, {"weight", w}});
      }
      doc["weights"] = list;
    }
    out << doc.dump(2) << '\n';
  } else {
    out << "verdict: " << VerdictName(d.verdict) << " (" << cs.size() << " constraints, "
        << model.SupportIndices().size() << " support, " << d.epochs << " epochs)\n";
    if (d.verdict != Verdict::kOptimal) out << "note: " << d.message << '\n';
    if (report.violated > 0) out << "violated constraints: " << report.violated << '\n';
    out << std::fixed << std::setprecision(6);
    std::size_t rank = 0;
    for (const auto& item : ranking.items) {
      out << std::setw(4) << ++rank << "  " << std::left << std::setw(12) << item.id
          << std::right << std::setw(12) << item.utility << '\n';
    }
    if (weights) {
      std::vector<std::pair<PartialAssignment, double>> sorted(weights->begin(), weights->end());
      std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::abs(a.second) > std::abs(b.second);
      });
      out << "weights:\n";
      for (const auto& [m, w] : sorted) {
        out << std::setw(12) << w << "  " << schema.Format(m) << '\n';
      }
    }
  }
  const bool infeasible = cfg.mode == MarginMode::kHard && d.verdict != Verdict::kOptimal;
  return infeasible ? kExitInfeasible : kExitOk;
}

int RunSweep(const std::string& config, const std::string& path, int threads,
             std::ostream& out, std::ostream& err) {
  const SyntheticSetup setup = ParseSyntheticSetup(ReadFile(config));
  const auto start = std::chrono::steady_clock::now();
  const ErrorCurve curve = RunDegreeSweep(setup, threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (path.empty() || path == "-") {
    out << curve.ToCsv();
  } else {
    WriteFile(path, curve.ToCsv());
  }
  int failures = 0;
  for (const auto& row : curve.rows) failures += row.failures;
  err << "sweep: " << curve.rows.size() << " cells, " << failures << " failed, "
      << std::fixed << std::setprecision(2) << seconds << " s\n";
  return kExitOk;
}

int RunCheck(const std::string& statements, const std::string& schema_path,
             std::ostream& out) {
  const PreferenceExpression expr = ParseExpression(ReadFile(statements));
  if (schema_path.empty()) {
    out << expr.statements.size() << " statements parsed\n";
    for (const auto& s : expr.statements) out << "line " << s.line << ": " << ToString(s) << '\n';
    return kExitOk;
  }
  const Schema schema = LoadSchema(ReadFile(schema_path));
  const ConstraintSet cs = CompileExpression(expr, schema);
  out << expr.statements.size() << " statements, " << cs.size() << " constraints\n";
  for (std::size_t i = 0; i < expr.statements.size(); ++i) {
    out << "line " << expr.statements[i].line << ": " << cs.per_statement()[i]
        << (cs.per_statement()[i] == 1 ? " constraint   " : " constraints  ")
        << ToString(expr.statements[i]) << '\n';
  }
  return kExitOk;
}

int RunServe(const std::string& host, int port, const std::string& log, std::ostream& err) {
  auto store = log.empty() ? std::make_unique<SessionStore>()
                           : std::make_unique<SessionStore>(std::filesystem::path(log));
  httplib::Server server;
  RegisterRoutes(server, *store);
  err << "serving on http://" << host << ':' << port << " (" << store->size()
      << " sessions restored)\n";
  err.flush();
  if (!server.listen(host, port)) {
    err << "error: cannot listen on " << host << ':' << port << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ordinal utility functions from qualitative preference statements"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Rank a catalog from a statement file");
  solve_cmd->add_option("--schema", solve.schema, "Schema JSON")->required();
  solve_cmd->add_option("--catalog", solve.catalog, "Catalog CSV")->required();
  solve_cmd->add_option("--statements", solve.statements, "Statement file")->required();
  solve_cmd->add_option("--degree", solve.degree, "Kernel degree")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--unweighted", solve.unweighted, "Use the 0/1 monomial map");
  solve_cmd->add_option("--soft", solve.soft_c, "Soft-margin bound C")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--top", solve.top, "Show only the first k items");
  solve_cmd->add_flag("--explain", solve.explain, "Print monomial weights");
  solve_cmd->add_flag("--json", solve.json, "Emit JSON");
  solve_cmd->add_option("--seed", solve.seed, "Coordinate order seed");

  std::string sweep_config;
  std::string sweep_out;
  int sweep_threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a synthetic degree sweep");
  sweep_cmd->add_option("--config", sweep_config, "Sweep config JSON")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (- for stdout)")->required();
  sweep_cmd->add_option("--threads", sweep_threads, "Worker threads (0: all cores)");

  std::string check_statements;
  std::string check_schema;
  auto* check_cmd = app.add_subcommand("check", "Parse and compile a statement file");
  check_cmd->add_option("--statements", check_statements, "Statement file")->required();
  check_cmd->add_option("--schema", check_schema, "Schema JSON; enables compilation");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port");
  serve_cmd->add_option("--log", log, "Append-only event log; replayed at start");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return RunSolve(solve, out);
    if (*sweep_cmd) return RunSweep(sweep_config, sweep_out, sweep_threads, out, err);
    if (*check_cmd) return RunCheck(check_statements, check_schema, out);
    if (*serve_cmd) return RunServe(host, port, log, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace ordutil::cli
