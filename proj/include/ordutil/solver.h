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


#ifndef ORDUTIL_SOLVER_H_
#define ORDUTIL_SOLVER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ordutil/compile.h"
#include "ordutil/kernel.h"

namespace ordutil {

enum class MarginMode { kHard, kSoft };

struct SolverConfig {
  MarginMode mode = MarginMode::kHard;
  double soft_c = 1.0;          // box bound on alpha in soft mode
  double kkt_tolerance = 1e-6;
  int max_epochs = 10000;
  double alpha_cap = 1e8;       // hard-mode divergence guard
  std::uint64_t seed = 0;       // seeds the per-epoch coordinate order

  // Throws ValidationError.
  void Validate() const;
};

enum class Verdict {
  kOptimal,
  kNotConverged,
  kLikelyInconsistent,
  kDegenerate,
};

std::string VerdictName(Verdict verdict);

struct SolverDiagnostics {
  Verdict verdict = Verdict::kOptimal;
  std::string message;
  double objective = 0.0;
  double max_kkt_violation = 0.0;
  int epochs = 0;
  bool objective_monotone = true;
  // Constraints whose difference vector vanishes while their margin is
  // positive; no weight vector can satisfy them.
  std::vector<std::size_t> degenerate;
};

// Dual solution of the min-norm margin problem together with everything
// needed to evaluate the utility it induces.
struct UtilityModel {
  std::vector<double> alphas;
  ConstraintSet constraints;
  KernelParams params;
  SolverConfig config;
  SolverDiagnostics diagnostics;

  // Model with no constraints; its utility is identically zero.
  static UtilityModel Empty(const Schema& schema, KernelParams params);

  const Schema& schema() const { return constraints.schema(); }
  // Indices with alpha > 0.
  std::vector<std::size_t> SupportIndices() const;
};

// Maximizes sum_i b_i a_i - 1/2 a^T Q a over the box 0 <= a_i <= U, with U
// the soft-margin bound or alpha_cap, by cyclic coordinate ascent in a
// seeded permuted order. Throws SolverError on non-finite arithmetic.
UtilityModel SolveDual(const ConstraintSet& constraints,
                       const KernelParams& params, const SolverConfig& config);

// Same, reusing a precomputed Gram matrix for `constraints`.
UtilityModel SolveDual(const ConstraintSet& constraints,
                       const KernelParams& params, const SolverConfig& config,
                       const GramMatrix& gram);

struct ConstraintAudit {
  double alpha = 0.0;
  double difference = 0.0;  // U(lhs) - U(rhs)
  double slack = 0.0;       // difference - margin
};

struct KktReport {
  std::vector<ConstraintAudit> constraints;
  double min_slack = 0.0;
  // max |alpha_i * slack_i| over constraints below the upper bound.
  double max_complementarity_violation = 0.0;
  std::size_t at_lower = 0;
  std::size_t free = 0;
  std::size_t at_upper = 0;
  std::size_t violated = 0;  // slack < -tolerance
};

// Optimality audit. Slacks are recomputed from kernel sums, independent of
// the solver's running gradient.
KktReport CheckKkt(const UtilityModel& model);

// w(g) = sum_i alpha_i (Phi(lhs_i)[g] - Phi(rhs_i)[g]) in the model's map.
// Entries with |w| <= 1e-12 are omitted. Throws OracleLimitError.
using WeightMap = std::map<PartialAssignment, double>;
WeightMap ReconstructWeights(const UtilityModel& model,
                             std::uint64_t oracle_limit = kDefaultOracleLimit);

// JSON report: verdict, objective, epochs, census and per-constraint slack.
std::string DiagnosticsToJson(const UtilityModel& model,
                              const KktReport& report);

}  // namespace ordutil

#endif  // ORDUTIL_SOLVER_H_
