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


#include "ordutil/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"
#include "ordutil/errors.h"

namespace ordutil {

namespace {

constexpr double kDegenerateDiagonal = 1e-12;

}  // namespace

void SolverConfig::Validate() const {
  if (mode == MarginMode::kSoft && !(soft_c > 0.0 && std::isfinite(soft_c))) {
    throw ValidationError("soft-margin C must be positive and finite");
  }
  if (!(kkt_tolerance > 0.0)) throw ValidationError("kkt_tolerance must be positive");
  if (max_epochs <= 0) throw ValidationError("max_epochs must be positive");
  if (!(alpha_cap > 0.0)) throw ValidationError("alpha_cap must be positive");
}

std::string VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kOptimal: return "optimal";
    case Verdict::kNotConverged: return "not converged";
    case Verdict::kLikelyInconsistent: return "likely inconsistent";
    case Verdict::kDegenerate: return "degenerate";
  }
  return "unknown";
}

UtilityModel UtilityModel::Empty(const Schema& schema, KernelParams params) {
  UtilityModel model;
  model.constraints = ConstraintSet(schema);
  model.params = std::move(params);
  model.diagnostics.message = "optimal";
  return model;
}

std::vector<std::size_t> UtilityModel::SupportIndices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] > 0.0) out.push_back(i);
  }
  return out;
}

UtilityModel SolveDual(const ConstraintSet& constraints,
                       const KernelParams& params, const SolverConfig& config) {
  params.Validate();
  return SolveDual(constraints, params, config,
                   BuildGramMatrix(constraints, params));
}

UtilityModel SolveDual(const ConstraintSet& constraints,
                       const KernelParams& params, const SolverConfig& config,
                       const GramMatrix& gram) {
  config.Validate();
  params.Validate();
  const std::size_t k = constraints.size();
  if (gram.size() != k) throw SolverError("Gram matrix size mismatch");

  UtilityModel model;
  model.constraints = constraints;
  model.params = params;
  model.config = config;
  model.alphas.assign(k, 0.0);
  SolverDiagnostics& diag = model.diagnostics;

  for (std::size_t i = 0; i < k; ++i) {
    for (double q : gram.row(i)) {
      if (!std::isfinite(q)) throw SolverError("Gram matrix is not finite");
    }
  }

  const bool soft = config.mode == MarginMode::kSoft;
  const double upper = soft ? config.soft_c : config.alpha_cap;
  std::vector<double>& alpha = model.alphas;
  std::vector<double> margin(k);
  for (std::size_t i = 0; i < k; ++i) margin[i] = constraints[i].margin;

  // Constraints with a vanishing difference vector never move: either they
  // hold trivially (margin <= 0) or nothing can satisfy them. In soft mode the
  // latter simply sit at the bound, which leaves w untouched.
  std::vector<char> frozen(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    if (gram(i, i) > kDegenerateDiagonal) continue;
    frozen[i] = 1;
    if (margin[i] > 0.0) {
      diag.degenerate.push_back(i);
      if (soft) alpha[i] = upper;
    }
  }

  // gradient g = b - Q alpha
  std::vector<double> grad(margin);
  auto recompute_gradient = [&]() {
    for (std::size_t i = 0; i < k; ++i) {
      const auto row = gram.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += row[j] * alpha[j];
      grad[i] = margin[i] - s;
    }
  };
  auto objective = [&]() {
    double obj = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      obj += 0.5 * alpha[i] * (margin[i] + grad[i]);
    }
    return obj;
  };
  recompute_gradient();

  auto violation = [&]() {
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (frozen[i]) continue;
      const double g = grad[i];
      double v = 0.0;
      if (alpha[i] <= 0.0) {
        v = std::max(0.0, g);
      } else if (alpha[i] >= upper) {
        v = std::max(0.0, -g);
      } else {
        v = std::abs(g);
      }
      const double target = std::clamp(alpha[i] + g / gram(i, i), 0.0, upper);
      v = std::max(v, std::abs(target - alpha[i]));
      worst = std::max(worst, v);
    }
    return worst;
  };

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);

  double obj = objective();
  bool converged = violation() <= config.kkt_tolerance;
  bool capped = false;
  int epoch = 0;
  while (!converged && epoch < config.max_epochs) {
    ++epoch;
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_gain = 0.0;
    for (std::size_t i : order) {
      if (frozen[i]) continue;
      const double qii = gram(i, i);
      const double next = std::clamp(alpha[i] + grad[i] / qii, 0.0, upper);
      const double delta = next - alpha[i];
      if (delta == 0.0) continue;
      epoch_gain += delta * grad[i] - 0.5 * delta * delta * qii;
      alpha[i] = next;
      const auto row = gram.row(i);
      for (std::size_t j = 0; j < k; ++j) grad[j] -= row[j] * delta;
    }
    if (!std::isfinite(epoch_gain)) throw SolverError("non-finite dual objective");
    // Each clipped coordinate step is an exact line maximization.
    if (epoch_gain < -1e-12 * (1.0 + std::abs(obj))) diag.objective_monotone = false;
    obj += epoch_gain;

    if (!soft && *std::max_element(alpha.begin(), alpha.end()) >= upper) {
      capped = true;
      break;
    }
    if (violation() <= config.kkt_tolerance) {
      recompute_gradient();
      converged = violation() <= config.kkt_tolerance;
    } else if (epoch % 64 == 0) {
      recompute_gradient();
    }
  }
  recompute_gradient();
  diag.epochs = epoch;
  diag.objective = objective();
  diag.max_kkt_violation = violation();
  for (double a : alpha) {
    if (!std::isfinite(a)) throw SolverError("non-finite multiplier");
  }

  if (!soft && !diag.degenerate.empty()) {
    diag.verdict = Verdict::kDegenerate;
    std::string which;
    for (std::size_t i : diag.degenerate) {
      which += (which.empty() ? "" : ", ") + std::to_string(i + 1);
    }
    diag.message = "degenerate: constraint " + which +
                   " compares indistinguishable sides with a positive margin";
  } else if (!soft && (capped || !converged)) {
    diag.verdict = Verdict::kLikelyInconsistent;
    diag.message = capped
                       ? "likely inconsistent; rerun with SOFT (multiplier "
                         "reached alpha_cap)"
                       : "likely inconsistent; rerun with SOFT (no "
                         "convergence within max_epochs)";
  } else if (!converged) {
    diag.verdict = Verdict::kNotConverged;
    diag.message = "not converged within max_epochs";
  } else {
    diag.verdict = Verdict::kOptimal;
    diag.message = "optimal";
  }
  return model;
}

KktReport CheckKkt(const UtilityModel& model) {
  const auto& cs = model.constraints;
  const std::size_t k = cs.size();
  const Schema& schema = cs.schema();
  const bool soft = model.config.mode == MarginMode::kSoft;
  const double upper = soft ? model.config.soft_c : model.config.alpha_cap;
  const double tol = model.config.kkt_tolerance;
  const auto support = model.SupportIndices();

  auto inner = [&](const PartialAssignment& a, const PartialAssignment& b) {
    if (a.empty() || b.empty()) return 0.0;
    return FeatureInnerProduct(a, b, schema, model.params);
  };
  auto utility = [&](const PartialAssignment& x) {
    double u = 0.0;
    for (std::size_t j : support) {
      u += model.alphas[j] * (inner(cs[j].lhs, x) - inner(cs[j].rhs, x));
    }
    return u;
  };

  KktReport report;
  report.constraints.resize(k);
  report.min_slack = k > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    ConstraintAudit& audit = report.constraints[i];
    audit.alpha = model.alphas[i];
    audit.difference = utility(cs[i].lhs) - utility(cs[i].rhs);
    audit.slack = audit.difference - cs[i].margin;
    report.min_slack = std::min(report.min_slack, audit.slack);
    if (audit.slack < -tol) ++report.violated;
    if (audit.alpha <= 0.0) {
      ++report.at_lower;
    } else if (audit.alpha >= upper) {
      ++report.at_upper;
    } else {
      ++report.free;
    }
    if (audit.alpha < upper) {
      report.max_complementarity_violation =
          std::max(report.max_complementarity_violation,
                   std::abs(audit.alpha * audit.slack));
    }
  }
  return report;
}

WeightMap ReconstructWeights(const UtilityModel& model,
                             std::uint64_t oracle_limit) {
  const Schema& schema = model.schema();
  WeightMap weights;
  for (std::size_t i : model.SupportIndices()) {
    const double a = model.alphas[i];
    const Constraint& c = model.constraints[i];
    for (const auto& [monomial, w] :
         ExplicitFeatureMap(c.lhs, schema, model.params, oracle_limit)) {
      weights[monomial] += a * w;
    }
    for (const auto& [monomial, w] :
         ExplicitFeatureMap(c.rhs, schema, model.params, oracle_limit)) {
      weights[monomial] -= a * w;
    }
  }
  std::erase_if(weights,
                [](const auto& entry) { return std::abs(entry.second) <= 1e-12; });
  return weights;
}

std::string DiagnosticsToJson(const UtilityModel& model,
                              const KktReport& report) {
  const auto& d = model.diagnostics;
  nlohmann::json slacks = nlohmann::json::array();
  for (std::size_t i = 0; i < report.constraints.size(); ++i) {
    const auto& a = report.constraints[i];
    slacks.push_back({{"index", i},
                      {"source", model.constraints[i].source},
                      {"alpha", a.alpha},
                      {"slack", a.slack}});
  }
  nlohmann::json out = {
      {"verdict", VerdictName(d.verdict)},
      {"message", d.message},
      {"objective", d.objective},
      {"epochs", d.epochs},
      {"max_kkt_violation", d.max_kkt_violation},
      {"constraints", model.constraints.size()},
      {"mode", model.config.mode == MarginMode::kSoft ? "soft" : "hard"},
      {"census",
       {{"at_lower", report.at_lower},
        {"free", report.free},
        {"at_upper", report.at_upper},
        {"violated", report.violated}}},
      {"min_slack", report.min_slack},
      {"max_complementarity_violation", report.max_complementarity_violation},
      {"degenerate", d.degenerate},
      {"slack", slacks},
  };
  if (model.config.mode == MarginMode::kSoft) out["C"] = model.config.soft_c;
  return out.dump();
}

}  // namespace ordutil
