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


#include "ordutil/kernel.h"

#include <cmath>
#include <mutex>
#include <string>

#include "ordutil/errors.h"

namespace ordutil {

void KernelParams::Validate() const {
  bool any_positive = false;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    if (!std::isfinite(lambdas[l]) || lambdas[l] < 0.0) {
      throw ValidationError("lambda_" + std::to_string(l + 1) +
                            " must be finite and non-negative");
    }
    if (lambdas[l] > 0.0) any_positive = true;
  }
  if (mode == KernelMode::kWeighted && !any_positive) {
    throw ValidationError("weighted kernel needs at least one positive lambda");
  }
}

KernelParams DegreeParams(int degree, int attribute_count) {
  if (attribute_count < 1 || degree < 1 || degree > attribute_count) {
    throw ValidationError("degree " + std::to_string(degree) +
                          " outside 1.." + std::to_string(attribute_count));
  }
  KernelParams params;
  params.lambdas.assign(attribute_count, 0.0);
  for (int l = 0; l < degree; ++l) params.lambdas[l] = 1.0;
  return params;
}

KernelParams UnweightedParams(int attribute_count) {
  KernelParams params;
  params.lambdas.assign(attribute_count, 1.0);
  params.mode = KernelMode::kUnweighted;
  return params;
}

namespace {

UInt128 CheckedMul(UInt128 a, UInt128 b) {
  UInt128 out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError("coefficient arithmetic exceeds 128 bits");
  }
  return out;
}

UInt128 CheckedAdd(UInt128 a, UInt128 b) {
  UInt128 out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw OverflowError("coefficient arithmetic exceeds 128 bits");
  }
  return out;
}

// Row l of the surjection triangle, computed by
// S(l, k) = k * (S(l-1, k) + S(l-1, k-1)).
std::vector<std::vector<UInt128>> SurjectionTriangle(int max_l) {
  std::vector<std::vector<UInt128>> rows(max_l + 1);
  rows[0] = {1};
  for (int l = 1; l <= max_l; ++l) {
    rows[l].assign(l + 1, 0);
    for (int k = 1; k <= l; ++k) {
      const UInt128 same = k < l ? rows[l - 1][k] : 0;
      rows[l][k] = CheckedMul(k, CheckedAdd(same, rows[l - 1][k - 1]));
    }
  }
  return rows;
}

std::vector<double> ComputeTable(const std::vector<double>& lambdas) {
  const int n = static_cast<int>(lambdas.size());
  std::vector<double> table(n + 1, 0.0);
  if (n <= kExactCoefficientLimit) {
    const auto tri = SurjectionTriangle(n);
    for (int k = 1; k <= n; ++k) {
      long double sum = 0.0L;
      for (int l = k; l <= n; ++l) {
        if (lambdas[l - 1] == 0.0) continue;
        sum += static_cast<long double>(lambdas[l - 1]) *
               static_cast<long double>(tri[l][k]);
      }
      table[k] = static_cast<double>(sum);
    }
    return table;
  }
  std::vector<std::vector<long double>> tri(n + 1);
  tri[0] = {1.0L};
  for (int l = 1; l <= n; ++l) {
    tri[l].assign(l + 1, 0.0L);
    for (int k = 1; k <= l; ++k) {
      const long double same = k < l ? tri[l - 1][k] : 0.0L;
      tri[l][k] = k * (same + tri[l - 1][k - 1]);
    }
  }
  for (int k = 1; k <= n; ++k) {
    long double sum = 0.0L;
    for (int l = k; l <= n; ++l) {
      sum += static_cast<long double>(lambdas[l - 1]) * tri[l][k];
    }
    table[k] = static_cast<double>(sum);
    if (!std::isfinite(table[k])) {
      throw OverflowError("c(" + std::to_string(k) + ") overflows for n = " +
                          std::to_string(n));
    }
  }
  return table;
}

}  // namespace

UInt128 SurjectionCount(int l, int k) {
  if (l < 0 || k < 0) throw ValidationError("negative surjection arguments");
  if (k > l) return 0;
  if (l == 0) return 1;
  if (k == 0) return 0;
  return SurjectionTriangle(l)[l][k];
}

UInt128 ExactCoefficient(int k, std::span<const std::uint64_t> lambdas) {
  const int n = static_cast<int>(lambdas.size());
  if (k < 1 || k > n) {
    throw ValidationError("monomial size " + std::to_string(k) +
                          " outside 1.." + std::to_string(n));
  }
  const auto tri = SurjectionTriangle(n);
  UInt128 sum = 0;
  for (int l = k; l <= n; ++l) {
    sum = CheckedAdd(sum, CheckedMul(lambdas[l - 1], tri[l][k]));
  }
  return sum;
}

std::vector<double> CoefficientTable(const KernelParams& params) {
  static std::mutex mu;
  static std::map<std::vector<double>, std::vector<double>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(params.lambdas);
    if (it != cache.end()) return it->second;
  }
  auto table = ComputeTable(params.lambdas);
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 256) cache.clear();
  cache.emplace(params.lambdas, table);
  return table;
}

double CoefficientC(int k, const KernelParams& params) {
  const int n = static_cast<int>(params.lambdas.size());
  if (k < 1 || k > n) {
    throw ValidationError("monomial size " + std::to_string(k) +
                          " outside 1.." + std::to_string(n));
  }
  return CoefficientTable(params)[k];
}

double KernelFromAgreement(int agreement, std::span<const double> lambdas) {
  // Horner on s * (lambda_1 + s * (lambda_2 + ...)).
  const double s = agreement;
  double acc = 0.0;
  for (std::size_t l = lambdas.size(); l-- > 0;) acc = acc * s + lambdas[l];
  return acc * s;
}

double KernelEval(const PartialAssignment& p, const PartialAssignment& q,
                  const KernelParams& params) {
  if (params.mode != KernelMode::kWeighted) {
    throw ValidationError("the subset kernel is defined for the weighted map");
  }
  return KernelFromAgreement(AgreementCount(p, q), params.lambdas);
}

FeatureVector ExplicitFeatureMap(const PartialAssignment& p,
                                 const Schema& schema,
                                 const KernelParams& params,
                                 std::uint64_t oracle_limit) {
  if (schema.MonomialCount() > oracle_limit) {
    throw OracleLimitError("explicit feature space has " +
                           std::to_string(schema.MonomialCount()) +
                           " monomials, above the limit of " +
                           std::to_string(oracle_limit));
  }
  schema.Validate(p);
  std::vector<double> weight_by_size;
  if (params.mode == KernelMode::kWeighted) {
    if (params.lambdas.size() != schema.size()) {
      throw ValidationError("kernel has " +
                            std::to_string(params.lambdas.size()) +
                            " lambdas for a schema of " +
                            std::to_string(schema.size()) + " attributes");
    }
    weight_by_size = CoefficientTable(params);
    for (double& c : weight_by_size) c = std::sqrt(c);
  }
  FeatureVector out;
  const auto bindings = p.bindings();
  const std::size_t m = bindings.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<Binding> subset;
    for (std::size_t b = 0; b < m; ++b) {
      if (mask & (std::uint64_t{1} << b)) subset.push_back(bindings[b]);
    }
    const std::size_t size = subset.size();
    const double weight =
        params.mode == KernelMode::kWeighted ? weight_by_size[size] : 1.0;
    if (weight == 0.0) continue;
    out.emplace(PartialAssignment::FromBindings(std::move(subset)), weight);
  }
  return out;
}

double Dot(const FeatureVector& a, const FeatureVector& b) {
  const FeatureVector& small = a.size() <= b.size() ? a : b;
  const FeatureVector& large = a.size() <= b.size() ? b : a;
  double sum = 0.0;
  for (const auto& [monomial, weight] : small) {
    auto it = large.find(monomial);
    if (it != large.end()) sum += weight * it->second;
  }
  return sum;
}

double FeatureInnerProduct(const PartialAssignment& p,
                           const PartialAssignment& q, const Schema& schema,
                           const KernelParams& params) {
  if (params.mode == KernelMode::kWeighted) return KernelEval(p, q, params);
  return Dot(ExplicitFeatureMap(p, schema, params),
             ExplicitFeatureMap(q, schema, params));
}

double GramMatrix::Trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < size_; ++i) t += (*this)(i, i);
  return t;
}

GramMatrix BuildGramMatrix(const ConstraintSet& constraints,
                           const KernelParams& params) {
  params.Validate();
  const std::size_t k = constraints.size();
  GramMatrix gram(k);
  if (params.mode == KernelMode::kWeighted) {
    const auto& cs = constraints.constraints();
    const auto& lambdas = params.lambdas;
    auto kern = [&lambdas](const PartialAssignment& a, const PartialAssignment& b) {
      if (a.empty() || b.empty()) return 0.0;
      return KernelFromAgreement(AgreementCount(a, b), lambdas);
    };
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        const double v = kern(cs[i].lhs, cs[j].lhs) - kern(cs[i].lhs, cs[j].rhs) -
                         kern(cs[i].rhs, cs[j].lhs) + kern(cs[i].rhs, cs[j].rhs);
        gram.at(i, j) = v;
        gram.at(j, i) = v;
      }
    }
    return gram;
  }

  std::vector<FeatureVector> diffs;
  diffs.reserve(k);
  for (const auto& c : constraints.constraints()) {
    FeatureVector d = ExplicitFeatureMap(c.lhs, constraints.schema(), params);
    for (const auto& [monomial, weight] :
         ExplicitFeatureMap(c.rhs, constraints.schema(), params)) {
      d[monomial] -= weight;
    }
    diffs.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const double v = Dot(diffs[i], diffs[j]);
      gram.at(i, j) = v;
      gram.at(j, i) = v;
    }
  }
  return gram;
}

}  // namespace ordutil
