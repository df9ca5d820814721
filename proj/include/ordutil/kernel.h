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


#ifndef ORDUTIL_KERNEL_H_
#define ORDUTIL_KERNEL_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ordutil/compile.h"
#include "ordutil/schema.h"

namespace ordutil {

// kWeighted is the sqrt(c_lambda)-weighted monomial map whose inner product
// is the subset kernel. kUnweighted is the plain 0/1 monomial indicator map;
// it is only ever materialized explicitly.
enum class KernelMode { kWeighted, kUnweighted };

struct KernelParams {
  std::vector<double> lambdas;  // lambda_1..lambda_n
  KernelMode mode = KernelMode::kWeighted;

  // Throws ValidationError on negative or non-finite lambdas, or an all-zero
  // vector in weighted mode.
  void Validate() const;
};

// lambda_1..lambda_degree = 1, the rest 0.
KernelParams DegreeParams(int degree, int attribute_count);

KernelParams UnweightedParams(int attribute_count);

// Exact coefficients are computed in 128-bit integers up to this many
// attributes; beyond it the table falls back to long double.
inline constexpr int kExactCoefficientLimit = 20;

using UInt128 = unsigned __int128;

// Number of surjections from an l-set onto a k-set, i.e. the sum of
// multinomials l!/(l_1!...l_k!) over compositions l_1+...+l_k = l with every
// l_i >= 1. Throws OverflowError if the value does not fit in 128 bits.
UInt128 SurjectionCount(int l, int k);

// c(k) = sum_{l=k..n} lambda_l * SurjectionCount(l, k) for integer lambdas,
// exactly. Throws OverflowError on overflow.
UInt128 ExactCoefficient(int k, std::span<const std::uint64_t> lambdas);

// Multiplicity of a size-k monomial in the weighted map, 1 <= k <= n.
double CoefficientC(int k, const KernelParams& params);

// c(0..n) with c(0) = 0. Cached per lambda vector.
std::vector<double> CoefficientTable(const KernelParams& params);

// sum_l lambda_l * s^l with s the attribute-value agreement count.
double KernelFromAgreement(int agreement, std::span<const double> lambdas);

// Subset kernel K(p, q) in input space. Requires weighted mode.
double KernelEval(const PartialAssignment& p, const PartialAssignment& q,
                  const KernelParams& params);

inline constexpr std::uint64_t kDefaultOracleLimit = std::uint64_t{1} << 20;

// Sparse explicit feature vector indexed by monomials (non-empty consistent
// partial assignments).
using FeatureVector = std::map<PartialAssignment, double>;

// One entry per non-empty sub-assignment of p: weight 1 in unweighted mode,
// sqrt(c(|monomial|)) in weighted mode. Throws OracleLimitError when the
// schema's monomial space exceeds `oracle_limit`.
FeatureVector ExplicitFeatureMap(const PartialAssignment& p,
                                 const Schema& schema,
                                 const KernelParams& params,
                                 std::uint64_t oracle_limit = kDefaultOracleLimit);

double Dot(const FeatureVector& a, const FeatureVector& b);

// <Phi(p), Phi(q)> in the map selected by params.mode: the subset kernel in
// weighted mode, an explicit dot product in unweighted mode.
double FeatureInnerProduct(const PartialAssignment& p,
                           const PartialAssignment& q, const Schema& schema,
                           const KernelParams& params);

// Dense symmetric matrix of pairwise inner products between constraint
// difference vectors Phi(lhs_i) - Phi(rhs_i).
class GramMatrix {
 public:
  GramMatrix() = default;
  explicit GramMatrix(std::size_t size)
      : size_(size), data_(size * size, 0.0) {}

  std::size_t size() const { return size_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * size_ + j];
  }
  double& at(std::size_t i, std::size_t j) { return data_[i * size_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * size_, size_};
  }
  double Trace() const;

 private:
  std::size_t size_ = 0;
  std::vector<double> data_;
};

// Q_ij = K(x_i,x_j) - K(x_i,x'_j) - K(x'_i,x_j) + K(x'_i,x'_j). Weighted mode
// uses the kernel; unweighted mode materializes the explicit map.
GramMatrix BuildGramMatrix(const ConstraintSet& constraints,
                           const KernelParams& params);

}  // namespace ordutil

#endif  // ORDUTIL_KERNEL_H_
