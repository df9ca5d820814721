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


#ifndef ORDUTIL_EXPERIMENT_H_
#define ORDUTIL_EXPERIMENT_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ordutil/formula.h"
#include "ordutil/schema.h"
#include "ordutil/utility.h"

namespace ordutil {

enum class TruthKind {
  kSparse,  // random monomials of size 1..order with N(0,1) weights
  kParity,  // signed sum of pairwise equality indicators, [x_i == x_j]
};

enum class StatementStyle {
  kInstance,  // "prefer <item a> over <item b>" between training items
  kRule,      // good/bad statements on ground-truth monomials
  kMixed,     // rules first, then instances
};

// Everything needed to regenerate a synthetic ratings study.
struct SyntheticSetup {
  int attributes = 8;
  std::vector<int> domain_sizes;  // empty means every attribute is boolean
  TruthKind truth = TruthKind::kParity;
  int order = 2;       // largest interaction in the ground truth
  int monomials = 4;   // truth terms (pairs, for parity)
  int catalog_size = 128;  // half of the 8-attribute boolean cube
  int rating_levels = kDefaultRatingLevels;
  std::vector<int> budgets = {0, 25, 50, 100, 200, 400};
  std::vector<int> degrees = {1, 2, 3, 4};
  StatementStyle style = StatementStyle::kInstance;
  double noise = 0.0;  // probability of flipping a generated statement
  int trials = 10;
  std::uint64_t seed = 0;
  // Solver settings for every sweep cell. Soft margins by default.
  bool soft = true;
  double soft_c = 1.0;
  double kkt_tolerance = 1e-3;
  int max_epochs = 2000;

  // Throws ValidationError.
  void Validate() const;
  int DomainSize(int attribute) const;
};

// Reads a JSON object; absent keys keep their defaults. Throws
// ValidationError on unknown keys or bad values.
SyntheticSetup ParseSyntheticSetup(std::string_view json);
std::string SyntheticSetupToJson(const SyntheticSetup& setup);

struct GroundTruth {
  std::vector<std::pair<PartialAssignment, double>> terms;
  // Sum of the weights of the terms contained in x.
  double Evaluate(const PartialAssignment& x) const;
};

struct SyntheticData {
  Schema schema;
  Catalog catalog;
  GroundTruth truth;
  std::vector<double> utilities;  // true utility, parallel to catalog items
  std::vector<int> ratings;       // quantized utilities in [1, levels]
  std::vector<bool> training;     // item belongs to the statement half
  RatedPairs held_out;            // ratings of the other half
  PreferenceExpression statements;  // in generation order
};

// Deterministic for a given setup (including setup.seed).
SyntheticData GenerateSynthetic(const SyntheticSetup& setup);

// Stable 64-bit FNV-1a hash; items with an even hash are training items.
std::uint64_t StableHash(std::string_view text);
// Mixes several values into one seed (splitmix64 chain).
std::uint64_t DeriveSeed(std::initializer_list<std::uint64_t> parts);

struct ErrorCurveRow {
  int degree = 0;
  int k = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  int trials = 0;    // trials that produced an error value
  int failures = 0;  // trials whose solve or scoring threw
};

struct ErrorCurve {
  std::vector<ErrorCurveRow> rows;  // degree-major, budgets ascending
  // Header `degree,k,mean_error,std,trials` then one row per cell.
  std::string ToCsv() const;
  const ErrorCurveRow* Find(int degree, int k) const;
};

// For every trial, degree and budget k: compiles the first k generated
// statements, solves, and scores ordering error on the held-out ratings.
// Cells run on `threads` workers (0 picks the hardware concurrency).
ErrorCurve RunDegreeSweep(const SyntheticSetup& setup, int threads = 0);

}  // namespace ordutil

#endif  // ORDUTIL_EXPERIMENT_H_
