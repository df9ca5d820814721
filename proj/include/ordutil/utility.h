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


#ifndef ORDUTIL_UTILITY_H_
#define ORDUTIL_UTILITY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ordutil/schema.h"
#include "ordutil/solver.h"

namespace ordutil {

// U(p) = sum_i alpha_i (K(lhs_i, p) - K(rhs_i, p)). Partial assignments are
// accepted.
double EvaluateUtility(const UtilityModel& model, const PartialAssignment& p);

// Utilities closer than this, relative to max(1, |u|), count as tied.
inline constexpr double kTieTolerance = 1e-9;
bool UtilitiesTie(double a, double b);

struct RankedItem {
  std::string id;
  double utility = 0.0;
  std::size_t tie_group = 0;  // items with equal utility share a group
};

// Sorted by utility, descending. Ties keep catalog order.
struct Ranking {
  std::vector<RankedItem> items;
};

// Throws ValidationError when the catalog schema differs from the model's.
Ranking RankCatalog(const UtilityModel& model, const Catalog& catalog,
                    std::optional<std::size_t> top_k = std::nullopt);

std::string RankingToJson(const Ranking& ranking);

inline constexpr int kDefaultRatingLevels = 6;

struct Rating {
  std::string id;
  int value = 0;
};

// Integer ratings for catalog items. Comparable pairs are the unequally
// rated ones.
struct RatedPairs {
  std::vector<Rating> ratings;
  int levels = kDefaultRatingLevels;

  struct Pair {
    std::size_t better;  // indices into `ratings`
    std::size_t worse;
  };
  std::vector<Pair> ComparablePairs() const;
};

// Rows of `id,rating`, optional header line `id,rating`. Ratings must lie in
// [1, levels]. Throws ValidationError.
RatedPairs LoadRatings(std::string_view document,
                       int levels = kDefaultRatingLevels);

struct OrderingErrorReport {
  double error = 0.0;
  std::size_t pairs_total = 0;
  std::size_t pairs_disagree = 0;
  std::size_t pairs_tied_by_model = 0;
};

// Fraction of unequally rated pairs the model orders the other way round,
// counting model ties as half an error. Throws ValidationError for unknown
// ids or when no comparable pair exists.
OrderingErrorReport OrderingError(const UtilityModel& model,
                                  const Catalog& catalog,
                                  const RatedPairs& ratings);

// Same metric over precomputed utilities, parallel to `ratings.ratings`.
OrderingErrorReport OrderingError(const std::vector<double>& utilities,
                                  const RatedPairs& ratings);

}  // namespace ordutil

#endif  // ORDUTIL_UTILITY_H_
