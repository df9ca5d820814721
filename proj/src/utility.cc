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


#include "ordutil/utility.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "ordutil/errors.h"

namespace ordutil {

double EvaluateUtility(const UtilityModel& model, const PartialAssignment& p) {
  if (p.empty()) return 0.0;
  const auto& cs = model.constraints;
  const Schema& schema = cs.schema();
  double u = 0.0;
  if (model.params.mode == KernelMode::kWeighted) {
    const auto& lambdas = model.params.lambdas;
    auto kern = [&](const PartialAssignment& a) {
      return a.empty() ? 0.0 : KernelFromAgreement(AgreementCount(a, p), lambdas);
    };
    for (std::size_t i = 0; i < model.alphas.size(); ++i) {
      const double a = model.alphas[i];
      if (a == 0.0) continue;
      u += a * (kern(cs[i].lhs) - kern(cs[i].rhs));
    }
    return u;
  }
  for (std::size_t i = 0; i < model.alphas.size(); ++i) {
    const double a = model.alphas[i];
    if (a == 0.0) continue;
    u += a * (FeatureInnerProduct(cs[i].lhs, p, schema, model.params) -
              FeatureInnerProduct(cs[i].rhs, p, schema, model.params));
  }
  return u;
}

bool UtilitiesTie(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kTieTolerance * scale;
}

Ranking RankCatalog(const UtilityModel& model, const Catalog& catalog,
                    std::optional<std::size_t> top_k) {
  if (!(catalog.schema() == model.schema())) {
    throw ValidationError("catalog schema does not match the model schema");
  }
  Ranking ranking;
  ranking.items.reserve(catalog.size());
  for (const auto& item : catalog.items()) {
    ranking.items.push_back({item.id, EvaluateUtility(model, item.assignment), 0});
  }
  // Catalog position of each id, to restore catalog order inside tie groups
  // that rounding noise may have shuffled.
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < catalog.size(); ++i) position[catalog.items()[i].id] = i;
  std::stable_sort(ranking.items.begin(), ranking.items.end(),
                   [](const RankedItem& a, const RankedItem& b) {
                     return a.utility > b.utility;
                   });
  std::size_t group = 0;
  for (std::size_t i = 0; i < ranking.items.size(); ++i) {
    if (i > 0 && !UtilitiesTie(ranking.items[i].utility, ranking.items[i - 1].utility)) ++group;
    ranking.items[i].tie_group = group;
  }
  for (auto first = ranking.items.begin(); first != ranking.items.end();) {
    auto last = std::find_if(first, ranking.items.end(), [&](const RankedItem& r) {
      return r.tie_group != first->tie_group;
    });
    std::sort(first, last, [&](const RankedItem& a, const RankedItem& b) {
      return position[a.id] < position[b.id];
    });
    first = last;
  }
  if (top_k && *top_k < ranking.items.size()) ranking.items.resize(*top_k);
  return ranking;
}

std::string RankingToJson(const Ranking& ranking) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : ranking.items) {
    items.push_back({{"id", item.id},
                     {"utility", item.utility},
                     {"tie_group", item.tie_group}});
  }
  return items.dump();
}

std::vector<RatedPairs::Pair> RatedPairs::ComparablePairs() const {
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    for (std::size_t j = i + 1; j < ratings.size(); ++j) {
      if (ratings[i].value > ratings[j].value) {
        pairs.push_back({i, j});
      } else if (ratings[j].value > ratings[i].value) {
        pairs.push_back({j, i});
      }
    }
  }
  return pairs;
}

RatedPairs LoadRatings(std::string_view document, int levels) {
  RatedPairs out;
  out.levels = levels;
  std::istringstream in{std::string(document)};
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = SplitCsvLine(line);
    if (first && fields.size() == 2 && fields[0] == "id") {
      first = false;
      continue;
    }
    first = false;
    const std::string where = "ratings line " + std::to_string(line_no);
    if (fields.size() != 2) throw ValidationError(where + ": expected id,rating");
    int value = 0;
    try {
      std::size_t used = 0;
      value = std::stoi(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError(where + ": rating '" + fields[1] +
                            "' is not an integer");
    }
    if (value < 1 || value > levels) {
      throw ValidationError(where + ": rating outside 1.." +
                            std::to_string(levels));
    }
    out.ratings.push_back({fields[0], value});
  }
  return out;
}

OrderingErrorReport OrderingError(const std::vector<double>& utilities,
                                  const RatedPairs& ratings) {
  if (utilities.size() != ratings.ratings.size()) {
    throw ValidationError("one utility per rated item expected");
  }
  OrderingErrorReport report;
  for (const auto& pair : ratings.ComparablePairs()) {
    ++report.pairs_total;
    const double better = utilities[pair.better];
    const double worse = utilities[pair.worse];
    if (UtilitiesTie(better, worse)) {
      ++report.pairs_tied_by_model;
    } else if (better < worse) {
      ++report.pairs_disagree;
    }
  }
  if (report.pairs_total == 0) {
    throw ValidationError("no unequally rated pairs to compare");
  }
  report.error = (static_cast<double>(report.pairs_disagree) +
                  0.5 * static_cast<double>(report.pairs_tied_by_model)) /
                 static_cast<double>(report.pairs_total);
  return report;
}

OrderingErrorReport OrderingError(const UtilityModel& model,
                                  const Catalog& catalog,
                                  const RatedPairs& ratings) {
  std::vector<double> utilities;
  utilities.reserve(ratings.ratings.size());
  for (const auto& r : ratings.ratings) {
    const Alternative* item = catalog.Find(r.id);
    if (item == nullptr) {
      throw ValidationError("rated id '" + r.id + "' is not in the catalog");
    }
    utilities.push_back(EvaluateUtility(model, item->assignment));
  }
  return OrderingError(utilities, ratings);
}

}  // namespace ordutil
