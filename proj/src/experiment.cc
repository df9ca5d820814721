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


#include "ordutil/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ordutil/compile.h"
#include "ordutil/errors.h"
#include "ordutil/kernel.h"
#include "ordutil/solver.h"

namespace ordutil {

namespace {

std::string TruthName(TruthKind kind) {
  return kind == TruthKind::kParity ? "parity" : "sparse";
}

std::string StyleName(StatementStyle style) {
  switch (style) {
    case StatementStyle::kInstance: return "instance";
    case StatementStyle::kRule: return "rule";
    case StatementStyle::kMixed: return "mixed";
  }
  return "instance";
}

}  // namespace

int SyntheticSetup::DomainSize(int attribute) const {
  return domain_sizes.empty() ? 2 : domain_sizes[attribute];
}

void SyntheticSetup::Validate() const {
  auto fail = [](const std::string& what) {
    throw ValidationError("synthetic setup: " + what);
  };
  if (attributes < 1) fail("attributes must be positive");
  if (!domain_sizes.empty()) {
    if (static_cast<int>(domain_sizes.size()) != attributes) {
      fail("domain_sizes must list one size per attribute");
    }
    for (int d : domain_sizes) {
      if (d < 2) fail("every domain needs at least 2 values");
    }
  }
  if (order < 1 || order > attributes) fail("order must lie in 1..attributes");
  if (monomials < 1) fail("monomials must be positive");
  if (truth == TruthKind::kParity) {
    if (order != 2) fail("parity truth has order 2");
    if (monomials > attributes * (attributes - 1) / 2) {
      fail("parity truth has at most n(n-1)/2 pairs");
    }
  }
  if (catalog_size < 2) fail("catalog_size must be at least 2");
  if (rating_levels < 2) fail("rating_levels must be at least 2");
  if (budgets.empty()) fail("budgets must not be empty");
  for (int k : budgets) {
    if (k < 0) fail("budgets must be non-negative");
  }
  if (degrees.empty()) fail("degrees must not be empty");
  for (int d : degrees) {
    if (d < 1 || d > attributes) fail("degrees must lie in 1..attributes");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) fail("noise must lie in [0, 1]");
  if (trials < 1) fail("trials must be positive");
  if (!(soft_c > 0.0)) fail("soft_c must be positive");
  if (!(kkt_tolerance > 0.0)) fail("kkt_tolerance must be positive");
  if (max_epochs < 1) fail("max_epochs must be positive");
}

SyntheticSetup ParseSyntheticSetup(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synthetic setup: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("synthetic setup: expected a JSON object");
  SyntheticSetup setup;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "attributes") {
        setup.attributes = value.get<int>();
      } else if (key == "domain_sizes") {
        setup.domain_sizes = value.get<std::vector<int>>();
      } else if (key == "truth") {
        const auto name = value.get<std::string>();
        if (name == "parity") {
          setup.truth = TruthKind::kParity;
        } else if (name == "sparse") {
          setup.truth = TruthKind::kSparse;
        } else {
          throw ValidationError("synthetic setup: truth must be 'parity' or 'sparse'");
        }
      } else if (key == "order") {
        setup.order = value.get<int>();
      } else if (key == "monomials") {
        setup.monomials = value.get<int>();
      } else if (key == "catalog_size") {
        setup.catalog_size = value.get<int>();
      } else if (key == "rating_levels") {
        setup.rating_levels = value.get<int>();
      } else if (key == "budgets") {
        setup.budgets = value.get<std::vector<int>>();
      } else if (key == "degrees") {
        setup.degrees = value.get<std::vector<int>>();
      } else if (key == "statements") {
        const auto name = value.get<std::string>();
        if (name == "instance") {
          setup.style = StatementStyle::kInstance;
        } else if (name == "rule") {
          setup.style = StatementStyle::kRule;
        } else if (name == "mixed") {
          setup.style = StatementStyle::kMixed;
        } else {
          throw ValidationError(
              "synthetic setup: statements must be 'instance', 'rule' or 'mixed'");
        }
      } else if (key == "noise") {
        setup.noise = value.get<double>();
      } else if (key == "trials") {
        setup.trials = value.get<int>();
      } else if (key == "seed") {
        setup.seed = value.get<std::uint64_t>();
      } else if (key == "margin") {
        const auto name = value.get<std::string>();
        if (name != "soft" && name != "hard") {
          throw ValidationError("synthetic setup: margin must be 'soft' or 'hard'");
        }
        setup.soft = name == "soft";
      } else if (key == "soft_c") {
        setup.soft_c = value.get<double>();
      } else if (key == "kkt_tolerance") {
        setup.kkt_tolerance = value.get<double>();
      } else if (key == "max_epochs") {
        setup.max_epochs = value.get<int>();
      } else {
        throw ValidationError("synthetic setup: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synthetic setup: ") + e.what());
  }
  setup.Validate();
  return setup;
}

std::string SyntheticSetupToJson(const SyntheticSetup& setup) {
  nlohmann::json doc = {
      {"attributes", setup.attributes},
      {"domain_sizes", setup.domain_sizes},
      {"truth", TruthName(setup.truth)},
      {"order", setup.order},
      {"monomials", setup.monomials},
      {"catalog_size", setup.catalog_size},
      {"rating_levels", setup.rating_levels},
      {"budgets", setup.budgets},
      {"degrees", setup.degrees},
      {"statements", StyleName(setup.style)},
      {"noise", setup.noise},
      {"trials", setup.trials},
      {"seed", setup.seed},
      {"margin", setup.soft ? "soft" : "hard"},
      {"soft_c", setup.soft_c},
      {"kkt_tolerance", setup.kkt_tolerance},
      {"max_epochs", setup.max_epochs},
  };
  return doc.dump(2);
}

double GroundTruth::Evaluate(const PartialAssignment& x) const {
  double u = 0.0;
  for (const auto& [m, w] : terms) {
    if (AgreementCount(m, x) == static_cast<int>(m.size())) u += w;
  }
  return u;
}

std::uint64_t StableHash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t DeriveSeed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (std::uint64_t part : parts) {
    state ^= part + 0x9e3779b97f4a7c15ull + (state << 6) + (state >> 2);
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    state = z ^ (z >> 31);
  }
  return state;
}

namespace {

Schema SyntheticSchema(const SyntheticSetup& setup) {
  std::vector<Attribute> attributes;
  for (int a = 0; a < setup.attributes; ++a) {
    Attribute attr{"A" + std::to_string(a), {}};
    if (setup.domain_sizes.empty()) {
      attr.domain = {std::string(kTrueValue), std::string(kFalseValue)};
    } else {
      for (int v = 0; v < setup.domain_sizes[a]; ++v) {
        attr.domain.push_back("v" + std::to_string(v));
      }
    }
    attributes.push_back(std::move(attr));
  }
  return Schema(std::move(attributes));
}

GroundTruth SampleTruth(const SyntheticSetup& setup, std::mt19937_64& rng) {
  std::normal_distribution<double> weight(0.0, 1.0);
  std::map<PartialAssignment, double> terms;
  const int n = setup.attributes;
  if (setup.truth == TruthKind::kParity) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(setup.monomials);
    for (const auto& [i, j] : pairs) {
      // [x_i == x_j] is the sum of the monomials binding both to one value.
      const double w = weight(rng);
      const int shared = std::min(setup.DomainSize(i), setup.DomainSize(j));
      for (int v = 0; v < shared; ++v) {
        terms[PartialAssignment::FromBindings({{i, v}, {j, v}})] += w;
      }
    }
  } else {
    std::uniform_int_distribution<int> size(1, setup.order);
    for (int t = 0; t < setup.monomials; ++t) {
      std::vector<int> order(n);
      for (int a = 0; a < n; ++a) order[a] = a;
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<Binding> bindings;
      const int s = size(rng);
      for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<int> value(0, setup.DomainSize(order[i]) - 1);
        bindings.push_back({order[i], value(rng)});
      }
      terms[PartialAssignment::FromBindings(std::move(bindings))] += weight(rng);
    }
  }
  GroundTruth truth;
  for (auto& [m, w] : terms) truth.terms.emplace_back(m, w);
  return truth;
}

Formula ConjunctionOf(const PartialAssignment& p, const Schema& schema) {
  std::vector<Formula> atoms;
  for (const auto& b : p.bindings()) {
    const auto& attr = schema.attribute(b.attribute);
    atoms.push_back(Formula::Atom(attr.name, attr.domain[b.value]));
  }
  return Formula::And(std::move(atoms));
}

// Rule statements in decreasing order of |weight|, standing in for a
// confidence-ordered rule list.
void AppendRules(const SyntheticSetup& setup, const SyntheticData& data,
                 std::size_t budget, std::mt19937_64& rng,
                 PreferenceExpression& out) {
  std::vector<std::pair<PartialAssignment, double>> terms = data.truth.terms;
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  std::bernoulli_distribution flip(setup.noise);
  for (const auto& [m, w] : terms) {
    if (out.statements.size() >= budget) return;
    if (w == 0.0) continue;
    const bool good = (w > 0.0) != flip(rng);
    out.statements.push_back(
        {MonadicStatement{ConjunctionOf(m, data.schema),
                          good ? Polarity::kGood : Polarity::kBad},
         out.statements.size() + 1});
  }
}

void AppendInstances(const SyntheticSetup& setup, const SyntheticData& data,
                     std::size_t budget, std::mt19937_64& rng,
                     PreferenceExpression& out) {
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < data.training.size(); ++i) {
    if (data.training[i]) train.push_back(i);
  }
  if (train.size() < 2) return;
  std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
  std::bernoulli_distribution flip(setup.noise);
  const auto& items = data.catalog.items();
  std::size_t attempts = 100 * budget + 100;
  while (out.statements.size() < budget && attempts-- > 0) {
    std::size_t a = train[pick(rng)];
    std::size_t b = train[pick(rng)];
    const double gap = data.utilities[a] - data.utilities[b];
    if (std::abs(gap) <= 1e-9) continue;
    if ((gap < 0.0) != flip(rng)) std::swap(a, b);
    out.statements.push_back(
        {DyadicStatement{ConjunctionOf(items[a].assignment, data.schema),
                         Relation::kStrict,
                         ConjunctionOf(items[b].assignment, data.schema)},
         out.statements.size() + 1});
  }
}

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticSetup& setup) {
  setup.Validate();
  std::mt19937_64 rng(setup.seed);
  SyntheticData data;
  data.schema = SyntheticSchema(setup);
  data.truth = SampleTruth(setup, rng);

  std::vector<Alternative> items;
  const int width = static_cast<int>(std::to_string(setup.catalog_size - 1).size());
  // Items are distinct whenever the attribute space allows it, so no held-out
  // item duplicates a training item.
  double space = 1.0;
  for (int a = 0; a < setup.attributes; ++a) space *= setup.DomainSize(a);
  const bool distinct = space >= setup.catalog_size;
  std::set<PartialAssignment> seen;
  for (int i = 0; i < setup.catalog_size; ++i) {
    std::vector<Binding> bindings;
    do {
      bindings.clear();
      for (int a = 0; a < setup.attributes; ++a) {
        std::uniform_int_distribution<int> value(0, setup.DomainSize(a) - 1);
        bindings.push_back({a, value(rng)});
      }
    } while (distinct && !seen.insert(PartialAssignment::FromBindings(bindings)).second);
    std::string id = std::to_string(i);
    id = "item" + std::string(width - id.size(), '0') + id;
    items.push_back({std::move(id), PartialAssignment::FromBindings(std::move(bindings))});
  }
  data.catalog = Catalog(data.schema, std::move(items));

  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < data.catalog.size(); ++i) {
    const double u = data.truth.Evaluate(data.catalog.items()[i].assignment);
    data.utilities.push_back(u);
    lo = i == 0 ? u : std::min(lo, u);
    hi = i == 0 ? u : std::max(hi, u);
  }
  // Equal-width bins over the catalog's utility range.
  const int levels = setup.rating_levels;
  data.held_out.levels = levels;
  for (std::size_t i = 0; i < data.catalog.size(); ++i) {
    int r = 1;
    if (hi > lo) {
      const double t = (data.utilities[i] - lo) / (hi - lo);
      r = 1 + std::min(levels - 1, static_cast<int>(std::floor(t * levels)));
    }
    data.ratings.push_back(r);
    const auto& id = data.catalog.items()[i].id;
    const bool train = StableHash(id) % 2 == 0;
    data.training.push_back(train);
    if (!train) data.held_out.ratings.push_back({id, r});
  }

  const std::size_t budget =
      static_cast<std::size_t>(*std::max_element(setup.budgets.begin(), setup.budgets.end()));
  if (setup.style != StatementStyle::kInstance) {
    AppendRules(setup, data, budget, rng, data.statements);
  }
  if (setup.style != StatementStyle::kRule) {
    AppendInstances(setup, data, budget, rng, data.statements);
  }
  return data;
}

std::string ErrorCurve::ToCsv() const {
  std::ostringstream out;
  out << "degree,k,mean_error,std,trials\n";
  out.precision(6);
  out << std::fixed;
  for (const auto& r : rows) {
    out << r.degree << ',' << r.k << ',' << r.mean_error << ',' << r.std_error
        << ',' << r.trials << '\n';
  }
  return out.str();
}

const ErrorCurveRow* ErrorCurve::Find(int degree, int k) const {
  for (const auto& r : rows) {
    if (r.degree == degree && r.k == k) return &r;
  }
  return nullptr;
}

ErrorCurve RunDegreeSweep(const SyntheticSetup& setup, int threads) {
  setup.Validate();
  std::vector<int> budgets = setup.budgets;
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());

  std::vector<SyntheticData> trials;
  for (int t = 0; t < setup.trials; ++t) {
    SyntheticSetup trial_setup = setup;
    trial_setup.seed = DeriveSeed({setup.seed, static_cast<std::uint64_t>(t)});
    trials.push_back(GenerateSynthetic(trial_setup));
  }

  // errors[cell][trial], NaN marking a failed cell.
  const std::size_t degree_count = setup.degrees.size();
  const std::size_t cells = degree_count * budgets.size();
  std::vector<std::vector<double>> errors(cells, std::vector<double>(setup.trials));

  auto run_task = [&](std::size_t task) {
    const std::size_t t = task / degree_count;
    const std::size_t di = task % degree_count;
    const int degree = setup.degrees[di];
    const SyntheticData& data = trials[t];
    const KernelParams params = DegreeParams(degree, setup.attributes);
    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
      const int k = budgets[bi];
      double error = std::nan("");
      try {
        PreferenceExpression prefix;
        const std::size_t take =
            std::min<std::size_t>(static_cast<std::size_t>(k), data.statements.statements.size());
        prefix.statements.assign(data.statements.statements.begin(),
                                 data.statements.statements.begin() + take);
        const ConstraintSet cs = CompileExpression(prefix, data.schema);
        SolverConfig cfg;
        cfg.mode = setup.soft ? MarginMode::kSoft : MarginMode::kHard;
        cfg.soft_c = setup.soft_c;
        cfg.kkt_tolerance = setup.kkt_tolerance;
        cfg.max_epochs = setup.max_epochs;
        cfg.seed = DeriveSeed({setup.seed, static_cast<std::uint64_t>(degree),
                               static_cast<std::uint64_t>(k)});
        const UtilityModel model = SolveDual(cs, params, cfg);
        error = OrderingError(model, data.catalog, data.held_out).error;
      } catch (const Error&) {
        // Recorded as a failed cell; the sweep carries on.
      }
      errors[di * budgets.size() + bi][t] = error;
    }
  };

  const std::size_t tasks = static_cast<std::size_t>(setup.trials) * degree_count;
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, tasks);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t task = next++; task < tasks; task = next++) run_task(task);
    });
  }
  for (auto& th : pool) th.join();

  ErrorCurve curve;
  for (std::size_t di = 0; di < degree_count; ++di) {
    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
      ErrorCurveRow row;
      row.degree = setup.degrees[di];
      row.k = budgets[bi];
      std::vector<double> ok;
      for (double e : errors[di * budgets.size() + bi]) {
        if (std::isnan(e)) {
          ++row.failures;
        } else {
          ok.push_back(e);
        }
      }
      row.trials = static_cast<int>(ok.size());
      if (!ok.empty()) {
        double sum = 0.0;
        for (double e : ok) sum += e;
        row.mean_error = sum / static_cast<double>(ok.size());
        if (ok.size() > 1) {
          double sq = 0.0;
          for (double e : ok) sq += (e - row.mean_error) * (e - row.mean_error);
          row.std_error = std::sqrt(sq / static_cast<double>(ok.size() - 1));
        }
      }
      curve.rows.push_back(row);
    }
  }
  return curve;
}

}  // namespace ordutil
