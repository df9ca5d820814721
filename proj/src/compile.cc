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


#include "ordutil/compile.h"

#include "json.hpp"
#include "ordutil/errors.h"

namespace ordutil {

void ConstraintSet::Add(Constraint c) {
  schema_.Validate(c.lhs);
  schema_.Validate(c.rhs);
  if (per_statement_.empty()) per_statement_.push_back(0);
  ++per_statement_.back();
  constraints_.push_back(std::move(c));
}

namespace {

std::string Describe(const Statement& statement, std::size_t index) {
  std::string out = "statement " + std::to_string(index + 1);
  if (statement.line > 0) out += " (line " + std::to_string(statement.line) + ")";
  return out;
}

}  // namespace

std::size_t CompileStatement(const Statement& statement, std::size_t index,
                             const Schema& schema, std::size_t model_cap,
                             ConstraintSet& out) {
  out.BeginStatement();
  try {
    if (!statement.is_dyadic()) {
      const auto& m = statement.monadic();
      const auto models = EnumerateModels(m.formula, schema, model_cap);
      for (const auto& model : models) {
        if (m.polarity == Polarity::kGood) {
          out.Add({model, {}, 1.0, index});
        } else {
          out.Add({{}, model, 1.0, index});
        }
      }
      return models.size();
    }

    const auto& d = statement.dyadic();
    const auto lhs = EnumerateModels(d.lhs, schema, model_cap);
    const auto rhs = EnumerateModels(d.rhs, schema, model_cap);
    if (!lhs.empty() && rhs.size() > model_cap / lhs.size()) {
      throw CapExceededError(
          Describe(statement, index) + " compiles to " +
          std::to_string(lhs.size()) + " x " + std::to_string(rhs.size()) +
          " model pairs, above the cap of " + std::to_string(model_cap));
    }
    std::size_t added = 0;
    for (const auto& m : lhs) {
      for (const auto& m2 : rhs) {
        switch (d.relation) {
          case Relation::kStrict:
            if (m == m2) {
              throw ValidationError(Describe(statement, index) +
                                    " is self-contradictory: model " +
                                    schema.Format(m) + " appears on both sides");
            }
            out.Add({m, m2, 1.0, index});
            ++added;
            break;
          case Relation::kWeak:
            out.Add({m, m2, 0.0, index});
            ++added;
            break;
          case Relation::kEquiv:
            out.Add({m, m2, 0.0, index});
            out.Add({m2, m, 0.0, index});
            added += 2;
            break;
        }
      }
    }
    return added;
  } catch (const CapExceededError& e) {
    const std::string what = e.what();
    if (what.rfind("statement", 0) == 0) throw;
    throw CapExceededError(Describe(statement, index) + ": " + what);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind("statement", 0) == 0) throw;
    throw ValidationError(Describe(statement, index) + ": " + what);
  }
}

ConstraintSet CompileExpression(const PreferenceExpression& expression,
                                const Schema& schema, std::size_t model_cap) {
  ConstraintSet out(schema);
  for (std::size_t i = 0; i < expression.statements.size(); ++i) {
    CompileStatement(expression.statements[i], i, schema, model_cap, out);
  }
  return out;
}

std::string DumpConstraints(const ConstraintSet& constraints,
                            const PreferenceExpression* expression) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : constraints.constraints()) {
    nlohmann::json row = {
        {"lhs", constraints.schema().Format(c.lhs)},
        {"rhs", constraints.schema().Format(c.rhs)},
        {"margin", c.margin},
        {"source", c.source},
    };
    if (expression != nullptr && c.source < expression->statements.size()) {
      row["line"] = expression->statements[c.source].line;
    }
    out.push_back(std::move(row));
  }
  return out.dump(2);
}

}  // namespace ordutil
