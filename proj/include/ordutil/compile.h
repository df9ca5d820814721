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


#ifndef ORDUTIL_COMPILE_H_
#define ORDUTIL_COMPILE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "ordutil/formula.h"
#include "ordutil/schema.h"

namespace ordutil {

inline constexpr std::size_t kDefaultModelCap = 4096;

// One linear constraint U(lhs) - U(rhs) >= margin over the monomial feature
// space. An empty side stands for the zero reference point.
struct Constraint {
  PartialAssignment lhs;
  PartialAssignment rhs;
  double margin = 1.0;
  std::size_t source = 0;  // index of the originating statement
};

class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const { return schema_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  const Constraint& operator[](std::size_t i) const { return constraints_[i]; }

  // Constraints contributed by each statement, in statement order.
  const std::vector<std::size_t>& per_statement() const { return per_statement_; }

  // Validates both sides against the schema.
  void Add(Constraint c);
  // Starts the bookkeeping for the next statement.
  void BeginStatement() { per_statement_.push_back(0); }

 private:
  Schema schema_;
  std::vector<Constraint> constraints_;
  std::vector<std::size_t> per_statement_;
};

// Compiles every statement into constraints over pairs of models:
//   prefer F over G        (m, m', 1) for m in M(F), m' in M(G)
//   weakly_prefer F over G (m, m', 0)
//   indifferent F, G       (m, m', 0) and (m', m, 0)
//   good: F                (m, {}, 1)
//   bad: F                 ({}, m, 1)
// Throws CapExceededError when |M(F)|*|M(G)| exceeds `model_cap` and
// ValidationError when a strict statement shares a model between its sides.
ConstraintSet CompileExpression(const PreferenceExpression& expression,
                                const Schema& schema,
                                std::size_t model_cap = kDefaultModelCap);

// Number of constraints one statement compiles to.
std::size_t CompileStatement(const Statement& statement, std::size_t index,
                             const Schema& schema, std::size_t model_cap,
                             ConstraintSet& out);

// Structured debug dump (JSON array of constraints).
std::string DumpConstraints(const ConstraintSet& constraints,
                            const PreferenceExpression* expression = nullptr);

}  // namespace ordutil

#endif  // ORDUTIL_COMPILE_H_
