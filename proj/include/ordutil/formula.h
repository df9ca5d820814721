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


#ifndef ORDUTIL_FORMULA_H_
#define ORDUTIL_FORMULA_H_

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ordutil/schema.h"

namespace ordutil {

// Propositional formula over atoms `attribute = value`. Atoms carry names;
// they are resolved against a schema only when models are enumerated.
// Immutable, cheap to copy (shared structure).
class Formula {
 public:
  enum class Kind { kAtom, kNot, kAnd, kOr };

  static Formula Atom(std::string attribute, std::string value);
  static Formula Not(Formula operand);
  // And/Or with a single child collapse to the child.
  static Formula And(std::vector<Formula> children);
  static Formula Or(std::vector<Formula> children);

  Kind kind() const;
  const std::string& attribute() const;  // kAtom only
  const std::string& value() const;      // kAtom only
  const std::vector<Formula>& children() const;

  bool operator==(const Formula& other) const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

enum class Relation { kStrict, kWeak, kEquiv };
enum class Polarity { kGood, kBad };

struct DyadicStatement {
  Formula lhs;
  Relation relation;
  Formula rhs;
  bool operator==(const DyadicStatement&) const = default;
};

struct MonadicStatement {
  Formula formula;
  Polarity polarity;
  bool operator==(const MonadicStatement&) const = default;
};

struct Statement {
  std::variant<DyadicStatement, MonadicStatement> body;
  std::size_t line = 0;  // 1-based source line, 0 when built in code

  bool is_dyadic() const {
    return std::holds_alternative<DyadicStatement>(body);
  }
  const DyadicStatement& dyadic() const {
    return std::get<DyadicStatement>(body);
  }
  const MonadicStatement& monadic() const {
    return std::get<MonadicStatement>(body);
  }
};

struct PreferenceExpression {
  std::vector<Statement> statements;
};

// Parses the statement language, one statement per line:
//
//   prefer F over G            strict
//   weakly_prefer F over G     weak
//   indifferent F, G           equivalence
//   good: F  /  bad: F         monadic
//
// Formulas use `or`, `and`, `not`, parentheses and atoms `NAME=VALUE`,
// `NAME` (NAME=true) or `!NAME` (NAME=false). Lines starting with '#' and
// blank lines are skipped. Throws ParseError.
PreferenceExpression ParseExpression(std::string_view text);
Statement ParseStatement(std::string_view line);
Formula ParseFormula(std::string_view text);

// Canonical text; ParseFormula(ToString(f)) == f.
std::string ToString(const Formula& f);
std::string ToString(const Statement& s);
std::string ToString(const PreferenceExpression& e);

// Sorted indices of the attributes mentioned in `f`. Throws ValidationError
// for unknown attributes.
std::vector<int> MentionedAttributes(const Formula& f, const Schema& schema);

// All models of `f` over exactly its mentioned attributes, in lexicographic
// (attribute, value) order. Throws ValidationError for atoms outside the
// schema and CapExceededError once more than `cap` models exist.
std::vector<PartialAssignment> EnumerateModels(const Formula& f,
                                               const Schema& schema,
                                               std::size_t cap);

// Truth value of `f` under an assignment binding every mentioned attribute.
bool Evaluate(const Formula& f, const Schema& schema,
              const PartialAssignment& assignment);

}  // namespace ordutil

#endif  // ORDUTIL_FORMULA_H_
