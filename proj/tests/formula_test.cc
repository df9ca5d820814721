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


#include "ordutil/formula.h"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "ordutil/errors.h"
#include "test_util.h"

namespace ordutil {
namespace {

using testing::BooleanSchema;

TEST(ParseExpression, StrictDisjunctionOverNegation) {
  const auto e = ParseExpression("prefer (X1 or X2) over (not X3)");
  ASSERT_EQ(e.statements.size(), 1u);
  const auto& s = e.statements[0];
  ASSERT_TRUE(s.is_dyadic());
  EXPECT_EQ(s.dyadic().relation, Relation::kStrict);
  EXPECT_EQ(s.dyadic().lhs, Formula::Or({Formula::Atom("X1", "true"),
                                         Formula::Atom("X2", "true")}));
  EXPECT_EQ(s.dyadic().rhs, Formula::Not(Formula::Atom("X3", "true")));
}

TEST(ParseExpression, MonadicGoodConjunction) {
  const auto e = ParseExpression("good: decade=90s and genre_art=true");
  ASSERT_EQ(e.statements.size(), 1u);
  const auto& m = e.statements[0].monadic();
  EXPECT_EQ(m.polarity, Polarity::kGood);
  EXPECT_EQ(m.formula, Formula::And({Formula::Atom("decade", "90s"),
                                     Formula::Atom("genre_art", "true")}));
}

TEST(ParseExpression, IndifferentIdenticalSides) {
  const auto e = ParseExpression("indifferent A, A");
  const auto& d = e.statements[0].dyadic();
  EXPECT_EQ(d.relation, Relation::kEquiv);
  EXPECT_EQ(d.lhs, d.rhs);
}

TEST(ParseExpression, WeakBadAndBangSugar) {
  const auto e = ParseExpression(
      "weakly_prefer !X1 over X2=false\n\n# comment\nbad: not (X1 and X2)\n");
  ASSERT_EQ(e.statements.size(), 2u);
  EXPECT_EQ(e.statements[0].dyadic().relation, Relation::kWeak);
  EXPECT_EQ(e.statements[0].dyadic().lhs, Formula::Atom("X1", "false"));
  EXPECT_EQ(e.statements[0].line, 1u);
  EXPECT_EQ(e.statements[1].monadic().polarity, Polarity::kBad);
  EXPECT_EQ(e.statements[1].line, 4u);
}

TEST(ParseExpression, AndBindsTighterThanOr) {
  EXPECT_EQ(ParseFormula("a or b and c"),
            Formula::Or({Formula::Atom("a", "true"),
                         Formula::And({Formula::Atom("b", "true"),
                                       Formula::Atom("c", "true")})}));
}

TEST(ParseExpression, SyntaxErrorCarriesLineAndColumn) {
  try {
    ParseExpression("prefer X1 over X2\nprefer (X1 or over X2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 15u);
  }
  EXPECT_THROW(ParseExpression("prefer X1 X2"), ParseError);
  EXPECT_THROW(ParseExpression("good X1"), ParseError);
  EXPECT_THROW(ParseExpression("prefer X1 over X2 extra"), ParseError);
  EXPECT_THROW(ParseExpression("prefer X1 over X2 @"), ParseError);
}

TEST(ParseExpression, UnknownRelationKeyword) {
  try {
    ParseExpression("adore X1 over X2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown relation keyword 'adore'"),
              std::string::npos);
    EXPECT_EQ(e.column(), 1u);
  }
}

std::set<PartialAssignment> AsSet(const std::vector<PartialAssignment>& v) {
  return {v.begin(), v.end()};
}

TEST(EnumerateModels, DisjunctionHasThreeModels) {
  const Schema schema = BooleanSchema(3);
  const auto models = EnumerateModels(ParseFormula("X1 or X2"), schema, 100);
  const std::vector<PartialAssignment> expected = {
      schema.MakeAssignment({{"X1", "true"}, {"X2", "true"}}),
      schema.MakeAssignment({{"X1", "true"}, {"X2", "false"}}),
      schema.MakeAssignment({{"X1", "false"}, {"X2", "true"}}),
  };
  // Lexicographic order with "true" first reproduces the textbook order.
  EXPECT_EQ(models, expected);
}

TEST(EnumerateModels, NegationAndContradiction) {
  const Schema schema = BooleanSchema(3);
  EXPECT_EQ(EnumerateModels(ParseFormula("not X3"), schema, 100),
            std::vector<PartialAssignment>{schema.MakeAssignment({{"X3", "false"}})});
  EXPECT_TRUE(EnumerateModels(ParseFormula("X1 and not X1"), schema, 100).empty());
}

TEST(EnumerateModels, ErrorsOnUnknownAtomsAndCap) {
  const Schema schema = BooleanSchema(3);
  EXPECT_THROW(EnumerateModels(ParseFormula("X9"), schema, 10), ValidationError);
  EXPECT_THROW(EnumerateModels(ParseFormula("X1=maybe"), schema, 10),
               ValidationError);
  EXPECT_THROW(EnumerateModels(ParseFormula("X1 or X2 or X3"), schema, 6),
               CapExceededError);
  EXPECT_EQ(EnumerateModels(ParseFormula("X1 or X2 or X3"), schema, 7).size(), 7u);
}

TEST(EnumerateModels, AgreesWithTruthTable) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Schema schema = testing::RandomSchema(rng, n, 3);
    const Formula f = testing::RandomFormula(rng, schema, 3);
    std::set<std::string> names;
    testing::CollectNames(f, names);
    std::size_t space = 1;
    for (const auto& v : names) {
      space *= schema.attribute(*schema.AttributeIndex(v)).domain.size();
    }
    const auto expected = testing::BruteForceModels(f, schema);
    const auto models = EnumerateModels(f, schema, 1 << 20);
    EXPECT_EQ(AsSet(models), expected) << ToString(f);
    EXPECT_EQ(models.size(), AsSet(models).size()) << "duplicates in " << ToString(f);
    EXPECT_TRUE(std::is_sorted(models.begin(), models.end()));
    EXPECT_LE(models.size(), space);
    for (const auto& m : models) EXPECT_EQ(m.size(), names.size());
  }
}

TEST(EnumerateModels, TautologyReachesTheBound) {
  const Schema schema = Schema({{"A", {"a", "b", "c"}}, {"B", {"true", "false"}}});
  const auto models =
      EnumerateModels(ParseFormula("A=a or A=b or A=c or (B and not B)"), schema, 100);
  EXPECT_EQ(models.size(), 6u);
}

TEST(FormulaPrinting, ParsePrintRoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Schema schema = testing::RandomSchema(rng, 4, 3);
    const Formula f = testing::RandomFormula(rng, schema, 4);
    EXPECT_EQ(ParseFormula(ToString(f)), f) << ToString(f);
  }
}

TEST(FormulaPrinting, StatementRoundTrip) {
  const char* text =
      "prefer (X1=true or X2=true) over not X3=true\n"
      "weakly_prefer X1=true over X2=false\n"
      "indifferent (X1=true and X2=true), X3=false\n"
      "good: decade=90s and (g1=true or g2=false)\n"
      "bad: not (X1=true or X2=true)\n";
  const auto e = ParseExpression(text);
  EXPECT_EQ(ToString(e), text);
  const auto again = ParseExpression(ToString(e));
  ASSERT_EQ(again.statements.size(), e.statements.size());
  for (std::size_t i = 0; i < e.statements.size(); ++i) {
    EXPECT_EQ(again.statements[i].body, e.statements[i].body);
  }
}

TEST(Evaluate, RequiresMentionedAttributes) {
  const Schema schema = BooleanSchema(2);
  const Formula f = ParseFormula("X1 and not X2");
  EXPECT_TRUE(Evaluate(f, schema, schema.MakeAssignment({{"X1", "true"}, {"X2", "false"}})));
  EXPECT_FALSE(Evaluate(f, schema, schema.MakeAssignment({{"X1", "false"}})));
  EXPECT_THROW(Evaluate(f, schema, schema.MakeAssignment({{"X1", "true"}})),
               ValidationError);
}

}  // namespace
}  // namespace ordutil
