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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ordutil/errors.h"
#include "ordutil/kernel.h"
#include "test_util.h"

namespace ordutil {
namespace {

using testing::BooleanSchema;

TEST(CompileExpression, DisjunctionOverNegationGivesThreeConstraints) {
  const Schema schema = BooleanSchema(4);
  const auto cs = CompileExpression(
      ParseExpression("prefer (X1 or X2) over (not X3)"), schema);
  ASSERT_EQ(cs.size(), 3u);
  const auto not_x3 = schema.MakeAssignment({{"X3", "false"}});
  const std::vector<PartialAssignment> lhs = {
      schema.MakeAssignment({{"X1", "true"}, {"X2", "true"}}),
      schema.MakeAssignment({{"X1", "true"}, {"X2", "false"}}),
      schema.MakeAssignment({{"X1", "false"}, {"X2", "true"}}),
  };
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(cs[i].lhs, lhs[i]);
    EXPECT_EQ(cs[i].rhs, not_x3);
    EXPECT_EQ(cs[i].margin, 1.0);
    EXPECT_EQ(cs[i].source, 0u);
  }
}

TEST(CompileExpression, WorkedExampleHasFiveConstraints) {
  const auto cs = CompileExpression(ParseExpression(testing::kWorkedExample),
                                    BooleanSchema(4));
  EXPECT_EQ(cs.size(), 5u);
  EXPECT_EQ(cs.per_statement(), (std::vector<std::size_t>{3, 1, 1}));
}

TEST(CompileExpression, MonadicStatementsCompareAgainstZero) {
  const Schema schema = BooleanSchema(2);
  const auto good = CompileExpression(ParseExpression("good: X1"), schema);
  ASSERT_EQ(good.size(), 1u);
  EXPECT_EQ(good[0].lhs, schema.MakeAssignment({{"X1", "true"}}));
  EXPECT_TRUE(good[0].rhs.empty());
  EXPECT_EQ(good[0].margin, 1.0);

  const auto bad = CompileExpression(ParseExpression("bad: X1 or X2"), schema);
  ASSERT_EQ(bad.size(), 3u);
  for (const auto& c : bad.constraints()) {
    EXPECT_TRUE(c.lhs.empty());
    EXPECT_EQ(c.rhs.size(), 2u);
    EXPECT_EQ(c.margin, 1.0);
  }
}

TEST(CompileExpression, WeakAndEquivalenceMargins) {
  const Schema schema = BooleanSchema(3);
  const auto weak =
      CompileExpression(ParseExpression("weakly_prefer X1 over X2 or X3"), schema);
  ASSERT_EQ(weak.size(), 3u);
  for (const auto& c : weak.constraints()) EXPECT_EQ(c.margin, 0.0);

  const auto equiv = CompileExpression(ParseExpression("indifferent X1, X2"), schema);
  ASSERT_EQ(equiv.size(), 2u);
  EXPECT_EQ(equiv[0].lhs, equiv[1].rhs);
  EXPECT_EQ(equiv[0].rhs, equiv[1].lhs);
  EXPECT_EQ(equiv[0].margin, 0.0);
  EXPECT_EQ(equiv[1].margin, 0.0);

  // Identical sides are legal for indifference.
  EXPECT_EQ(CompileExpression(ParseExpression("indifferent X1, X1"), schema).size(), 2u);
}

TEST(CompileExpression, StrictSelfComparisonIsRejected) {
  const Schema schema = BooleanSchema(2);
  try {
    CompileExpression(ParseExpression("prefer X1\nprefer X1 or X2 over X1 and X2"),
                      schema);
    FAIL();
  } catch (const ParseError&) {
    // first line lacks "over"
  }
  try {
    CompileExpression(ParseExpression("prefer X2 over X1\nprefer X1 or X2 over X1 and X2"),
                      schema);
    FAIL() << "expected ValidationError";
  } catch (const CapExceededError&) {
    FAIL() << "wrong error";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("statement 2 (line 2)"), std::string::npos) << what;
    EXPECT_NE(what.find("self-contradictory"), std::string::npos) << what;
  }
}

TEST(CompileExpression, CapNamesStatementAndProductSize) {
  const Schema schema = BooleanSchema(6);
  try {
    CompileExpression(
        ParseExpression("prefer X1 or X2 or X3 over X4 or X5 or X6"), schema, 48);
    FAIL() << "expected CapExceededError";
  } catch (const CapExceededError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("statement 1"), std::string::npos) << what;
    EXPECT_NE(what.find("7 x 7"), std::string::npos) << what;
  }
  EXPECT_EQ(CompileExpression(ParseExpression("prefer X1 or X2 or X3 over X4 or X5 or X6"),
                              schema, 49)
                .size(),
            49u);
}

TEST(CompileExpression, UnknownAtomIsValidationError) {
  EXPECT_THROW(CompileExpression(ParseExpression("good: X7"), BooleanSchema(2)),
               ValidationError);
}

TEST(CompileExpression, CountMatchesBruteForceModelCounting) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Schema schema = testing::RandomSchema(rng, n, 3);
    PreferenceExpression e;
    std::size_t expected = 0;
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < count; ++s) {
      const Formula f = testing::RandomFormula(rng, schema, 2);
      const Formula g = testing::RandomFormula(rng, schema, 2);
      const std::size_t mf = testing::BruteForceModels(f, schema).size();
      const std::size_t mg = testing::BruteForceModels(g, schema).size();
      switch (rng() % 4) {
        case 0:
          e.statements.push_back({DyadicStatement{f, Relation::kWeak, g}});
          expected += mf * mg;
          break;
        case 1:
          e.statements.push_back({DyadicStatement{f, Relation::kEquiv, g}});
          expected += 2 * mf * mg;
          break;
        case 2:
          e.statements.push_back({MonadicStatement{f, Polarity::kGood}});
          expected += mf;
          break;
        default:
          e.statements.push_back({MonadicStatement{g, Polarity::kBad}});
          expected += mg;
          break;
      }
    }
    const auto first = CompileExpression(e, schema);
    EXPECT_EQ(first.size(), expected);
    // Deterministic.
    const auto second = CompileExpression(e, schema);
    ASSERT_EQ(second.size(), first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      EXPECT_EQ(first[i].lhs, second[i].lhs);
      EXPECT_EQ(first[i].rhs, second[i].rhs);
      EXPECT_EQ(first[i].source, second[i].source);
    }
    for (std::size_t i = 1; i < first.size(); ++i) {
      EXPECT_LE(first[i - 1].source, first[i].source);
    }
  }
}

// Linearizes a constraint through the unweighted explicit map and returns the
// monomial supports of both sides.
std::pair<std::set<std::string>, std::set<std::string>> Supports(
    const Constraint& c, const Schema& schema) {
  const auto params = UnweightedParams(static_cast<int>(schema.size()));
  std::set<std::string> lhs;
  std::set<std::string> rhs;
  for (const auto& [m, w] : ExplicitFeatureMap(c.lhs, schema, params)) {
    EXPECT_EQ(w, 1.0);
    lhs.insert(schema.Format(m));
  }
  for (const auto& [m, w] : ExplicitFeatureMap(c.rhs, schema, params)) {
    EXPECT_EQ(w, 1.0);
    rhs.insert(schema.Format(m));
  }
  return {lhs, rhs};
}

TEST(CompileExpression, LinearizesToMonomialSums) {
  const Schema schema = BooleanSchema(3);
  const auto cs = CompileExpression(
      ParseExpression("prefer (X1 or X2) over (not X3)"), schema);
  ASSERT_EQ(cs.size(), 3u);
  using Set = std::set<std::string>;
  const Set rhs = {"X3=false"};
  EXPECT_EQ(Supports(cs[0], schema),
            std::make_pair(Set{"X1=true", "X2=true", "X1=true X2=true"}, rhs));
  EXPECT_EQ(Supports(cs[1], schema),
            std::make_pair(Set{"X1=true", "X2=false", "X1=true X2=false"}, rhs));
  EXPECT_EQ(Supports(cs[2], schema),
            std::make_pair(Set{"X1=false", "X2=true", "X1=false X2=true"}, rhs));
}

TEST(DumpConstraints, ListsBindingsMarginAndLine) {
  const auto e = ParseExpression("\nprefer X1 over X2");
  const auto cs = CompileExpression(e, BooleanSchema(2));
  const std::string dump = DumpConstraints(cs, &e);
  EXPECT_NE(dump.find("\"lhs\": \"X1=true\""), std::string::npos) << dump;
  EXPECT_NE(dump.find("\"line\": 2"), std::string::npos) << dump;
  EXPECT_NE(dump.find("\"margin\": 1.0"), std::string::npos) << dump;
}

}  // namespace
}  // namespace ordutil
