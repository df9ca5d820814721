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

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

#include "ordutil/errors.h"

namespace ordutil {

struct Formula::Node {
  Kind kind;
  std::string attribute;
  std::string value;
  std::vector<Formula> children;
};

Formula Formula::Atom(std::string attribute, std::string value) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::kAtom, std::move(attribute), std::move(value), {}}));
}

Formula Formula::Not(Formula operand) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::kNot, {}, {}, {std::move(operand)}}));
}

Formula Formula::And(std::vector<Formula> children) {
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(
      Node{Kind::kAnd, {}, {}, std::move(children)}));
}

Formula Formula::Or(std::vector<Formula> children) {
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(
      Node{Kind::kOr, {}, {}, std::move(children)}));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::attribute() const { return node_->attribute; }
const std::string& Formula::value() const { return node_->value; }
const std::vector<Formula>& Formula::children() const {
  return node_->children;
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  return node_->kind == other.node_->kind &&
         node_->attribute == other.node_->attribute &&
         node_->value == other.node_->value &&
         node_->children == other.node_->children;
}

namespace {

enum class TokenKind { kWord, kLParen, kRParen, kBang, kEquals, kComma, kColon, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t column;  // 1-based
};

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.';
}

bool IsKeyword(std::string_view word) {
  return word == "and" || word == "or" || word == "not" || word == "over" ||
         word == "prefer" || word == "weakly_prefer" || word == "indifferent" ||
         word == "good" || word == "bad";
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t line) : line_(line) {
    Tokenize(text);
  }

  Statement ParseStatementLine() {
    const Token& head = Peek();
    if (head.kind != TokenKind::kWord) Fail("expected a statement keyword", head);
    std::optional<Statement> statement;
    if (head.text == "prefer" || head.text == "weakly_prefer") {
      const Relation relation =
          head.text == "prefer" ? Relation::kStrict : Relation::kWeak;
      Advance();
      Formula lhs = ParseForm();
      ExpectWord("over");
      Formula rhs = ParseForm();
      statement.emplace(Statement{
          DyadicStatement{std::move(lhs), relation, std::move(rhs)}, line_});
    } else if (head.text == "indifferent") {
      Advance();
      Formula lhs = ParseForm();
      Expect(TokenKind::kComma, "','");
      Formula rhs = ParseForm();
      statement.emplace(Statement{
          DyadicStatement{std::move(lhs), Relation::kEquiv, std::move(rhs)},
          line_});
    } else if (head.text == "good" || head.text == "bad") {
      const Polarity polarity =
          head.text == "good" ? Polarity::kGood : Polarity::kBad;
      Advance();
      Expect(TokenKind::kColon, "':'");
      statement.emplace(Statement{MonadicStatement{ParseForm(), polarity}, line_});
    } else {
      Fail("unknown relation keyword '" + head.text + "'", head);
    }
    ExpectEnd();
    return *std::move(statement);
  }

  Formula ParseWholeFormula() {
    Formula f = ParseForm();
    ExpectEnd();
    return f;
  }

 private:
  void Tokenize(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      const std::size_t column = i + 1;
      switch (c) {
        case '(': tokens_.push_back({TokenKind::kLParen, "(", column}); ++i; continue;
        case ')': tokens_.push_back({TokenKind::kRParen, ")", column}); ++i; continue;
        case '!': tokens_.push_back({TokenKind::kBang, "!", column}); ++i; continue;
        case '=': tokens_.push_back({TokenKind::kEquals, "=", column}); ++i; continue;
        case ',': tokens_.push_back({TokenKind::kComma, ",", column}); ++i; continue;
        case ':': tokens_.push_back({TokenKind::kColon, ":", column}); ++i; continue;
        default: break;
      }
      if (!IsWordChar(c)) {
        throw ParseError(std::string("unexpected character '") + c + "'",
                         line_, column);
      }
      std::size_t j = i;
      while (j < text.size() && IsWordChar(text[j])) ++j;
      tokens_.push_back({TokenKind::kWord, std::string(text.substr(i, j - i)), column});
      i = j;
    }
    tokens_.push_back({TokenKind::kEnd, "", text.size() + 1});
  }

  const Token& Peek() const { return tokens_[pos_]; }
  const Token& Advance() { return tokens_[pos_++]; }

  bool PeekWord(std::string_view word) const {
    return Peek().kind == TokenKind::kWord && Peek().text == word;
  }

  [[noreturn]] void Fail(const std::string& message, const Token& at) const {
    throw ParseError(message, line_, at.column);
  }

  void Expect(TokenKind kind, const std::string& what) {
    if (Peek().kind != kind) Fail("expected " + what, Peek());
    Advance();
  }

  void ExpectWord(std::string_view word) {
    if (!PeekWord(word)) Fail("expected '" + std::string(word) + "'", Peek());
    Advance();
  }

  void ExpectEnd() {
    if (Peek().kind != TokenKind::kEnd) {
      Fail("unexpected '" + Peek().text + "'", Peek());
    }
  }

  Formula ParseForm() {
    std::vector<Formula> disjuncts{ParseDisjunct()};
    while (PeekWord("or")) {
      Advance();
      disjuncts.push_back(ParseDisjunct());
    }
    return Formula::Or(std::move(disjuncts));
  }

  Formula ParseDisjunct() {
    std::vector<Formula> conjuncts{ParseConjunct()};
    while (PeekWord("and")) {
      Advance();
      conjuncts.push_back(ParseConjunct());
    }
    return Formula::And(std::move(conjuncts));
  }

  Formula ParseConjunct() {
    if (PeekWord("not")) {
      Advance();
      return Formula::Not(ParseConjunct());
    }
    if (Peek().kind == TokenKind::kLParen) {
      Advance();
      Formula inner = ParseForm();
      Expect(TokenKind::kRParen, "')'");
      return inner;
    }
    return ParseAtom();
  }

  std::string ExpectName() {
    const Token& t = Peek();
    if (t.kind != TokenKind::kWord) Fail("expected an attribute name", t);
    if (IsKeyword(t.text)) Fail("unexpected keyword '" + t.text + "'", t);
    Advance();
    return t.text;
  }

  Formula ParseAtom() {
    if (Peek().kind == TokenKind::kBang) {
      Advance();
      return Formula::Atom(ExpectName(), std::string(kFalseValue));
    }
    std::string name = ExpectName();
    if (Peek().kind == TokenKind::kEquals) {
      Advance();
      const Token& value = Peek();
      if (value.kind != TokenKind::kWord) Fail("expected a value", value);
      Advance();
      return Formula::Atom(std::move(name), value.text);
    }
    return Formula::Atom(std::move(name), std::string(kTrueValue));
  }

  std::size_t line_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool IsBlankOrComment(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#';
}

void PrintFormula(const Formula& f, std::string& out) {
  auto print_child = [&out](const Formula& child) {
    const bool compound = child.kind() == Formula::Kind::kAnd ||
                          child.kind() == Formula::Kind::kOr;
    if (compound) out += '(';
    PrintFormula(child, out);
    if (compound) out += ')';
  };
  switch (f.kind()) {
    case Formula::Kind::kAtom:
      out += f.attribute();
      out += '=';
      out += f.value();
      return;
    case Formula::Kind::kNot:
      out += "not ";
      print_child(f.children().front());
      return;
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      const char* sep = f.kind() == Formula::Kind::kAnd ? " and " : " or ";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i > 0) out += sep;
        print_child(f.children()[i]);
      }
      return;
    }
  }
}

// Formula with atoms resolved to schema indices.
struct ResolvedNode {
  Formula::Kind kind;
  Binding atom;
  std::vector<ResolvedNode> children;
};

ResolvedNode Resolve(const Formula& f, const Schema& schema) {
  ResolvedNode node{f.kind(), {}, {}};
  if (f.kind() == Formula::Kind::kAtom) {
    auto attr = schema.AttributeIndex(f.attribute());
    if (!attr) throw ValidationError("unknown attribute '" + f.attribute() + "'");
    auto value = schema.ValueIndex(*attr, f.value());
    if (!value) {
      throw ValidationError("value '" + f.value() +
                            "' not in domain of attribute '" + f.attribute() +
                            "'");
    }
    node.atom = {*attr, *value};
    return node;
  }
  node.children.reserve(f.children().size());
  for (const Formula& child : f.children()) {
    node.children.push_back(Resolve(child, schema));
  }
  return node;
}

void CollectAttributes(const ResolvedNode& node, std::vector<int>& out) {
  if (node.kind == Formula::Kind::kAtom) {
    out.push_back(node.atom.attribute);
    return;
  }
  for (const auto& child : node.children) CollectAttributes(child, out);
}

// Three-valued evaluation under a partial assignment.
enum class Truth { kFalse, kTrue, kUnknown };

Truth Eval(const ResolvedNode& node, const PartialAssignment& p) {
  switch (node.kind) {
    case Formula::Kind::kAtom: {
      auto v = p.ValueOf(node.atom.attribute);
      if (!v) return Truth::kUnknown;
      return *v == node.atom.value ? Truth::kTrue : Truth::kFalse;
    }
    case Formula::Kind::kNot: {
      const Truth t = Eval(node.children.front(), p);
      if (t == Truth::kUnknown) return t;
      return t == Truth::kTrue ? Truth::kFalse : Truth::kTrue;
    }
    case Formula::Kind::kAnd: {
      bool unknown = false;
      for (const auto& child : node.children) {
        const Truth t = Eval(child, p);
        if (t == Truth::kFalse) return Truth::kFalse;
        if (t == Truth::kUnknown) unknown = true;
      }
      return unknown ? Truth::kUnknown : Truth::kTrue;
    }
    case Formula::Kind::kOr: {
      bool unknown = false;
      for (const auto& child : node.children) {
        const Truth t = Eval(child, p);
        if (t == Truth::kTrue) return Truth::kTrue;
        if (t == Truth::kUnknown) unknown = true;
      }
      return unknown ? Truth::kUnknown : Truth::kFalse;
    }
  }
  return Truth::kUnknown;
}

class ModelEnumerator {
 public:
  ModelEnumerator(const ResolvedNode& root, const Schema& schema,
                  std::vector<int> vars, std::size_t cap)
      : root_(root), schema_(schema), vars_(std::move(vars)), cap_(cap) {}

  std::vector<PartialAssignment> Run() {
    PartialAssignment current;
    Recurse(0, current);
    return std::move(models_);
  }

 private:
  void Recurse(std::size_t depth, const PartialAssignment& current) {
    const Truth t = Eval(root_, current);
    if (t == Truth::kFalse) return;
    if (depth == vars_.size()) {
      if (models_.size() == cap_) {
        throw CapExceededError("formula has more than " + std::to_string(cap_) +
                               " models");
      }
      models_.push_back(current);
      return;
    }
    const int attr = vars_[depth];
    const int domain = static_cast<int>(schema_.attribute(attr).domain.size());
    for (int v = 0; v < domain; ++v) {
      PartialAssignment next = current;
      next.Bind(attr, v);
      Recurse(depth + 1, next);
    }
  }

  const ResolvedNode& root_;
  const Schema& schema_;
  std::vector<int> vars_;
  std::size_t cap_;
  std::vector<PartialAssignment> models_;
};

}  // namespace

Statement ParseStatement(std::string_view line) {
  return Parser(line, 1).ParseStatementLine();
}

Formula ParseFormula(std::string_view text) {
  return Parser(text, 1).ParseWholeFormula();
}

PreferenceExpression ParseExpression(std::string_view text) {
  PreferenceExpression expression;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    if (!IsBlankOrComment(line)) {
      expression.statements.push_back(Parser(line, line_no).ParseStatementLine());
    }
    start = end + 1;
  }
  return expression;
}

std::string ToString(const Formula& f) {
  std::string out;
  PrintFormula(f, out);
  return out;
}

std::string ToString(const Statement& s) {
  if (s.is_dyadic()) {
    const auto& d = s.dyadic();
    auto side = [](const Formula& f) {
      const bool compound =
          f.kind() == Formula::Kind::kAnd || f.kind() == Formula::Kind::kOr;
      return compound ? "(" + ToString(f) + ")" : ToString(f);
    };
    const std::string lhs = side(d.lhs);
    const std::string rhs = side(d.rhs);
    switch (d.relation) {
      case Relation::kStrict: return "prefer " + lhs + " over " + rhs;
      case Relation::kWeak: return "weakly_prefer " + lhs + " over " + rhs;
      case Relation::kEquiv: return "indifferent " + lhs + ", " + rhs;
    }
  }
  const auto& m = s.monadic();
  return (m.polarity == Polarity::kGood ? "good: " : "bad: ") + ToString(m.formula);
}

std::string ToString(const PreferenceExpression& e) {
  std::string out;
  for (const auto& s : e.statements) {
    out += ToString(s);
    out += '\n';
  }
  return out;
}

std::vector<int> MentionedAttributes(const Formula& f, const Schema& schema) {
  std::vector<int> vars;
  CollectAttributes(Resolve(f, schema), vars);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

std::vector<PartialAssignment> EnumerateModels(const Formula& f,
                                               const Schema& schema,
                                               std::size_t cap) {
  const ResolvedNode root = Resolve(f, schema);
  std::vector<int> vars;
  CollectAttributes(root, vars);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return ModelEnumerator(root, schema, std::move(vars), cap).Run();
}

bool Evaluate(const Formula& f, const Schema& schema,
              const PartialAssignment& assignment) {
  const Truth t = Eval(Resolve(f, schema), assignment);
  if (t == Truth::kUnknown) {
    throw ValidationError("assignment leaves formula '" + ToString(f) +
                          "' undetermined");
  }
  return t == Truth::kTrue;
}

}  // namespace ordutil
