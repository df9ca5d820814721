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


#ifndef ORDUTIL_SCHEMA_H_
#define ORDUTIL_SCHEMA_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ordutil {

// Value names used for the two-valued shorthand. "true" comes first so that
// the positive literal x precedes its negation in every enumeration.
inline constexpr std::string_view kTrueValue = "true";
inline constexpr std::string_view kFalseValue = "false";

struct Attribute {
  std::string name;
  std::vector<std::string> domain;  // ordered value names, at least two
};

// A single (attribute, value) coordinate, both by index into the schema.
struct Binding {
  int attribute = 0;
  int value = 0;

  auto operator<=>(const Binding&) const = default;
};

// Consistent partial assignment: at most one value per attribute. Bindings
// are kept sorted by attribute index, which makes agreement counting a
// linear merge and gives a canonical lexicographic order.
class PartialAssignment {
 public:
  PartialAssignment() = default;

  // Throws ValidationError if an attribute is bound twice.
  static PartialAssignment FromBindings(std::vector<Binding> bindings);

  std::span<const Binding> bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  std::optional<int> ValueOf(int attribute) const;

  // Binds `attribute` to `value`. Throws ValidationError if the attribute is
  // already bound to a different value.
  void Bind(int attribute, int value);

  // True iff every binding of `other` also appears here.
  bool Contains(const PartialAssignment& other) const;

  auto operator<=>(const PartialAssignment&) const = default;

 private:
  std::vector<Binding> bindings_;
};

// Number of attributes bound to the same value in both assignments. This is
// the inner product of their indicator encodings.
int AgreementCount(const PartialAssignment& p, const PartialAssignment& q);

// Finite-domain attribute space. Immutable once constructed.
class Schema {
 public:
  Schema() = default;
  // Throws ValidationError on duplicate names or domains with fewer than two
  // values.
  explicit Schema(std::vector<Attribute> attributes);

  std::size_t size() const { return attributes_.size(); }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(int index) const { return attributes_[index]; }

  std::optional<int> AttributeIndex(std::string_view name) const;
  std::optional<int> ValueIndex(int attribute, std::string_view value) const;

  // Two-valued attribute whose domain is exactly {true, false}.
  bool IsBoolean(int attribute) const;

  // Total number of (attribute, value) coordinates.
  std::size_t IndicatorDimension() const { return indicator_dimension_; }
  std::size_t IndicatorOffset(int attribute) const { return offsets_[attribute]; }

  // Number of non-empty consistent partial assignments, prod(|Dom|+1) - 1,
  // saturated at UINT64_MAX.
  std::uint64_t MonomialCount() const;

  // Throws ValidationError naming the offending attribute.
  void Validate(const PartialAssignment& p) const;

  // Builds an assignment from attribute/value names.
  PartialAssignment MakeAssignment(
      const std::map<std::string, std::string>& named) const;

  // "X1=true X2=false"; "{}" for the empty assignment.
  std::string Format(const PartialAssignment& p) const;

  bool operator==(const Schema& other) const;

 private:
  std::vector<Attribute> attributes_;
  std::vector<std::size_t> offsets_;
  std::size_t indicator_dimension_ = 0;
  std::unordered_map<std::string, int> attribute_index_;
  std::vector<std::unordered_map<std::string, int>> value_index_;
};

// Complete assignment with a caller-supplied id.
struct Alternative {
  std::string id;
  PartialAssignment assignment;
};

class Catalog {
 public:
  Catalog() = default;
  // Throws ValidationError on duplicate ids or incomplete/invalid items.
  Catalog(Schema schema, std::vector<Alternative> items);

  const Schema& schema() const { return schema_; }
  const std::vector<Alternative>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  // nullptr when absent.
  const Alternative* Find(std::string_view id) const;

 private:
  Schema schema_;
  std::vector<Alternative> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Sparse per-value indicator vector; every active coordinate has weight 1.
struct IndicatorVector {
  std::vector<std::size_t> active;  // sorted coordinate indices
};

IndicatorVector EncodeIndicator(const PartialAssignment& p,
                                const Schema& schema);
int Dot(const IndicatorVector& a, const IndicatorVector& b);

// Schema document (JSON):
//   {"attributes": [{"name": "X1", "domain": ["a", "b"]},
//                   {"name": "X2", "type": "boolean"}]}
// "type": "boolean" is shorthand for the domain ["true", "false"].
Schema LoadSchema(std::string_view document);
std::string SchemaToJson(const Schema& schema);

// Catalog document: comma-separated rows with a header naming an `id` column
// and every attribute. Values must match domain names byte-exactly. Blank
// lines are ignored.
Catalog LoadCatalog(std::string_view document, const Schema& schema);

// Splits one CSV line on commas, trimming surrounding whitespace.
std::vector<std::string> SplitCsvLine(std::string_view line);

}  // namespace ordutil

#endif  // ORDUTIL_SCHEMA_H_
