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


#include "ordutil/schema.h"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ordutil/errors.h"

namespace ordutil {

PartialAssignment PartialAssignment::FromBindings(std::vector<Binding> bindings) {
  std::sort(bindings.begin(), bindings.end());
  for (std::size_t i = 1; i < bindings.size(); ++i) {
    if (bindings[i].attribute == bindings[i - 1].attribute) {
      throw ValidationError("attribute index " +
                            std::to_string(bindings[i].attribute) +
                            " bound more than once");
    }
  }
  PartialAssignment p;
  p.bindings_ = std::move(bindings);
  return p;
}

std::optional<int> PartialAssignment::ValueOf(int attribute) const {
  auto it = std::lower_bound(
      bindings_.begin(), bindings_.end(), attribute,
      [](const Binding& b, int a) { return b.attribute < a; });
  if (it == bindings_.end() || it->attribute != attribute) return std::nullopt;
  return it->value;
}

void PartialAssignment::Bind(int attribute, int value) {
  auto it = std::lower_bound(
      bindings_.begin(), bindings_.end(), attribute,
      [](const Binding& b, int a) { return b.attribute < a; });
  if (it != bindings_.end() && it->attribute == attribute) {
    if (it->value != value) {
      throw ValidationError("attribute index " + std::to_string(attribute) +
                            " already bound to a different value");
    }
    return;
  }
  bindings_.insert(it, Binding{attribute, value});
}

bool PartialAssignment::Contains(const PartialAssignment& other) const {
  return std::includes(bindings_.begin(), bindings_.end(),
                       other.bindings_.begin(), other.bindings_.end());
}

int AgreementCount(const PartialAssignment& p, const PartialAssignment& q) {
  auto a = p.bindings();
  auto b = q.bindings();
  std::size_t i = 0;
  std::size_t j = 0;
  int count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].attribute < b[j].attribute) {
      ++i;
    } else if (b[j].attribute < a[i].attribute) {
      ++j;
    } else {
      if (a[i].value == b[j].value) ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

Schema::Schema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  offsets_.reserve(attributes_.size());
  value_index_.resize(attributes_.size());
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const Attribute& attr = attributes_[i];
    if (attr.name.empty()) throw ValidationError("attribute with empty name");
    if (!attribute_index_.emplace(attr.name, static_cast<int>(i)).second) {
      throw ValidationError("duplicate attribute name '" + attr.name + "'");
    }
    if (attr.domain.size() < 2) {
      throw ValidationError("attribute '" + attr.name +
                            "' needs a domain of at least two values");
    }
    for (std::size_t v = 0; v < attr.domain.size(); ++v) {
      if (attr.domain[v].empty()) {
        throw ValidationError("attribute '" + attr.name +
                              "' has an empty value name");
      }
      if (!value_index_[i].emplace(attr.domain[v], static_cast<int>(v)).second) {
        throw ValidationError("duplicate value '" + attr.domain[v] +
                              "' in attribute '" + attr.name + "'");
      }
    }
    offsets_.push_back(indicator_dimension_);
    indicator_dimension_ += attr.domain.size();
  }
}

std::optional<int> Schema::AttributeIndex(std::string_view name) const {
  auto it = attribute_index_.find(std::string(name));
  if (it == attribute_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Schema::ValueIndex(int attribute,
                                      std::string_view value) const {
  const auto& values = value_index_[attribute];
  auto it = values.find(std::string(value));
  if (it == values.end()) return std::nullopt;
  return it->second;
}

bool Schema::IsBoolean(int attribute) const {
  const auto& domain = attributes_[attribute].domain;
  if (domain.size() != 2) return false;
  return (domain[0] == kTrueValue && domain[1] == kFalseValue) ||
         (domain[0] == kFalseValue && domain[1] == kTrueValue);
}

std::uint64_t Schema::MonomialCount() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t product = 1;
  for (const auto& attr : attributes_) {
    const std::uint64_t factor = attr.domain.size() + 1;
    if (product > kMax / factor) return kMax;
    product *= factor;
  }
  return product - 1;
}

void Schema::Validate(const PartialAssignment& p) const {
  for (const Binding& b : p.bindings()) {
    if (b.attribute < 0 || static_cast<std::size_t>(b.attribute) >= size()) {
      throw ValidationError("attribute index " + std::to_string(b.attribute) +
                            " outside schema of " + std::to_string(size()) +
                            " attributes");
    }
    const auto& domain = attributes_[b.attribute].domain;
    if (b.value < 0 || static_cast<std::size_t>(b.value) >= domain.size()) {
      throw ValidationError("value index " + std::to_string(b.value) +
                            " outside domain of attribute '" +
                            attributes_[b.attribute].name + "'");
    }
  }
}

PartialAssignment Schema::MakeAssignment(
    const std::map<std::string, std::string>& named) const {
  std::vector<Binding> bindings;
  bindings.reserve(named.size());
  for (const auto& [name, value] : named) {
    auto attr = AttributeIndex(name);
    if (!attr) throw ValidationError("unknown attribute '" + name + "'");
    auto val = ValueIndex(*attr, value);
    if (!val) {
      throw ValidationError("value '" + value + "' not in domain of '" +
                            name + "'");
    }
    bindings.push_back({*attr, *val});
  }
  return PartialAssignment::FromBindings(std::move(bindings));
}

std::string Schema::Format(const PartialAssignment& p) const {
  if (p.empty()) return "{}";
  std::string out;
  for (const Binding& b : p.bindings()) {
    if (!out.empty()) out += ' ';
    const Attribute& attr = attributes_[b.attribute];
    out += attr.name;
    out += '=';
    out += attr.domain[b.value];
  }
  return out;
}

bool Schema::operator==(const Schema& other) const {
  if (attributes_.size() != other.attributes_.size()) return false;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name != other.attributes_[i].name ||
        attributes_[i].domain != other.attributes_[i].domain) {
      return false;
    }
  }
  return true;
}

Catalog::Catalog(Schema schema, std::vector<Alternative> items)
    : schema_(std::move(schema)), items_(std::move(items)) {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const Alternative& item = items_[i];
    if (!index_.emplace(item.id, i).second) {
      throw ValidationError("duplicate item id '" + item.id + "'");
    }
    schema_.Validate(item.assignment);
    if (item.assignment.size() != schema_.size()) {
      throw ValidationError("item '" + item.id +
                            "' does not bind every attribute");
    }
  }
}

const Alternative* Catalog::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return nullptr;
  return &items_[it->second];
}

IndicatorVector EncodeIndicator(const PartialAssignment& p,
                                const Schema& schema) {
  schema.Validate(p);
  IndicatorVector v;
  v.active.reserve(p.size());
  for (const Binding& b : p.bindings()) {
    v.active.push_back(schema.IndicatorOffset(b.attribute) + b.value);
  }
  // Offsets grow with the attribute index, so the result is already sorted.
  return v;
}

int Dot(const IndicatorVector& a, const IndicatorVector& b) {
  int count = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.active.size() && j < b.active.size()) {
    if (a.active[i] < b.active[j]) {
      ++i;
    } else if (b.active[j] < a.active[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

Schema LoadSchema(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("schema document is not valid JSON: ") +
                          e.what());
  }
  if (!doc.is_object() || !doc.contains("attributes") ||
      !doc["attributes"].is_array()) {
    throw ValidationError("schema document needs an 'attributes' array");
  }
  std::vector<Attribute> attributes;
  for (const auto& entry : doc["attributes"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string()) {
      throw ValidationError("every attribute needs a string 'name'");
    }
    Attribute attr;
    attr.name = entry["name"].get<std::string>();
    const std::string type = entry.value("type", std::string());
    if (type == "boolean") {
      attr.domain = {std::string(kTrueValue), std::string(kFalseValue)};
    } else if (entry.contains("domain") && entry["domain"].is_array()) {
      for (const auto& value : entry["domain"]) {
        if (!value.is_string()) {
          throw ValidationError("domain of '" + attr.name +
                                "' must list strings");
        }
        attr.domain.push_back(value.get<std::string>());
      }
    } else {
      throw ValidationError("attribute '" + attr.name +
                            "' needs a 'domain' array or type 'boolean'");
    }
    attributes.push_back(std::move(attr));
  }
  return Schema(std::move(attributes));
}

std::string SchemaToJson(const Schema& schema) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& attr : schema.attributes()) {
    attrs.push_back({{"name", attr.name}, {"domain", attr.domain}});
  }
  return nlohmann::json{{"attributes", attrs}}.dump();
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  auto trim = [](std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return std::string();
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
  };
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

Catalog LoadCatalog(std::string_view document, const Schema& schema) {
  std::istringstream in{std::string(document)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = SplitCsvLine(line);
  }
  if (header.empty()) throw ValidationError("catalog document is empty");

  int id_column = -1;
  std::vector<int> column_attribute(header.size(), -1);
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!seen.insert(header[c]).second) {
      throw ValidationError("catalog header repeats column '" + header[c] +
                            "'");
    }
    if (header[c] == "id") {
      id_column = static_cast<int>(c);
      continue;
    }
    auto attr = schema.AttributeIndex(header[c]);
    if (!attr) {
      throw ValidationError("catalog header names unknown attribute '" +
                            header[c] + "'");
    }
    column_attribute[c] = *attr;
  }
  if (id_column < 0) throw ValidationError("catalog header lacks an 'id' column");
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (!seen.count(schema.attribute(static_cast<int>(a)).name)) {
      throw ValidationError("catalog header is missing attribute '" +
                            schema.attribute(static_cast<int>(a)).name + "'");
    }
  }

  std::vector<Alternative> items;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = SplitCsvLine(line);
    const std::string row = "row at line " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw ValidationError(row + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    Alternative item;
    item.id = fields[id_column];
    if (item.id.empty()) throw ValidationError(row + ": empty id");
    if (!ids.insert(item.id).second) {
      throw ValidationError(row + ": duplicate id '" + item.id + "'");
    }
    std::vector<Binding> bindings;
    bindings.reserve(schema.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const int attr = column_attribute[c];
      if (attr < 0) continue;
      auto value = schema.ValueIndex(attr, fields[c]);
      if (!value) {
        throw ValidationError(row + " (id '" + item.id + "'): value '" +
                              fields[c] + "' not in domain of attribute '" +
                              schema.attribute(attr).name + "'");
      }
      bindings.push_back({attr, *value});
    }
    item.assignment = PartialAssignment::FromBindings(std::move(bindings));
    items.push_back(std::move(item));
  }
  return Catalog(schema, std::move(items));
}

}  // namespace ordutil
