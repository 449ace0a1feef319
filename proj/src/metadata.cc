// Copyright 2026 The vdq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vdq/metadata.h"

#include <cmath>

namespace vdq {

std::string to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::kEq: return "==";
    case Comparator::kNe: return "!=";
    case Comparator::kLt: return "<";
    case Comparator::kLe: return "<=";
    case Comparator::kGt: return ">";
    case Comparator::kGe: return ">=";
  }
  return "?";
}

Comparator comparator_from_string(const std::string& s) {
  if (s == "==") return Comparator::kEq;
  if (s == "!=") return Comparator::kNe;
  if (s == "<") return Comparator::kLt;
  if (s == "<=") return Comparator::kLe;
  if (s == ">") return Comparator::kGt;
  if (s == ">=") return Comparator::kGe;
  throw Error("unknown comparator '" + s + "'");
}

namespace {

bool is_number(const MetadataValue& v) { return !std::holds_alternative<std::string>(v); }

double as_double(const MetadataValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

int compare_values(const MetadataValue& lhs, const MetadataValue& rhs) {
  if (is_number(lhs) != is_number(rhs)) {
    throw TypeMismatchError("cannot compare " + describe(lhs) + " with " + describe(rhs));
  }
  if (!is_number(lhs)) return three_way(std::get<std::string>(lhs), std::get<std::string>(rhs));
  const auto* li = std::get_if<std::int64_t>(&lhs);
  const auto* ri = std::get_if<std::int64_t>(&rhs);
  if (li && ri) return three_way(*li, *ri);
  return three_way(as_double(lhs), as_double(rhs));
}

bool satisfies(const MetadataValue& stored, Comparator cmp, const MetadataValue& operand) {
  const int c = compare_values(stored, operand);
  switch (cmp) {
    case Comparator::kEq: return c == 0;
    case Comparator::kNe: return c != 0;
    case Comparator::kLt: return c < 0;
    case Comparator::kLe: return c <= 0;
    case Comparator::kGt: return c > 0;
    case Comparator::kGe: return c >= 0;
  }
  return false;
}

bool satisfies_all(const PropertyMap& properties, const std::vector<Constraint>& constraints) {
  for (const auto& c : constraints) {
    auto it = properties.find(c.property);
    if (it == properties.end()) return false;
    if (!satisfies(it->second, c.comparator, c.value)) return false;
  }
  return true;
}

nlohmann::json to_json(const MetadataValue& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

MetadataValue metadata_from_json(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  throw Error("metadata values must be strings or numbers, got " + j.dump());
}

nlohmann::json to_json(const PropertyMap& m) {
  auto out = nlohmann::json::object();
  for (const auto& [k, v] : m) out[k] = to_json(v);
  return out;
}

PropertyMap property_map_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("expected a JSON object, got " + j.dump());
  PropertyMap out;
  for (const auto& [k, v] : j.items()) {
    try {
      out.emplace(k, metadata_from_json(v));
    } catch (const Error& e) {
      throw Error("property '" + k + "': " + e.what());
    }
  }
  return out;
}

std::string describe(const MetadataValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return "string \"" + *s + "\"";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return "integer " + std::to_string(*i);
  return "float " + std::to_string(std::get<double>(v));
}

namespace {

const MetadataValue& require(const PropertyMap& opts, const std::string& key) {
  auto it = opts.find(key);
  if (it == opts.end()) throw OpError("missing option '" + key + "'");
  return it->second;
}

std::int64_t to_int(const std::string& key, const MetadataValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::isfinite(*d) && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
  }
  throw OpError("option '" + key + "' must be an integer, got " + describe(v));
}

double to_double(const std::string& key, const MetadataValue& v) {
  if (!is_number(v)) throw OpError("option '" + key + "' must be numeric, got " + describe(v));
  return as_double(v);
}

std::string to_str(const std::string& key, const MetadataValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw OpError("option '" + key + "' must be a string, got " + describe(v));
}

}  // namespace

std::int64_t option_int(const PropertyMap& opts, const std::string& key) {
  return to_int(key, require(opts, key));
}

std::int64_t option_int(const PropertyMap& opts, const std::string& key, std::int64_t fallback) {
  auto it = opts.find(key);
  return it == opts.end() ? fallback : to_int(key, it->second);
}

double option_double(const PropertyMap& opts, const std::string& key) {
  return to_double(key, require(opts, key));
}

double option_double(const PropertyMap& opts, const std::string& key, double fallback) {
  auto it = opts.find(key);
  return it == opts.end() ? fallback : to_double(key, it->second);
}

std::string option_string(const PropertyMap& opts, const std::string& key) {
  return to_str(key, require(opts, key));
}

std::string option_string(const PropertyMap& opts, const std::string& key,
                          const std::string& fallback) {
  auto it = opts.find(key);
  return it == opts.end() ? fallback : to_str(key, it->second);
}

}  // namespace vdq
