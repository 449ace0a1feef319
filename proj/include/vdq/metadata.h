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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vdq/media.h"

namespace vdq {

using MetadataValue = std::variant<std::string, std::int64_t, double>;
using PropertyMap = std::map<std::string, MetadataValue>;

class TypeMismatchError : public Error {
 public:
  using Error::Error;
};

enum class Comparator { kEq, kNe, kLt, kLe, kGt, kGe };

// Query-language spelling: "==", "!=", "<", "<=", ">", ">=".
std::string to_string(Comparator cmp);
Comparator comparator_from_string(const std::string& s);

struct Constraint {
  std::string property;
  Comparator comparator = Comparator::kEq;
  MetadataValue value;

  bool operator==(const Constraint&) const = default;
};

// Three-way comparison with integer/float promotion. Throws TypeMismatchError
// when a string is compared against a number.
int compare_values(const MetadataValue& lhs, const MetadataValue& rhs);

bool satisfies(const MetadataValue& stored, Comparator cmp, const MetadataValue& operand);

// A record without the constrained property never matches.
bool satisfies_all(const PropertyMap& properties, const std::vector<Constraint>& constraints);

nlohmann::json to_json(const MetadataValue& v);
// Accepts JSON strings, integers, and floats; anything else throws.
MetadataValue metadata_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PropertyMap& m);
PropertyMap property_map_from_json(const nlohmann::json& j);

std::string describe(const MetadataValue& v);

// Typed lookups on operation options. Integers are accepted where floats are
// expected; floats with an integral value are accepted where integers are.
std::int64_t option_int(const PropertyMap& opts, const std::string& key);
std::int64_t option_int(const PropertyMap& opts, const std::string& key, std::int64_t fallback);
double option_double(const PropertyMap& opts, const std::string& key);
double option_double(const PropertyMap& opts, const std::string& key, double fallback);
std::string option_string(const PropertyMap& opts, const std::string& key);
std::string option_string(const PropertyMap& opts, const std::string& key,
                          const std::string& fallback);

}  // namespace vdq
