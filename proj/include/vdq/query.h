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
#include <string>
#include <vector>

#include <json.hpp>

#include "vdq/metadata.h"

namespace vdq {

enum class ExecClass { kNative, kRemote, kUdf };

std::string to_string(ExecClass c);

// One pipeline step. Remote steps carry the worker URL (or a "pool://name"
// alias); UDF steps carry the message-queue port of the external process.
struct OperationSpec {
  std::string type;
  ExecClass exec_class = ExecClass::kNative;
  PropertyMap options;
  std::string endpoint;
  int channel_port = 0;

  static OperationSpec native(std::string type, PropertyMap options = {});
  static OperationSpec remote(std::string type, std::string url, PropertyMap options = {});
  static OperationSpec udf(std::string type, int port, PropertyMap options = {});

  bool is_deferred() const { return exec_class != ExecClass::kNative; }
  bool operator==(const OperationSpec&) const = default;
};

enum class Verb { kAddImage, kAddVideo, kFindImage, kFindVideo };

std::string to_string(Verb v);
bool is_add(Verb v);
MediaKind verb_kind(Verb v);

struct Query {
  Verb verb = Verb::kFindImage;
  PropertyMap properties;               // Add only
  std::vector<Constraint> constraints;  // Find only; conjunction
  std::vector<OperationSpec> operations;
  bool return_blobs = true;             // Find only
  std::uint32_t blob_count = 0;

  bool operator==(const Query&) const = default;
};

// Carries every violation found in a document, not just the first.
class QueryError : public Error {
 public:
  explicit QueryError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Parses a command document such as
//   {"FindImage": {"constraints": {"age": [">=", 21, "<=", 40]},
//                  "operations": [{"type": "resize", "width": 400, "height": 500},
//                                 {"type": "remoteOp", "url": "http://w:9000/op",
//                                  "options": {"id": "facedetect"}}]},
//    "blob_count": 0}
// Top-level keys other than the verb, "blob_count" and "mode" are rejected.
Query validate_query(const nlohmann::json& raw);

nlohmann::json to_json(const OperationSpec& op);
OperationSpec operation_from_json(const nlohmann::json& j, std::size_t index);
nlohmann::json to_json(const Query& q);

}  // namespace vdq
