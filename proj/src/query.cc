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

#include "vdq/query.h"

#include <sstream>

#include "vdq/native_ops.h"

namespace vdq {

using nlohmann::json;

std::string to_string(ExecClass c) {
  switch (c) {
    case ExecClass::kNative: return "native";
    case ExecClass::kRemote: return "remote";
    case ExecClass::kUdf: return "udf";
  }
  return "?";
}

OperationSpec OperationSpec::native(std::string type, PropertyMap options) {
  return {std::move(type), ExecClass::kNative, std::move(options), {}, 0};
}

OperationSpec OperationSpec::remote(std::string type, std::string url, PropertyMap options) {
  return {std::move(type), ExecClass::kRemote, std::move(options), std::move(url), 0};
}

OperationSpec OperationSpec::udf(std::string type, int port, PropertyMap options) {
  return {std::move(type), ExecClass::kUdf, std::move(options), {}, port};
}

std::string to_string(Verb v) {
  switch (v) {
    case Verb::kAddImage: return "AddImage";
    case Verb::kAddVideo: return "AddVideo";
    case Verb::kFindImage: return "FindImage";
    case Verb::kFindVideo: return "FindVideo";
  }
  return "?";
}

bool is_add(Verb v) { return v == Verb::kAddImage || v == Verb::kAddVideo; }

MediaKind verb_kind(Verb v) {
  return (v == Verb::kAddImage || v == Verb::kFindImage) ? MediaKind::kImage
                                                         : MediaKind::kVideo;
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "; " : "") << parts[i];
  return os.str();
}

constexpr const char* kRemoteTag = "remoteOp";
constexpr const char* kUdfTag = "userOp";

// Collects problems instead of throwing on the first one.
class Validator {
 public:
  std::vector<std::string> problems;

  void fail(std::string msg) { problems.push_back(std::move(msg)); }

  std::vector<Constraint> constraints(const json& j) {
    std::vector<Constraint> out;
    if (!j.is_object()) {
      fail("constraints must be an object");
      return out;
    }
    for (const auto& [prop, spec] : j.items()) {
      if (prop.empty()) {
        fail("constraint property name must be non-empty");
        continue;
      }
      if (!spec.is_array() || spec.empty() || spec.size() % 2 != 0) {
        fail("constraint '" + prop + "' must be [op, value, ...] pairs");
        continue;
      }
      for (std::size_t i = 0; i < spec.size(); i += 2) {
        try {
          if (!spec[i].is_string()) throw Error("comparator must be a string");
          out.push_back(Constraint{prop, comparator_from_string(spec[i].get<std::string>()),
                                   metadata_from_json(spec[i + 1])});
        } catch (const Error& e) {
          fail("constraint '" + prop + "': " + e.what());
        }
      }
    }
    return out;
  }

  std::vector<OperationSpec> operations(const json& j) {
    std::vector<OperationSpec> out;
    if (!j.is_array()) {
      fail("operations must be an array");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      try {
        out.push_back(operation_from_json(j[i], i));
      } catch (const QueryError& e) {
        for (const auto& p : e.problems()) fail(p);
      }
    }
    return out;
  }
};

}  // namespace

QueryError::QueryError(std::vector<std::string> problems)
    : Error("invalid query: " + join(problems)), problems_(std::move(problems)) {}

OperationSpec operation_from_json(const json& j, std::size_t index) {
  const std::string where = "operation " + std::to_string(index);
  std::vector<std::string> problems;
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw QueryError({where + ": must be an object with a string \"type\""});
  }
  const auto tag = j["type"].get<std::string>();
  OperationSpec op;

  if (tag == kRemoteTag || tag == kUdfTag) {
    op.exec_class = tag == kRemoteTag ? ExecClass::kRemote : ExecClass::kUdf;
    json opts = j.value("options", json::object());
    if (!opts.is_object()) {
      problems.push_back(where + ": \"options\" must be an object");
      opts = json::object();
    }
    // The op name travels inside options as "id" ("udf_name" is accepted too).
    for (const char* key : {"id", "udf_name"}) {
      if (opts.contains(key)) {
        if (opts[key].is_string()) op.type = opts[key].get<std::string>();
        opts.erase(key);
      }
    }
    if (op.type.empty()) problems.push_back(where + " (" + tag + "): missing options.id");
    if (op.exec_class == ExecClass::kRemote) {
      if (!j.contains("url") || !j["url"].is_string() || j["url"].get<std::string>().empty()) {
        problems.push_back(where + " (remote " + op.type + "): missing \"url\"");
      } else {
        op.endpoint = j["url"].get<std::string>();
      }
    } else {
      json port = j.contains("port") ? j["port"] : opts.value("port", json());
      opts.erase("port");
      if (!port.is_number_integer() || port.get<std::int64_t>() <= 0 ||
          port.get<std::int64_t>() > 65535) {
        problems.push_back(where + " (udf " + op.type + "): missing or invalid \"port\"");
      } else {
        op.channel_port = port.get<int>();
      }
    }
    try {
      op.options = property_map_from_json(opts);
    } catch (const Error& e) {
      problems.push_back(where + ": " + e.what());
    }
  } else {
    op.exec_class = ExecClass::kNative;
    op.type = tag;
    const auto& registry = NativeOpRegistry::instance();
    if (!registry.contains(tag)) {
      problems.push_back(where + ": unknown native operation '" + tag + "'");
    } else {
      for (const auto& [k, v] : j.items()) {
        if (k == "type") continue;
        try {
          op.options.emplace(k, metadata_from_json(v));
        } catch (const Error& e) {
          problems.push_back(where + " (" + tag + "): option '" + k + "': " + e.what());
        }
      }
      for (const auto& req : registry.required_options(tag)) {
        if (!op.options.count(req)) {
          problems.push_back(where + " (" + tag + "): missing option '" + req + "'");
        }
      }
    }
  }
  if (!problems.empty()) throw QueryError(std::move(problems));
  return op;
}

Query validate_query(const json& raw) {
  Validator v;
  Query q;
  if (!raw.is_object()) throw QueryError({"query must be a JSON object"});

  std::string verb_key;
  for (const auto& [k, _] : raw.items()) {
    if (k == "blob_count" || k == "mode") continue;
    if (k == "AddImage" || k == "AddVideo" || k == "FindImage" || k == "FindVideo") {
      if (!verb_key.empty()) v.fail("more than one command in query");
      verb_key = k;
    } else {
      v.fail("unknown verb or field '" + k + "'");
    }
  }
  if (verb_key.empty()) {
    v.fail("missing command (AddImage, AddVideo, FindImage or FindVideo)");
    throw QueryError(std::move(v.problems));
  }
  q.verb = verb_key == "AddImage"    ? Verb::kAddImage
           : verb_key == "AddVideo"  ? Verb::kAddVideo
           : verb_key == "FindImage" ? Verb::kFindImage
                                     : Verb::kFindVideo;

  if (raw.contains("blob_count")) {
    const auto& bc = raw["blob_count"];
    if (!bc.is_number_unsigned() && !(bc.is_number_integer() && bc.get<std::int64_t>() >= 0)) {
      v.fail("blob_count must be a non-negative integer");
    } else {
      q.blob_count = bc.get<std::uint32_t>();
    }
  }

  const auto& body = raw[verb_key];
  if (!body.is_object()) {
    v.fail(verb_key + " body must be an object");
    throw QueryError(std::move(v.problems));
  }

  if (is_add(q.verb)) {
    for (const auto& [k, _] : body.items()) {
      if (k != "properties") v.fail(verb_key + ": unsupported field '" + k + "'");
    }
    if (body.contains("properties")) {
      try {
        q.properties = property_map_from_json(body["properties"]);
      } catch (const Error& e) {
        v.fail(verb_key + ": " + e.what());
      }
    }
    if (q.blob_count != 1) v.fail(verb_key + " requires exactly one blob");
  } else {
    for (const auto& [k, val] : body.items()) {
      if (k == "constraints") {
        q.constraints = v.constraints(val);
      } else if (k == "operations") {
        q.operations = v.operations(val);
      } else if (k == "results") {
        if (!val.is_object()) {
          v.fail("results must be an object");
        } else if (val.contains("blob")) {
          if (!val["blob"].is_boolean()) v.fail("results.blob must be a boolean");
          else q.return_blobs = val["blob"].get<bool>();
        }
      } else {
        v.fail(verb_key + ": unsupported field '" + k + "'");
      }
    }
    if (q.blob_count != 0) v.fail(verb_key + " takes no blobs");
  }

  if (!v.problems.empty()) throw QueryError(std::move(v.problems));
  return q;
}

json to_json(const OperationSpec& op) {
  json j;
  switch (op.exec_class) {
    case ExecClass::kNative:
      j = to_json(op.options);
      j["type"] = op.type;
      break;
    case ExecClass::kRemote:
      j["type"] = kRemoteTag;
      j["url"] = op.endpoint;
      j["options"] = to_json(op.options);
      j["options"]["id"] = op.type;
      break;
    case ExecClass::kUdf:
      j["type"] = kUdfTag;
      j["port"] = op.channel_port;
      j["options"] = to_json(op.options);
      j["options"]["id"] = op.type;
      break;
  }
  return j;
}

json to_json(const Query& q) {
  json body = json::object();
  if (is_add(q.verb)) {
    body["properties"] = to_json(q.properties);
  } else {
    json constraints = json::object();
    for (const auto& c : q.constraints) {
      auto& slot = constraints[c.property];
      if (slot.is_null()) slot = json::array();
      slot.push_back(to_string(c.comparator));
      slot.push_back(to_json(c.value));
    }
    body["constraints"] = constraints;
    json ops = json::array();
    for (const auto& op : q.operations) ops.push_back(to_json(op));
    body["operations"] = ops;
    body["results"] = {{"blob", q.return_blobs}};
  }
  return json{{to_string(q.verb), body}, {"blob_count", q.blob_count}};
}

}  // namespace vdq
